#include "manet/fault.hpp"

#include <algorithm>
#include <map>

namespace manet {

std::vector<FaultEvent> build_fault_schedule(const Scenario& scn, RngStream& faults_rng) {
    std::vector<FaultEvent> out;
    for (const auto& f : scn.explicit_faults) out.push_back({f.uid, f.crash, f.time});

    const FaultPlanConfig& plan = scn.fault_plan;
    if (plan.enabled && plan.epochs > 0) {
        SimTime epoch_len = plan.epoch_len;
        SimTime start = plan.start ? plan.start : epoch_len;
        SimTime downtime = plan.downtime ? plan.downtime : epoch_len;

        std::vector<bool> planned_alive(scn.nodes, true);
        // recovery time per crashed node, applied when boundaries pass it
        std::map<Uid, SimTime> down_until;

        for (std::uint32_t e = 0; e < plan.epochs; ++e) {
            SimTime boundary = start + e * epoch_len;
            for (auto it = down_until.begin(); it != down_until.end();) {
                if (it->second <= boundary) {
                    planned_alive[it->first - 1] = true;
                    it = down_until.erase(it);
                } else {
                    ++it;
                }
            }
            // the planner's notion of the leader: highest-uid alive node
            Uid leader = 0;
            for (std::size_t i = scn.nodes; i-- > 0;) {
                if (planned_alive[i]) { leader = static_cast<Uid>(i + 1); break; }
            }
            std::vector<Uid> victims;
            if (leader != 0 && faults_rng.bernoulli(plan.leader_inclusion)) victims.push_back(leader);
            for (Uid u = 1; u <= scn.nodes; ++u) {
                if (u == leader || !planned_alive[u - 1]) continue;
                if (faults_rng.bernoulli(plan.rate)) victims.push_back(u);
            }
            std::sort(victims.begin(), victims.end());
            for (Uid u : victims) {
                out.push_back({u, true, boundary});
                out.push_back({u, false, boundary + downtime});
                planned_alive[u - 1] = false;
                down_until[u] = boundary + downtime;
            }
        }
    }

    std::stable_sort(out.begin(), out.end(), [](const FaultEvent& a, const FaultEvent& b) {
        if (a.time != b.time) return a.time < b.time;
        if (a.crash != b.crash) return !a.crash; // recoveries first at a shared tick
        return a.uid < b.uid;
    });
    validate_fault_schedule(out, scn.nodes);
    return out;
}

void validate_fault_schedule(const std::vector<FaultEvent>& schedule, std::size_t n_nodes) {
    std::vector<int> state(n_nodes, 0); // 0 alive, 1 crashed
    SimTime prev = 0;
    for (const auto& f : schedule) {
        if (f.time < prev) throw InvalidTransition("fault schedule not sorted by time");
        prev = f.time;
        if (f.uid == 0 || f.uid > n_nodes)
            throw InvalidTransition("fault schedule names unknown node uid " + std::to_string(f.uid));
        int& s = state[f.uid - 1];
        if (f.crash) {
            if (s == 1) throw InvalidTransition("crash of already-crashed node " + std::to_string(f.uid));
            s = 1;
        } else {
            if (s == 0) throw InvalidTransition("recover of alive node " + std::to_string(f.uid));
            s = 0;
        }
    }
}

} // namespace manet
