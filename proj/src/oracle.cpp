#include "manet/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace manet {

SimTime stability_window(const Scenario& scn) {
    SimTime n = static_cast<SimTime>(scn.nodes);
    if (scn.algorithm == Algorithm::MasterSlave)
        return (static_cast<SimTime>(scn.tuple_ttl) + 2 * n + 8) * scn.round_period;
    return scn.hb_timeout + scn.hb_stagger + 2 * scn.hb_period + 4 * scn.d_max * (n + 8) + 64;
}

std::vector<OracleVerdict> check_safety(const RunResult& res, const Scenario& scn) {
    // last input disturbance per node: crash/recover/link change
    std::vector<SimTime> last_change(res.nodes.size(), 0);
    for (const auto& ev : res.log) {
        switch (ev.type) {
            case SemanticEvent::Type::Crash:
            case SemanticEvent::Type::Recover:
                last_change[ev.node - 1] = std::max(last_change[ev.node - 1], ev.t);
                break;
            case SemanticEvent::Type::LinkChange:
                last_change[ev.node - 1] = std::max(last_change[ev.node - 1], ev.t);
                if (ev.a >= 1 && ev.a <= last_change.size())
                    last_change[ev.a - 1] = std::max(last_change[ev.a - 1], ev.t);
                break;
            default:
                break;
        }
    }
    SimTime window = stability_window(scn);
    Rational v_max = scn.mobility.kind == MobilityKind::Static ? Rational(0)
                                                               : Rational(scn.mobility.v_max);

    std::vector<OracleVerdict> out;
    for (const auto& comp : res.components) {
        OracleVerdict v;
        CriterionValue best;
        bool have_best = false;
        SimTime latest = 0;
        std::set<Uid> observed;
        for (NodeId id : comp) {
            const auto& snap = res.nodes[id];
            v.component.push_back(snap.uid);
            CriterionValue cv = criterion(snap.uid, snap.battery, snap.mobility, v_max,
                                          scn.w_b, scn.w_m, scn.crit_mode);
            if (!have_best || cv > best) { best = cv; have_best = true; }
            observed.insert(snap.leader);
            latest = std::max(latest, last_change[id]);
        }
        v.expected_leader = best.uid;
        v.observed.assign(observed.begin(), observed.end());
        v.pass = observed.size() == 1 && *observed.begin() == v.expected_leader;
        // untouched components are stable however short the run
        v.stable = latest == 0 || res.end_time >= latest + window;
        out.push_back(std::move(v));
    }
    return out;
}

LinearVerdict validate_linear_bound(const std::vector<std::pair<std::size_t, double>>& series) {
    if (series.size() < 3) throw InsufficientSamples();
    LinearVerdict v;
    std::vector<double> ratios;
    for (const auto& [n, msgs] : series) {
        if (n == 0) throw InsufficientSamples();
        ratios.push_back(msgs / static_cast<double>(n));
    }
    double mean = 0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    v.mean_ratio = mean;
    v.worst_deviation = 0;
    for (double r : ratios)
        v.worst_deviation = std::max(v.worst_deviation, std::abs(r - mean) / mean);
    v.pass = v.worst_deviation <= 0.25;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (i) v.detail += ' ';
        v.detail += std::to_string(series[i].first) + ":" + std::to_string(ratios[i]);
    }
    return v;
}

AliVerdict validate_ali_formula(const RunResult& res, std::uint64_t oracle_expected) {
    AliVerdict v;
    v.oracle_expected = oracle_expected;

    // PMP structure symbols from the final topology
    for (std::size_t i = 0; i < res.nodes.size(); ++i) {
        if (res.nodes[i].role == "pmp") {
            v.pmp_count++;
            v.pmp_degree_sum += res.adjacency[i].size();
        }
    }
    v.predicted = v.pmp_count == 0 ? 0 : 2 * (v.pmp_degree_sum - v.pmp_count) + 1;

    // winner: the leader the alive nodes agree on
    Uid winner = 0;
    for (const auto& s : res.nodes)
        if (s.alive && s.leader != 0) { winner = s.leader; break; }
    struct Learn {
        SimTime t = 0;
        std::uint64_t send_id = 0;
        Uid sender = 0;
        bool seen = false;
    };
    std::map<Uid, Learn> first_learn;
    Uid last_learner = 0;
    SimTime last_t = 0;
    for (const auto& ev : res.log) {
        if (ev.type != SemanticEvent::Type::TupleLearn || ev.a != winner) continue;
        auto& l = first_learn[ev.node];
        if (l.seen) continue;
        l = {ev.t, ev.b, static_cast<Uid>(ev.c), true};
        if (ev.t >= last_t) { last_t = ev.t; last_learner = ev.node; }
    }
    std::set<std::uint64_t> sends;
    Uid cur = last_learner;
    std::set<Uid> guard;
    while (cur != 0 && cur != winner && guard.insert(cur).second) {
        auto it = first_learn.find(cur);
        if (it == first_learn.end() || it->second.send_id == 0) break;
        sends.insert(it->second.send_id);
        cur = it->second.sender;
    }
    v.measured_chain = sends.size();
    v.pass = v.measured_chain == v.oracle_expected;
    v.formula_matches = v.oracle_expected == v.predicted;
    return v;
}

std::uint32_t convergence_round(const RunResult& res, SimTime round_period) {
    Uid winner = 0;
    for (const auto& s : res.nodes)
        if (s.alive && s.leader != 0) { winner = s.leader; break; }
    SimTime last = 0;
    for (const auto& ev : res.log)
        if (ev.type == SemanticEvent::Type::TupleLearn && ev.a == winner)
            last = std::max(last, ev.t);
    if (round_period == 0) return 0;
    return static_cast<std::uint32_t>((last + round_period - 1) / round_period);
}

ComplexityClaim analyze_complexity(const RunResult& res) {
    ComplexityClaim c;
    c.n = res.nodes.size();
    c.messages = res.metrics.election_traffic();
    if (res.elections.empty()) return c;
    const ElectionRecord* last = nullptr;
    for (const auto& e : res.elections)
        if (e.winner != 0) last = &e;
    if (!last) return c;
    c.logical_steps = last->logical_steps;
    c.ticks = last->last_install_at - last->triggered_at;
    std::set<Uid> participants{last->starter_uid};
    for (const auto& ev : res.log)
        if (ev.type == SemanticEvent::Type::ParentSet && ev.b == last->starter_uid)
            participants.insert(ev.node);
    c.participating = participants.size();
    double deg = 0;
    for (Uid u : participants) deg += static_cast<double>(res.adjacency[u - 1].size());
    c.avg_neighbors = participants.empty() ? 0 : deg / static_cast<double>(participants.size());
    return c;
}

std::string verdicts_jsonl(const std::vector<OracleVerdict>& vs) {
    std::string out;
    for (const auto& v : vs) {
        out += "{\"component\":[";
        for (std::size_t i = 0; i < v.component.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(v.component[i]);
        }
        out += "],\"expected\":" + std::to_string(v.expected_leader);
        out += ",\"observed\":[";
        for (std::size_t i = 0; i < v.observed.size(); ++i) {
            if (i) out += ',';
            out += std::to_string(v.observed[i]);
        }
        out += "],\"pass\":";
        out += v.pass ? "true" : "false";
        out += ",\"stable\":";
        out += v.stable ? "true" : "false";
        out += "}\n";
    }
    return out;
}

} // namespace manet
