#include "manet/genscn.hpp"

#include <algorithm>
#include <cmath>

#include "manet/oracle.hpp"
#include "manet/rng.hpp"
#include "manet/topology.hpp"

namespace manet {

namespace {

// chain of k masters, every slave homed on two adjacent masters, first-cycle
// slaves triple-homed so a master crash never splits the master path
void scatternet_links(Scenario& s, std::size_t n, std::size_t k) {
    std::size_t slaves = n - k;
    auto master_uid = [&](std::size_t j) { return static_cast<Uid>(slaves + j); }; // j in 1..k
    for (std::size_t j = 1; j <= k; ++j) s.masters.push_back(master_uid(j));
    for (std::size_t j = 1; j <= slaves; ++j) {
        Uid su = static_cast<Uid>(j);
        std::size_t pair = k > 1 ? 1 + (j - 1) % (k - 1) : 1;
        s.links.push_back({su, master_uid(pair)});
        if (k > 1) s.links.push_back({su, master_uid(pair + 1)});
        if (j + 2 <= k) s.links.push_back({su, master_uid(j + 2)});
    }
}

constexpr SimTime fault_time = 800;
constexpr SimTime fault_recover = 1600;

} // namespace

Scenario safety_scenario(Algorithm algo, std::size_t n, bool mobile, FaultKind faults,
                         std::uint64_t seed) {
    // half the mobile runs settle (nodes park at their first waypoint), so
    // the safety oracle also gets stable-at-the-end mobile components
    bool settling = mobile && (seed % 2) == 0;
    Scenario s;
    s.algorithm = algo;
    s.nodes = n;
    s.seed = seed;
    s.name = std::string(to_string(algo)) + "_n" + std::to_string(n) +
             (mobile ? (settling ? "_mobile_settling" : "_mobile") : "_static") +
             (faults == FaultKind::None ? "_clean"
              : faults == FaultKind::NonLeaderCrashes ? "_crash" : "_leadercrash") +
             "_s" + std::to_string(seed);
    s.crit_mode = CriterionMode::UidOnly;

    if (algo == Algorithm::MasterSlave) {
        std::size_t k = std::max<std::size_t>(2, n / 5);
        if (mobile) {
            // a dense wandering blob: piconets overlap, links at the rim flap
            s.topo_kind = Scenario::TopoKind::Geometric;
            s.width = s.height = 260;
            s.radio_range = 260;
            s.mobility.kind = MobilityKind::RandomWaypoint;
            s.mobility.v_min = 1;
            s.mobility.v_max = 3;
            s.mobility.p_min = settling ? 1000000 : 5;
            s.mobility.p_max = settling ? 1000000 : 25;
            s.mobility.step_period = 5;
            for (std::size_t j = 0; j < k; ++j)
                s.masters.push_back(static_cast<Uid>(n - j));
        } else {
            s.topo_kind = Scenario::TopoKind::Explicit;
            scatternet_links(s, n, k);
        }
        s.hb_period = 0;
        s.round_period = 12;
        s.tuple_ttl = 24;
        s.enh.invitation = true;
        s.fifo = true; // reliable synchronous piconet channels
    } else {
        s.topo_kind = Scenario::TopoKind::Geometric;
        s.width = s.height = n <= 10 ? 380 : n <= 50 ? 700 : 950;
        s.radio_range = 150;
        if (mobile) {
            s.mobility.kind = MobilityKind::RandomWaypoint;
            s.mobility.v_min = 1;
            s.mobility.v_max = 3;
            s.mobility.p_min = settling ? 1000000 : 5;
            s.mobility.p_max = settling ? 1000000 : 25;
            s.mobility.step_period = 5;
        }
        s.hb_period = 10;
        s.hb_timeout = 35;
        s.hb_stagger = 64;
        s.hb_flood = true;
        if (algo == Algorithm::Candidates) s.fifo = true;
        if (algo == Algorithm::Hierarchy) {
            s.enh.clustering = true;
            s.enh.join_gating = true;
        }
    }

    if (faults == FaultKind::NonLeaderCrashes) {
        s.explicit_faults.push_back({1, true, fault_time});
        s.explicit_faults.push_back({2, true, fault_time});
        s.explicit_faults.push_back({1, false, fault_recover});
        s.explicit_faults.push_back({2, false, fault_recover});
    } else if (faults == FaultKind::LeaderCrash) {
        // uid-only criterion: the initial leader is the highest uid
        s.explicit_faults.push_back({static_cast<Uid>(n), true, fault_time});
        s.explicit_faults.push_back({static_cast<Uid>(n), false, fault_recover});
    }

    SimTime last_fault = faults == FaultKind::None ? 0 : fault_recover;
    SimTime park = settling ? 2 * static_cast<SimTime>(s.width + s.height) : 0;
    s.horizon = last_fault + park + stability_window(s) + 600;
    return s;
}

std::vector<Scenario> safety_suite(std::size_t count) {
    std::vector<Scenario> out;
    const Algorithm algos[] = {Algorithm::Diffusion, Algorithm::Candidates, Algorithm::Hierarchy,
                               Algorithm::MasterSlave};
    const std::size_t sizes[] = {10, 50, 100};
    const FaultKind fks[] = {FaultKind::None, FaultKind::NonLeaderCrashes, FaultKind::LeaderCrash};
    std::uint64_t seed = 1000;
    std::size_t i = 0;
    while (out.size() < count) {
        Algorithm a = algos[i % 4];
        std::size_t n = sizes[(i / 4) % 3];
        bool mobile = ((i / 12) % 2) == 1;
        FaultKind fk = fks[(i / 24) % 3];
        out.push_back(safety_scenario(a, n, mobile, fk, seed++));
        ++i;
    }
    return out;
}

Scenario extrema_scenario(Algorithm algo, std::uint64_t seed) {
    Scenario s;
    s.algorithm = algo;
    s.nodes = 16;
    s.seed = seed;
    s.name = std::string("extrema_") + to_string(algo) + "_s" + std::to_string(seed);
    s.crit_mode = CriterionMode::Composite;
    s.battery_min = Rational(3, 10);
    s.battery_max = Rational(1);

    if (algo == Algorithm::MasterSlave) {
        s.topo_kind = Scenario::TopoKind::Explicit;
        scatternet_links(s, s.nodes, 4);
        s.hb_period = 0;
        s.round_period = 12;
        s.enh.invitation = true;
        s.fifo = true;
    } else {
        // place nodes ourselves and retry until the disk graph is connected
        s.topo_kind = Scenario::TopoKind::Geometric;
        s.width = s.height = 420;
        s.radio_range = 150;
        s.placement_random = false;
        RngStream rng(seed, "genscn-extrema");
        for (int attempt = 0; attempt < 128; ++attempt) {
            s.positions.clear();
            std::vector<Position> pos(s.nodes);
            for (std::size_t i = 0; i < s.nodes; ++i) {
                pos[i].x = static_cast<std::int32_t>(rng.uniform(0, s.width));
                pos[i].y = static_cast<std::int32_t>(rng.uniform(0, s.height));
            }
            std::vector<std::vector<NodeId>> adj(s.nodes);
            std::int64_t r2 = s.radio_range * s.radio_range;
            for (NodeId a = 0; a < s.nodes; ++a)
                for (NodeId b = a + 1; b < s.nodes; ++b)
                    if (dist2(pos[a], pos[b]) <= r2) {
                        adj[a].push_back(b);
                        adj[b].push_back(a);
                    }
            std::vector<bool> alive(s.nodes, true);
            if (components_by_bfs(s.nodes, alive, adj).size() == 1) {
                for (std::size_t i = 0; i < s.nodes; ++i)
                    s.positions[static_cast<Uid>(i + 1)] = pos[i];
                break;
            }
        }
        if (s.positions.empty()) throw SimError("could not place a connected extrema graph");
        s.hb_period = 10;
        s.hb_timeout = 35;
        s.hb_stagger = 64;
        if (algo == Algorithm::Candidates) {
            s.fifo = true;
            s.enh.candidate_criteria = true;
        }
        if (algo == Algorithm::Hierarchy) {
            s.enh.clustering = true;
            s.enh.join_gating = true;
        }
    }
    s.horizon = stability_window(s) + 600;
    return s;
}

Scenario ali_fixture(std::size_t pmp_count, std::uint64_t seed) {
    Scenario s;
    s.algorithm = Algorithm::MasterSlave;
    s.seed = seed;
    s.name = "ali_p" + std::to_string(pmp_count);
    s.topo_kind = Scenario::TopoKind::Explicit;
    s.crit_mode = CriterionMode::UidOnly;
    s.hb_period = 0;
    s.round_period = 12;
    s.fifo = true;

    // A + P_1..P_P + M_1..M_{P+1}; the winner M_{P+1} holds the highest uid
    std::size_t masters = pmp_count + 1;
    s.nodes = 1 + pmp_count + masters;
    Uid a = 1;
    auto pmp_uid = [&](std::size_t i) { return static_cast<Uid>(1 + i); };            // 1..P
    auto master_uid = [&](std::size_t j) { return static_cast<Uid>(1 + pmp_count + j); };
    for (std::size_t j = 1; j <= masters; ++j) s.masters.push_back(master_uid(j));
    s.links.push_back({a, master_uid(1)});
    for (std::size_t i = 1; i <= pmp_count; ++i) {
        s.links.push_back({pmp_uid(i), master_uid(i)});
        s.links.push_back({pmp_uid(i), master_uid(i + 1)});
    }
    s.horizon = s.round_period * (2 * static_cast<SimTime>(pmp_count) + 10) + 60;
    return s;
}

std::uint64_t ali_fixture_expected_chain(std::size_t pmp_count) {
    // hand enumeration: the winning tuple leaves its master through one
    // exchange, then each further piconet costs a PMP reply plus a piconet
    // broadcast: 1 + 2*P messages, matching 2*(sum d(i) - P) + 1 with d=2
    return 2 * static_cast<std::uint64_t>(pmp_count) + 1;
}

} // namespace manet
