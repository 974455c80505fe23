#include "doctest.h"

#include "manet/runner.hpp"

using namespace manet;

namespace {

// two groups of four, far enough apart for separate grid cells
Scenario two_cluster_fixture() {
    Scenario s;
    s.algorithm = Algorithm::Hierarchy;
    s.nodes = 8;
    s.topo_kind = Scenario::TopoKind::Geometric;
    s.width = 1000;
    s.height = 200;
    s.radio_range = 100;
    s.placement_random = false;
    // cell (0,0): uids 1..4 mutually linked; cell (6,0): uids 5..8
    s.positions[1] = {10, 10};
    s.positions[2] = {40, 10};
    s.positions[3] = {10, 40};
    s.positions[4] = {40, 40};
    s.positions[5] = {610, 10};
    s.positions[6] = {640, 10};
    s.positions[7] = {610, 40};
    s.positions[8] = {640, 40};
    s.enh.clustering = true;
    s.enh.join_gating = true;
    s.hb_period = 10;
    s.hb_timeout = 35;
    s.hb_stagger = 16;
    s.horizon = 1000;
    return s;
}

} // namespace

TEST_CASE("all nodes in one cell: clustering degenerates to plain diffusion") {
    Scenario s;
    s.algorithm = Algorithm::Hierarchy;
    s.nodes = 4;
    s.topo_kind = Scenario::TopoKind::Geometric;
    s.width = s.height = 90;
    s.radio_range = 150;
    s.enh.clustering = true;
    s.hb_period = 10;
    s.hb_timeout = 35;
    s.horizon = 800;
    RunResult r = run_scenario(s);
    for (const auto& n : r.nodes) CHECK(n.leader == 4);
    CHECK(r.metrics.elections_completed >= 1);
}

TEST_CASE("two distant cells: intra-cluster elections then a global announce") {
    RunResult r = run_scenario(two_cluster_fixture());
    // the two components are disjoint, so each settles on its own maximum
    for (const auto& n : r.nodes) {
        if (n.uid <= 4) CHECK(n.leader == 4);
        else CHECK(n.leader == 8);
    }
    CHECK(r.metrics.elections_completed >= 2);
}

TEST_CASE("two cells bridged: the max-criterion cluster leader becomes global leader") {
    Scenario s = two_cluster_fixture();
    // a chain of cells bridges the left quad to the far nodes:
    // {1..4} cell 0 - 9 cell 1 - 10 cell 2 - 5 cell 3 - 6 cell 4 - {7,8} cell 5
    s.nodes = 10;
    s.positions[9] = {130, 25};
    s.positions[10] = {230, 25};
    s.positions[5] = {320, 10};
    s.positions[6] = {420, 10};
    s.positions[7] = {500, 40};
    s.positions[8] = {580, 40};
    s.horizon = 2500;
    RunResult r = run_scenario(s);
    // whatever the cluster layout, the component-wide winner must be uid 10's
    // component argmax; all connected nodes agree
    // (components computed by the kernel; just assert one leader per component)
    for (const auto& comp : r.components) {
        Uid max_uid = 0;
        for (NodeId id : comp) max_uid = std::max<Uid>(max_uid, id + 1);
        for (NodeId id : comp) CHECK(r.nodes[id].leader == max_uid);
    }
}

TEST_CASE("hello from another cell is denied") {
    Scenario s;
    s.algorithm = Algorithm::Hierarchy;
    s.nodes = 2;
    s.topo_kind = Scenario::TopoKind::Geometric;
    s.width = 400;
    s.height = 100;
    s.radio_range = 100;
    s.placement_random = false;
    s.positions[1] = {99, 10};  // cell 0
    s.positions[2] = {101, 10}; // cell 1, still within radio range
    s.hb_period = 10;
    s.hb_timeout = 35;
    s.horizon = 1500;
    s.explicit_faults = {{2, true, 300}, {2, false, 600}};
    RunResult r = run_scenario(s);
    CHECK(r.metrics.cluster_denied >= 1);
}

TEST_CASE("join gating: a hello during the election is deferred, then admitted") {
    Scenario s;
    s.algorithm = Algorithm::Hierarchy;
    s.nodes = 5;
    s.topo_kind = Scenario::TopoKind::Geometric;
    s.width = s.height = 90; // one cell
    s.radio_range = 150;
    s.placement_random = false;
    s.positions[1] = {10, 10};
    s.positions[2] = {30, 10};
    s.positions[3] = {50, 10};
    s.positions[4] = {70, 10};
    s.positions[5] = {40, 40};
    s.enh.clustering = true;
    s.enh.join_gating = true;
    s.hb_period = 10;
    s.hb_timeout = 40;
    s.hb_stagger = 0;
    s.d_min = 2;
    s.d_max = 3; // slow the wave so the recovery hello lands mid-election
    s.horizon = 3000;
    // the leader crashes; its recovery hello lands inside the re-election
    s.explicit_faults = {{5, true, 500}, {5, false, 545}};
    RunResult r = run_scenario(s);
    CHECK(r.metrics.hellos_deferred >= 1);
    // deferral soundness: the deferred sender appears in the member sets
    // once the election finishes
    std::size_t admitted = 0;
    for (const auto& n : r.nodes) {
        if (n.uid == 5) continue;
        for (Uid m : n.members)
            if (m == 5) admitted++;
    }
    CHECK(admitted >= 1);
    for (const auto& n : r.nodes) CHECK(n.leader == 5);
}

TEST_CASE("gating off: hellos are processed immediately") {
    Scenario s;
    s.algorithm = Algorithm::Hierarchy;
    s.nodes = 3;
    s.topo_kind = Scenario::TopoKind::Geometric;
    s.width = s.height = 90;
    s.radio_range = 150;
    s.enh.clustering = true;
    s.enh.join_gating = false;
    s.hb_period = 10;
    s.hb_timeout = 35;
    s.horizon = 1500;
    s.explicit_faults = {{1, true, 300}, {1, false, 600}};
    RunResult r = run_scenario(s);
    CHECK(r.metrics.hellos_deferred == 0);
    for (const auto& n : r.nodes) CHECK(n.leader == 3);
}
