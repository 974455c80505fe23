#include "doctest.h"

#include "manet/rng.hpp"
#include "manet/topology.hpp"

using namespace manet;

namespace {

Topology disk(std::vector<Position> pos, std::int64_t r, MobilityConfig mob = {}) {
    Topology t;
    std::size_t n = pos.size();
    t.init_geometric(n, 1000, 1000, r, std::move(pos), mob);
    return t;
}

std::vector<bool> all_alive(std::size_t n) { return std::vector<bool>(n, true); }

} // namespace

TEST_CASE("unit-disk links: boundary inclusive, symmetric") {
    Topology t = disk({{0, 0}, {100, 0}, {201, 0}}, 100);
    t.recompute(all_alive(3));
    CHECK(t.has_link(0, 1));       // exactly at range
    CHECK(t.has_link(1, 0));
    CHECK_FALSE(t.has_link(0, 2)); // 201 > 100+100? distance(0,2)=201 > 100
    CHECK(!t.has_link(1, 2));      // 101 > 100
}

TEST_CASE("three collinear nodes A-B-C with |AB|=|BC|=R form one component") {
    Topology t = disk({{0, 0}, {100, 0}, {200, 0}}, 100);
    t.recompute(all_alive(3));
    CHECK(t.components().size() == 1);
    CHECK(t.components()[0] == std::vector<NodeId>{0, 1, 2});
    CHECK_FALSE(t.has_link(0, 2)); // 2R apart
}

TEST_CASE("single alive node forms a singleton component") {
    Topology t = disk({{5, 5}}, 50);
    t.recompute(all_alive(1));
    REQUIRE(t.components().size() == 1);
    CHECK(t.components()[0] == std::vector<NodeId>{0});
}

TEST_CASE("dead node drops out of links and components") {
    Topology t = disk({{0, 0}, {50, 0}}, 100);
    std::vector<bool> alive{true, true};
    t.recompute(alive);
    CHECK(t.has_link(0, 1));
    alive[1] = false;
    auto delta = t.recompute(alive);
    REQUIRE(delta.size() == 1);
    CHECK_FALSE(delta[0].up);
    REQUIRE(t.components().size() == 1);
    CHECK(t.components()[0] == std::vector<NodeId>{0});
}

TEST_CASE("components match brute-force reachability on random graphs") {
    RngStream rng(99, "test");
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = static_cast<std::size_t>(rng.uniform(1, 40));
        std::vector<Position> pos(n);
        for (auto& p : pos) {
            p.x = static_cast<std::int32_t>(rng.uniform(0, 400));
            p.y = static_cast<std::int32_t>(rng.uniform(0, 400));
        }
        Topology t = disk(std::move(pos), 120);
        std::vector<bool> alive(n);
        for (std::size_t i = 0; i < n; ++i) alive[i] = rng.uniform(0, 9) > 1;
        t.recompute(alive);
        std::vector<std::vector<NodeId>> adj(n);
        for (NodeId v = 0; v < n; ++v) adj[v] = t.neighbors(v);
        CHECK(t.components() == components_by_bfs(n, alive, adj));
    }
}

TEST_CASE("link delta reports exactly the changed pairs") {
    Topology t = disk({{0, 0}, {90, 0}, {300, 0}}, 100);
    t.recompute(all_alive(3));
    auto d = t.recompute(all_alive(3));
    CHECK(d.empty());
}

TEST_CASE("static mobility never changes positions or emits samples") {
    MobilityConfig mob;
    mob.kind = MobilityKind::Static;
    Topology t = disk({{10, 10}, {20, 20}}, 100, mob);
    t.recompute(all_alive(2));
    RngStream rng(1, "mobility");
    for (SimTime now = 1; now <= 50; ++now) t.step_mobility(now, all_alive(2), rng);
    CHECK(t.position(0) == Position{10, 10});
    CHECK(t.mobility_value(0, 50) == Rational(0));
}

TEST_CASE("waypoint approach: LinkUp exactly when distance reaches R") {
    // node 1 walks head-on towards node 0 at speed 1; hand-computed positions
    // say the link appears exactly when x drops from 101 to 100
    MobilityConfig mob;
    mob.kind = MobilityKind::RandomWaypoint;
    mob.v_min = mob.v_max = 1;
    mob.p_min = mob.p_max = 1000000; // park after the first waypoint
    mob.step_period = 1;
    Topology t;
    t.init_geometric(2, 1000, 1000, 100, {{0, 0}, {201, 0}}, mob);
    t.recompute(all_alive(2));
    CHECK_FALSE(t.has_link(0, 1));
    t.force_waypoint(0, {0, 0}, 1); // node 0 parks immediately
    t.force_waypoint(1, {0, 0}, 1);
    RngStream rng(7, "mobility");
    for (SimTime now = 1; now <= 100; ++now) {
        t.step_mobility(now, all_alive(2), rng);
        t.recompute(all_alive(2));
        CHECK_FALSE(t.has_link(0, 1)); // distance 201-now is still > 100
    }
    t.step_mobility(101, all_alive(2), rng);
    t.recompute(all_alive(2));
    CHECK(t.position(1) == Position{100, 0});
    CHECK(t.has_link(0, 1));
    // straight motion at constant speed: the windowed mean equals the speed
    CHECK(t.mobility_value(1, 100) == Rational(1));
}

TEST_CASE("mobility metric: move then pause averages over the window") {
    // 10 ticks at speed 3 to the waypoint, then pause 10, window 20 -> 1.5
    MobilityConfig mob;
    mob.kind = MobilityKind::RandomWaypoint;
    mob.v_min = mob.v_max = 3;
    mob.p_min = mob.p_max = 10;
    mob.step_period = 1;
    mob.metric_window = 20;
    Topology t;
    t.init_geometric(1, 100, 40, 10, {{0, 20}}, mob);
    t.recompute(all_alive(1));
    t.force_waypoint(0, {30, 20}, 3);
    RngStream rng(7, "mobility");
    for (SimTime now = 1; now <= 20; ++now) t.step_mobility(now, all_alive(1), rng);
    CHECK(t.position(0) == Position{30, 20});
    CHECK(t.mobility_value(0, 20) == Rational(3, 2));
    // the metric never exceeds v_max
    CHECK(t.mobility_value(0, 20) <= Rational(mob.v_max));
}

TEST_CASE("mobility determinism: same seed, same position history") {
    MobilityConfig mob;
    mob.kind = MobilityKind::RandomWaypoint;
    mob.v_min = 1;
    mob.v_max = 4;
    mob.p_min = 2;
    mob.p_max = 9;
    mob.step_period = 1;
    auto run_positions = [&](std::uint64_t seed) {
        Topology t = disk({{10, 10}, {200, 200}, {390, 40}}, 120, mob);
        t.recompute(all_alive(3));
        RngStream rng(seed, "mobility");
        std::vector<Position> history;
        for (SimTime now = 1; now <= 200; ++now) {
            t.step_mobility(now, all_alive(3), rng);
            for (NodeId v = 0; v < 3; ++v) history.push_back(t.position(v));
        }
        return history;
    };
    CHECK(run_positions(42) == run_positions(42));
    CHECK(run_positions(42) != run_positions(43));
}

TEST_CASE("cluster cell: floor convention, boundary belongs to the upper cell") {
    Topology t = disk({{200, 50}, {199, 50}, {0, 0}}, 100);
    t.recompute(all_alive(3));
    CHECK(t.cluster_of(0) == ClusterId{2, 0}); // x = 2R exactly -> cell 2
    CHECK(t.cluster_of(1) == ClusterId{1, 0});
    CHECK(t.cluster_of(2) == ClusterId{0, 0});
}

TEST_CASE("explicit topology ignores geometry") {
    Topology t;
    t.init_explicit(4, {{0, 1}, {1, 2}, {2, 3}});
    t.recompute(all_alive(4));
    CHECK(t.has_link(0, 1));
    CHECK(t.has_link(2, 3));
    CHECK_FALSE(t.has_link(0, 3));
    CHECK(t.components().size() == 1);
}
