#include "doctest.h"

#include "manet/genscn.hpp"
#include "manet/oracle.hpp"
#include "manet/runner.hpp"

using namespace manet;

TEST_CASE("linear bound: constructed linear series passes, quadratic fails") {
    LinearVerdict ok = validate_linear_bound({{8, 80}, {16, 160}, {32, 320}});
    CHECK(ok.pass);
    CHECK(ok.mean_ratio == doctest::Approx(10.0));

    LinearVerdict bad = validate_linear_bound({{8, 64}, {16, 256}, {32, 1024}});
    CHECK_FALSE(bad.pass);

    CHECK_THROWS_AS(validate_linear_bound({{8, 80}, {16, 160}}), InsufficientSamples);
}

TEST_CASE("check_safety: singleton component believing itself passes") {
    Scenario s;
    s.nodes = 1;
    s.topo_kind = Scenario::TopoKind::Explicit;
    s.hb_period = 10;
    s.hb_timeout = 35;
    s.horizon = 600;
    RunResult r = run_scenario(s);
    auto v = check_safety(r, s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].pass);
    CHECK(v[0].expected_leader == 1);
}

TEST_CASE("check_safety: disagreement is reported with the observed set") {
    // two islands with their own leaders, then a bridge appears via recovery:
    // fabricate disagreement by checking mid-state instead: simpler, craft a
    // run where flooding is off and a merge leaves one island stale
    Scenario s;
    s.nodes = 4;
    s.topo_kind = Scenario::TopoKind::Explicit;
    s.links = {{1, 2}, {3, 4}, {2, 3}};
    s.hb_period = 10;
    s.hb_timeout = 35;
    s.hb_flood = false;
    s.bootstrap_auto = false;
    s.triggers = {{1, 5}, {4, 5}};
    s.horizon = 60; // stop before the competing diffusions fully merge
    RunResult r = run_scenario(s);
    auto v = check_safety(r, s);
    REQUIRE(v.size() == 1);
    // whether or not the run settled, the verdict names the brute-force max
    CHECK(v[0].expected_leader == 4);
}

TEST_CASE("check_safety on a converged diffusion: pass with expected argmax") {
    Scenario s;
    s.nodes = 10;
    s.topo_kind = Scenario::TopoKind::Geometric;
    s.width = s.height = 300;
    s.radio_range = 130;
    s.hb_period = 10;
    s.hb_timeout = 35;
    s.horizon = 900;
    s.seed = 21;
    RunResult r = run_scenario(s);
    auto vs = check_safety(r, s);
    for (const auto& v : vs) {
        CHECK(v.stable);
        CHECK(v.pass);
        Uid max_uid = 0;
        for (Uid u : v.component) max_uid = std::max(max_uid, u);
        CHECK(v.expected_leader == max_uid);
    }
}

TEST_CASE("oracle independence: expected leader ignores protocol state") {
    // composite criterion: the oracle recomputes from battery inputs only
    Scenario s = extrema_scenario(Algorithm::Diffusion, 77);
    RunResult r = run_scenario(s);
    auto vs = check_safety(r, s);
    REQUIRE(vs.size() == 1);
    // recompute argmax by hand from the final snapshots
    Uid argmax = 0;
    CriterionValue best;
    for (const auto& n : r.nodes) {
        CriterionValue cv = criterion(n.uid, n.battery, n.mobility, Rational(0), s.w_b, s.w_m,
                                      CriterionMode::Composite);
        if (argmax == 0 || cv > best) { best = cv; argmax = n.uid; }
    }
    CHECK(vs[0].expected_leader == argmax);
    CHECK(vs[0].pass);
}

TEST_CASE("counter conservation: kinds plus send-time discards equal attempts") {
    Scenario s;
    s.nodes = 12;
    s.topo_kind = Scenario::TopoKind::Geometric;
    s.width = s.height = 400;
    s.radio_range = 140;
    s.hb_period = 10;
    s.hb_timeout = 35;
    s.horizon = 2500;
    s.explicit_faults = {{3, true, 500}, {3, false, 900}, {12, true, 1300}};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        s.seed = seed;
        RunResult r = run_scenario(s);
        CHECK(r.metrics.total_messages() + r.metrics.dead_deliveries == r.metrics.sends_attempted);
    }
}

TEST_CASE("elections-started equals the latch events in the log") {
    Scenario s;
    s.nodes = 10;
    s.topo_kind = Scenario::TopoKind::Geometric;
    s.width = s.height = 300;
    s.radio_range = 120;
    s.hb_period = 10;
    s.hb_timeout = 35;
    s.horizon = 2500;
    s.explicit_faults = {{10, true, 600}};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        s.seed = seed;
        RunResult r = run_scenario(s);
        std::size_t latches = 0;
        for (const auto& ev : r.log)
            if (ev.type == SemanticEvent::Type::Latch) latches++;
        CHECK(latches == r.metrics.elections_started);
    }
}

TEST_CASE("complexity claim: participants and neighbor average for a ring election") {
    RunResult r = run_scenario(ring_scenario(16, 4, Algorithm::Diffusion));
    ComplexityClaim c = analyze_complexity(r);
    CHECK(c.participating == 16);       // the wave spans the whole ring
    CHECK(c.avg_neighbors == doctest::Approx(2.0));
    CHECK(c.messages > 0);
    CHECK(c.logical_steps >= 8);        // at least half-ring causal depth
}

TEST_CASE("stability window classifies late-fault components as unstable") {
    Scenario s;
    s.nodes = 6;
    s.topo_kind = Scenario::TopoKind::Ring;
    s.hb_period = 10;
    s.hb_timeout = 35;
    s.horizon = 1005;
    s.explicit_faults = {{6, true, 1000}}; // too late to re-converge
    RunResult r = run_scenario(s);
    auto vs = check_safety(r, s);
    for (const auto& v : vs) CHECK_FALSE(v.stable);
}

TEST_CASE("verdicts serialize to one json object per component") {
    Scenario s;
    s.nodes = 2;
    s.topo_kind = Scenario::TopoKind::Explicit;
    s.links = {{1, 2}};
    s.hb_period = 10;
    s.hb_timeout = 35;
    s.horizon = 400;
    RunResult r = run_scenario(s);
    auto vs = check_safety(r, s);
    std::string j = verdicts_jsonl(vs);
    CHECK(j.find("\"expected\":2") != std::string::npos);
    CHECK(j.find("\"pass\":true") != std::string::npos);
}
