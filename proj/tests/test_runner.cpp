#include "doctest.h"

#include "manet/genscn.hpp"
#include "manet/runner.hpp"
#include "manet/trace.hpp"

using namespace manet;

#ifndef MANET_SCENARIO_DIR
#define MANET_SCENARIO_DIR "scenarios"
#endif

namespace {
std::string scenario_path(const char* name) {
    return std::string(MANET_SCENARIO_DIR) + "/" + name;
}
} // namespace

TEST_CASE("paired runs: fault and mobility histories are identical across arms") {
    Scenario s = Scenario::parse_file(scenario_path("fig3.scn"));
    s.fault_plan.epochs = 4; // keep the unit test quick
    s.horizon = 3000;
    for (std::uint64_t seed : {1ull, 7ull}) {
        s.seed = seed;
        PairedRuns pr = run_paired(s, "enhancements.inquiry_on_recover");
        CHECK(fault_events_of(pr.off) == fault_events_of(pr.on));
        CHECK_FALSE(fault_events_of(pr.off).empty());
    }
}

TEST_CASE("fig3 miniature: inquiry cuts elections to the loss episodes") {
    Scenario s = Scenario::parse_file(scenario_path("fig3.scn"));
    s.fault_plan.epochs = 6;
    s.horizon = 4500;
    Fig3Result r = run_fig3(s, {1, 2, 3});
    REQUIRE(r.rows.size() == 3);
    for (const auto& row : r.rows) CHECK(row.on < row.off);
    CHECK(r.ratio < 1.0);
    CHECK(r.csv.find("seed,arm,count") == 0);
}

TEST_CASE("fig3 with leader never failing: inquiry arm needs no election at all") {
    Scenario s = Scenario::parse_file(scenario_path("fig3.scn"));
    s.fault_plan.epochs = 6;
    s.fault_plan.leader_inclusion = Rational(0);
    s.horizon = 4500;
    for (std::uint64_t seed : {1ull, 2ull}) {
        Scenario arm = s;
        arm.seed = seed;
        PairedRuns pr = run_paired(arm, "enhancements.inquiry_on_recover");
        CHECK(pr.on.metrics.elections_started == 0); // every recovery adopted
        // baseline: exactly one election per leaderless recovery
        std::size_t recoveries = 0;
        for (const auto& ev : pr.off.log)
            if (ev.type == SemanticEvent::Type::Recover) recoveries++;
        CHECK(pr.off.metrics.elections_started == recoveries);
        CHECK(recoveries >= 6);
    }
}

TEST_CASE("shipped fig3 carries the stated assumptions") {
    Scenario s = Scenario::parse_file(scenario_path("fig3.scn"));
    CHECK(s.nodes == 100);
    CHECK(s.fault_plan.rate == Rational(1, 20));             // 5% per epoch
    CHECK(s.fault_plan.leader_inclusion == Rational(1, 4));  // 25%
    CHECK(s.fault_plan.epochs == 20);
    CHECK(s.algorithm == Algorithm::Diffusion);
}

TEST_CASE("fig4 miniature: backoff strictly reduces election messages") {
    Scenario s = Scenario::parse_file(scenario_path("fig4.scn"));
    Fig4Result r = run_fig4(s, {1, 2, 3, 4, 5});
    CHECK(r.seeds_strictly_less == 5);
    CHECK(r.mean_reduction > 0.1);
}

TEST_CASE("sweep rejects an empty seed list") {
    CHECK_THROWS_AS(run_sweep({8, 16, 32}, {}, Algorithm::Diffusion), ValidationError);
}

TEST_CASE("sweep produces one row per size and seed and a linear verdict") {
    auto rows = run_sweep({8, 16, 32}, {1, 2, 3}, Algorithm::Diffusion);
    CHECK(rows.size() == 9);
    LinearVerdict v = sweep_verdict(rows);
    CHECK(v.pass);
}

TEST_CASE("metrics csv emission is stable and carries the flags") {
    Scenario s = Scenario::parse_file(scenario_path("golden3.scn"));
    RunResult r = run_scenario(s);
    std::string row = metrics_csv_row(s.name, s.seed, to_string(s.algorithm), flags_string(s),
                                      r.metrics, "1/1 stable components agree");
    CHECK(row.find("golden3,1,diffusion,baseline") == 0);
    std::string row2 = metrics_csv_row(s.name, s.seed, to_string(s.algorithm), flags_string(s),
                                       r.metrics, "1/1 stable components agree");
    CHECK(row == row2);
}

TEST_CASE("shipped scenarios parse and declare themselves") {
    for (const char* f : {"fig3.scn", "fig4.scn", "golden3.scn", "ali_p1.scn",
                          "masterslave_star.scn", "hierarchy_clusters.scn",
                          "candidates_ring.scn", "diffusion_mobile.scn"}) {
        Scenario s = Scenario::parse_file(scenario_path(f));
        CHECK_FALSE(s.name.empty());
        CHECK(s.nodes >= 1);
    }
}
