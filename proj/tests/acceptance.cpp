// Acceptance suite: runs each shipped criterion end to end and prints one
// verdict line per criterion. Exit code is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "manet/genscn.hpp"
#include "manet/metrics.hpp"
#include "manet/oracle.hpp"
#include "manet/runner.hpp"
#include "manet/trace.hpp"

using namespace manet;

#ifndef MANET_SCENARIO_DIR
#define MANET_SCENARIO_DIR "scenarios"
#endif
#ifndef MANET_GOLDEN_DIR
#define MANET_GOLDEN_DIR "tests/golden"
#endif

namespace {

int failures = 0;

void verdict(int criterion, const char* name, bool pass, const std::string& detail) {
    std::printf("criterion %d (%s): %s — %s\n", criterion, name, pass ? "PASS" : "FAIL",
                detail.c_str());
    if (!pass) failures++;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string scn(const char* name) { return std::string(MANET_SCENARIO_DIR) + "/" + name; }

char buf[512];

void criterion1_fig3() {
    auto t0 = std::chrono::steady_clock::now();
    Scenario base = Scenario::parse_file(scn("fig3.scn"));
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
    Fig3Result r = run_fig3(base, seeds);
    double dt = seconds_since(t0);
    bool pass = r.ratio <= 0.35 && r.seeds_with_3x >= 9 && dt < 30.0;
    std::snprintf(buf, sizeof(buf),
                  "elections on/off ratio %.3f (bound 0.35), off>=3x on in %zu/10 seeds, %.1fs",
                  r.ratio, r.seeds_with_3x, dt);
    verdict(1, "fig3 inquiry reproduction", pass, buf);
}

void criterion2_fig4() {
    auto t0 = std::chrono::steady_clock::now();
    Scenario base = Scenario::parse_file(scn("fig4.scn"));
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 100; ++s) seeds.push_back(s);
    Fig4Result r = run_fig4(base, seeds);
    double dt = seconds_since(t0);
    bool pass = r.seeds_strictly_less >= 95 && r.mean_reduction >= 0.30 && dt < 30.0;
    std::snprintf(buf, sizeof(buf),
                  "backoff strictly fewer Election msgs in %zu/100 seeds, mean reduction %.1f%% "
                  "(bound 30%%), %.1fs",
                  r.seeds_strictly_less, 100 * r.mean_reduction, dt);
    verdict(2, "fig4 CSMA/CD reproduction", pass, buf);
}

void criterion3_safety() {
    auto t0 = std::chrono::steady_clock::now();
    auto suite = safety_suite(200);
    std::size_t stable_total = 0, stable_pass = 0, unstable = 0;
    std::string first_fail;
    for (const auto& s : suite) {
        RunResult r = run_scenario(s);
        for (const auto& v : check_safety(r, s)) {
            if (!v.stable) { unstable++; continue; }
            stable_total++;
            if (v.pass) stable_pass++;
            else if (first_fail.empty()) first_fail = " first fail: " + s.name;
        }
    }
    double dt = seconds_since(t0);
    bool pass = stable_pass == stable_total && dt < 120.0;
    std::snprintf(buf, sizeof(buf),
                  "200 scenarios: %zu/%zu stable components agree with the oracle, %zu unstable "
                  "reported separately, %.1fs%s",
                  stable_pass, stable_total, unstable, dt, first_fail.c_str());
    verdict(3, "randomized safety suite", pass, buf);
}

void criterion4_extrema() {
    std::size_t pass_cnt = 0, total = 0;
    for (Algorithm a : {Algorithm::Diffusion, Algorithm::Candidates, Algorithm::Hierarchy,
                        Algorithm::MasterSlave}) {
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            Scenario s = extrema_scenario(a, seed);
            RunResult r = run_scenario(s);
            for (const auto& v : check_safety(r, s)) {
                total++;
                if (v.pass) pass_cnt++;
            }
        }
    }
    bool pass = pass_cnt == total && total >= 400;
    std::snprintf(buf, sizeof(buf),
                  "%zu/%zu runs elected the brute-force composite argmax (4 algorithms x 100 seeds)",
                  pass_cnt, total);
    verdict(4, "extrema correctness", pass, buf);
}

void criterion5_linearity() {
    std::vector<std::size_t> sizes{8, 16, 32, 64, 128};
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
    LinearVerdict vd = sweep_verdict(run_sweep(sizes, seeds, Algorithm::Diffusion));
    LinearVerdict vc = sweep_verdict(run_sweep(sizes, seeds, Algorithm::Candidates));
    bool pass = vd.pass && vc.pass;
    std::snprintf(buf, sizeof(buf),
                  "messages/n within +-25%% of mean: diffusion dev %.1f%%, candidates dev %.1f%%",
                  100 * vd.worst_deviation, 100 * vc.worst_deviation);
    verdict(5, "message linearity (rings 8..128)", pass, buf);
}

void criterion6_ali() {
    bool pass = true;
    std::string detail;
    for (std::size_t p : {1u, 2u, 3u}) {
        Scenario s = ali_fixture(p, 7);
        RunResult r = run_scenario(s);
        AliVerdict v = validate_ali_formula(r, ali_fixture_expected_chain(p));
        if (!v.pass) pass = false;
        char piece[128];
        std::snprintf(piece, sizeof(piece), "P=%zu measured=%llu oracle=%llu formula=%llu%s; ", p,
                      (unsigned long long)v.measured_chain, (unsigned long long)v.oracle_expected,
                      (unsigned long long)v.predicted,
                      v.formula_matches ? "" : " (formula deviates from the oracle)");
        detail += piece;
    }
    verdict(6, "master/slave propagation-chain formula", pass, detail);
}

void criterion7_golden() {
    Scenario s = Scenario::parse_file(scn("golden3.scn"));
    RunResult r = run_scenario(s);
    std::string expected = read_file(std::string(MANET_GOLDEN_DIR) + "/diffusion_line3.jsonl");
    bool pass = r.trace_jsonl == expected && r.metrics.total_messages() == 6;
    std::snprintf(buf, sizeof(buf), "3-node line election: %llu messages, trace %s",
                  (unsigned long long)r.metrics.total_messages(),
                  pass ? "byte-identical to the committed golden file" : "DIFFERS");
    verdict(7, "golden trace", pass, buf);
}

void criterion8_determinism() {
    const char* files[] = {"golden3.scn",    "diffusion_mobile.scn",  "fig4.scn",
                           "candidates_ring.scn", "hierarchy_clusters.scn", "ali_p1.scn",
                           "masterslave_star.scn", "fig3.scn"};
    bool pass = true;
    std::string detail;
    for (const char* f : files) {
        Scenario s = Scenario::parse_file(scn(f));
        bool big = s.nodes > 20;
        if (!big) s.trace = true;
        RunResult a = run_scenario(s);
        RunResult b = run_scenario(s);
        std::string ra = metrics_csv_row(s.name, s.seed, to_string(s.algorithm), flags_string(s),
                                         a.metrics, "");
        std::string rb = metrics_csv_row(s.name, s.seed, to_string(s.algorithm), flags_string(s),
                                         b.metrics, "");
        bool same = ra == rb && (big || a.trace_jsonl == b.trace_jsonl);
        if (!same) {
            pass = false;
            detail += std::string(f) + " differs; ";
        }
    }
    if (detail.empty()) detail = "8 shipped scenarios, two runs each, byte-identical outputs";
    verdict(8, "determinism", pass, detail);
}

} // namespace

int main() {
    std::printf("acceptance suite\n================\n");
    criterion1_fig3();
    criterion2_fig4();
    criterion3_safety();
    criterion4_extrema();
    criterion5_linearity();
    criterion6_ali();
    criterion7_golden();
    criterion8_determinism();
    if (failures == 0) std::printf("all acceptance criteria PASS\n");
    else std::printf("%d acceptance criteria FAILED\n", failures);
    return failures;
}
