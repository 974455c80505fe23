#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manet/kernel.hpp"
#include "manet/oracle.hpp"
#include "manet/scenario.hpp"

namespace manet {

RunResult run_scenario(const Scenario& scn);

// Sets one enhancement flag off/on with everything else (including the seed,
// hence the fault and mobility streams) identical, and runs both arms.
struct PairedRuns {
    RunResult off;
    RunResult on;
};
PairedRuns run_paired(Scenario base, const std::string& flag_key);

// Crash/recover events extracted from a run, for the A/B fairness check.
std::vector<FaultEvent> fault_events_of(const RunResult& res);

struct ArmCount {
    std::uint64_t seed = 0;
    std::uint64_t off = 0;
    std::uint64_t on = 0;
};

struct Fig3Result {
    std::vector<ArmCount> rows; // elections started per arm
    double mean_off = 0, mean_on = 0, ratio = 0;
    std::size_t seeds_with_3x = 0; // off >= 3*on
    std::string csv;               // seed,arm,count
};
Fig3Result run_fig3(const Scenario& base, const std::vector<std::uint64_t>& seeds);

struct Fig4Result {
    std::vector<ArmCount> rows; // Election messages per arm
    double mean_off = 0, mean_on = 0, mean_reduction = 0;
    std::size_t seeds_strictly_less = 0;
    std::string csv;
};
Fig4Result run_fig4(const Scenario& base, const std::vector<std::uint64_t>& seeds);

struct SweepRow {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::uint64_t messages = 0; // election traffic
    ComplexityClaim claim;
};
std::vector<SweepRow> run_sweep(const std::vector<std::size_t>& sizes,
                                const std::vector<std::uint64_t>& seeds, Algorithm algo);
LinearVerdict sweep_verdict(const std::vector<SweepRow>& rows);

// Ring election scenario with a single injected starter.
Scenario ring_scenario(std::size_t n, std::uint64_t seed, Algorithm algo);

std::string flags_string(const Scenario& scn);

} // namespace manet
