#pragma once

#include <string>
#include <vector>

#include "manet/kernel.hpp"
#include "manet/scenario.hpp"

namespace manet {

struct OracleVerdict {
    std::vector<Uid> component;
    Uid expected_leader = 0;
    std::vector<Uid> observed; // distinct believed leaders among members (0 = none)
    bool pass = false;
    bool stable = true;        // inputs unchanged over the final window
};

struct InsufficientSamples : SimError {
    InsufficientSamples() : SimError("linear-bound validation needs at least 3 sizes") {}
};

// Recomputes the expected leader of every component by brute force over the
// final battery/mobility inputs; never looks at protocol state.
std::vector<OracleVerdict> check_safety(const RunResult& res, const Scenario& scn);

// Window after the last fault or link change inside which a component's
// election may still legitimately be settling.
SimTime stability_window(const Scenario& scn);

struct LinearVerdict {
    bool pass = false;
    double mean_ratio = 0;
    double worst_deviation = 0; // max |ratio-mean|/mean
    std::string detail;
};

// Linearity check: messages/n stays within +-25% of its cross-size mean.
LinearVerdict validate_linear_bound(const std::vector<std::pair<std::size_t, double>>& series);

struct AliVerdict {
    std::uint64_t predicted = 0;      // 2 * (sum d(i) - P) + 1
    std::uint64_t measured_chain = 0; // causal chain of the winning tuple
    std::uint64_t oracle_expected = 0;
    std::size_t pmp_count = 0;
    std::uint64_t pmp_degree_sum = 0;
    bool pass = false;            // measured == committed oracle
    bool formula_matches = false; // oracle == formula (reported, not gating)
};

// Measures the tuple-propagation chain of the winning tuple (broadcasts
// count once) and compares against the fixture's hand-enumerated count and
// the closed-form PMP-degree prediction.
AliVerdict validate_ali_formula(const RunResult& res, std::uint64_t oracle_expected);

// Rounds until every alive node's tuple named the final winner.
std::uint32_t convergence_round(const RunResult& res, SimTime round_period);

struct ComplexityClaim {
    std::size_t n = 0;
    std::size_t participating = 0; // PN
    double avg_neighbors = 0;      // ANoN among participants
    std::uint64_t messages = 0;    // election traffic
    std::uint32_t logical_steps = 0;
    SimTime ticks = 0;
};

// Descriptive complexity symbols for the last completed election of a run.
ComplexityClaim analyze_complexity(const RunResult& res);

std::string verdicts_jsonl(const std::vector<OracleVerdict>& vs);

} // namespace manet
