#pragma once

#include <vector>

#include "manet/scenario.hpp"

namespace manet {

enum class FaultKind : std::uint8_t { None, NonLeaderCrashes, LeaderCrash };

// One randomized safety scenario: algorithm x size x mobility x fault shape.
Scenario safety_scenario(Algorithm algo, std::size_t n, bool mobile, FaultKind faults,
                         std::uint64_t seed);

// The 200-scenario randomized safety suite.
std::vector<Scenario> safety_suite(std::size_t count = 200);

// Static connected graph with per-node random battery and composite
// criterion; the elected leader must equal the brute-force argmax.
Scenario extrema_scenario(Algorithm algo, std::uint64_t seed);

// Master/slave chain fixture: masters in a path, PMP bridges between
// consecutive masters, one exclusive slave on the first master. The winner
// (highest uid) sits at the far end so the winning tuple walks the whole
// chain.
Scenario ali_fixture(std::size_t pmp_count, std::uint64_t seed);

// Hand-enumerated tuple-propagation chain for ali_fixture(P): the winning
// tuple crosses each bridge with one reply and one broadcast/exchange hop.
std::uint64_t ali_fixture_expected_chain(std::size_t pmp_count);

} // namespace manet
