#pragma once

#include <vector>

#include "manet/rng.hpp"
#include "manet/scenario.hpp"
#include "manet/types.hpp"

namespace manet {

struct FaultEvent {
    Uid uid;
    bool crash;
    SimTime time;

    friend bool operator==(const FaultEvent& a, const FaultEvent& b) {
        return a.uid == b.uid && a.crash == b.crash && a.time == b.time;
    }
};

// Expands the scenario's fault plan (plus any explicit entries) into a
// concrete, time-sorted schedule before the run starts. All randomness comes
// from the faults stream, and the "current leader" used for leader-inclusion
// draws is resolved protocol-independently as the highest-uid planned-alive
// node, so paired enhancement arms are guaranteed identical fault histories.
std::vector<FaultEvent> build_fault_schedule(const Scenario& scn, RngStream& faults_rng);

// FaultSchedule invariants: sorted by time, crash/recover strictly alternate
// per node starting with crash. Throws InvalidTransition on violation.
void validate_fault_schedule(const std::vector<FaultEvent>& schedule, std::size_t n_nodes);

} // namespace manet
