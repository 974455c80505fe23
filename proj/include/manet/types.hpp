#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace manet {

using SimTime = std::uint64_t; // integer ticks; 1 tick = 1 abstract time unit
using NodeId = std::uint32_t;  // dense index 0..n-1 assigned at scenario load
using Uid = std::uint64_t;     // unique positive identity, survives crash/recover

inline constexpr NodeId kNoNode = 0xffffffffu;
inline constexpr NodeId kBroadcast = 0xfffffffeu;

enum class EventKind : std::uint8_t {
    MessageArrival,
    TimerFire,
    Crash,
    Recover,
    MobilityStep,
    RoundTick,
};

// Simulation errors are programming/scenario contract violations, not
// protocol-level conditions; protocol-level drops are counted, not thrown.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SchedulingInPast : SimError {
    SchedulingInPast() : SimError("event scheduled before current clock") {}
};
struct InvalidTransition : SimError {
    explicit InvalidTransition(const std::string& what) : SimError(what) {}
};

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::MessageArrival: return "MessageArrival";
        case EventKind::TimerFire: return "TimerFire";
        case EventKind::Crash: return "Crash";
        case EventKind::Recover: return "Recover";
        case EventKind::MobilityStep: return "MobilityStep";
        case EventKind::RoundTick: return "RoundTick";
    }
    return "?";
}

} // namespace manet
