#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "manet/message.hpp"
#include "manet/types.hpp"

namespace manet {

// Everything the comparative evaluation counts. One instance per run.
struct RunMetrics {
    std::array<std::uint64_t, kMsgKindCount> messages_by_kind{};
    std::uint64_t sends_attempted = 0;   // all deliver calls
    std::uint64_t dead_deliveries = 0;   // discarded at send: dead sender / absent link
    std::uint64_t dead_arrivals = 0;     // arrived at a crashed node
    std::uint64_t lost_in_flight = 0;    // unreliable-link drops
    std::uint64_t dropped_stale = 0;     // messages for stale computations
    std::uint64_t cluster_denied = 0;    // cross-cluster election denials
    std::uint64_t hellos_deferred = 0;

    std::uint64_t elections_started = 0;   // ElectionTrigger latch events
    std::uint64_t elections_completed = 0; // computations that installed a leader
    std::uint64_t inquiry_adoptions = 0;
    std::uint64_t candidate_promotions = 0;
    std::uint64_t invitations_bootstrap = 0;
    std::uint64_t invitations_repair = 0;

    std::uint64_t count(MsgKind k) const { return messages_by_kind[static_cast<std::size_t>(k)]; }
    std::uint64_t& count(MsgKind k) { return messages_by_kind[static_cast<std::size_t>(k)]; }
    std::uint64_t total_messages() const {
        std::uint64_t t = 0;
        for (auto v : messages_by_kind) t += v;
        return t;
    }
    // Election + Ack + Leader: the traffic of the election itself
    std::uint64_t election_traffic() const {
        return count(MsgKind::Election) + count(MsgKind::Ack) + count(MsgKind::Leader);
    }
};

// Per completed election: logical steps (longest causal message chain) and
// wall ticks from the starter's trigger to the last leader install.
struct ElectionRecord {
    Uid starter_uid = 0;
    std::uint32_t epoch = 0;
    SimTime triggered_at = 0;
    SimTime completed_at = 0;   // starter-side completion
    SimTime last_install_at = 0;
    std::uint32_t logical_steps = 0;
    Uid winner = 0;
    std::uint32_t participants = 0;
};

// Compact always-on record of semantically interesting moments; the full
// event trace is optional, this is not.
struct SemanticEvent {
    enum class Type : std::uint8_t {
        Crash,          // a = 0
        Recover,
        LinkChange,     // a = peer, b = up
        Latch,          // ElectionTrigger latched
        Install,        // a = leader uid, detail = how
        ParentSet,      // a = parent uid, b = starter uid of comp
        CompComplete,   // a = winner uid, b = starter uid
        TupleLearn,     // a = leader uid, b = send id (0 = local), c = sender uid
        RoleChange,     // a = 1 master assumed / 0 dropped
    };
    Type type;
    SimTime t = 0;
    Uid node = 0;
    std::uint64_t a = 0, b = 0, c = 0;
    const char* detail = nullptr;
};

const char* to_string(SemanticEvent::Type t);

inline const char* to_string(SemanticEvent::Type ty) {
    using T = SemanticEvent::Type;
    switch (ty) {
        case T::Crash: return "crash";
        case T::Recover: return "recover";
        case T::LinkChange: return "link";
        case T::Latch: return "latch";
        case T::Install: return "install";
        case T::ParentSet: return "parent";
        case T::CompComplete: return "complete";
        case T::TupleLearn: return "tuple";
        case T::RoleChange: return "role";
    }
    return "?";
}

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& scenario, std::uint64_t seed,
                            const std::string& algorithm, const std::string& flags,
                            const RunMetrics& m, const std::string& verdicts);

} // namespace manet
