#pragma once

#include <cstdint>

#include "manet/election.hpp"
#include "manet/types.hpp"

namespace manet {

enum class MsgKind : std::uint8_t {
    Heartbeat,
    Election,
    Ack,
    Leader,
    Hello,
    Inquiry,
    InquiryReply,
    Invitation,
    TupleExchange,
    TupleBroadcast,
};

inline constexpr std::size_t kMsgKindCount = 10;

inline const char* to_string(MsgKind k) {
    switch (k) {
        case MsgKind::Heartbeat: return "Heartbeat";
        case MsgKind::Election: return "Election";
        case MsgKind::Ack: return "Ack";
        case MsgKind::Leader: return "Leader";
        case MsgKind::Hello: return "Hello";
        case MsgKind::Inquiry: return "Inquiry";
        case MsgKind::InquiryReply: return "InquiryReply";
        case MsgKind::Invitation: return "Invitation";
        case MsgKind::TupleExchange: return "TupleExchange";
        case MsgKind::TupleBroadcast: return "TupleBroadcast";
    }
    return "?";
}

// Grid cell a node clusters into: (floor(x/R), floor(y/R)).
struct ClusterId {
    std::int32_t cx = 0;
    std::int32_t cy = 0;
    friend bool operator==(const ClusterId& a, const ClusterId& b) {
        return a.cx == b.cx && a.cy == b.cy;
    }
    friend bool operator!=(const ClusterId& a, const ClusterId& b) { return !(a == b); }
};

// Leader tuple of the master/slave algorithm: id of the current leader and
// its master value, replaced only by a strictly better one. `asserted` is
// the freshness counter bumped by the leader itself each round.
struct MasterSlaveTuple {
    Uid leader_uid = 0;
    CriterionValue value;
    std::uint32_t asserted = 0;

    bool valid() const { return leader_uid != 0; }
};

enum class LeaderScope : std::uint8_t { Component, Cluster, Global };

// One flat wire message; the fields used depend on kind. A tagged union
// would buy little here and cost a lot of ceremony in the trace writer.
struct ProtocolMessage {
    MsgKind kind = MsgKind::Heartbeat;
    NodeId src = kNoNode;
    NodeId dst = kNoNode; // kBroadcast expands to all current neighbors

    ComputationId comp;          // Election / Ack / Leader
    bool ack_is_child = false;   // Ack: sender declared src its parent
    bool ack_aborted = false;    // Ack: sender left the computation
    bool ack_tainted = false;    // Ack: the subtree lost members to a rival
    CriterionValue best;         // Ack aggregate / Leader payload / announce
    CandidateList candidates;    // Ack & Leader & Heartbeat (candidates mode)
    LeaderScope scope = LeaderScope::Component; // Leader: cluster vs global phase

    Uid leader_uid = 0;          // Heartbeat / InquiryReply / Leader
    CriterionValue leader_criterion;
    std::uint32_t beat = 0;      // Heartbeat flood dedup counter
    bool has_leader = false;     // InquiryReply: replier knows a leader

    ClusterId cluster;           // Hello / cluster-scoped Election
    bool cluster_scoped = false; // Election restricted to sender's cluster

    MasterSlaveTuple tuple;      // TupleExchange / TupleBroadcast
    bool sender_is_master = false;
    bool exchange_reply = false; // TupleExchange: reply leg, not to be re-answered
    std::vector<Uid> masters_list; // slave reply: registered masters, for slot math
    bool invite_reply = false;   // Invitation: candidate reply
    bool invite_assign = false;  // Invitation: winner assignment
    CriterionValue invite_criterion;

    std::uint32_t depth = 0;     // causal depth inside one election (metrics)
    std::uint64_t bcast_id = 0;  // shared by deliveries of one broadcast op
};

} // namespace manet
