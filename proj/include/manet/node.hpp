#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "manet/election.hpp"
#include "manet/message.hpp"
#include "manet/rational.hpp"
#include "manet/types.hpp"

namespace manet {

enum class TimerSlot : std::uint8_t {
    Alarm,         // heartbeat-loss / leaderless retry
    Beat,          // leader heartbeat period
    Backoff,       // CSMA/CD contention delay before initiating
    Inquiry,       // reply-collection window after recovery
    Invite,        // delayed Invitation broadcast
    InviteCollect, // reply-collection window after inviting
    MsFinalize,    // master-side round aggregation deadline
    Settle,        // cluster-leader global-announce settling
    Trigger,       // injected election trigger
    kCount
};

constexpr std::size_t kTimerSlots = static_cast<std::size_t>(TimerSlot::kCount);

// Vasudevan-style diffusion bookkeeping; one active computation at a time.
struct DiffusionState {
    enum class Phase : std::uint8_t { Idle, Growing, Acked };
    Phase phase = Phase::Idle;
    ComputationId comp;
    NodeId parent = kNoNode;
    std::vector<NodeId> pending_children; // sorted
    std::vector<NodeId> children;         // sorted; acked with child flag
    CriterionValue best;
    CandidateList best_list;
    std::uint32_t depth = 0;      // own hop depth in the election wave
    std::uint32_t max_depth = 0;  // longest causal chain seen in acks
    bool tainted = false;         // a member defected to a rival computation

    // Computations this node has participated in. A node is adopted into a
    // computation at most once; refusing re-entry is what lets abandoned
    // diffusions (unreachable starters) die out instead of cycling.
    std::vector<ComputationId> seen;

    bool active() const { return phase != Phase::Idle; }
    bool has_seen(const ComputationId& c) const {
        for (const auto& s : seen)
            if (s == c) return true;
        return false;
    }
    void remember(const ComputationId& c) {
        if (has_seen(c)) return;
        if (seen.size() >= 64) seen.erase(seen.begin());
        seen.push_back(c);
    }
    void reset() { *this = DiffusionState{}; }
};

struct ClusterState {
    ClusterId cluster_id;
    bool id_valid = false;
    bool elected_once = false;                  // completed a cluster election
    std::vector<Uid> members_known;             // sorted
    std::vector<ProtocolMessage> deferred_hellos;
    CriterionValue best_announce;               // highest global announce seen
    SimTime announce_time = 0;                  // when it was last heard
    bool announce_seen = false;

    void reset() { *this = ClusterState{}; }
};

struct MasterSlaveState {
    bool is_master = false;
    std::vector<NodeId> my_masters;   // sorted node ids
    MasterSlaveTuple tuple;
    std::uint32_t current_round = 0;
    std::uint32_t fresh_round = 0;    // round when `asserted` last advanced here
    Uid leader_broadcast = 0;         // last tuple leader we broadcast to the piconet

    // master-side
    struct SlaveInfo {
        NodeId id;
        std::vector<NodeId> masters; // the slave's registered master list
    };
    std::vector<SlaveInfo> slaves;    // sorted by id
    std::vector<NodeId> master_neighbors; // neighbors known to be masters
    std::vector<std::pair<NodeId, MasterSlaveTuple>> round_replies;

    // slave-side liveness
    std::uint32_t last_master_round = 0;
    bool ever_had_master = false;
    bool invite_pending = false;
    bool collecting_invites = false;
    std::vector<std::pair<Uid, CriterionValue>> invite_replies;
    std::vector<Uid> master_replies;  // repliers that already are masters

    void reset() { *this = MasterSlaveState{}; }
};

struct NodeState {
    NodeId id = 0;
    Uid uid = 0;
    bool alive = true;

    // battery, lazily drained
    Rational charge{1};
    SimTime charge_touched = 0;

    // leader belief
    Uid leader_uid = 0;
    CriterionValue leader_criterion;
    SimTime last_heartbeat = 0;
    std::uint32_t beat_seen = 0;     // flood dedup for the believed leader
    bool heard_beat = false;         // out-of-earshot nodes do not monitor
    bool inquiry_adopted = false;    // current leader came from a recovery inquiry
    bool loss_latched = false;
    // forwarding memory across leader changes, so belief churn cannot
    // re-amplify old beat floods
    std::vector<std::pair<Uid, std::uint32_t>> beat_memory;

    bool beat_is_new(Uid leader, std::uint32_t beat) {
        for (auto& [l, b] : beat_memory) {
            if (l != leader) continue;
            if (beat <= b) return false;
            b = beat;
            return true;
        }
        if (beat_memory.size() >= 8) beat_memory.erase(beat_memory.begin());
        beat_memory.push_back({leader, beat});
        return true;
    }

    bool inquiring = false;
    std::vector<std::pair<Uid, CriterionValue>> inquiry_replies;

    bool backoff_pending = false;
    ComputationId backoff_comp;

    std::uint32_t comp_epoch = 0;   // per-starter epoch counter
    DiffusionState diff;
    CandidateList stored_candidates;
    ClusterState cluster;
    MasterSlaveState ms;

    std::array<std::uint32_t, kTimerSlots> timer_gen{};

    bool has_leader() const { return leader_uid != 0; }
    bool leads_self() const { return leader_uid == uid; }

    std::uint32_t bump(TimerSlot s) { return ++timer_gen[static_cast<std::size_t>(s)]; }
    std::uint32_t gen(TimerSlot s) const { return timer_gen[static_cast<std::size_t>(s)]; }

    // protocol state reset on recovery: identity and battery survive
    void reset_protocol() {
        leader_uid = 0;
        leader_criterion = {};
        last_heartbeat = 0;
        beat_seen = 0;
        heard_beat = false;
        inquiry_adopted = false;
        loss_latched = false;
        inquiring = false;
        inquiry_replies.clear();
        backoff_pending = false;
        backoff_comp = {};
        diff.reset();
        stored_candidates = {};
        cluster.reset();
        ms.reset();
        for (auto& g : timer_gen) ++g;
    }
};

} // namespace manet
