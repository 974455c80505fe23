#pragma once

#include "manet/kernel.hpp"

namespace manet {

// Cooperative master/slave election: synchronous rounds, per-piconet tuple
// exchange, PMP nodes obeying one master per slot, freshness-driven leader
// liveness, and invitation-based role bootstrap and repair.
class MasterSlaveProtocol : public Protocol {
public:
    explicit MasterSlaveProtocol(Kernel& k) : k_(k) {}

    void on_start(NodeState& n) override;
    void on_message(NodeState& n, const ProtocolMessage& m) override;
    void on_timer(NodeState& n, TimerSlot slot, std::uint64_t payload) override;
    void on_link_change(NodeState& n, NodeId peer, bool up) override;
    void on_recover(NodeState& n) override;
    void on_round(NodeState& n, std::uint32_t round) override;
    void on_trigger(NodeState& n) override;
    const char* role_of(const NodeState& n) const override;

private:
    void self_claim(NodeState& n);
    void aspire(NodeState& n);
    bool adopt_tuple(NodeState& n, const MasterSlaveTuple& t, std::uint64_t send_id, NodeId from);
    void mirror_leader(NodeState& n);
    bool obeys(const MasterSlaveState& ms, NodeId master, std::uint32_t round) const;
    bool slave_obeys_me(const MasterSlaveState::SlaveInfo& s, NodeId me, std::uint32_t round) const;
    void master_round(NodeState& n, std::uint32_t round);
    void finalize_round(NodeState& n, std::uint32_t round);
    void on_tuple_exchange(NodeState& n, const ProtocolMessage& m);
    void on_tuple_broadcast(NodeState& n, const ProtocolMessage& m);
    void on_invitation(NodeState& n, const ProtocolMessage& m);
    void maybe_invite(NodeState& n, std::uint32_t round);
    void send_reply(NodeState& n, NodeId to);
    MasterSlaveState::SlaveInfo* find_slave(NodeState& n, NodeId id);

    Kernel& k_;
};

} // namespace manet
