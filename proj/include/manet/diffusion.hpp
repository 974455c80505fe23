#pragma once

#include "manet/kernel.hpp"

namespace manet {

// The extrema-finding diffusion family: plain diffusion, the candidate-list
// variant (FIFO channels, lists piggybacked on acks, successor promotion)
// and the hierarchical variant (cluster-scoped elections, hello gating,
// cluster-leader announcements). One machine, three dressings.
class ExtremaProtocol : public Protocol {
public:
    ExtremaProtocol(Kernel& k, Algorithm algo) : k_(k), algo_(algo) {}

    void on_start(NodeState& n) override;
    void on_message(NodeState& n, const ProtocolMessage& m) override;
    void on_timer(NodeState& n, TimerSlot slot, std::uint64_t payload) override;
    void on_link_change(NodeState& n, NodeId peer, bool up) override;
    void on_recover(NodeState& n) override;
    void on_cell_change(NodeState& n) override;
    void on_trigger(NodeState& n) override;
    const char* role_of(const NodeState& n) const override;

private:
    bool candidates_mode() const { return algo_ == Algorithm::Candidates; }
    bool hierarchy_mode() const { return algo_ == Algorithm::Hierarchy; }
    bool clustering() const { return hierarchy_mode() && k_.scenario().enh.clustering; }
    ConflictMode conflict_mode() const {
        return k_.scenario().enh.starter_quality ? ConflictMode::StarterQuality
                                                 : ConflictMode::UidOrder;
    }

    void arm_alarm(NodeState& n);
    void on_alarm(NodeState& n);
    void handle_loss(NodeState& n, Uid lost_leader);
    void start_or_backoff(NodeState& n);
    void do_start(NodeState& n, const ComputationId& comp);
    void begin_beating(NodeState& n);
    void stop_beating(NodeState& n);
    void on_heartbeat(NodeState& n, const ProtocolMessage& m);
    void mark_heard(NodeState& n);

    void install(NodeState& n, Uid leader, const CriterionValue& crit, const char* how,
                 const ComputationId* comp);
    void join_computation(NodeState& n, const ProtocolMessage& m);
    void on_election_msg(NodeState& n, const ProtocolMessage& m);
    void on_ack(NodeState& n, const ProtocolMessage& m);
    void on_leader_msg(NodeState& n, const ProtocolMessage& m);
    void check_completion(NodeState& n);
    void complete_as_starter(NodeState& n);
    void abort_computation(NodeState& n);
    void leave_computation(NodeState& n);

    bool try_promotion(NodeState& n, Uid lost_leader);
    void on_promotion_announce(NodeState& n, const ProtocolMessage& m);

    void send_hello_to(NodeState& n, NodeId peer);
    void broadcast_hello(NodeState& n);
    void on_hello(NodeState& n, const ProtocolMessage& m);
    void process_deferred_hellos(NodeState& n);
    void start_announce(NodeState& n);
    bool announce_fresh(const NodeState& n) const;
    void on_global_announce(NodeState& n, const ProtocolMessage& m);

    void start_inquiry(NodeState& n);
    void finish_inquiry(NodeState& n);

    Kernel& k_;
    Algorithm algo_;
};

} // namespace manet
