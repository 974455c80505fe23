#pragma once

#include <memory>
#include <queue>
#include <string>
#include <vector>

#include "manet/election.hpp"
#include "manet/fault.hpp"
#include "manet/message.hpp"
#include "manet/metrics.hpp"
#include "manet/node.hpp"
#include "manet/rng.hpp"
#include "manet/scenario.hpp"
#include "manet/topology.hpp"
#include "manet/types.hpp"

namespace manet {

struct SimEvent {
    SimTime time = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::TimerFire;
    NodeId node = kNoNode;      // target node; kNoNode for global events

    ProtocolMessage msg;        // MessageArrival
    SimTime send_time = 0;

    TimerSlot slot = TimerSlot::Alarm; // TimerFire
    std::uint32_t gen = 0;
    std::uint64_t payload = 0;
};

struct RunResult {
    RunMetrics metrics;
    std::vector<SemanticEvent> log;
    std::vector<ElectionRecord> elections;
    bool horizon_exceeded = false;
    SimTime end_time = 0;

    struct NodeSnap {
        Uid uid = 0;
        bool alive = true;
        Uid leader = 0;
        std::string role;
        Rational battery;
        Rational mobility;
        std::vector<Uid> members; // hierarchy: accepted cluster members
    };
    std::vector<NodeSnap> nodes;
    std::vector<std::vector<NodeId>> components; // alive components at end
    std::vector<std::vector<NodeId>> adjacency;  // final links
    std::string trace_jsonl;                     // filled when tracing
};

class Kernel;

// One election protocol; stateless apart from the per-node state it is
// handed. The kernel owns all nodes and drives handlers single-threaded.
class Protocol {
public:
    virtual ~Protocol() = default;
    virtual void on_start(NodeState& n) = 0;
    virtual void on_message(NodeState& n, const ProtocolMessage& msg) = 0;
    virtual void on_timer(NodeState& n, TimerSlot slot, std::uint64_t payload) = 0;
    virtual void on_link_change(NodeState& n, NodeId peer, bool up) = 0;
    virtual void on_recover(NodeState& n) = 0;
    virtual void on_round(NodeState& n, std::uint32_t round) { (void)n; (void)round; }
    virtual void on_cell_change(NodeState& n) { (void)n; }
    virtual void on_trigger(NodeState& n) = 0;
    virtual const char* role_of(const NodeState& n) const = 0;
};

std::unique_ptr<Protocol> make_protocol(Algorithm a, Kernel& k);

// Deterministic discrete-event kernel: virtual clock, (time, seq)-ordered
// queue, seeded per-purpose rng streams, link-delay message delivery and
// scheduled fault injection.
class Kernel {
public:
    explicit Kernel(const Scenario& scn);

    RunResult run();

    SimTime now() const { return clock_; }
    const Scenario& scenario() const { return scn_; }
    std::size_t size() const { return nodes_.size(); }
    NodeState& node(NodeId id) { return nodes_[id]; }
    Uid uid_of(NodeId id) const { return static_cast<Uid>(id) + 1; }
    NodeId id_of(Uid uid) const { return static_cast<NodeId>(uid - 1); }
    Uid max_uid() const { return static_cast<Uid>(nodes_.size()); }

    const std::vector<NodeId>& neighbors(NodeId id) const { return topo_.neighbors(id); }
    bool has_link(NodeId a, NodeId b) const { return topo_.has_link(a, b); }
    ClusterId cluster_of(NodeId id) const { return topo_.cluster_of(id); }
    Topology& topology() { return topo_; }

    // current criterion from battery and mobility inputs only
    CriterionValue criterion_of(NodeId id);
    Rational battery_of(NodeId id);
    Rational mobility_of(NodeId id) const { return topo_.mobility_value(id, clock_); }

    // --- messaging ---------------------------------------------------------
    void send_to(NodeId src, NodeId dst, ProtocolMessage msg);
    void broadcast(NodeId src, ProtocolMessage msg) { broadcast_except(src, kNoNode, std::move(msg)); }
    void broadcast_except(NodeId src, NodeId skip, ProtocolMessage msg);
    // one broadcast operation delivered to an explicit subset (piconets)
    void send_multi(NodeId src, const std::vector<NodeId>& dsts, ProtocolMessage msg);

    // --- timers -------------------------------------------------------------
    void set_timer(NodeId node, TimerSlot slot, SimTime delay, std::uint64_t payload = 0);
    void cancel_timer(NodeState& n, TimerSlot slot) { n.bump(slot); }
    RngStream& backoff_rng() { return rng_backoff_; }

    // --- engine surface ------------------------------------------------------
    void schedule(SimEvent ev); // throws SchedulingInPast
    void inject_fault(NodeId node, bool crash, SimTime time);

    // --- bookkeeping used by protocols ---------------------------------------
    RunMetrics& metrics() { return metrics_; }
    void note(SemanticEvent::Type t, NodeId node, std::uint64_t a = 0, std::uint64_t b = 0,
              std::uint64_t c = 0, const char* detail = nullptr);
    void latch_election(NodeState& n);
    void election_begun(const ComputationId& comp, SimTime trigger_time);
    void election_completed(NodeState& starter, const ComputationId& comp, Uid winner,
                            std::uint32_t steps, std::uint32_t participants);
    void election_install(const ComputationId& comp);
    std::uint64_t last_send_id() const { return send_id_; }

    SimTime stagger_of(Uid uid) const {
        if (scn_.hb_stagger == 0) return 0;
        return (uid * 2654435761ull) % (scn_.hb_stagger + 1);
    }

private:
    void setup();
    void process(const SimEvent& ev);
    void exec_crash(NodeId id, bool strict);
    void exec_recover(NodeId id, bool strict);
    void refresh_topology(bool notify);
    void touch_battery(NodeState& n);
    void apply_drain(NodeState& n, const Rational& amount);
    std::vector<bool> alive_mask() const;
    void trace_event(const SimEvent& ev);
    void trace_snapshots();

    struct EventOrder {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    Scenario scn_;
    Topology topo_;
    std::vector<NodeState> nodes_;
    std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> queue_;
    SimTime clock_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t send_id_ = 0;
    bool horizon_exceeded_ = false;

    RngStream rng_delay_, rng_mobility_, rng_faults_, rng_backoff_, rng_init_;
    std::vector<SimTime> fifo_last_; // per directed pair, arrival clamp

    std::unique_ptr<Protocol> protocol_;
    RunMetrics metrics_;
    std::vector<SemanticEvent> log_;
    std::vector<ElectionRecord> elections_;

    bool tracing_ = false;
    std::string trace_;
    std::vector<std::string> marks_; // semantic marks within the current event
    friend class TraceWriter;
};

} // namespace manet
