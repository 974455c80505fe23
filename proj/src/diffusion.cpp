#include "manet/diffusion.hpp"

#include <algorithm>
#include <cassert>

namespace manet {

namespace {

void sorted_insert(std::vector<NodeId>& v, NodeId x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
}

bool sorted_erase(std::vector<NodeId>& v, NodeId x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) { v.erase(it); return true; }
    return false;
}

bool sorted_contains(const std::vector<NodeId>& v, NodeId x) {
    return std::binary_search(v.begin(), v.end(), x);
}

void sorted_insert_uid(std::vector<Uid>& v, Uid x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
}

} // namespace

const char* ExtremaProtocol::role_of(const NodeState& n) const {
    if (!n.has_leader()) return n.diff.active() ? "electing" : "none";
    return n.leads_self() ? "leader" : "follower";
}

void ExtremaProtocol::on_start(NodeState& n) {
    if (n.has_leader()) {
        if (n.leads_self()) begin_beating(n);
        else if (k_.scenario().hb_flood) arm_alarm(n);
        return;
    }
    if (k_.scenario().bootstrap_auto && k_.scenario().hb_period > 0) arm_alarm(n);
}

void ExtremaProtocol::arm_alarm(NodeState& n) {
    if (!n.alive || n.leads_self() || k_.scenario().hb_period == 0) return;
    SimTime target = n.last_heartbeat + k_.scenario().hb_timeout + 1 + k_.stagger_of(n.uid);
    SimTime delay = target > k_.now() ? target - k_.now() : 1;
    k_.set_timer(n.id, TimerSlot::Alarm, delay);
}

void ExtremaProtocol::on_alarm(NodeState& n) {
    if (n.leads_self()) return;
    if (n.inquiring || n.backoff_pending || n.diff.active()) {
        arm_alarm(n);
        return;
    }
    if (n.has_leader() && !heartbeat_lost(n.last_heartbeat, k_.scenario().hb_timeout, k_.now())) {
        // handoffs and cluster-scoped elections can leave the best node
        // following a lesser live leader; it objects with a re-election.
        // Inquiry adoptions are exempt: their whole point is accepting the
        // established leader instead of electing.
        if (!n.inquiry_adopted && k_.criterion_of(n.id) > n.leader_criterion) {
            handle_loss(n, n.leader_uid);
            return;
        }
        arm_alarm(n);
        return;
    }
    handle_loss(n, n.leader_uid);
}

void ExtremaProtocol::handle_loss(NodeState& n, Uid lost_leader) {
    if (n.diff.active()) return;
    if (n.has_leader()) {
        n.leader_uid = 0;
        n.leader_criterion = {};
        n.beat_seen = 0;
    }
    // announce memory rests on the dead leader's world; drop it
    n.cluster.announce_seen = false;
    n.cluster.best_announce = {};
    if (candidates_mode() && try_promotion(n, lost_leader)) return;
    if (!n.loss_latched) k_.latch_election(n);
    start_or_backoff(n);
}

void ExtremaProtocol::start_or_backoff(NodeState& n) {
    ComputationId comp;
    comp.starter_uid = n.uid;
    comp.starter_criterion = k_.criterion_of(n.id);
    comp.epoch = ++n.comp_epoch;
    k_.election_begun(comp, k_.now());
    const Scenario& s = k_.scenario();
    if (s.enh.csma_backoff) {
        n.backoff_pending = true;
        n.backoff_comp = comp;
        k_.set_timer(n.id, TimerSlot::Backoff, csma_backoff(n.uid, k_.max_uid(), s.backoff_t_slot));
        return;
    }
    do_start(n, comp);
}

void ExtremaProtocol::do_start(NodeState& n, const ComputationId& comp) {
    n.backoff_pending = false;
    DiffusionState& d = n.diff;
    d.comp = comp;
    d.remember(comp);
    d.phase = DiffusionState::Phase::Growing;
    d.parent = kNoNode;
    d.best = comp.starter_criterion;
    d.best_list = {};
    if (candidates_mode()) d.best_list.insert(comp.starter_criterion);
    d.depth = 0;
    d.max_depth = 0;
    d.tainted = false;
    d.children.clear();
    if (clustering()) {
        n.cluster.cluster_id = k_.cluster_of(n.id);
        n.cluster.id_valid = true;
    }
    d.pending_children = k_.neighbors(n.id);
    if (d.pending_children.empty()) {
        complete_as_starter(n);
        return;
    }
    ProtocolMessage m;
    m.kind = MsgKind::Election;
    m.comp = comp;
    m.depth = 1;
    if (clustering()) {
        m.cluster_scoped = true;
        m.cluster = n.cluster.cluster_id;
    }
    k_.broadcast(n.id, m);
}

void ExtremaProtocol::on_trigger(NodeState& n) {
    if (n.diff.active() || n.backoff_pending || n.inquiring) return;
    handle_loss(n, n.leader_uid);
}

// --- heartbeats -------------------------------------------------------------

void ExtremaProtocol::begin_beating(NodeState& n) {
    if (k_.scenario().hb_period == 0) return;
    k_.set_timer(n.id, TimerSlot::Beat, k_.scenario().hb_period);
}

void ExtremaProtocol::stop_beating(NodeState& n) {
    k_.cancel_timer(n, TimerSlot::Beat);
}

void ExtremaProtocol::on_timer(NodeState& n, TimerSlot slot, std::uint64_t payload) {
    (void)payload;
    switch (slot) {
        case TimerSlot::Alarm:
            on_alarm(n);
            break;
        case TimerSlot::Beat: {
            if (!n.leads_self()) return;
            ProtocolMessage m;
            m.kind = MsgKind::Heartbeat;
            m.leader_uid = n.uid;
            m.leader_criterion = n.leader_criterion;
            // the virtual clock keeps beat numbers monotone across this
            // node's crash/recover reigns, so stale dedup state cannot
            // swallow a revived leader's flood
            m.beat = static_cast<std::uint32_t>(k_.now());
            if (candidates_mode()) m.candidates = n.stored_candidates;
            k_.broadcast(n.id, m);
            begin_beating(n);
            break;
        }
        case TimerSlot::Backoff: {
            if (!n.backoff_pending) return;
            do_start(n, n.backoff_comp);
            break;
        }
        case TimerSlot::Inquiry:
            finish_inquiry(n);
            break;
        default:
            break;
    }
}

void ExtremaProtocol::on_heartbeat(NodeState& n, const ProtocolMessage& m) {
    if (m.leader_uid == n.uid) return;
    const bool flood = k_.scenario().hb_flood;
    CriterionValue incoming = m.leader_criterion;

    if (n.diff.active() || n.backoff_pending || n.inquiring) {
        if (n.has_leader() && m.leader_uid == n.leader_uid) {
            n.last_heartbeat = k_.now();
            if (m.beat > n.beat_seen) {
                n.beat_seen = m.beat;
                if (flood) k_.broadcast_except(n.id, m.src, m);
            }
        }
        return;
    }
    if (!n.has_leader()) {
        if (clustering() && !n.cluster.elected_once) {
            // hold out: this cell has not run its own election yet, and the
            // cluster phase needs every cell's maximum to surface
            if (flood && n.beat_is_new(m.leader_uid, m.beat))
                k_.broadcast_except(n.id, m.src, m);
            return;
        }
        install(n, m.leader_uid, incoming, "beat", nullptr);
        if (candidates_mode()) n.stored_candidates = m.candidates;
        n.beat_seen = m.beat;
        mark_heard(n);
        if (flood && n.beat_is_new(m.leader_uid, m.beat)) k_.broadcast_except(n.id, m.src, m);
        return;
    }
    if (m.leader_uid == n.leader_uid) {
        n.last_heartbeat = k_.now();
        mark_heard(n);
        if (candidates_mode()) n.stored_candidates = m.candidates;
        if (m.beat > n.beat_seen) {
            n.beat_seen = m.beat;
            if (flood && n.beat_is_new(m.leader_uid, m.beat)) k_.broadcast_except(n.id, m.src, m);
        }
        return;
    }
    bool stale_belief = !n.leads_self() &&
                        heartbeat_lost(n.last_heartbeat, k_.scenario().hb_timeout, k_.now());
    if (incoming > n.leader_criterion || stale_belief) {
        // merged partitions (the higher leader absorbs the lower), or a
        // handoff: a silent leader yields to any live one
        bool was_leading = n.leads_self();
        install(n, m.leader_uid, incoming, incoming > n.leader_criterion ? "merge" : "handoff",
                nullptr);
        if (was_leading) stop_beating(n);
        if (candidates_mode()) n.stored_candidates = m.candidates;
        n.beat_seen = m.beat;
        mark_heard(n);
        if (flood && n.beat_is_new(m.leader_uid, m.beat)) k_.broadcast_except(n.id, m.src, m);
    }
}

void ExtremaProtocol::mark_heard(NodeState& n) {
    if (n.heard_beat) return;
    n.heard_beat = true;
    arm_alarm(n);
}

void ExtremaProtocol::install(NodeState& n, Uid leader, const CriterionValue& crit,
                              const char* how, const ComputationId* comp) {
    bool was_leading = n.leads_self();
    n.leader_uid = leader;
    n.leader_criterion = crit;
    n.last_heartbeat = k_.now();
    n.beat_seen = 0;
    n.loss_latched = false;
    n.inquiry_adopted = false;
    k_.note(SemanticEvent::Type::Install, n.id, leader, 0, 0, how);
    if (comp) k_.election_install(*comp);
    n.heard_beat = false;
    if (leader == n.uid) {
        k_.cancel_timer(n, TimerSlot::Alarm);
        begin_beating(n);
    } else {
        if (was_leading) stop_beating(n);
        // out of a flooding leader's earshot, monitoring waits for a beat
        if (k_.scenario().hb_flood) arm_alarm(n);
        else k_.cancel_timer(n, TimerSlot::Alarm);
    }
}

// --- the diffusion machine ---------------------------------------------------

void ExtremaProtocol::on_message(NodeState& n, const ProtocolMessage& m) {
    switch (m.kind) {
        case MsgKind::Election: on_election_msg(n, m); break;
        case MsgKind::Ack: on_ack(n, m); break;
        case MsgKind::Leader:
            if (m.scope == LeaderScope::Global) {
                if (hierarchy_mode()) on_global_announce(n, m);
                else on_promotion_announce(n, m);
            } else {
                on_leader_msg(n, m);
            }
            break;
        case MsgKind::Heartbeat: on_heartbeat(n, m); break;
        case MsgKind::Hello: on_hello(n, m); break;
        case MsgKind::Inquiry: {
            ProtocolMessage r;
            r.kind = MsgKind::InquiryReply;
            r.has_leader = n.has_leader();
            r.leader_uid = n.leader_uid;
            r.leader_criterion = n.leader_criterion;
            k_.send_to(n.id, m.src, r);
            break;
        }
        case MsgKind::InquiryReply:
            if (n.inquiring && m.has_leader)
                n.inquiry_replies.push_back({m.leader_uid, m.leader_criterion});
            break;
        default:
            k_.metrics().dropped_stale++;
            break;
    }
}

void ExtremaProtocol::on_election_msg(NodeState& n, const ProtocolMessage& m) {
    if (m.cluster_scoped) {
        ClusterId mine = (n.diff.active() && n.cluster.id_valid) ? n.cluster.cluster_id
                                                                 : k_.cluster_of(n.id);
        if (!(mine == m.cluster)) {
            k_.metrics().cluster_denied++;
            ProtocolMessage r;
            r.kind = MsgKind::Ack;
            r.comp = m.comp;
            r.ack_is_child = false;
            r.ack_aborted = true; // clears the sender's pending slot, nothing more
            k_.send_to(n.id, m.src, r);
            return;
        }
    }
    if (n.backoff_pending) {
        if (resolve_computation_conflict(n.backoff_comp, m.comp, conflict_mode()) ==
            ConflictOutcome::JoinIncoming) {
            n.backoff_pending = false;
            k_.cancel_timer(n, TimerSlot::Backoff);
        } else {
            k_.metrics().dropped_stale++;
            return;
        }
    }
    // an in-flight wave can land after its sender crashed or moved away;
    // information is fine, but a tree edge over a vanished link is not
    const bool linked = k_.has_link(n.id, m.src);
    auto echo_ack = [&] {
        if (!linked) return;
        ProtocolMessage r;
        r.kind = MsgKind::Ack;
        r.comp = m.comp;
        r.ack_is_child = false;
        k_.send_to(n.id, m.src, r);
    };
    if (!n.diff.active()) {
        if (n.diff.has_seen(m.comp)) {
            echo_ack(); // straggler of a computation already visited here
            return;
        }
        if (!linked) {
            k_.metrics().dropped_stale++;
            return;
        }
        join_computation(n, m);
        return;
    }
    if (m.comp == n.diff.comp) {
        if (m.src == n.diff.parent) return; // duplicate from our own parent
        echo_ack();
        return;
    }
    if (resolve_computation_conflict(n.diff.comp, m.comp, conflict_mode()) ==
        ConflictOutcome::JoinIncoming) {
        if (n.diff.has_seen(m.comp)) {
            // a rejoin through a former descendant would close a parent cycle
            echo_ack();
            return;
        }
        if (!linked) {
            k_.metrics().dropped_stale++;
            return;
        }
        // tell the old parent we defected; the taint it carries upward keeps
        // the losing diffusion from ever completing with a partial view
        if (n.diff.parent != kNoNode && k_.has_link(n.id, n.diff.parent)) {
            ProtocolMessage defect;
            defect.kind = MsgKind::Ack;
            defect.comp = n.diff.comp;
            defect.ack_aborted = true;
            defect.ack_is_child = true;
            k_.send_to(n.id, n.diff.parent, defect);
        }
        abort_computation(n);
        join_computation(n, m);
    } else {
        // tell the sender about the better computation, otherwise two
        // stalled diffusions can starve each other forever; also release its
        // pending slot for us (it may be unable to join ours after a churn,
        // and partial spans are reconciled by heartbeat dominance)
        k_.metrics().dropped_stale++;
        if (linked) {
            ProtocolMessage deny;
            deny.kind = MsgKind::Ack;
            deny.comp = m.comp;
            deny.ack_aborted = true;
            k_.send_to(n.id, m.src, deny);
            ProtocolMessage counter;
            counter.kind = MsgKind::Election;
            counter.comp = n.diff.comp;
            counter.depth = n.diff.depth + 1;
            counter.cluster_scoped = m.cluster_scoped;
            counter.cluster = n.cluster.cluster_id;
            k_.send_to(n.id, m.src, counter);
        }
    }
}

void ExtremaProtocol::join_computation(NodeState& n, const ProtocolMessage& m) {
    if (n.inquiring) {
        n.inquiring = false;
        k_.cancel_timer(n, TimerSlot::Inquiry);
    }
    DiffusionState& d = n.diff;
    d.comp = m.comp;
    d.remember(m.comp);
    d.phase = DiffusionState::Phase::Growing;
    d.parent = m.src;
    d.best = k_.criterion_of(n.id);
    d.best_list = {};
    if (candidates_mode()) d.best_list.insert(d.best);
    d.depth = m.depth;
    d.max_depth = m.depth;
    d.tainted = false;
    d.children.clear();
    k_.note(SemanticEvent::Type::ParentSet, n.id, k_.uid_of(m.src), m.comp.starter_uid);
    if (clustering() && m.cluster_scoped) {
        n.cluster.cluster_id = m.cluster;
        n.cluster.id_valid = true;
    }
    d.pending_children = k_.neighbors(n.id);
    sorted_erase(d.pending_children, m.src);
    if (d.pending_children.empty()) {
        d.phase = DiffusionState::Phase::Acked;
        ProtocolMessage ack;
        ack.kind = MsgKind::Ack;
        ack.comp = d.comp;
        ack.ack_is_child = true;
        ack.best = d.best;
        ack.candidates = d.best_list;
        ack.depth = d.max_depth + 1;
        k_.send_to(n.id, d.parent, ack);
        return;
    }
    ProtocolMessage fwd;
    fwd.kind = MsgKind::Election;
    fwd.comp = d.comp;
    fwd.depth = m.depth + 1;
    fwd.cluster_scoped = m.cluster_scoped;
    fwd.cluster = m.cluster;
    k_.broadcast_except(n.id, m.src, fwd);
}

void ExtremaProtocol::on_ack(NodeState& n, const ProtocolMessage& m) {
    DiffusionState& d = n.diff;
    if (!d.active() || m.comp != d.comp) {
        k_.metrics().dropped_stale++;
        if (m.ack_is_child && !m.ack_aborted) {
            // the sender still thinks we are its parent: tell it to let go
            ProtocolMessage r;
            r.kind = MsgKind::Ack;
            r.comp = m.comp;
            r.ack_aborted = true;
            k_.send_to(n.id, m.src, r);
        }
        return;
    }
    if (m.ack_aborted) {
        if (m.src == d.parent) {
            abort_computation(n);
            arm_alarm(n);
            return;
        }
        // a defection taints the tree; a cluster denial does not
        if (m.ack_is_child) d.tainted = true;
        sorted_erase(d.pending_children, m.src);
        sorted_erase(d.children, m.src);
        check_completion(n);
        return;
    }
    bool was_pending = sorted_erase(d.pending_children, m.src);
    if (!m.ack_is_child) {
        if (was_pending) check_completion(n);
        return;
    }
    if (sorted_contains(d.children, m.src)) return; // duplicate child ack
    if (!was_pending && d.phase != DiffusionState::Phase::Growing) {
        // a late joiner (counter-election path) whose value can no longer be
        // aggregated; bounce it so it retries with a fresh election
        ProtocolMessage r;
        r.kind = MsgKind::Ack;
        r.comp = m.comp;
        r.ack_aborted = true;
        k_.send_to(n.id, m.src, r);
        return;
    }
    sorted_insert(d.children, m.src);
    if (m.best > d.best) d.best = m.best;
    if (m.ack_tainted) d.tainted = true;
    if (candidates_mode()) d.best_list = merge(d.best_list, m.candidates);
    if (m.depth > d.max_depth) d.max_depth = m.depth;
    check_completion(n);
}

void ExtremaProtocol::check_completion(NodeState& n) {
    DiffusionState& d = n.diff;
    if (d.phase != DiffusionState::Phase::Growing || !d.pending_children.empty()) return;
    if (d.comp.starter_uid == n.uid) {
        if (d.tainted) {
            // members left for a rival computation: this one must not
            // install a partial view; the rival (or a retry) covers us
            abort_computation(n);
            arm_alarm(n);
            return;
        }
        complete_as_starter(n);
        return;
    }
    d.phase = DiffusionState::Phase::Acked;
    ProtocolMessage ack;
    ack.kind = MsgKind::Ack;
    ack.comp = d.comp;
    ack.ack_is_child = true;
    ack.best = d.best;
    ack.ack_tainted = d.tainted;
    ack.candidates = d.best_list;
    ack.depth = d.max_depth + 1;
    k_.send_to(n.id, d.parent, ack);
}

void ExtremaProtocol::complete_as_starter(NodeState& n) {
    DiffusionState& d = n.diff;
    CriterionValue winner = d.best;
    ComputationId comp = d.comp;
    ProtocolMessage lead;
    lead.kind = MsgKind::Leader;
    lead.comp = comp;
    lead.best = winner;
    lead.candidates = d.best_list;
    lead.scope = clustering() ? LeaderScope::Cluster : LeaderScope::Component;
    lead.depth = d.max_depth + 1;
    for (NodeId c : d.children) k_.send_to(n.id, c, lead);
    k_.election_completed(n, comp, winner.uid, d.max_depth + 1, 0);
    if (candidates_mode()) n.stored_candidates = d.best_list;
    leave_computation(n);
    n.cluster.elected_once = true;
    install(n, winner.uid, winner, "election", &comp);
    if (hierarchy_mode()) process_deferred_hellos(n);
    if (clustering()) {
        if (winner.uid == n.uid) start_announce(n);
        else if (announce_fresh(n) && n.cluster.best_announce > n.leader_criterion)
            install(n, n.cluster.best_announce.uid, n.cluster.best_announce, "announce", nullptr);
    }
}

void ExtremaProtocol::leave_computation(NodeState& n) {
    DiffusionState& d = n.diff;
    d.phase = DiffusionState::Phase::Idle;
    d.comp = {};
    d.parent = kNoNode;
    d.pending_children.clear();
    d.children.clear();
}

void ExtremaProtocol::abort_computation(NodeState& n) {
    DiffusionState& d = n.diff;
    // children waiting on us for a Leader must collapse too; the parent is
    // never told directly, it resolves via its own abort, link evidence, or
    // the stale-ack reply path
    ProtocolMessage bye;
    bye.kind = MsgKind::Ack;
    bye.comp = d.comp;
    bye.ack_aborted = true;
    for (NodeId c : d.children)
        if (k_.has_link(n.id, c)) k_.send_to(n.id, c, bye);
    leave_computation(n);
}

void ExtremaProtocol::on_leader_msg(NodeState& n, const ProtocolMessage& m) {
    DiffusionState& d = n.diff;
    if (!d.active() || m.comp != d.comp || m.src != d.parent) {
        k_.metrics().dropped_stale++;
        return;
    }
    ComputationId comp = d.comp;
    ProtocolMessage fwd = m;
    fwd.depth = m.depth + 1;
    for (NodeId c : d.children) k_.send_to(n.id, c, fwd);
    if (candidates_mode()) n.stored_candidates = m.candidates;
    leave_computation(n);
    n.cluster.elected_once = true;
    install(n, m.best.uid, m.best, "election", &comp);
    if (hierarchy_mode()) process_deferred_hellos(n);
    if (clustering() && m.scope == LeaderScope::Cluster) {
        if (m.best.uid == n.uid) start_announce(n);
        else if (announce_fresh(n) && n.cluster.best_announce > n.leader_criterion)
            install(n, n.cluster.best_announce.uid, n.cluster.best_announce, "announce", nullptr);
    }
}

void ExtremaProtocol::on_link_change(NodeState& n, NodeId peer, bool up) {
    if (up) {
        if (hierarchy_mode()) send_hello_to(n, peer);
        return;
    }
    DiffusionState& d = n.diff;
    if (!d.active()) return;
    if (peer == d.parent) {
        abort_computation(n);
        arm_alarm(n);
        return;
    }
    bool was_pending = sorted_erase(d.pending_children, peer);
    sorted_erase(d.children, peer);
    if (was_pending) check_completion(n);
}

// --- candidate promotion ------------------------------------------------------

bool ExtremaProtocol::try_promotion(NodeState& n, Uid lost_leader) {
    if (lost_leader == 0) return false;
    for (const CriterionValue& e : n.stored_candidates.entries()) {
        if (e.uid == lost_leader) continue;
        bool reachable = e.uid == n.uid || k_.has_link(n.id, k_.id_of(e.uid));
        if (!reachable) continue;
        k_.metrics().candidate_promotions++;
        install(n, e.uid, e, "promotion", nullptr);
        if (e.uid != n.uid) {
            // tell the successor it is now in charge; everyone else learns
            // from its heartbeats (or their own timeout and list)
            ProtocolMessage m;
            m.kind = MsgKind::Leader;
            m.scope = LeaderScope::Global;
            m.best = e;
            m.leader_uid = lost_leader;
            k_.send_to(n.id, k_.id_of(e.uid), m);
        }
        return true;
    }
    return false;
}

void ExtremaProtocol::on_promotion_announce(NodeState& n, const ProtocolMessage& m) {
    // unicast notification that this node is the promoted successor
    if (m.best.uid != n.uid) {
        k_.metrics().dropped_stale++;
        return;
    }
    if (n.leads_self()) return;
    if (n.diff.active()) return; // an election is already sorting things out
    if (n.has_leader() && n.leader_criterion > m.best &&
        !heartbeat_lost(n.last_heartbeat, k_.scenario().hb_timeout, k_.now()))
        return; // a better leader is demonstrably alive
    install(n, n.uid, m.best, "promotion", nullptr);
}

// --- hierarchy: hellos, gating, announcements ----------------------------------

void ExtremaProtocol::send_hello_to(NodeState& n, NodeId peer) {
    ProtocolMessage m;
    m.kind = MsgKind::Hello;
    m.cluster = k_.cluster_of(n.id);
    k_.send_to(n.id, peer, m);
}

void ExtremaProtocol::broadcast_hello(NodeState& n) {
    ProtocolMessage m;
    m.kind = MsgKind::Hello;
    m.cluster = k_.cluster_of(n.id);
    k_.broadcast(n.id, m);
}

void ExtremaProtocol::on_hello(NodeState& n, const ProtocolMessage& m) {
    if (!hierarchy_mode()) return;
    if (n.diff.active() && k_.scenario().enh.join_gating) {
        n.cluster.deferred_hellos.push_back(m);
        k_.metrics().hellos_deferred++;
        return;
    }
    ClusterId mine = (n.diff.active() && n.cluster.id_valid) ? n.cluster.cluster_id
                                                             : k_.cluster_of(n.id);
    if (!(m.cluster == mine)) {
        k_.metrics().cluster_denied++;
        return;
    }
    sorted_insert_uid(n.cluster.members_known, k_.uid_of(m.src));
}

void ExtremaProtocol::process_deferred_hellos(NodeState& n) {
    auto queue = std::move(n.cluster.deferred_hellos);
    n.cluster.deferred_hellos.clear();
    for (const auto& h : queue) on_hello(n, h);
}

void ExtremaProtocol::start_announce(NodeState& n) {
    CriterionValue own{n.leader_criterion.value, n.uid};
    if (announce_fresh(n) && n.cluster.best_announce > own) {
        // a better cluster leader announced itself while our election ran
        install(n, n.cluster.best_announce.uid, n.cluster.best_announce, "announce", nullptr);
        return;
    }
    n.cluster.best_announce = own;
    n.cluster.announce_time = k_.now();
    n.cluster.announce_seen = true;
    ProtocolMessage m;
    m.kind = MsgKind::Leader;
    m.scope = LeaderScope::Global;
    m.best = own;
    k_.broadcast(n.id, m);
}

bool ExtremaProtocol::announce_fresh(const NodeState& n) const {
    return n.cluster.announce_seen &&
           k_.now() <= n.cluster.announce_time + k_.scenario().hb_timeout;
}

void ExtremaProtocol::on_global_announce(NodeState& n, const ProtocolMessage& m) {
    if (n.cluster.announce_seen && !(m.best > n.cluster.best_announce)) {
        // anti-entropy: a late announcer must still learn a live maximum
        if (announce_fresh(n) && n.cluster.best_announce > m.best && k_.has_link(n.id, m.src)) {
            ProtocolMessage better;
            better.kind = MsgKind::Leader;
            better.scope = LeaderScope::Global;
            better.best = n.cluster.best_announce;
            k_.send_to(n.id, m.src, better);
        }
        if (m.best == n.cluster.best_announce) n.cluster.announce_time = k_.now();
        return;
    }
    n.cluster.best_announce = m.best;
    n.cluster.announce_time = k_.now();
    n.cluster.announce_seen = true;
    bool may_adopt = !clustering() || n.cluster.elected_once || n.has_leader();
    if (!n.diff.active() && may_adopt && (!n.has_leader() || m.best > n.leader_criterion)) {
        bool was_leading = n.leads_self();
        install(n, m.best.uid, m.best, "announce", nullptr);
        if (was_leading) stop_beating(n);
    }
    k_.broadcast_except(n.id, m.src, m);
}

void ExtremaProtocol::on_cell_change(NodeState& n) {
    broadcast_hello(n);
}

// --- recovery & inquiry ----------------------------------------------------------

void ExtremaProtocol::on_recover(NodeState& n) {
    if (hierarchy_mode()) broadcast_hello(n);
    if (k_.scenario().enh.inquiry_on_recover) {
        start_inquiry(n);
        return;
    }
    // baseline: a waking node starts an election to find its leader
    handle_loss(n, 0);
}

void ExtremaProtocol::start_inquiry(NodeState& n) {
    n.inquiring = true;
    n.inquiry_replies.clear();
    ProtocolMessage m;
    m.kind = MsgKind::Inquiry;
    k_.broadcast(n.id, m);
    k_.set_timer(n.id, TimerSlot::Inquiry, k_.scenario().inquiry_window_or_default());
}

void ExtremaProtocol::finish_inquiry(NodeState& n) {
    if (!n.inquiring) return;
    n.inquiring = false;
    const std::pair<Uid, CriterionValue>* best = nullptr;
    for (const auto& r : n.inquiry_replies)
        if (!best || r.second > best->second) best = &r;
    if (best) {
        k_.metrics().inquiry_adoptions++;
        install(n, best->first, best->second, "inquiry", nullptr);
        n.inquiry_adopted = true;
        n.inquiry_replies.clear();
        return;
    }
    n.inquiry_replies.clear();
    handle_loss(n, 0);
}

} // namespace manet
