#include "manet/kernel.hpp"

#include <algorithm>
#include <cassert>

namespace manet {

namespace {
constexpr std::uint64_t kMaxEventsPerRun = 50'000'000;

void append_kv(std::string& s, const char* key, std::uint64_t v) {
    s += '"'; s += key; s += "\":"; s += std::to_string(v);
}
} // namespace

Kernel::Kernel(const Scenario& scn) : scn_(scn) {
    scn_.validate();
    rng_delay_ = RngStream(scn_.seed, "delay");
    rng_mobility_ = RngStream(scn_.seed, "mobility");
    rng_faults_ = RngStream(scn_.seed, "faults");
    rng_backoff_ = RngStream(scn_.seed, "backoff");
    rng_init_ = RngStream(scn_.seed, "init");
    tracing_ = scn_.trace;

    const std::size_t n = scn_.nodes;
    nodes_.resize(n);
    for (NodeId i = 0; i < n; ++i) {
        nodes_[i].id = i;
        nodes_[i].uid = uid_of(i);
    }

    // ring/line scenarios expand into explicit adjacency
    if (scn_.topo_kind == Scenario::TopoKind::Ring || scn_.topo_kind == Scenario::TopoKind::Line) {
        std::vector<std::pair<NodeId, NodeId>> links;
        for (NodeId i = 0; i + 1 < n; ++i) links.push_back({i, i + 1});
        if (scn_.topo_kind == Scenario::TopoKind::Ring && n > 2) links.push_back({NodeId(n - 1), 0});
        topo_.init_explicit(n, std::move(links));
    } else if (scn_.topo_kind == Scenario::TopoKind::Explicit) {
        std::vector<std::pair<NodeId, NodeId>> links;
        for (auto [a, b] : scn_.links) links.push_back({id_of(a), id_of(b)});
        topo_.init_explicit(n, std::move(links));
    } else {
        std::vector<Position> pos(n);
        for (NodeId i = 0; i < n; ++i) {
            auto it = scn_.positions.find(uid_of(i));
            if (it != scn_.positions.end()) {
                pos[i] = it->second;
            } else if (scn_.placement_random) {
                pos[i].x = static_cast<std::int32_t>(rng_init_.uniform(0, scn_.width));
                pos[i].y = static_cast<std::int32_t>(rng_init_.uniform(0, scn_.height));
            }
        }
        topo_.init_geometric(n, scn_.width, scn_.height, scn_.radio_range, std::move(pos),
                             scn_.mobility);
    }

    // battery init: explicit value, else random range, else default
    for (NodeId i = 0; i < n; ++i) {
        auto it = scn_.battery_init.find(uid_of(i));
        if (it != scn_.battery_init.end()) {
            nodes_[i].charge = it->second;
        } else if (!(scn_.battery_max == Rational(0))) {
            // draw thousandths in [min, max] from the init stream
            std::int64_t lo = scn_.battery_min.num() * 1000 / scn_.battery_min.den();
            std::int64_t hi = scn_.battery_max.num() * 1000 / scn_.battery_max.den();
            nodes_[i].charge = Rational(rng_init_.uniform(lo, hi), 1000);
        } else {
            nodes_[i].charge = scn_.battery_default;
        }
    }

    fifo_last_.assign(n * n, 0);
    protocol_ = make_protocol(scn_.algorithm, *this);
    refresh_topology(false); // the kernel is usable immediately after construction

    if (scn_.initial_leader != 0) {
        CriterionValue lc = criterion_of(id_of(scn_.initial_leader));
        for (auto& nd : nodes_) {
            nd.leader_uid = scn_.initial_leader;
            nd.leader_criterion = lc;
            nd.last_heartbeat = 0;
        }
    }
}

std::vector<bool> Kernel::alive_mask() const {
    std::vector<bool> m(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) m[i] = nodes_[i].alive;
    return m;
}

CriterionValue Kernel::criterion_of(NodeId id) {
    NodeState& n = nodes_[id];
    touch_battery(n);
    Rational v_max = scn_.mobility.kind == MobilityKind::Static
                         ? Rational(0)
                         : Rational(scn_.mobility.v_max);
    return criterion(n.uid, n.charge, mobility_of(id), v_max, scn_.w_b, scn_.w_m, scn_.crit_mode);
}

Rational Kernel::battery_of(NodeId id) {
    touch_battery(nodes_[id]);
    return nodes_[id].charge;
}

void Kernel::touch_battery(NodeState& n) {
    if (!(scn_.drain_idle == Rational(0)) && n.alive && clock_ > n.charge_touched) {
        apply_drain(n, scn_.drain_idle * Rational(static_cast<std::int64_t>(clock_ - n.charge_touched)));
    }
    n.charge_touched = clock_;
}

void Kernel::apply_drain(NodeState& n, const Rational& amount) {
    if (amount == Rational(0) || !n.alive) return;
    n.charge = n.charge - amount;
    if (n.charge < Rational(0)) n.charge = Rational(0);
    if (n.charge == Rational(0)) {
        // battery exhausted: the node drops off the air
        SimEvent ev;
        ev.kind = EventKind::Crash;
        ev.node = n.id;
        ev.time = clock_;
        ev.payload = 0; // lenient
        schedule(std::move(ev));
    }
}

void Kernel::schedule(SimEvent ev) {
    if (ev.time < clock_) throw SchedulingInPast();
    ev.seq = seq_++;
    queue_.push(std::move(ev));
}

void Kernel::inject_fault(NodeId node, bool crash, SimTime time) {
    SimEvent ev;
    ev.kind = crash ? EventKind::Crash : EventKind::Recover;
    ev.node = node;
    ev.time = time;
    ev.payload = 1; // strict: InvalidTransition on state mismatch
    schedule(std::move(ev));
}

void Kernel::send_to(NodeId src, NodeId dst, ProtocolMessage msg) {
    metrics_.sends_attempted++;
    NodeState& s = nodes_[src];
    if (!s.alive) { metrics_.dead_deliveries++; return; }
    if (!topo_.has_link(src, dst)) { metrics_.dead_deliveries++; return; }

    msg.src = src;
    msg.dst = dst;
    if (msg.bcast_id == 0) msg.bcast_id = ++send_id_;
    metrics_.count(msg.kind)++;
    touch_battery(s);
    apply_drain(s, scn_.drain_tx);

    if (!(scn_.loss == Rational(0)) && rng_delay_.bernoulli(scn_.loss)) {
        metrics_.lost_in_flight++;
        return;
    }
    SimTime delay = static_cast<SimTime>(rng_delay_.uniform(
        static_cast<std::int64_t>(scn_.d_min), static_cast<std::int64_t>(scn_.d_max)));
    SimTime arrival = clock_ + delay;
    if (scn_.fifo) {
        SimTime& last = fifo_last_[std::size_t(src) * nodes_.size() + dst];
        if (arrival < last) arrival = last;
        last = arrival;
    }
    SimEvent ev;
    ev.kind = EventKind::MessageArrival;
    ev.node = dst;
    ev.time = arrival;
    ev.send_time = clock_;
    ev.msg = std::move(msg);
    schedule(std::move(ev));
}

void Kernel::broadcast_except(NodeId src, NodeId skip, ProtocolMessage msg) {
    msg.bcast_id = ++send_id_;
    // neighbor lists are sorted, so delivery scheduling order is stable
    const auto nbs = topo_.neighbors(src); // copy: sends may tweak topology via drains
    for (NodeId nb : nbs) {
        if (nb == skip) continue;
        send_to(src, nb, msg);
    }
}

void Kernel::send_multi(NodeId src, const std::vector<NodeId>& dsts, ProtocolMessage msg) {
    msg.bcast_id = ++send_id_;
    for (NodeId d : dsts) send_to(src, d, msg);
}

void Kernel::set_timer(NodeId node, TimerSlot slot, SimTime delay, std::uint64_t payload) {
    SimEvent ev;
    ev.kind = EventKind::TimerFire;
    ev.node = node;
    ev.time = clock_ + delay;
    ev.slot = slot;
    ev.gen = nodes_[node].bump(slot);
    ev.payload = payload;
    schedule(std::move(ev));
}

void Kernel::note(SemanticEvent::Type t, NodeId node, std::uint64_t a, std::uint64_t b,
                  std::uint64_t c, const char* detail) {
    SemanticEvent ev;
    ev.type = t;
    ev.t = clock_;
    ev.node = node == kNoNode ? 0 : uid_of(node);
    ev.a = a; ev.b = b; ev.c = c;
    ev.detail = detail;
    log_.push_back(ev);
    if (tracing_) {
        std::string m = to_string(t);
        if (detail) { m += ':'; m += detail; }
        if (a || b || c) {
            m += '='; m += std::to_string(a);
            if (b || c) { m += ','; m += std::to_string(b); }
            if (c) { m += ','; m += std::to_string(c); }
        }
        marks_.push_back(std::move(m));
    }
}

void Kernel::latch_election(NodeState& n) {
    n.loss_latched = true;
    metrics_.elections_started++;
    note(SemanticEvent::Type::Latch, n.id);
}

void Kernel::election_begun(const ComputationId& comp, SimTime trigger_time) {
    ElectionRecord r;
    r.starter_uid = comp.starter_uid;
    r.epoch = comp.epoch;
    r.triggered_at = trigger_time;
    elections_.push_back(r);
}

void Kernel::election_completed(NodeState& starter, const ComputationId& comp, Uid winner,
                                std::uint32_t steps, std::uint32_t participants) {
    metrics_.elections_completed++;
    note(SemanticEvent::Type::CompComplete, starter.id, winner, comp.starter_uid);
    for (auto it = elections_.rbegin(); it != elections_.rend(); ++it) {
        if (it->starter_uid == comp.starter_uid && it->epoch == comp.epoch) {
            it->completed_at = clock_;
            it->last_install_at = clock_;
            it->winner = winner;
            it->logical_steps = steps;
            it->participants = participants;
            return;
        }
    }
}

void Kernel::election_install(const ComputationId& comp) {
    for (auto it = elections_.rbegin(); it != elections_.rend(); ++it) {
        if (it->starter_uid == comp.starter_uid && it->epoch == comp.epoch) {
            it->last_install_at = std::max(it->last_install_at, clock_);
            return;
        }
    }
}

void Kernel::exec_crash(NodeId id, bool strict) {
    NodeState& n = nodes_[id];
    if (!n.alive) {
        if (strict) throw InvalidTransition("crash of dead node uid " + std::to_string(n.uid));
        return;
    }
    touch_battery(n);
    n.alive = false;
    for (std::size_t s = 0; s < kTimerSlots; ++s) n.bump(static_cast<TimerSlot>(s));
    note(SemanticEvent::Type::Crash, id);
    refresh_topology(true);
}

void Kernel::exec_recover(NodeId id, bool strict) {
    NodeState& n = nodes_[id];
    if (n.alive) {
        if (strict) throw InvalidTransition("recover of alive node uid " + std::to_string(n.uid));
        return;
    }
    n.alive = true;
    n.charge_touched = clock_; // no idle drain while down
    n.reset_protocol();
    note(SemanticEvent::Type::Recover, id);
    refresh_topology(true);
    protocol_->on_recover(n);
}

void Kernel::refresh_topology(bool notify) {
    auto delta = topo_.recompute(alive_mask());
    if (!notify) return;
    for (const auto& ch : delta) {
        note(SemanticEvent::Type::LinkChange, ch.a, uid_of(ch.b), ch.up ? 1 : 0);
        if (nodes_[ch.a].alive) protocol_->on_link_change(nodes_[ch.a], ch.b, ch.up);
        if (nodes_[ch.b].alive) protocol_->on_link_change(nodes_[ch.b], ch.a, ch.up);
    }
}

RunResult Kernel::run() {
    for (const FaultEvent& f : build_fault_schedule(scn_, rng_faults_))
        inject_fault(id_of(f.uid), f.crash, f.time);
    for (const auto& [uid, t] : scn_.triggers) {
        SimEvent ev;
        ev.kind = EventKind::TimerFire;
        ev.node = id_of(uid);
        ev.time = t;
        ev.slot = TimerSlot::Trigger;
        ev.gen = nodes_[id_of(uid)].gen(TimerSlot::Trigger);
        schedule(std::move(ev));
    }
    if (scn_.mobility.kind != MobilityKind::Static && topo_.geometric()) {
        SimEvent ev;
        ev.kind = EventKind::MobilityStep;
        ev.time = scn_.mobility.step_period;
        schedule(std::move(ev));
    }
    if (scn_.algorithm == Algorithm::MasterSlave) {
        SimEvent ev;
        ev.kind = EventKind::RoundTick;
        ev.time = scn_.round_period;
        ev.payload = 1;
        schedule(std::move(ev));
    }
    for (NodeId i = 0; i < nodes_.size(); ++i) protocol_->on_start(nodes_[i]);

    std::uint64_t processed = 0;
    while (!queue_.empty()) {
        const SimEvent& top = queue_.top();
        if (top.time > scn_.horizon) { horizon_exceeded_ = true; break; }
        SimEvent ev = top;
        queue_.pop();
        assert(ev.time >= clock_);
        clock_ = ev.time;
        if (++processed > kMaxEventsPerRun) {
            std::string detail = "event budget exceeded at t=" + std::to_string(clock_) +
                                 " in scenario " + scn_.name + ";";
            for (std::size_t i = 0; i < kMsgKindCount; ++i)
                detail += " " + std::string(to_string(static_cast<MsgKind>(i))) + "=" +
                          std::to_string(metrics_.messages_by_kind[i]);
            throw SimError(detail);
        }
        process(ev);
    }
    if (!horizon_exceeded_ && clock_ < scn_.horizon && !queue_.empty()) horizon_exceeded_ = true;

    RunResult res;
    res.metrics = metrics_;
    res.log = std::move(log_);
    res.elections = std::move(elections_);
    res.horizon_exceeded = horizon_exceeded_;
    res.end_time = clock_;
    for (NodeId i = 0; i < nodes_.size(); ++i) {
        NodeState& n = nodes_[i];
        if (n.alive) touch_battery(n);
        RunResult::NodeSnap s;
        s.uid = n.uid;
        s.alive = n.alive;
        s.leader = n.leader_uid;
        s.role = n.alive ? protocol_->role_of(n) : "dead";
        s.battery = n.charge;
        s.mobility = mobility_of(i);
        s.members = n.cluster.members_known;
        res.nodes.push_back(std::move(s));
    }
    res.components = topo_.components();
    res.adjacency.reserve(nodes_.size());
    for (NodeId i = 0; i < nodes_.size(); ++i) res.adjacency.push_back(topo_.neighbors(i));
    if (tracing_) {
        trace_snapshots();
        res.trace_jsonl = std::move(trace_);
    }
    return res;
}

void Kernel::process(const SimEvent& ev) {
    marks_.clear();
    switch (ev.kind) {
        case EventKind::MessageArrival: {
            NodeState& n = nodes_[ev.node];
            if (!n.alive) {
                metrics_.dead_arrivals++;
            } else {
                touch_battery(n);
                apply_drain(n, scn_.drain_rx);
                if (n.alive) protocol_->on_message(n, ev.msg);
            }
            break;
        }
        case EventKind::TimerFire: {
            NodeState& n = nodes_[ev.node];
            if (!n.alive) break;
            if (ev.slot == TimerSlot::Trigger) {
                if (ev.gen == n.gen(TimerSlot::Trigger)) protocol_->on_trigger(n);
            } else if (ev.gen == n.gen(ev.slot)) {
                protocol_->on_timer(n, ev.slot, ev.payload);
            }
            break;
        }
        case EventKind::Crash:
            exec_crash(ev.node, ev.payload == 1);
            break;
        case EventKind::Recover:
            exec_recover(ev.node, ev.payload == 1);
            break;
        case EventKind::MobilityStep: {
            std::vector<ClusterId> cells;
            bool hierarchy = scn_.algorithm == Algorithm::Hierarchy;
            if (hierarchy) {
                cells.reserve(nodes_.size());
                for (NodeId i = 0; i < nodes_.size(); ++i) cells.push_back(topo_.cluster_of(i));
            }
            topo_.step_mobility(clock_, alive_mask(), rng_mobility_);
            refresh_topology(true);
            if (hierarchy) {
                for (NodeId i = 0; i < nodes_.size(); ++i)
                    if (nodes_[i].alive && !(topo_.cluster_of(i) == cells[i]))
                        protocol_->on_cell_change(nodes_[i]);
            }
            SimEvent next;
            next.kind = EventKind::MobilityStep;
            next.time = clock_ + scn_.mobility.step_period;
            schedule(std::move(next));
            break;
        }
        case EventKind::RoundTick: {
            for (NodeId i = 0; i < nodes_.size(); ++i)
                if (nodes_[i].alive)
                    protocol_->on_round(nodes_[i], static_cast<std::uint32_t>(ev.payload));
            SimEvent next;
            next.kind = EventKind::RoundTick;
            next.time = clock_ + scn_.round_period;
            next.payload = ev.payload + 1;
            schedule(std::move(next));
            break;
        }
    }
    if (tracing_) trace_event(ev);
}

void Kernel::trace_event(const SimEvent& ev) {
    std::string& t = trace_;
    t += "{";
    append_kv(t, "t", ev.time); t += ',';
    append_kv(t, "seq", ev.seq); t += ',';
    t += "\"kind\":\""; t += to_string(ev.kind); t += "\",";
    append_kv(t, "node", ev.node == kNoNode ? 0 : uid_of(ev.node));
    t += ",\"detail\":{";
    bool first = true;
    auto field = [&](const char* k, std::uint64_t v) {
        if (!first) t += ',';
        first = false;
        append_kv(t, k, v);
    };
    auto sfield = [&](const char* k, const std::string& v) {
        if (!first) t += ',';
        first = false;
        t += '"'; t += k; t += "\":\""; t += v; t += '"';
    };
    if (ev.kind == EventKind::MessageArrival) {
        const ProtocolMessage& m = ev.msg;
        sfield("msg", to_string(m.kind));
        field("src", uid_of(m.src));
        field("dst", uid_of(m.dst));
        field("sent", ev.send_time);
        switch (m.kind) {
            case MsgKind::Election:
                sfield("comp", std::to_string(m.comp.starter_uid) + "." + std::to_string(m.comp.epoch));
                break;
            case MsgKind::Ack:
                sfield("comp", std::to_string(m.comp.starter_uid) + "." + std::to_string(m.comp.epoch));
                field("child", m.ack_is_child ? 1 : 0);
                if (m.ack_aborted) field("aborted", 1);
                else field("best", m.best.uid);
                break;
            case MsgKind::Leader:
                sfield("comp", std::to_string(m.comp.starter_uid) + "." + std::to_string(m.comp.epoch));
                field("best", m.best.uid);
                if (m.scope == LeaderScope::Cluster) sfield("scope", "cluster");
                if (m.scope == LeaderScope::Global) sfield("scope", "global");
                break;
            case MsgKind::Heartbeat:
                field("leader", m.leader_uid);
                field("beat", m.beat);
                break;
            case MsgKind::InquiryReply:
                field("leader", m.has_leader ? m.leader_uid : 0);
                break;
            case MsgKind::TupleExchange:
            case MsgKind::TupleBroadcast:
                field("leader", m.tuple.leader_uid);
                field("asserted", m.tuple.asserted);
                break;
            case MsgKind::Invitation:
                if (m.invite_reply) field("reply", 1);
                if (m.invite_assign) field("assign", m.leader_uid);
                break;
            default:
                break;
        }
    } else if (ev.kind == EventKind::TimerFire) {
        static const char* slot_names[] = {"Alarm", "Beat", "Backoff", "Inquiry", "Invite",
                                           "InviteCollect", "MsFinalize", "Settle", "Trigger"};
        sfield("slot", slot_names[static_cast<std::size_t>(ev.slot)]);
    } else if (ev.kind == EventKind::RoundTick) {
        field("round", ev.payload);
    }
    if (!marks_.empty()) {
        if (!first) t += ',';
        t += "\"marks\":[";
        for (std::size_t i = 0; i < marks_.size(); ++i) {
            if (i) t += ',';
            t += '"'; t += marks_[i]; t += '"';
        }
        t += ']';
    }
    t += "}}\n";
}

void Kernel::trace_snapshots() {
    for (NodeId i = 0; i < nodes_.size(); ++i) {
        NodeState& n = nodes_[i];
        std::string& t = trace_;
        t += "{";
        append_kv(t, "t", clock_); t += ',';
        append_kv(t, "node", n.uid); t += ',';
        append_kv(t, "leader", n.leader_uid); t += ',';
        t += "\"role\":\""; t += n.alive ? protocol_->role_of(n) : "dead"; t += "\",";
        t += "\"battery\":\""; t += n.charge.str(); t += "\"}\n";
    }
    std::string& t = trace_;
    t += "{";
    append_kv(t, "t", clock_); t += ',';
    t += "\"horizon_exceeded\":";
    t += horizon_exceeded_ ? "true" : "false";
    t += "}\n";
}

} // namespace manet
