#include "manet/masterslave.hpp"

#include <algorithm>

#include "manet/diffusion.hpp"

namespace manet {

std::unique_ptr<Protocol> make_protocol(Algorithm a, Kernel& k) {
    if (a == Algorithm::MasterSlave) return std::make_unique<MasterSlaveProtocol>(k);
    return std::make_unique<ExtremaProtocol>(k, a);
}

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

} // namespace

const char* MasterSlaveProtocol::role_of(const NodeState& n) const {
    if (n.ms.is_master) return "master";
    if (n.ms.my_masters.size() >= 2) return "pmp";
    if (n.ms.my_masters.size() == 1) return "slave";
    return "none";
}

void MasterSlaveProtocol::on_start(NodeState& n) {
    for (Uid mu : k_.scenario().masters)
        if (mu == n.uid) n.ms.is_master = true;
    if (!n.ms.is_master) {
        for (Uid mu : k_.scenario().masters) {
            NodeId mid = k_.id_of(mu);
            if (k_.has_link(n.id, mid)) sorted_insert(n.ms.my_masters, mid);
        }
        if (!n.ms.my_masters.empty()) n.ms.ever_had_master = true;
    }
    self_claim(n);
}

void MasterSlaveProtocol::self_claim(NodeState& n) {
    n.ms.tuple.leader_uid = n.uid;
    n.ms.tuple.value = k_.criterion_of(n.id);
    n.ms.tuple.asserted = n.ms.current_round;
    n.ms.fresh_round = n.ms.current_round;
    // the claim travels with the round exchanges; only an adoption is news
    n.ms.leader_broadcast = n.uid;
    k_.note(SemanticEvent::Type::TupleLearn, n.id, n.uid, 0, 0);
    mirror_leader(n);
}

void MasterSlaveProtocol::aspire(NodeState& n) {
    CriterionValue own = k_.criterion_of(n.id);
    if (!n.ms.tuple.valid() || own > n.ms.tuple.value) {
        self_claim(n);
    } else if (n.ms.tuple.leader_uid == n.uid) {
        // the leader itself keeps its claim fresh
        n.ms.tuple.asserted = n.ms.current_round;
        n.ms.fresh_round = n.ms.current_round;
    }
}

void MasterSlaveProtocol::mirror_leader(NodeState& n) {
    if (n.leader_uid != n.ms.tuple.leader_uid) {
        n.leader_uid = n.ms.tuple.leader_uid;
        n.leader_criterion = n.ms.tuple.value;
        k_.note(SemanticEvent::Type::Install, n.id, n.leader_uid, 0, 0, "tuple");
    }
}

bool MasterSlaveProtocol::adopt_tuple(NodeState& n, const MasterSlaveTuple& t,
                                      std::uint64_t send_id, NodeId from) {
    MasterSlaveTuple& mine = n.ms.tuple;
    if (!t.valid()) return false;
    if (!mine.valid() || t.value > mine.value) {
        mine = t;
        n.ms.fresh_round = n.ms.current_round;
        k_.note(SemanticEvent::Type::TupleLearn, n.id, t.leader_uid, send_id,
                from == kNoNode ? 0 : k_.uid_of(from));
        mirror_leader(n);
        return true;
    }
    if (t.leader_uid == mine.leader_uid && t.asserted > mine.asserted) {
        mine.asserted = t.asserted;
        n.ms.fresh_round = n.ms.current_round;
        return true;
    }
    return false;
}

bool MasterSlaveProtocol::obeys(const MasterSlaveState& ms, NodeId master,
                                std::uint32_t round) const {
    if (ms.my_masters.empty()) return false;
    return ms.my_masters[round % ms.my_masters.size()] == master;
}

bool MasterSlaveProtocol::slave_obeys_me(const MasterSlaveState::SlaveInfo& s, NodeId me,
                                         std::uint32_t round) const {
    if (s.masters.empty()) return true;
    return s.masters[round % s.masters.size()] == me;
}

MasterSlaveState::SlaveInfo* MasterSlaveProtocol::find_slave(NodeState& n, NodeId id) {
    for (auto& s : n.ms.slaves)
        if (s.id == id) return &s;
    return nullptr;
}

void MasterSlaveProtocol::on_round(NodeState& n, std::uint32_t round) {
    n.ms.current_round = round;
    aspire(n);
    // liveness of the believed leader: without fresh assertions, re-aspire
    if (n.ms.tuple.leader_uid != n.uid &&
        round > n.ms.fresh_round + k_.scenario().tuple_ttl) {
        self_claim(n);
    }
    if (n.ms.is_master) {
        master_round(n, round);
    } else {
        if (k_.scenario().enh.slave_participation && !n.ms.my_masters.empty()) {
            ProtocolMessage m;
            m.kind = MsgKind::TupleExchange;
            m.tuple = n.ms.tuple;
            m.exchange_reply = true; // one-way gossip, not to be re-answered
            for (NodeId nb : k_.neighbors(n.id))
                if (!sorted_contains(n.ms.my_masters, nb)) k_.send_to(n.id, nb, m);
        }
        maybe_invite(n, round);
    }
}

void MasterSlaveProtocol::master_round(NodeState& n, std::uint32_t round) {
    n.ms.round_replies.clear();
    ProtocolMessage m;
    m.kind = MsgKind::TupleExchange;
    m.tuple = n.ms.tuple;
    m.sender_is_master = true;
    for (NodeId nb : k_.neighbors(n.id)) {
        if (sorted_contains(n.ms.master_neighbors, nb)) continue;
        if (const auto* s = find_slave(n, nb)) {
            if (slave_obeys_me(*s, n.id, round)) k_.send_to(n.id, nb, m);
        } else {
            k_.send_to(n.id, nb, m); // recruit an unregistered neighbor
        }
    }
    // degenerate but possible: adjacent masters share their estimates, or a
    // lone pair of piconets could split-brain forever
    ProtocolMessage g = m;
    g.exchange_reply = true;
    for (NodeId mn : n.ms.master_neighbors)
        if (k_.has_link(n.id, mn)) k_.send_to(n.id, mn, g);
    k_.set_timer(n.id, TimerSlot::MsFinalize, 2 * k_.scenario().d_max + 1, round);
}

void MasterSlaveProtocol::finalize_round(NodeState& n, std::uint32_t round) {
    (void)round;
    for (const auto& [from, t] : n.ms.round_replies) adopt_tuple(n, t, 0, from);
    n.ms.round_replies.clear();
    if (!n.ms.tuple.valid()) return;
    // broadcast only on improvement; freshness rides the per-round exchanges
    if (n.ms.tuple.leader_uid == n.ms.leader_broadcast) return;
    std::vector<NodeId> dsts;
    for (const auto& s : n.ms.slaves)
        if (k_.has_link(n.id, s.id)) dsts.push_back(s.id);
    if (!dsts.empty()) {
        ProtocolMessage b;
        b.kind = MsgKind::TupleBroadcast;
        b.tuple = n.ms.tuple;
        b.sender_is_master = true;
        k_.send_multi(n.id, dsts, b);
    }
    n.ms.leader_broadcast = n.ms.tuple.leader_uid;
}

void MasterSlaveProtocol::send_reply(NodeState& n, NodeId to) {
    ProtocolMessage r;
    r.kind = MsgKind::TupleExchange;
    r.exchange_reply = true;
    r.sender_is_master = n.ms.is_master;
    r.tuple = n.ms.tuple;
    for (NodeId mid : n.ms.my_masters) r.masters_list.push_back(k_.uid_of(mid));
    k_.send_to(n.id, to, r);
}

void MasterSlaveProtocol::on_tuple_exchange(NodeState& n, const ProtocolMessage& m) {
    bool improved = adopt_tuple(n, m.tuple, m.bcast_id, m.src);
    if (m.exchange_reply) {
        if (!n.ms.is_master && !m.sender_is_master && improved &&
            k_.scenario().enh.slave_participation) {
            // participation gossip brought news: forward the max to our
            // masters right away so it lands before this round's aggregation
            for (NodeId mid : n.ms.my_masters)
                if (k_.has_link(n.id, mid)) send_reply(n, mid);
        }
        // a reply or participation gossip; masters fold it into the round
        if (n.ms.is_master) {
            if (m.sender_is_master) {
                sorted_insert(n.ms.master_neighbors, m.src);
            } else {
                n.ms.round_replies.push_back({m.src, m.tuple});
                auto* s = find_slave(n, m.src);
                if (!s) {
                    n.ms.slaves.push_back({m.src, {}});
                    std::sort(n.ms.slaves.begin(), n.ms.slaves.end(),
                              [](const auto& a, const auto& b) { return a.id < b.id; });
                    s = find_slave(n, m.src);
                }
                s->masters.clear();
                for (Uid mu : m.masters_list) s->masters.push_back(k_.id_of(mu));
                std::sort(s->masters.begin(), s->masters.end());
            }
        }
        return;
    }
    if (m.sender_is_master) {
        // contact from a master: register, obey the slot owner
        if (n.ms.is_master) {
            send_reply(n, m.src); // mutual master discovery, reply once
            sorted_insert(n.ms.master_neighbors, m.src);
            return;
        }
        bool known = sorted_contains(n.ms.my_masters, m.src);
        if (!known) {
            sorted_insert(n.ms.my_masters, m.src);
            n.ms.ever_had_master = true;
        }
        n.ms.last_master_round = n.ms.current_round;
        if (obeys(n.ms, m.src, n.ms.current_round) || !known) {
            aspire(n);
            send_reply(n, m.src);
        }
    }
}

void MasterSlaveProtocol::on_tuple_broadcast(NodeState& n, const ProtocolMessage& m) {
    adopt_tuple(n, m.tuple, m.bcast_id, m.src);
    if (!n.ms.is_master && sorted_contains(n.ms.my_masters, m.src))
        n.ms.last_master_round = n.ms.current_round;
}

void MasterSlaveProtocol::maybe_invite(NodeState& n, std::uint32_t round) {
    if (n.ms.is_master || !n.ms.my_masters.empty()) return;
    if (n.ms.invite_pending || n.ms.collecting_invites) return;
    bool allowed = k_.scenario().enh.invitation || !n.ms.ever_had_master;
    if (!allowed) return;
    std::uint32_t waited = round - n.ms.last_master_round;
    if (waited < 2) return;
    n.ms.invite_pending = true;
    SimTime jitter = static_cast<SimTime>(
        k_.backoff_rng().uniform(0, static_cast<std::int64_t>(2 * k_.scenario().round_period)));
    k_.set_timer(n.id, TimerSlot::Invite, jitter + 1);
}

void MasterSlaveProtocol::on_timer(NodeState& n, TimerSlot slot, std::uint64_t payload) {
    switch (slot) {
        case TimerSlot::MsFinalize:
            if (n.ms.is_master) finalize_round(n, static_cast<std::uint32_t>(payload));
            break;
        case TimerSlot::Invite: {
            n.ms.invite_pending = false;
            if (n.ms.is_master || !n.ms.my_masters.empty()) return;
            if (n.ms.ever_had_master) k_.metrics().invitations_repair++;
            else k_.metrics().invitations_bootstrap++;
            n.ms.collecting_invites = true;
            n.ms.invite_replies.clear();
            n.ms.master_replies.clear();
            ProtocolMessage m;
            m.kind = MsgKind::Invitation;
            k_.broadcast(n.id, m);
            k_.set_timer(n.id, TimerSlot::InviteCollect, 2 * k_.scenario().d_max + 1);
            break;
        }
        case TimerSlot::InviteCollect: {
            n.ms.collecting_invites = false;
            if (n.ms.is_master || !n.ms.my_masters.empty()) return;
            if (!n.ms.master_replies.empty()) return; // a master is adjacent; recruit absorbs us
            if (n.ms.invite_replies.empty()) {
                // a piconet needs two nodes: wait and re-invite
                n.ms.invite_pending = true;
                SimTime jitter = static_cast<SimTime>(k_.backoff_rng().uniform(
                    1, static_cast<std::int64_t>(2 * k_.scenario().round_period)));
                k_.set_timer(n.id, TimerSlot::Invite, jitter);
                return;
            }
            const std::pair<Uid, CriterionValue>* win = nullptr;
            for (const auto& r : n.ms.invite_replies)
                if (!win || r.second > win->second) win = &r;
            ProtocolMessage m;
            m.kind = MsgKind::Invitation;
            m.invite_assign = true;
            m.leader_uid = win->first;
            k_.broadcast(n.id, m);
            break;
        }
        default:
            break;
    }
}

void MasterSlaveProtocol::on_invitation(NodeState& n, const ProtocolMessage& m) {
    if (m.invite_assign) {
        if (m.leader_uid == n.uid && !n.ms.is_master) {
            n.ms.is_master = true;
            n.ms.my_masters.clear();
            k_.note(SemanticEvent::Type::RoleChange, n.id, 1);
        }
        return;
    }
    if (m.invite_reply) {
        if (!n.ms.collecting_invites) return;
        if (m.sender_is_master) n.ms.master_replies.push_back(k_.uid_of(m.src));
        else n.ms.invite_replies.push_back({k_.uid_of(m.src), m.invite_criterion});
        return;
    }
    // concurrent invitations: the lower-uid inviter stands down
    if (n.ms.invite_pending || n.ms.collecting_invites) {
        if (k_.uid_of(m.src) > n.uid) {
            n.ms.invite_pending = false;
            n.ms.collecting_invites = false;
            k_.cancel_timer(n, TimerSlot::Invite);
            k_.cancel_timer(n, TimerSlot::InviteCollect);
        } else {
            return; // ours outranks theirs; they will stand down
        }
    }
    // a plain invitation: make ourselves a candidate
    ProtocolMessage r;
    r.kind = MsgKind::Invitation;
    r.invite_reply = true;
    r.sender_is_master = n.ms.is_master;
    r.invite_criterion = k_.criterion_of(n.id);
    k_.send_to(n.id, m.src, r);
}

void MasterSlaveProtocol::on_message(NodeState& n, const ProtocolMessage& m) {
    switch (m.kind) {
        case MsgKind::TupleExchange: on_tuple_exchange(n, m); break;
        case MsgKind::TupleBroadcast: on_tuple_broadcast(n, m); break;
        case MsgKind::Invitation: on_invitation(n, m); break;
        default:
            k_.metrics().dropped_stale++;
            break;
    }
}

void MasterSlaveProtocol::on_link_change(NodeState& n, NodeId peer, bool up) {
    if (up) return;
    sorted_erase(n.ms.my_masters, peer);
    sorted_erase(n.ms.master_neighbors, peer);
    for (auto it = n.ms.slaves.begin(); it != n.ms.slaves.end(); ++it) {
        if (it->id == peer) { n.ms.slaves.erase(it); break; }
    }
}

void MasterSlaveProtocol::on_recover(NodeState& n) {
    n.ms.current_round = 0;
    n.ms.last_master_round = 0;
    self_claim(n);
}

void MasterSlaveProtocol::on_trigger(NodeState& n) {
    // an injected trigger maps to the invitation path
    if (!n.ms.is_master && n.ms.my_masters.empty() && !n.ms.invite_pending &&
        !n.ms.collecting_invites) {
        n.ms.invite_pending = true;
        k_.set_timer(n.id, TimerSlot::Invite, 1);
    }
}

} // namespace manet
