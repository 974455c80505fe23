#include "manet/topology.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <numeric>

namespace manet {

std::int64_t isqrt(std::int64_t v) {
    if (v < 0) return 0;
    if (v < 2) return v;
    std::int64_t r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

namespace {

// Union-find over node ids.
class Dsu {
public:
    explicit Dsu(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    std::size_t find(std::size_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }
    void unite(std::size_t i, std::size_t j) {
        i = find(i); j = find(j);
        if (i == j) return;
        if (rank_[i] < rank_[j]) std::swap(i, j);
        parent_[j] = i;
        if (rank_[i] == rank_[j]) ++rank_[i];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::uint8_t> rank_;
};

// round-to-nearest of a/b with b > 0, ties away from zero
std::int64_t round_div(std::int64_t a, std::int64_t b) {
    assert(b > 0);
    if (a >= 0) return (a + b / 2) / b;
    return -((-a + b / 2) / b);
}

} // namespace

void Topology::init_geometric(std::size_t n, std::int32_t width, std::int32_t height,
                              std::int64_t radio_range, std::vector<Position> positions,
                              const MobilityConfig& mob) {
    n_ = n;
    geometric_ = true;
    width_ = width;
    height_ = height;
    radio_range_ = radio_range;
    positions_ = std::move(positions);
    assert(positions_.size() == n_);
    mob_ = mob;
    waypoints_.assign(n_, {});
    disp_samples_.assign(n_, {});
    adj_.assign(n_, {});
    components_.clear();
}

void Topology::init_explicit(std::size_t n, std::vector<std::pair<NodeId, NodeId>> links) {
    n_ = n;
    geometric_ = false;
    radio_range_ = 1;
    positions_.assign(n_, {});
    explicit_adj_.assign(n_, {});
    for (auto [a, b] : links) {
        assert(a < n_ && b < n_ && a != b);
        explicit_adj_[a].push_back(b);
        explicit_adj_[b].push_back(a);
    }
    for (auto& v : explicit_adj_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    mob_ = {};
    waypoints_.assign(n_, {});
    disp_samples_.assign(n_, {});
    adj_.assign(n_, {});
    components_.clear();
}

std::vector<LinkChange> Topology::recompute(const std::vector<bool>& alive) {
    std::vector<std::vector<NodeId>> next(n_);
    if (geometric_) {
        std::int64_t r2 = radio_range_ * radio_range_;
        for (NodeId a = 0; a < n_; ++a) {
            if (!alive[a]) continue;
            for (NodeId b = a + 1; b < n_; ++b) {
                if (!alive[b]) continue;
                if (dist2(positions_[a], positions_[b]) <= r2) {
                    next[a].push_back(b);
                    next[b].push_back(a);
                }
            }
        }
    } else {
        for (NodeId a = 0; a < n_; ++a) {
            if (!alive[a]) continue;
            for (NodeId b : explicit_adj_[a])
                if (alive[b]) next[a].push_back(b);
        }
    }

    std::vector<LinkChange> delta;
    for (NodeId a = 0; a < n_; ++a) {
        auto& olda = adj_[a];
        auto& newa = next[a];
        std::size_t i = 0, j = 0;
        while (i < olda.size() || j < newa.size()) {
            if (j == newa.size() || (i < olda.size() && olda[i] < newa[j])) {
                if (olda[i] > a) delta.push_back({a, olda[i], false});
                ++i;
            } else if (i == olda.size() || newa[j] < olda[i]) {
                if (newa[j] > a) delta.push_back({a, newa[j], true});
                ++j;
            } else {
                ++i; ++j;
            }
        }
    }
    adj_ = std::move(next);
    rebuild_components(alive);
    return delta;
}

bool Topology::has_link(NodeId a, NodeId b) const {
    const auto& v = adj_[a];
    return std::binary_search(v.begin(), v.end(), b);
}

void Topology::rebuild_components(const std::vector<bool>& alive) {
    Dsu dsu(n_);
    for (NodeId a = 0; a < n_; ++a)
        for (NodeId b : adj_[a])
            if (b > a) dsu.unite(a, b);
    std::vector<std::vector<NodeId>> comps(n_);
    for (NodeId v = 0; v < n_; ++v)
        if (alive[v]) comps[dsu.find(v)].push_back(v);
    components_.clear();
    for (auto& c : comps)
        if (!c.empty()) components_.push_back(std::move(c));
    // members are sorted by construction; order the list by smallest member
    std::sort(components_.begin(), components_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

void Topology::force_waypoint(NodeId v, Position target, std::int64_t speed) {
    waypoints_[v] = {target, speed, 0, true};
}

void Topology::pick_waypoint(NodeId v, RngStream& rng) {
    Waypoint& w = waypoints_[v];
    w.target.x = static_cast<std::int32_t>(rng.uniform(0, width_));
    w.target.y = static_cast<std::int32_t>(rng.uniform(0, height_));
    w.speed = rng.uniform(mob_.v_min, mob_.v_max);
    if (w.speed < 1) w.speed = 1;
    w.has_target = true;
}

void Topology::step_mobility(SimTime now, const std::vector<bool>& alive, RngStream& rng) {
    if (mob_.kind == MobilityKind::Static || !geometric_) return;
    std::int64_t period = static_cast<std::int64_t>(mob_.step_period);
    for (NodeId v = 0; v < n_; ++v) {
        if (!alive[v]) continue;
        Waypoint& w = waypoints_[v];
        if (w.pause_left > 0) {
            w.pause_left = std::max<std::int64_t>(0, w.pause_left - period);
            continue;
        }
        if (!w.has_target) pick_waypoint(v, rng);
        Position& p = positions_[v];
        std::int64_t d2v = dist2(p, w.target);
        std::int64_t budget = w.speed * period;
        std::int64_t moved;
        if (budget * budget >= d2v) {
            moved = isqrt(d2v);
            p = w.target;
            w.has_target = false;
            w.pause_left = rng.uniform(mob_.p_min, mob_.p_max);
        } else {
            std::int64_t dist = isqrt(d2v);
            Position before = p;
            p.x += static_cast<std::int32_t>(round_div((std::int64_t(w.target.x) - p.x) * budget, dist));
            p.y += static_cast<std::int32_t>(round_div((std::int64_t(w.target.y) - p.y) * budget, dist));
            moved = isqrt(dist2(before, p));
        }
        if (moved > 0) {
            auto& samples = disp_samples_[v];
            samples.emplace_back(now, moved);
            // prune outside the metric window
            SimTime cutoff = now > mob_.metric_window ? now - mob_.metric_window : 0;
            std::size_t keep = 0;
            while (keep < samples.size() && samples[keep].first <= cutoff) ++keep;
            if (keep > 0) samples.erase(samples.begin(), samples.begin() + keep);
        }
    }
}

Rational Topology::mobility_value(NodeId v, SimTime now) const {
    if (now == 0) return Rational(0);
    SimTime span = std::min<SimTime>(now, mob_.metric_window);
    SimTime cutoff = now - span;
    std::int64_t sum = 0;
    for (const auto& [t, d] : disp_samples_[v])
        if (t > cutoff) sum += d;
    if (sum == 0) return Rational(0);
    return Rational(sum, static_cast<std::int64_t>(span));
}

std::vector<std::vector<NodeId>> components_by_bfs(std::size_t n,
                                                   const std::vector<bool>& alive,
                                                   const std::vector<std::vector<NodeId>>& adj) {
    std::vector<bool> seen(n, false);
    std::vector<std::vector<NodeId>> out;
    for (NodeId s = 0; s < n; ++s) {
        if (!alive[s] || seen[s]) continue;
        std::vector<NodeId> comp;
        std::deque<NodeId> q{s};
        seen[s] = true;
        while (!q.empty()) {
            NodeId v = q.front();
            q.pop_front();
            comp.push_back(v);
            for (NodeId w : adj[v])
                if (alive[w] && !seen[w]) { seen[w] = true; q.push_back(w); }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return out;
}

} // namespace manet
