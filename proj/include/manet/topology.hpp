#pragma once

#include <cstdint>
#include <vector>

#include "manet/message.hpp"
#include "manet/rational.hpp"
#include "manet/rng.hpp"
#include "manet/types.hpp"

namespace manet {

struct Position {
    std::int32_t x = 0;
    std::int32_t y = 0;
    friend bool operator==(const Position& a, const Position& b) {
        return a.x == b.x && a.y == b.y;
    }
};

inline std::int64_t dist2(const Position& a, const Position& b) {
    std::int64_t dx = std::int64_t(a.x) - b.x;
    std::int64_t dy = std::int64_t(a.y) - b.y;
    return dx * dx + dy * dy;
}

std::int64_t isqrt(std::int64_t v); // floor(sqrt(v)), v >= 0

enum class MobilityKind : std::uint8_t { Static, RandomWaypoint };

struct MobilityConfig {
    MobilityKind kind = MobilityKind::Static;
    std::int64_t v_min = 1, v_max = 1;   // distance units per tick
    std::int64_t p_min = 0, p_max = 0;   // pause ticks at a waypoint
    SimTime step_period = 1;             // ticks between mobility steps
    SimTime metric_window = 100;         // W_m for the mobility metric
};

struct LinkChange {
    NodeId a, b;
    bool up;
};

// Node positions, radio links and connected components. Two modes:
// geometric (unit disk: link iff both alive and squared distance <= R^2)
// and explicit (fixed adjacency from the scenario, used by fixture graphs).
class Topology {
public:
    void init_geometric(std::size_t n, std::int32_t width, std::int32_t height,
                        std::int64_t radio_range, std::vector<Position> positions,
                        const MobilityConfig& mob);
    void init_explicit(std::size_t n, std::vector<std::pair<NodeId, NodeId>> links);

    bool geometric() const { return geometric_; }
    std::size_t size() const { return n_; }
    std::int64_t radio_range() const { return radio_range_; }
    const Position& position(NodeId v) const { return positions_[v]; }
    const MobilityConfig& mobility() const { return mob_; }

    // Recomputes links and components for the given alive set; returns the
    // link delta against the previous state.
    std::vector<LinkChange> recompute(const std::vector<bool>& alive);

    bool has_link(NodeId a, NodeId b) const;
    const std::vector<NodeId>& neighbors(NodeId v) const { return adj_[v]; }

    // Exact connected components among alive nodes, each sorted, the list
    // sorted by smallest member.
    const std::vector<std::vector<NodeId>>& components() const { return components_; }

    // Advances waypoint state by one step; positions of dead nodes freeze.
    // Call recompute() afterwards to refresh links. Records displacement
    // samples for the mobility metric.
    void step_mobility(SimTime now, const std::vector<bool>& alive, RngStream& rng);

    // Mean displacement per tick over the last metric_window ticks (over the
    // node's lifetime when younger than the window).
    Rational mobility_value(NodeId v, SimTime now) const;

    // Pins the next waypoint (tests and scripted motion).
    void force_waypoint(NodeId v, Position target, std::int64_t speed);

    ClusterId cluster_of(NodeId v) const {
        const Position& p = positions_[v];
        std::int32_t r = static_cast<std::int32_t>(radio_range_ > 0 ? radio_range_ : 1);
        return {p.x / r, p.y / r};
    }

private:
    struct Waypoint {
        Position target;
        std::int64_t speed = 0;
        std::int64_t pause_left = 0;
        bool has_target = false;
    };

    void rebuild_components(const std::vector<bool>& alive);
    void pick_waypoint(NodeId v, RngStream& rng);

    std::size_t n_ = 0;
    bool geometric_ = true;
    std::int32_t width_ = 0, height_ = 0;
    std::int64_t radio_range_ = 0;
    std::vector<Position> positions_;
    std::vector<std::vector<NodeId>> explicit_adj_;

    std::vector<std::vector<NodeId>> adj_; // current links, sorted
    std::vector<std::vector<NodeId>> components_;

    MobilityConfig mob_;
    std::vector<Waypoint> waypoints_;
    std::vector<std::vector<std::pair<SimTime, std::int64_t>>> disp_samples_;
};

// Brute-force reachability used by tests and the safety oracle to verify
// the component computation independently.
std::vector<std::vector<NodeId>> components_by_bfs(std::size_t n,
                                                   const std::vector<bool>& alive,
                                                   const std::vector<std::vector<NodeId>>& adj);

} // namespace manet
