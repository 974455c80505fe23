#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "manet/rational.hpp"
#include "manet/topology.hpp"
#include "manet/types.hpp"

namespace manet {

enum class Algorithm : std::uint8_t { Diffusion, Candidates, Hierarchy, MasterSlave };

const char* to_string(Algorithm a);

struct ParseError : SimError {
    ParseError(int line, const std::string& what)
        : SimError("parse error at line " + std::to_string(line) + ": " + what) {}
};
struct ValidationError : SimError {
    explicit ValidationError(const std::string& what) : SimError("invalid scenario: " + what) {}
};
struct UnknownKey : SimError {
    UnknownKey(int line, const std::string& key)
        : SimError("unknown key at line " + std::to_string(line) + ": " + key) {}
};

struct EnhancementFlags {
    bool clustering = false;        // locality clusters, two-phase election
    bool join_gating = false;       // defer hellos while an election runs
    bool inquiry_on_recover = false;
    bool starter_quality = false;   // computation conflicts by starter criterion
    bool candidate_criteria = false;// candidates ranked by composite criterion
    bool csma_backoff = false;
    bool slave_participation = false;
    bool invitation = false;        // re-invitation after master loss mid-run
};

struct FaultPlanConfig {
    bool enabled = false;
    Rational rate;              // per-node failure probability per epoch
    Rational leader_inclusion;  // probability the epoch also fails the leader
    SimTime epoch_len = 0;
    std::uint32_t epochs = 0;
    SimTime downtime = 0;       // crash-to-recover gap; 0 -> epoch_len
    SimTime start = 0;          // first epoch boundary; 0 -> epoch_len
};

struct ExplicitFault {
    Uid uid;
    bool crash; // false = recover
    SimTime time;
};

// A scenario plus the binary version determines a run bit-for-bit.
struct Scenario {
    std::string name = "unnamed";
    Algorithm algorithm = Algorithm::Diffusion;
    std::size_t nodes = 0;
    std::uint64_t seed = 1;
    SimTime horizon = 10000;

    // topology
    enum class TopoKind : std::uint8_t { Geometric, Explicit, Ring, Line } topo_kind = TopoKind::Geometric;
    std::int32_t width = 500, height = 500;
    std::int64_t radio_range = 100;
    bool placement_random = true;
    std::map<Uid, Position> positions;                // explicit placements
    std::vector<std::pair<Uid, Uid>> links;           // explicit adjacency
    MobilityConfig mobility;

    // link model (applies to every link)
    SimTime d_min = 1, d_max = 2;
    bool fifo = false;
    Rational loss;        // 0 = reliable

    // heartbeat
    SimTime hb_period = 10;   // 0 disables heartbeats
    SimTime hb_timeout = 35;
    SimTime hb_stagger = 64;  // detection stagger span, 0 = simultaneous
    bool hb_flood = true;     // beats flood hop-by-hop vs neighbors only

    // criterion
    CriterionMode crit_mode = CriterionMode::UidOnly;
    Rational w_b{1, 2}, w_m{1, 2};

    // battery
    Rational battery_default{1};
    std::map<Uid, Rational> battery_init;
    Rational battery_min, battery_max;   // random init range; max=0 -> fixed default
    Rational drain_tx, drain_rx, drain_idle;

    EnhancementFlags enh;
    SimTime backoff_t_slot = 2;
    SimTime inquiry_window = 0;  // 0 -> 2 * d_max

    // master/slave
    SimTime round_period = 12;
    std::uint32_t tuple_ttl = 24;        // rounds without freshness before re-aspiring
    std::vector<Uid> masters;            // explicit roles; empty -> invitation bootstrap

    FaultPlanConfig fault_plan;
    std::vector<ExplicitFault> explicit_faults;
    std::vector<std::pair<Uid, SimTime>> triggers; // injected election triggers
    bool bootstrap_auto = true;          // leaderless nodes self-arm at t=0
    Uid initial_leader = 0;              // pre-converged leader at t=0 (0 = none)

    bool trace = false;

    void validate() const;               // throws ValidationError
    static Scenario parse(const std::string& text);       // throws Parse/Validation/UnknownKey
    static Scenario parse_file(const std::string& path);
    void apply_override(const std::string& key, const std::string& value); // --set
    static std::string defaults_text();  // for --print-defaults

    // one request/reply round trip at worst delay; the +1 keeps the timer
    // from beating a reply that lands on the closing tick
    SimTime inquiry_window_or_default() const {
        return inquiry_window ? inquiry_window : 2 * d_max + 1;
    }
};

inline const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Diffusion: return "diffusion";
        case Algorithm::Candidates: return "candidates";
        case Algorithm::Hierarchy: return "hierarchy";
        case Algorithm::MasterSlave: return "masterslave";
    }
    return "?";
}

} // namespace manet
