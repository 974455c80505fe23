#include "manet/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace manet {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::int64_t parse_int(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        std::int64_t r = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("junk");
        return r;
    } catch (const std::exception&) {
        throw ParseError(line, "expected integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ParseError(line, "expected boolean, got '" + v + "'");
}

Rational parse_rat(const std::string& v, int line) {
    try {
        return Rational::parse(v);
    } catch (const std::exception&) {
        throw ParseError(line, "expected number, got '" + v + "'");
    }
}

std::vector<std::string> split_ws(const std::string& v) {
    std::vector<std::string> out;
    std::istringstream is(v);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

// "3@100" -> (3, 100)
std::pair<Uid, SimTime> parse_at(const std::string& tok, int line) {
    auto at = tok.find('@');
    if (at == std::string::npos) throw ParseError(line, "expected uid@time, got '" + tok + "'");
    return {static_cast<Uid>(parse_int(tok.substr(0, at), line)),
            static_cast<SimTime>(parse_int(tok.substr(at + 1), line))};
}

// dispatches one fully-qualified key; returns false when the key is unknown
bool set_key(Scenario& s, const std::string& key, const std::string& value, int line) {
    auto as_time = [&] { return static_cast<SimTime>(parse_int(value, line)); };
    auto as_int = [&] { return parse_int(value, line); };

    if (key == "name") { s.name = value; return true; }
    if (key == "algorithm") {
        if (value == "diffusion") s.algorithm = Algorithm::Diffusion;
        else if (value == "candidates") s.algorithm = Algorithm::Candidates;
        else if (value == "hierarchy") s.algorithm = Algorithm::Hierarchy;
        else if (value == "masterslave") s.algorithm = Algorithm::MasterSlave;
        else throw ValidationError("algorithm must be one of diffusion|candidates|hierarchy|masterslave, got '" + value + "'");
        return true;
    }
    if (key == "nodes") { s.nodes = static_cast<std::size_t>(as_int()); return true; }
    if (key == "seed") { s.seed = static_cast<std::uint64_t>(as_int()); return true; }
    if (key == "horizon") { s.horizon = as_time(); return true; }
    if (key == "trace") { s.trace = parse_bool(value, line); return true; }
    if (key == "bootstrap") {
        if (value == "auto") s.bootstrap_auto = true;
        else if (value == "none") s.bootstrap_auto = false;
        else throw ValidationError("bootstrap must be auto|none");
        return true;
    }
    if (key == "initial_leader") { s.initial_leader = static_cast<Uid>(as_int()); return true; }

    if (key == "arena.width") { s.width = static_cast<std::int32_t>(as_int()); return true; }
    if (key == "arena.height") { s.height = static_cast<std::int32_t>(as_int()); return true; }
    if (key == "arena.radio_range") { s.radio_range = as_int(); return true; }
    if (key == "arena.placement") {
        if (value == "random") s.placement_random = true;
        else if (value == "explicit") s.placement_random = false;
        else throw ValidationError("placement must be random|explicit");
        return true;
    }
    if (key.rfind("arena.pos.", 0) == 0) {
        Uid uid = static_cast<Uid>(parse_int(key.substr(10), line));
        auto comma = value.find(',');
        if (comma == std::string::npos) throw ParseError(line, "expected x,y");
        Position p;
        p.x = static_cast<std::int32_t>(parse_int(trim(value.substr(0, comma)), line));
        p.y = static_cast<std::int32_t>(parse_int(trim(value.substr(comma + 1)), line));
        s.positions[uid] = p;
        return true;
    }

    if (key == "topology.kind") {
        if (value == "geometric") s.topo_kind = Scenario::TopoKind::Geometric;
        else if (value == "explicit") s.topo_kind = Scenario::TopoKind::Explicit;
        else if (value == "ring") s.topo_kind = Scenario::TopoKind::Ring;
        else if (value == "line") s.topo_kind = Scenario::TopoKind::Line;
        else throw ValidationError("topology.kind must be geometric|explicit|ring|line");
        return true;
    }
    if (key == "topology.links") {
        for (const auto& tok : split_ws(value)) {
            auto dash = tok.find('-');
            if (dash == std::string::npos) throw ParseError(line, "expected a-b link, got '" + tok + "'");
            s.links.push_back({static_cast<Uid>(parse_int(tok.substr(0, dash), line)),
                               static_cast<Uid>(parse_int(tok.substr(dash + 1), line))});
        }
        return true;
    }

    if (key == "mobility.kind") {
        if (value == "static") s.mobility.kind = MobilityKind::Static;
        else if (value == "waypoint") s.mobility.kind = MobilityKind::RandomWaypoint;
        else throw ValidationError("mobility.kind must be static|waypoint");
        return true;
    }
    if (key == "mobility.v_min") { s.mobility.v_min = as_int(); return true; }
    if (key == "mobility.v_max") { s.mobility.v_max = as_int(); return true; }
    if (key == "mobility.pause_min") { s.mobility.p_min = as_int(); return true; }
    if (key == "mobility.pause_max") { s.mobility.p_max = as_int(); return true; }
    if (key == "mobility.step") { s.mobility.step_period = as_time(); return true; }
    if (key == "mobility.window") { s.mobility.metric_window = as_time(); return true; }

    if (key == "links.d_min") { s.d_min = as_time(); return true; }
    if (key == "links.d_max") { s.d_max = as_time(); return true; }
    if (key == "links.fifo") { s.fifo = parse_bool(value, line); return true; }
    if (key == "links.loss") { s.loss = parse_rat(value, line); return true; }

    if (key == "heartbeat.period") { s.hb_period = as_time(); return true; }
    if (key == "heartbeat.timeout") { s.hb_timeout = as_time(); return true; }
    if (key == "heartbeat.stagger") { s.hb_stagger = as_time(); return true; }
    if (key == "heartbeat.flood") { s.hb_flood = parse_bool(value, line); return true; }

    if (key == "criterion.mode") {
        if (value == "uid") s.crit_mode = CriterionMode::UidOnly;
        else if (value == "composite") s.crit_mode = CriterionMode::Composite;
        else throw ValidationError("criterion.mode must be uid|composite");
        return true;
    }
    if (key == "criterion.w_b") { s.w_b = parse_rat(value, line); return true; }
    if (key == "criterion.w_m") { s.w_m = parse_rat(value, line); return true; }

    if (key == "battery.default") { s.battery_default = parse_rat(value, line); return true; }
    if (key.rfind("battery.init.", 0) == 0) {
        Uid uid = static_cast<Uid>(parse_int(key.substr(13), line));
        s.battery_init[uid] = parse_rat(value, line);
        return true;
    }
    if (key == "battery.random_min") { s.battery_min = parse_rat(value, line); return true; }
    if (key == "battery.random_max") { s.battery_max = parse_rat(value, line); return true; }
    if (key == "battery.drain_tx") { s.drain_tx = parse_rat(value, line); return true; }
    if (key == "battery.drain_rx") { s.drain_rx = parse_rat(value, line); return true; }
    if (key == "battery.drain_idle") { s.drain_idle = parse_rat(value, line); return true; }

    if (key == "enhancements.clustering") { s.enh.clustering = parse_bool(value, line); return true; }
    if (key == "enhancements.join_gating") { s.enh.join_gating = parse_bool(value, line); return true; }
    if (key == "enhancements.inquiry_on_recover") { s.enh.inquiry_on_recover = parse_bool(value, line); return true; }
    if (key == "enhancements.starter_quality") { s.enh.starter_quality = parse_bool(value, line); return true; }
    if (key == "enhancements.candidate_criteria") { s.enh.candidate_criteria = parse_bool(value, line); return true; }
    if (key == "enhancements.csma_backoff") { s.enh.csma_backoff = parse_bool(value, line); return true; }
    if (key == "enhancements.slave_participation") { s.enh.slave_participation = parse_bool(value, line); return true; }
    if (key == "enhancements.invitation") { s.enh.invitation = parse_bool(value, line); return true; }

    if (key == "backoff.t_slot") { s.backoff_t_slot = as_time(); return true; }
    if (key == "inquiry.window") { s.inquiry_window = as_time(); return true; }

    if (key == "round.period") { s.round_period = as_time(); return true; }
    if (key == "round.tuple_ttl") { s.tuple_ttl = static_cast<std::uint32_t>(as_int()); return true; }
    if (key == "roles.masters") {
        for (const auto& tok : split_ws(value))
            s.masters.push_back(static_cast<Uid>(parse_int(tok, line)));
        return true;
    }

    if (key == "fault_plan.rate") { s.fault_plan.rate = parse_rat(value, line); s.fault_plan.enabled = true; return true; }
    if (key == "fault_plan.leader_inclusion") { s.fault_plan.leader_inclusion = parse_rat(value, line); return true; }
    if (key == "fault_plan.epoch_len") { s.fault_plan.epoch_len = as_time(); return true; }
    if (key == "fault_plan.epochs") { s.fault_plan.epochs = static_cast<std::uint32_t>(as_int()); return true; }
    if (key == "fault_plan.downtime") { s.fault_plan.downtime = as_time(); return true; }
    if (key == "fault_plan.start") { s.fault_plan.start = as_time(); return true; }

    if (key == "faults.crash" || key == "faults.recover") {
        bool crash = key == "faults.crash";
        for (const auto& tok : split_ws(value)) {
            auto [uid, t] = parse_at(tok, line);
            s.explicit_faults.push_back({uid, crash, t});
        }
        return true;
    }
    if (key == "triggers.at") {
        for (const auto& tok : split_ws(value)) s.triggers.push_back(parse_at(tok, line));
        return true;
    }
    return false;
}

} // namespace

Scenario Scenario::parse(const std::string& text) {
    Scenario s;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        std::string l = trim(raw);
        if (l.empty()) continue;
        if (l.front() == '[') {
            if (l.back() != ']') throw ParseError(line, "unterminated section header");
            section = trim(l.substr(1, l.size() - 2));
            if (section.empty()) throw ParseError(line, "empty section name");
            continue;
        }
        auto eq = l.find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected key = value");
        std::string key = trim(l.substr(0, eq));
        std::string value = trim(l.substr(eq + 1));
        if (key.empty()) throw ParseError(line, "empty key");
        std::string full = section.empty() ? key : section + "." + key;
        if (!set_key(s, full, value, line)) throw UnknownKey(line, full);
    }
    if (s.enh.candidate_criteria) s.crit_mode = CriterionMode::Composite;
    s.validate();
    return s;
}

Scenario Scenario::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open scenario file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

void Scenario::apply_override(const std::string& key, const std::string& value) {
    if (!set_key(*this, key, value, 0)) throw UnknownKey(0, key);
    if (enh.candidate_criteria) crit_mode = CriterionMode::Composite;
}

void Scenario::validate() const {
    if (nodes < 1 || nodes > 4096) throw ValidationError("nodes must be in [1, 4096]");
    if (horizon == 0) throw ValidationError("horizon must be positive");
    if (d_min < 1 || d_max < d_min) throw ValidationError("link delays need 1 <= d_min <= d_max");
    if (loss < Rational(0) || loss > Rational(1)) throw ValidationError("links.loss must be in [0,1]");
    if (hb_period > 0 && hb_timeout <= hb_period)
        throw ValidationError("heartbeat.timeout must exceed heartbeat.period");
    if (bootstrap_auto && hb_period == 0 && algorithm != Algorithm::MasterSlave)
        throw ValidationError("bootstrap=auto requires heartbeats (heartbeat.period > 0)");
    if (crit_mode == CriterionMode::Composite) {
        if (w_b < Rational(0) || w_m < Rational(0) || !(w_b + w_m == Rational(1)))
            throw ValidationError("criterion weights must be non-negative and sum to 1");
    }
    if (battery_default < Rational(0) || battery_default > Rational(1))
        throw ValidationError("battery.default must be in [0,1]");
    for (const auto& [uid, v] : battery_init) {
        if (uid < 1 || uid > nodes) throw ValidationError("battery.init names unknown uid " + std::to_string(uid));
        if (v < Rational(0) || v > Rational(1)) throw ValidationError("battery.init out of [0,1]");
    }
    if (!(battery_max == Rational(0)) && battery_max < battery_min)
        throw ValidationError("battery.random_max < battery.random_min");
    if (drain_tx < Rational(0) || drain_rx < Rational(0) || drain_idle < Rational(0))
        throw ValidationError("battery drains must be non-negative");

    if (topo_kind == TopoKind::Geometric) {
        if (width < 1 || height < 1) throw ValidationError("arena must be at least 1x1");
        if (radio_range < 1) throw ValidationError("radio_range must be positive");
        for (const auto& [uid, p] : positions) {
            if (uid < 1 || uid > nodes) throw ValidationError("arena.pos names unknown uid " + std::to_string(uid));
            if (p.x < 0 || p.x > width || p.y < 0 || p.y > height)
                throw ValidationError("position of uid " + std::to_string(uid) + " outside arena");
        }
        if (!placement_random) {
            for (Uid u = 1; u <= nodes; ++u)
                if (!positions.count(u))
                    throw ValidationError("placement=explicit but uid " + std::to_string(u) + " has no position");
        }
    } else {
        if (mobility.kind != MobilityKind::Static)
            throw ValidationError("mobility requires a geometric topology");
        if (topo_kind == TopoKind::Explicit) {
            if (links.empty() && nodes > 1) throw ValidationError("explicit topology needs links");
            for (auto [a, b] : links) {
                if (a < 1 || a > nodes || b < 1 || b > nodes || a == b)
                    throw ValidationError("bad link " + std::to_string(a) + "-" + std::to_string(b));
            }
        }
    }
    if (mobility.kind == MobilityKind::RandomWaypoint) {
        if (mobility.v_min < 1 || mobility.v_max < mobility.v_min)
            throw ValidationError("waypoint speeds need 1 <= v_min <= v_max");
        if (mobility.p_min < 0 || mobility.p_max < mobility.p_min)
            throw ValidationError("waypoint pauses need 0 <= pause_min <= pause_max");
        if (mobility.step_period < 1) throw ValidationError("mobility.step must be positive");
        if (mobility.metric_window < 1) throw ValidationError("mobility.window must be positive");
    }

    if (algorithm == Algorithm::MasterSlave) {
        if (round_period <= 3 * d_max + 2)
            throw ValidationError("round.period must exceed 3*d_max+2 so a round's messages land before the next tick");
        if (tuple_ttl < 4) throw ValidationError("round.tuple_ttl must be at least 4");
    }
    for (Uid mu : masters)
        if (mu < 1 || mu > nodes) throw ValidationError("roles.masters names unknown uid " + std::to_string(mu));
    for (const auto& f : explicit_faults)
        if (f.uid < 1 || f.uid > nodes) throw ValidationError("fault names unknown uid " + std::to_string(f.uid));
    for (const auto& [uid, t] : triggers)
        if (uid < 1 || uid > nodes) throw ValidationError("trigger names unknown uid " + std::to_string(uid));
    if (initial_leader != 0) {
        if (initial_leader > nodes)
            throw ValidationError("initial_leader names unknown uid " + std::to_string(initial_leader));
        if (algorithm == Algorithm::MasterSlave)
            throw ValidationError("initial_leader does not apply to masterslave (tuples self-seed)");
    }
    if (fault_plan.enabled) {
        if (fault_plan.rate < Rational(0) || fault_plan.rate > Rational(1))
            throw ValidationError("fault_plan.rate must be in [0,1]");
        if (fault_plan.leader_inclusion < Rational(0) || fault_plan.leader_inclusion > Rational(1))
            throw ValidationError("fault_plan.leader_inclusion must be in [0,1]");
        if (fault_plan.epochs > 0 && fault_plan.epoch_len == 0)
            throw ValidationError("fault_plan.epoch_len must be positive");
    }
}

std::string Scenario::defaults_text() {
    return R"(# scenario defaults (all keys, with their default values)
name = unnamed
algorithm = diffusion          # diffusion|candidates|hierarchy|masterslave
nodes = 0                      # required
seed = 1
horizon = 10000
trace = false
bootstrap = auto               # auto|none
initial_leader = 0             # pre-converged leader uid, 0 = elect at start

[arena]                        # geometric topologies
width = 500
height = 500
radio_range = 100
placement = random             # random|explicit
#pos.<uid> = x,y

[topology]
kind = geometric               # geometric|explicit|ring|line
#links = 1-2 2-3               # explicit adjacency, uid pairs

[mobility]
kind = static                  # static|waypoint
v_min = 1
v_max = 1
pause_min = 0
pause_max = 0
step = 1
window = 100

[links]
d_min = 1
d_max = 2
fifo = false
loss = 0

[heartbeat]
period = 10                    # 0 disables heartbeats
timeout = 35
stagger = 64                   # loss-detection stagger span, 0 = simultaneous
flood = true

[criterion]
mode = uid                     # uid|composite
w_b = 0.5
w_m = 0.5

[battery]
default = 1
#init.<uid> = 0.75
random_min = 0                 # random_max > 0 draws init charge per node
random_max = 0
drain_tx = 0
drain_rx = 0
drain_idle = 0

[enhancements]
clustering = false
join_gating = false
inquiry_on_recover = false
starter_quality = false
candidate_criteria = false
csma_backoff = false
slave_participation = false
invitation = false

[backoff]
t_slot = 2

[inquiry]
window = 0                     # 0 -> 2*d_max

[round]                        # masterslave
period = 12
tuple_ttl = 24

[roles]
#masters = 2 5                 # explicit master uids (masterslave)

[fault_plan]
#rate = 0.05
#leader_inclusion = 0.25
#epoch_len = 1000
#epochs = 20
#downtime = 0                  # 0 -> epoch_len
#start = 0                     # 0 -> epoch_len

[faults]
#crash = 3@100
#recover = 3@400

[triggers]
#at = 2@5
)";
}

} // namespace manet
