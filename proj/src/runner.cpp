#include "manet/runner.hpp"

#include <cstdio>

namespace manet {

RunResult run_scenario(const Scenario& scn) {
    Kernel k(scn);
    return k.run();
}

PairedRuns run_paired(Scenario base, const std::string& flag_key) {
    PairedRuns out;
    base.apply_override(flag_key, "false");
    out.off = run_scenario(base);
    base.apply_override(flag_key, "true");
    out.on = run_scenario(base);
    return out;
}

std::vector<FaultEvent> fault_events_of(const RunResult& res) {
    std::vector<FaultEvent> out;
    for (const auto& ev : res.log) {
        if (ev.type == SemanticEvent::Type::Crash) out.push_back({ev.node, true, ev.t});
        else if (ev.type == SemanticEvent::Type::Recover) out.push_back({ev.node, false, ev.t});
    }
    return out;
}

namespace {

std::string arm_csv(const std::vector<ArmCount>& rows) {
    std::string csv = "seed,arm,count\n";
    for (const auto& r : rows) {
        csv += std::to_string(r.seed) + ",off," + std::to_string(r.off) + "\n";
        csv += std::to_string(r.seed) + ",on," + std::to_string(r.on) + "\n";
    }
    return csv;
}

} // namespace

Fig3Result run_fig3(const Scenario& base, const std::vector<std::uint64_t>& seeds) {
    Fig3Result out;
    for (std::uint64_t seed : seeds) {
        Scenario s = base;
        s.seed = seed;
        PairedRuns pr = run_paired(s, "enhancements.inquiry_on_recover");
        if (!(fault_events_of(pr.off) == fault_events_of(pr.on)))
            throw SimError("fig3 arms saw different fault histories (seed " + std::to_string(seed) + ")");
        ArmCount row;
        row.seed = seed;
        row.off = pr.off.metrics.elections_started;
        row.on = pr.on.metrics.elections_started;
        out.rows.push_back(row);
        out.mean_off += static_cast<double>(row.off);
        out.mean_on += static_cast<double>(row.on);
        if (row.off >= 3 * row.on) out.seeds_with_3x++;
    }
    if (!seeds.empty()) {
        out.mean_off /= static_cast<double>(seeds.size());
        out.mean_on /= static_cast<double>(seeds.size());
    }
    out.ratio = out.mean_off > 0 ? out.mean_on / out.mean_off : 0;
    out.csv = arm_csv(out.rows);
    return out;
}

Fig4Result run_fig4(const Scenario& base, const std::vector<std::uint64_t>& seeds) {
    Fig4Result out;
    for (std::uint64_t seed : seeds) {
        Scenario s = base;
        s.seed = seed;
        PairedRuns pr = run_paired(s, "enhancements.csma_backoff");
        ArmCount row;
        row.seed = seed;
        row.off = pr.off.metrics.count(MsgKind::Election);
        row.on = pr.on.metrics.count(MsgKind::Election);
        out.rows.push_back(row);
        out.mean_off += static_cast<double>(row.off);
        out.mean_on += static_cast<double>(row.on);
        if (row.on < row.off) out.seeds_strictly_less++;
    }
    if (!seeds.empty()) {
        out.mean_off /= static_cast<double>(seeds.size());
        out.mean_on /= static_cast<double>(seeds.size());
    }
    out.mean_reduction = out.mean_off > 0 ? 1.0 - out.mean_on / out.mean_off : 0;
    out.csv = arm_csv(out.rows);
    return out;
}

Scenario ring_scenario(std::size_t n, std::uint64_t seed, Algorithm algo) {
    Scenario s;
    s.name = "ring" + std::to_string(n);
    s.algorithm = algo;
    s.nodes = n;
    s.seed = seed;
    s.topo_kind = Scenario::TopoKind::Ring;
    s.bootstrap_auto = false;
    s.hb_period = 0; // the single election is the whole run
    s.fifo = algo == Algorithm::Candidates;
    s.d_min = 1;
    s.d_max = 2;
    s.triggers.push_back({1, 5});
    s.horizon = 10 + 4 * s.d_max * static_cast<SimTime>(n) + 200;
    return s;
}

std::vector<SweepRow> run_sweep(const std::vector<std::size_t>& sizes,
                                const std::vector<std::uint64_t>& seeds, Algorithm algo) {
    if (seeds.empty()) throw ValidationError("sweep needs a non-empty seed list");
    std::vector<SweepRow> rows;
    for (std::size_t n : sizes) {
        for (std::uint64_t seed : seeds) {
            RunResult res = run_scenario(ring_scenario(n, seed, algo));
            SweepRow r;
            r.n = n;
            r.seed = seed;
            r.messages = res.metrics.election_traffic();
            r.claim = analyze_complexity(res);
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

LinearVerdict sweep_verdict(const std::vector<SweepRow>& rows) {
    std::vector<std::pair<std::size_t, double>> series;
    for (const auto& r : rows) {
        auto it = std::find_if(series.begin(), series.end(),
                               [&](const auto& p) { return p.first == r.n; });
        if (it == series.end()) series.push_back({r.n, 0});
    }
    for (auto& [n, mean] : series) {
        double sum = 0;
        std::size_t cnt = 0;
        for (const auto& r : rows)
            if (r.n == n) { sum += static_cast<double>(r.messages); cnt++; }
        mean = sum / static_cast<double>(cnt);
    }
    return validate_linear_bound(series);
}

std::string flags_string(const Scenario& scn) {
    std::string f;
    auto add = [&](bool v, const char* name) {
        if (!v) return;
        if (!f.empty()) f += '+';
        f += name;
    };
    add(scn.enh.clustering, "clustering");
    add(scn.enh.join_gating, "join_gating");
    add(scn.enh.inquiry_on_recover, "inquiry");
    add(scn.enh.starter_quality, "starter_quality");
    add(scn.enh.candidate_criteria, "candidate_criteria");
    add(scn.enh.csma_backoff, "backoff");
    add(scn.enh.slave_participation, "slave_participation");
    add(scn.enh.invitation, "invitation");
    if (f.empty()) f = "baseline";
    return f;
}

} // namespace manet
