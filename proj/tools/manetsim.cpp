#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "manet/genscn.hpp"
#include "manet/metrics.hpp"
#include "manet/oracle.hpp"
#include "manet/runner.hpp"
#include "manet/trace.hpp"

using namespace manet;

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    std::vector<std::uint64_t> out;
    auto dots = spec.find("..");
    if (dots != std::string::npos) {
        std::uint64_t a = std::stoull(spec.substr(0, dots));
        std::uint64_t b = std::stoull(spec.substr(dots + 2));
        for (std::uint64_t s = a; s <= b; ++s) out.push_back(s);
        return out;
    }
    std::size_t pos = 0;
    while (pos < spec.size()) {
        auto comma = spec.find(',', pos);
        if (comma == std::string::npos) comma = spec.size();
        out.push_back(std::stoull(spec.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& spec) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        auto comma = spec.find(',', pos);
        if (comma == std::string::npos) comma = spec.size();
        out.push_back(std::stoull(spec.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "diffusion") return Algorithm::Diffusion;
    if (name == "candidates") return Algorithm::Candidates;
    if (name == "hierarchy") return Algorithm::Hierarchy;
    if (name == "masterslave") return Algorithm::MasterSlave;
    throw ValidationError("algorithm must be one of diffusion|candidates|hierarchy|masterslave, got '" +
                          name + "'");
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::string join(const std::string& dir, const std::string& file) {
    return dir.empty() ? file : dir + "/" + file;
}

struct CommonOpts {
    std::string scenario_file;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::string seeds = "";
    bool trace = false;
    bool check = false;
};

Scenario load_scenario(const CommonOpts& o) {
    Scenario s = Scenario::parse_file(o.scenario_file);
    for (const auto& kv : o.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + kv + "'");
        s.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
    }
    s.validate();
    return s;
}

int do_run(const CommonOpts& o, std::uint64_t seed, bool seed_given, const std::string& algo,
           bool algo_given) {
    Scenario base = load_scenario(o);
    if (seed_given) base.seed = seed;
    if (algo_given) base.algorithm = parse_algorithm(algo);
    if (o.trace) base.trace = true;
    base.validate();

    std::vector<std::uint64_t> seeds{base.seed};
    if (!o.seeds.empty()) seeds = parse_seeds(o.seeds);
    std::sort(seeds.begin(), seeds.end());

    ensure_dir(o.out_dir);
    std::string csv = metrics_csv_header();
    std::string all_verdicts;
    std::size_t pass = 0, stable = 0;
    for (std::uint64_t sd : seeds) {
        Scenario s = base;
        s.seed = sd;
        RunResult res = run_scenario(s);
        auto verdicts = check_safety(res, s);
        std::size_t p = 0, st = 0;
        for (const auto& v : verdicts) {
            if (!v.stable) continue;
            st++;
            if (v.pass) p++;
        }
        pass += p;
        stable += st;
        std::string vsum = std::to_string(p) + "/" + std::to_string(st) +
                           " stable components agree";
        csv += metrics_csv_row(s.name, s.seed, to_string(s.algorithm), flags_string(s),
                               res.metrics, vsum);
        all_verdicts += verdicts_jsonl(verdicts);
        if (s.trace && seeds.size() == 1) write_file(join(o.out_dir, "trace.jsonl"), res.trace_jsonl);
        std::printf("%s seed=%llu: %llu messages, %llu elections started, %s\n", s.name.c_str(),
                    static_cast<unsigned long long>(s.seed),
                    static_cast<unsigned long long>(res.metrics.total_messages()),
                    static_cast<unsigned long long>(res.metrics.elections_started), vsum.c_str());
    }
    write_file(join(o.out_dir, "metrics.csv"), csv);
    write_file(join(o.out_dir, "verdicts.jsonl"), all_verdicts);
    if (o.check && pass != stable) {
        std::fprintf(stderr, "check failed: %zu of %zu stable components disagree\n",
                     stable - pass, stable);
        return 3;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"manetsim: deterministic MANET leader-election simulator"};
    app.require_subcommand(0, 1);

    bool print_defaults = false;
    app.add_flag("--print-defaults", print_defaults, "print all scenario keys and defaults");

    CommonOpts run_o;
    std::uint64_t run_seed = 0;
    std::string run_algo;
    auto* run = app.add_subcommand("run", "run one scenario");
    run->add_option("--scenario", run_o.scenario_file, "scenario file")->required();
    auto* seed_opt = run->add_option("--seed", run_seed, "seed override");
    run->add_option("--seeds", run_o.seeds, "run a seed list a,b,c or range a..b");
    auto* algo_opt = run->add_option("--algorithm", run_algo, "algorithm override");
    run->add_option("--set", run_o.overrides, "key=value override (repeatable)");
    run->add_option("--out", run_o.out_dir, "output directory");
    run->add_flag("--trace", run_o.trace, "emit trace.jsonl");
    run->add_flag("--check", run_o.check, "exit 3 when a stable component disagrees");

    CommonOpts fig3_o;
    auto* fig3 = app.add_subcommand("fig3", "inquiry-on-recover comparison (elections started)");
    fig3->add_option("--scenario", fig3_o.scenario_file, "scenario file")->required();
    fig3->add_option("--seeds", fig3_o.seeds, "seed list a,b,c or range a..b")->required();
    fig3->add_option("--out", fig3_o.out_dir, "output directory");
    fig3->add_option("--set", fig3_o.overrides, "key=value override");

    CommonOpts fig4_o;
    auto* fig4 = app.add_subcommand("fig4", "CSMA/CD backoff comparison (election messages)");
    fig4->add_option("--scenario", fig4_o.scenario_file, "scenario file")->required();
    fig4->add_option("--seeds", fig4_o.seeds, "seed list a,b,c or range a..b")->required();
    fig4->add_option("--out", fig4_o.out_dir, "output directory");
    fig4->add_option("--set", fig4_o.overrides, "key=value override");

    std::string sweep_algo = "diffusion", sweep_sizes = "8,16,32,64,128", sweep_seeds = "1..10";
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "ring-size sweep feeding the linearity validator");
    sweep->add_option("--algorithm", sweep_algo, "diffusion|candidates|hierarchy|masterslave");
    sweep->add_option("--sizes", sweep_sizes, "comma-separated ring sizes");
    sweep->add_option("--seeds", sweep_seeds, "seed list or range");
    sweep->add_option("--out", sweep_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (print_defaults) {
            std::fputs(Scenario::defaults_text().c_str(), stdout);
            return 0;
        }
        if (run->parsed())
            return do_run(run_o, run_seed, seed_opt->count() > 0, run_algo, algo_opt->count() > 0);
        if (fig3->parsed()) {
            Scenario s = load_scenario(fig3_o);
            Fig3Result r = run_fig3(s, parse_seeds(fig3_o.seeds));
            ensure_dir(fig3_o.out_dir);
            write_file(join(fig3_o.out_dir, "fig3.csv"), r.csv);
            std::printf("fig3: mean elections off=%.2f on=%.2f ratio=%.3f, off>=3x on in %zu/%zu seeds\n",
                        r.mean_off, r.mean_on, r.ratio, r.seeds_with_3x, r.rows.size());
            return 0;
        }
        if (fig4->parsed()) {
            Scenario s = load_scenario(fig4_o);
            Fig4Result r = run_fig4(s, parse_seeds(fig4_o.seeds));
            ensure_dir(fig4_o.out_dir);
            write_file(join(fig4_o.out_dir, "fig4.csv"), r.csv);
            std::printf("fig4: mean Election msgs off=%.2f on=%.2f reduction=%.1f%%, on<off in %zu/%zu seeds\n",
                        r.mean_off, r.mean_on, 100.0 * r.mean_reduction, r.seeds_strictly_less,
                        r.rows.size());
            return 0;
        }
        if (sweep->parsed()) {
            auto rows = run_sweep(parse_sizes(sweep_sizes), parse_seeds(sweep_seeds),
                                  parse_algorithm(sweep_algo));
            LinearVerdict v = sweep_verdict(rows);
            ensure_dir(sweep_out);
            std::string csv = "n,seed,messages,participants,avg_neighbors,steps,ticks\n";
            for (const auto& r : rows) {
                char buf[160];
                std::snprintf(buf, sizeof(buf), "%zu,%llu,%llu,%zu,%.3f,%u,%llu\n", r.n,
                              static_cast<unsigned long long>(r.seed),
                              static_cast<unsigned long long>(r.messages), r.claim.participating,
                              r.claim.avg_neighbors, r.claim.logical_steps,
                              static_cast<unsigned long long>(r.claim.ticks));
                csv += buf;
            }
            if (!sweep_out.empty()) write_file(join(sweep_out, "sweep.csv"), csv);
            std::printf("sweep %s: ratios %s -> %s (worst deviation %.1f%%)\n", sweep_algo.c_str(),
                        v.detail.c_str(), v.pass ? "linear" : "NOT linear",
                        100.0 * v.worst_deviation);
            // descriptive time-complexity report: causal depth vs log_ANoN(PN+1)
            for (const auto& r : rows) {
                if (r.seed != rows.front().seed) continue;
                double anon = r.claim.avg_neighbors;
                double logform = anon > 1.0
                                     ? std::log(double(r.claim.participating) + 1) / std::log(anon)
                                     : 0.0;
                std::printf("  n=%zu: steps=%u ticks=%llu PN=%zu ANoN=%.2f log_ANoN(PN+1)=%.2f\n",
                            r.n, r.claim.logical_steps,
                            static_cast<unsigned long long>(r.claim.ticks),
                            r.claim.participating, anon, logform);
            }
            return v.pass ? 0 : 3;
        }
        std::fputs(app.help().c_str(), stdout);
        return 0;
    } catch (const SimError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
