#include "manet/metrics.hpp"

namespace manet {

std::string metrics_csv_header() {
    std::string h = "scenario,seed,algorithm,flags";
    for (std::size_t i = 0; i < kMsgKindCount; ++i) {
        h += ',';
        h += to_string(static_cast<MsgKind>(i));
    }
    h += ",total_messages,election_traffic,sends_attempted,dead_deliveries,dead_arrivals,"
         "lost_in_flight,dropped_stale,cluster_denied,hellos_deferred,elections_started,"
         "elections_completed,inquiry_adoptions,candidate_promotions,invitations_bootstrap,"
         "invitations_repair,verdicts\n";
    return h;
}

std::string metrics_csv_row(const std::string& scenario, std::uint64_t seed,
                            const std::string& algorithm, const std::string& flags,
                            const RunMetrics& m, const std::string& verdicts) {
    std::string r = scenario + "," + std::to_string(seed) + "," + algorithm + "," + flags;
    for (std::size_t i = 0; i < kMsgKindCount; ++i) {
        r += ',';
        r += std::to_string(m.messages_by_kind[i]);
    }
    auto add = [&](std::uint64_t v) { r += ','; r += std::to_string(v); };
    add(m.total_messages());
    add(m.election_traffic());
    add(m.sends_attempted);
    add(m.dead_deliveries);
    add(m.dead_arrivals);
    add(m.lost_in_flight);
    add(m.dropped_stale);
    add(m.cluster_denied);
    add(m.hellos_deferred);
    add(m.elections_started);
    add(m.elections_completed);
    add(m.inquiry_adoptions);
    add(m.candidate_promotions);
    add(m.invitations_bootstrap);
    add(m.invitations_repair);
    r += ',';
    r += verdicts;
    r += '\n';
    return r;
}

} // namespace manet
