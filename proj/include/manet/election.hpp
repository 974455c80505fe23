#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "manet/rational.hpp"
#include "manet/types.hpp"

namespace manet {

// Total order over (value, uid), both descending. No two distinct nodes
// compare equal: uids are unique, so the uid tiebreak always resolves.
struct CriterionValue {
    Rational value;
    Uid uid = 0;

    friend bool operator==(const CriterionValue& a, const CriterionValue& b) {
        return a.value == b.value && a.uid == b.uid;
    }
    // "better than"
    friend bool operator>(const CriterionValue& a, const CriterionValue& b) {
        if (a.value != b.value) return b.value < a.value;
        return a.uid > b.uid;
    }
    friend bool operator<(const CriterionValue& a, const CriterionValue& b) { return b > a; }
};

enum class CriterionMode : std::uint8_t { UidOnly, Composite };

struct BadWeights : SimError {
    BadWeights() : SimError("criterion weights must be non-negative and sum to 1") {}
};

// uid-only: value = uid. Composite: w_b*charge + w_m*(1 - mobility/v_max);
// static scenarios have v_max = 0 and score the mobility term as 1.
inline CriterionValue criterion(Uid uid, const Rational& charge, const Rational& mobility,
                                const Rational& v_max, const Rational& w_b, const Rational& w_m,
                                CriterionMode mode) {
    if (mode == CriterionMode::UidOnly)
        return {Rational(static_cast<std::int64_t>(uid)), uid};
    if (w_b < Rational(0) || w_m < Rational(0) || w_b + w_m != Rational(1))
        throw BadWeights();
    Rational vmax = (v_max == Rational(0)) ? Rational(1) : v_max;
    Rational mobility_term = Rational(1) - mobility / vmax;
    return {w_b * charge + w_m * mobility_term, uid};
}

// Bounded top-k list: current leader plus four main candidates, sorted
// descending by criterion order, no duplicate uids.
class CandidateList {
public:
    static constexpr std::size_t kMaxEntries = 5;

    CandidateList() = default;

    const std::vector<CriterionValue>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    void insert(const CriterionValue& cv) {
        for (auto& e : entries_) {
            if (e.uid == cv.uid) {
                if (cv > e) { e = cv; sort_and_trim(); }
                return;
            }
        }
        entries_.push_back(cv);
        sort_and_trim();
    }

    friend CandidateList merge(const CandidateList& a, const CandidateList& b) {
        CandidateList out = a;
        for (const auto& e : b.entries_) out.insert(e);
        return out;
    }

    friend bool operator==(const CandidateList& a, const CandidateList& b) {
        return a.entries_ == b.entries_;
    }

private:
    void sort_and_trim() {
        std::sort(entries_.begin(), entries_.end(),
                  [](const CriterionValue& x, const CriterionValue& y) { return x > y; });
        if (entries_.size() > kMaxEntries) entries_.resize(kMaxEntries);
    }

    std::vector<CriterionValue> entries_;
};

// Identifies one diffusion computation. Priority: baseline compares the
// starter's uid; starter-quality mode compares the starter's criterion
// (uid tiebreak). Epoch keeps restarts by the same node distinct.
struct ComputationId {
    Uid starter_uid = 0;
    CriterionValue starter_criterion;
    std::uint32_t epoch = 0;

    bool valid() const { return starter_uid != 0; }

    friend bool operator==(const ComputationId& a, const ComputationId& b) {
        return a.starter_uid == b.starter_uid && a.epoch == b.epoch;
    }
    friend bool operator!=(const ComputationId& a, const ComputationId& b) { return !(a == b); }
};

enum class ConflictMode : std::uint8_t { UidOrder, StarterQuality };
enum class ConflictOutcome : std::uint8_t { Keep, JoinIncoming };

inline ConflictOutcome resolve_computation_conflict(const ComputationId& current,
                                                    const ComputationId& incoming,
                                                    ConflictMode mode) {
    if (incoming == current) return ConflictOutcome::Keep;
    if (mode == ConflictMode::UidOrder) {
        if (incoming.starter_uid != current.starter_uid)
            return incoming.starter_uid > current.starter_uid ? ConflictOutcome::JoinIncoming
                                                              : ConflictOutcome::Keep;
        // same starter restarted: newer epoch supersedes
        return incoming.epoch > current.epoch ? ConflictOutcome::JoinIncoming
                                              : ConflictOutcome::Keep;
    }
    if (incoming.starter_uid == current.starter_uid)
        return incoming.epoch > current.epoch ? ConflictOutcome::JoinIncoming
                                              : ConflictOutcome::Keep;
    return incoming.starter_criterion > current.starter_criterion ? ConflictOutcome::JoinIncoming
                                                                  : ConflictOutcome::Keep;
}

// CSMA/CD-adapted contention delay: higher uid, shorter wait.
inline SimTime csma_backoff(Uid uid, Uid uid_max, SimTime t_slot) {
    if (uid > uid_max) return 0;
    return t_slot * static_cast<SimTime>(uid_max - uid);
}

// Loss is declared strictly after the timeout elapses.
inline bool heartbeat_lost(SimTime last_heartbeat, SimTime timeout, SimTime now) {
    return now > last_heartbeat + timeout;
}

} // namespace manet
