#pragma once

#include <cstdint>
#include <string_view>

#include "manet/rational.hpp"

namespace manet {

// Deterministic, platform-independent random stream (splitmix64 core).
// One stream per purpose (delay, mobility, faults, backoff, init): toggling
// a protocol feature changes the draws of its own stream only, so paired
// A/B runs see identical fault and mobility histories.
class RngStream {
public:
    RngStream() : state_(0) {}
    RngStream(std::uint64_t seed, std::string_view stream_id) {
        // fnv1a over the label, folded into the seed
        std::uint64_t h = 1469598103934665603ull;
        for (char c : stream_id) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        state_ = seed ^ h;
        // burn one draw so seed=0 streams differ too
        next_u64();
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [lo, hi], inclusive. Unbiased via rejection.
    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        if (hi <= lo) return lo;
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v;
        do { v = next_u64(); } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    // True with probability p (exact, p rational in [0,1]).
    bool bernoulli(const Rational& p) {
        if (p.num() <= 0) return false;
        if (p.num() >= p.den()) return true;
        return uniform(0, p.den() - 1) < p.num();
    }

private:
    std::uint64_t state_;
};

} // namespace manet
