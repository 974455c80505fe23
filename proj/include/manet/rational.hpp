#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace manet {

// Exact rational on int64 with __int128 cross-multiplication for comparisons.
// Criterion values, battery charge and mobility metrics are rationals so that
// orderings are exact and platform independent; no float ever decides a
// leader election or a link.
class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    // "num/den", or just "num" when integral. Stable across runs.
    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    double to_double() const { return double(num_) / double(den_); }

    // Parses "3", "-2", "0.25", "3/4". Throws std::invalid_argument on junk.
    static Rational parse(const std::string& text);

private:
    void normalize() {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    std::int64_t num_;
    std::int64_t den_;
};

inline Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("Rational: empty string");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::int64_t n = std::stoll(text.substr(0, slash));
        std::int64_t d = std::stoll(text.substr(slash + 1));
        return Rational(n, d);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) {
        size_t pos = 0;
        std::int64_t n = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("Rational: trailing junk in '" + text + "'");
        return Rational(n);
    }
    bool neg = text[0] == '-';
    std::string whole = text.substr(neg ? 1 : 0, dot - (neg ? 1 : 0));
    std::string frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 15)
        throw std::invalid_argument("Rational: bad decimal '" + text + "'");
    std::int64_t den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::int64_t n = (whole.empty() ? 0 : std::stoll(whole)) * den + std::stoll(frac);
    return Rational(neg ? -n : n, den);
}

} // namespace manet
