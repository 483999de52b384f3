#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mpent/entropy.hpp"

// Asymptotic concentration and dilution of Schmidt-decomposable states,
// computed on type classes of the Schmidt-level occupation counts. The
// protocols are diagonal in the product Schmidt basis, so nothing here touches
// the r^n-dimensional vector.
namespace mpent {

struct TypeClassBranch {
    std::vector<unsigned> type;    // occupation count per Schmidt level
    double probability = 0.0;      // multinomial(n, type) * prod p_i^t_i
    double yield_bits = 0.0;       // log2 multinomial(n, type)
    unsigned long long yield_floor = 0;
};

struct ConcentrationResult {
    std::size_t copies = 0;
    std::vector<TypeClassBranch> branches;
    double expected_yield = 0.0; // sum of probability * yield_bits
    double entropy = 0.0;        // H(p), the per-copy limit

    double yield_per_copy() const { return expected_yield / static_cast<double>(copies); }
};

namespace detail {

inline std::vector<double> validated_probabilities(const std::vector<double>& p) {
    if (p.empty()) throw std::invalid_argument("probability vector is empty");
    double s = 0.0;
    for (double x : p) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("probabilities must be finite and nonnegative");
        s += x;
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("probabilities must sum to 1");
    std::vector<double> kept;
    for (double x : p)
        if (x > 0.0) kept.push_back(x);
    return kept;
}

inline double log_multinomial(unsigned n, const std::vector<unsigned>& t) {
    double v = std::lgamma(static_cast<double>(n) + 1.0);
    for (auto x : t) v -= std::lgamma(static_cast<double>(x) + 1.0);
    return v;
}

// Calls f(type) for every composition of n into r parts, in lexicographic
// order with the first part descending.
template <class F> void for_each_type(unsigned n, std::size_t r, F&& f) {
    std::vector<unsigned> t(r, 0);
    auto rec = [&](auto&& self, std::size_t level, unsigned remaining) -> void {
        if (level + 1 == r) {
            t[level] = remaining;
            f(t);
            return;
        }
        for (unsigned c = remaining + 1; c-- > 0;) {
            t[level] = c;
            self(self, level + 1, remaining - c);
        }
    };
    rec(rec, 0, n);
}

inline double type_class_count(std::size_t n, std::size_t r) {
    // C(n + r - 1, r - 1)
    double c = 1.0;
    for (std::size_t i = 1; i < r; ++i) c = c * static_cast<double>(n + i) / static_cast<double>(i);
    return c;
}

} // namespace detail

/// Outcome distribution of the type-class measurement on n copies of a state
/// with Schmidt probabilities p. Each branch leaves a uniform superposition
/// over multinomial(n, t) strings, i.e. log2 multinomial(n, t) Cat states.
inline ConcentrationResult concentration_yield_distribution(const std::vector<double>& probabilities, std::size_t n) {
    if (n == 0) throw std::invalid_argument("concentration: n must be at least 1");
    const auto p = detail::validated_probabilities(probabilities);
    if (detail::type_class_count(n, p.size()) > 5e6) throw std::invalid_argument("concentration: too many type classes");

    ConcentrationResult res;
    res.copies = n;
    res.entropy = shannon_bits(p);
    std::vector<double> logp(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) logp[i] = std::log(p[i]);

    detail::for_each_type(static_cast<unsigned>(n), p.size(), [&](const std::vector<unsigned>& t) {
        const double lm = detail::log_multinomial(static_cast<unsigned>(n), t);
        double lp = lm;
        for (std::size_t i = 0; i < t.size(); ++i) lp += t[i] * logp[i];
        TypeClassBranch b;
        b.type = t;
        b.probability = std::exp(lp);
        b.yield_bits = std::max(0.0, lm / std::log(2.0));
        b.yield_floor = static_cast<unsigned long long>(std::floor(b.yield_bits + 1e-9));
        res.expected_yield += b.probability * b.yield_bits;
        res.branches.push_back(std::move(b));
    });
    return res;
}

/// Fidelity of projecting n copies onto the span of the 2^k most probable
/// Schmidt strings: the total probability of those strings.
inline double dilution_fidelity(const std::vector<double>& probabilities, std::size_t n, std::size_t k) {
    if (n == 0) throw std::invalid_argument("dilution_fidelity: n must be at least 1");
    const auto p = detail::validated_probabilities(probabilities);
    const double rank_bits = static_cast<double>(n) * std::log2(static_cast<double>(p.size()));
    if (static_cast<double>(k) >= rank_bits - 1e-12) return 1.0;
    if (detail::type_class_count(n, p.size()) > 5e6) throw std::invalid_argument("dilution_fidelity: too many type classes");

    struct Cls {
        double log_string_prob;
        double multiplicity;
    };
    std::vector<Cls> classes;
    detail::for_each_type(static_cast<unsigned>(n), p.size(), [&](const std::vector<unsigned>& t) {
        double lp = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) lp += t[i] * std::log(p[i]);
        double mult = std::exp(detail::log_multinomial(static_cast<unsigned>(n), t));
        if (mult < 9e15) mult = std::round(mult);
        classes.push_back({lp, mult});
    });
    std::stable_sort(classes.begin(), classes.end(),
                     [](const Cls& a, const Cls& b) { return a.log_string_prob > b.log_string_prob; });

    double budget = std::ldexp(1.0, static_cast<int>(k));
    double f = 0.0;
    for (const auto& c : classes) {
        if (budget <= 0.0) break;
        const double take = std::min(budget, c.multiplicity);
        f += take * std::exp(c.log_string_prob);
        budget -= take;
    }
    return std::min(f, 1.0);
}

} // namespace mpent
