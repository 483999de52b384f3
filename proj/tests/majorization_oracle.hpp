#pragma once

#include <algorithm>
#include <random>
#include <vector>

namespace mpent::testkit {

// Largest sum over any k entries, by enumerating subsets.
inline double top_k_sum(const std::vector<double>& v, std::size_t k) {
    double best = 0.0;
    const std::size_t n = v.size();
    for (unsigned mask = 0; mask < (1U << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1U) s += v[i];
        best = std::max(best, s);
    }
    return best;
}

// p majorizes q (both padded to the same length).
inline bool oracle_majorizes(std::vector<double> p, std::vector<double> q, double tol = 1e-10) {
    const std::size_t n = std::max(p.size(), q.size());
    p.resize(n, 0.0);
    q.resize(n, 0.0);
    for (std::size_t k = 1; k <= n; ++k)
        if (top_k_sum(p, k) < top_k_sum(q, k) - tol) return false;
    return true;
}

inline std::vector<double> random_simplex(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> v(n);
    double s = 0.0;
    for (auto& x : v) s += (x = e(rng));
    for (auto& x : v) x /= s;
    return v;
}

// A pair (p, q) drawn from a mix of generic, majorizing (q = T-transforms of
// p), permuted and zero-padded cases.
inline std::pair<std::vector<double>, std::vector<double>> random_spectrum_pair(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> dim(1, 6), mode(0, 3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto p = random_simplex(dim(rng), rng);
    std::vector<double> q;
    switch (mode(rng)) {
    case 0: q = random_simplex(dim(rng), rng); break;
    case 1: {
        q = p;
        std::uniform_int_distribution<std::size_t> idx(0, q.size() - 1);
        for (int t = 0; t < 3 && q.size() > 1; ++t) {
            const std::size_t i = idx(rng), j = idx(rng);
            const double l = u(rng), a = q[i], b = q[j];
            q[i] = l * a + (1 - l) * b;
            q[j] = (1 - l) * a + l * b;
        }
        break;
    }
    case 2:
        q = p;
        std::shuffle(q.begin(), q.end(), rng);
        break;
    default:
        q = p;
        q.push_back(0.0);
        std::reverse(q.begin(), q.end());
        break;
    }
    if (u(rng) < 0.5) std::swap(p, q);
    return {p, q};
}

} // namespace mpent::testkit
