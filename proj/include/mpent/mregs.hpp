#pragma once

#include <algorithm>
#include <bit>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mpent/entropy.hpp"
#include "mpent/lp.hpp"
#include "mpent/states.hpp"

// Entropy-vector linear algebra: entanglement coefficients of a target over a
// generating set, their uniqueness, infeasibility certificates and the
// resulting lower bounds on minimal reversible generating sets. All results
// are entropy-level: feasibility is necessary, not sufficient, for
// asymptotic equivalence.
namespace mpent {

using lp::Rational;
using lp::RationalVector;

/// Entropy vector snapped to rationals; `exact` when every entry is an integer.
inline RationalVector to_rational_vector(const EntropyVector& ev, bool* exact = nullptr) {
    RationalVector out;
    bool all_int = true;
    for (double v : ev.values()) {
        out.push_back(lp::to_rational(v));
        all_int = all_int && lp::is_integer(out.back());
    }
    if (exact) *exact = all_int;
    return out;
}

struct EntropyMatrix {
    std::size_t num_parties = 0;
    std::vector<std::string> labels;
    std::vector<RationalVector> rows; // one per generator, over canonical partitions
    bool exact = true;

    std::size_t size() const { return rows.size(); }

    void add(std::string label, RationalVector row) {
        const std::size_t want = (std::size_t{1} << (num_parties - 1)) - 1;
        if (row.size() != want) throw std::invalid_argument("EntropyMatrix: row length must be 2^(m-1)-1");
        for (const auto& v : row)
            if (v < 0) throw std::invalid_argument("EntropyMatrix: negative entropy for " + label);
        for (const auto& v : row) exact = exact && lp::is_integer(v);
        labels.push_back(std::move(label));
        rows.push_back(std::move(row));
    }

    void add(std::string label, const EntropyVector& ev) {
        if (ev.num_parties() != num_parties) throw std::invalid_argument("EntropyMatrix: party-count mismatch");
        add(std::move(label), to_rational_vector(ev));
    }
};

inline EntropyMatrix make_entropy_matrix(std::size_t m) {
    if (m < 2 || m > 20) throw std::invalid_argument("EntropyMatrix: m must be in [2, 20]");
    EntropyMatrix g;
    g.num_parties = m;
    return g;
}

struct CoefficientSolution {
    RationalVector coefficients; // one per generator, >= 0
    Rational residual = 0;       // max |sum_i x_i row_i - target|
    bool unique = true;
    std::optional<RationalVector> kernel_direction; // primitive integer, first nonzero > 0
    std::optional<RationalVector> alternative;      // a second vertex solution
};

struct Infeasible {
    RationalVector certificate; // w: w.row_i >= 0 for every generator, w.target < 0
    Rational margin = 0;        // w.target
};

using CoefficientResult = std::variant<CoefficientSolution, Infeasible>;

/// Independent check of a separating certificate.
inline bool verify_certificate(const EntropyMatrix& gens, const RationalVector& target, const RationalVector& w) {
    if (w.size() != target.size()) return false;
    for (const auto& row : gens.rows)
        if (lp::dot(w, row) < 0) return false;
    return lp::dot(w, target) < 0;
}

namespace detail {

inline RationalVector primitive_direction(RationalVector d) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    lp::Integer l = 1;
    for (const auto& v : d)
        if (v != 0) l = boost::multiprecision::lcm(l, lp::Integer(denominator(v)));
    lp::Integer g = 0;
    for (auto& v : d) {
        v *= Rational(l);
        if (v != 0) g = boost::multiprecision::gcd(g, lp::Integer(boost::multiprecision::abs(numerator(v))));
    }
    if (g > 1)
        for (auto& v : d) v /= Rational(g);
    auto first = std::find_if(d.begin(), d.end(), [](const Rational& v) { return v != 0; });
    if (first != d.end() && *first < 0)
        for (auto& v : d) v = -v;
    return d;
}

} // namespace detail

/// Nonnegative x with sum_i x_i S(gen_i) = S(target) on every partition.
/// Uniqueness: each coefficient is minimized and maximized exactly over the
/// solution polytope.
inline CoefficientResult solve_coefficients(const EntropyMatrix& gens, const RationalVector& target) {
    if (gens.rows.empty()) throw std::invalid_argument("solve_coefficients: no generators");
    const std::size_t parts = target.size(), k = gens.size();
    for (const auto& r : gens.rows)
        if (r.size() != parts) throw std::invalid_argument("solve_coefficients: dimension mismatch");

    lp::RationalMatrix a(parts, RationalVector(k));
    for (std::size_t x = 0; x < parts; ++x)
        for (std::size_t i = 0; i < k; ++i) a[x][i] = gens.rows[i][x];

    const RationalVector zero(k, Rational(0));
    auto base = lp::solve(a, target, zero);
    if (base.status == lp::Status::Infeasible) {
        Infeasible inf{base.farkas, lp::dot(base.farkas, target)};
        if (!verify_certificate(gens, target, inf.certificate)) {
            throw std::logic_error("solve_coefficients: certificate failed verification");
        }
        return inf;
    }

    CoefficientSolution sol;
    sol.coefficients = base.x;
    for (std::size_t x = 0; x < parts; ++x) {
        Rational r = lp::dot(a[x], sol.coefficients) - target[x];
        if (r < 0) r = -r;
        sol.residual = std::max(sol.residual, r);
    }
    for (std::size_t i = 0; i < k && sol.unique; ++i) {
        RationalVector c(k, Rational(0));
        c[i] = 1;
        const auto lo = lp::solve(a, target, c);
        c[i] = -1;
        const auto hi = lp::solve(a, target, c);
        if (hi.status == lp::Status::Unbounded) {
            sol.unique = false;
            sol.kernel_direction = detail::primitive_direction(hi.ray);
            RationalVector alt = sol.coefficients;
            for (std::size_t j = 0; j < k; ++j) alt[j] += hi.ray[j];
            sol.alternative = alt;
        } else if (hi.x[i] != lo.x[i]) {
            sol.unique = false;
            RationalVector d(k);
            for (std::size_t j = 0; j < k; ++j) d[j] = hi.x[j] - lo.x[j];
            sol.kernel_direction = detail::primitive_direction(d);
            sol.alternative = hi.x != sol.coefficients ? hi.x : lo.x;
        }
    }
    return sol;
}

inline CoefficientResult solve_coefficients(const EntropyMatrix& gens, const EntropyVector& target) {
    if (target.num_parties() != gens.num_parties) throw std::invalid_argument("solve_coefficients: party-count mismatch");
    return solve_coefficients(gens, to_rational_vector(target));
}

/// Entanglement generating set test: every partial entropy positive.
inline bool egs_check(const EntropyVector& ev) {
    return std::all_of(ev.values().begin(), ev.values().end(), [](double v) { return v > kEntropyTolerance; });
}

inline bool egs_check(const PureState& s) { return egs_check(entropy_vector(s)); }

struct Probe {
    std::string label;
    EntropyVector entropies;
};

namespace detail {
inline Probe probe(std::string label, const PureState& s) { return {std::move(label), entropy_vector(s)}; }

inline std::string subset_name(const std::vector<std::size_t>& members) {
    std::string s;
    for (auto p : members) s += party_name(p);
    return s;
}
} // namespace detail

/// Probe states beyond the EPR baseline: the m-Cat, the five-qubit codeword
/// for m = 5, and for m = 6 a four-party Cat on every four-party subset.
inline std::vector<Probe> default_probes(std::size_t m) {
    std::vector<Probe> out;
    if (m == 6) {
        for (std::size_t mask = 0; mask < 64; ++mask) {
            if (std::popcount(mask) != 4) continue;
            std::vector<std::size_t> members;
            for (std::size_t p = 0; p < 6; ++p)
                if ((mask >> p) & 1U) members.push_back(p);
            out.push_back(detail::probe("4-Cat(" + detail::subset_name(members) + ")", states::cat_on(6, members)));
        }
        std::stable_sort(out.begin(), out.end(), [](const Probe& a, const Probe& b) { return a.label < b.label; });
    }
    out.push_back(detail::probe(std::to_string(m) + "-Cat", states::cat(m)));
    if (m == 5) out.push_back(detail::probe("codeword", states::codeword5()));
    return out;
}

struct BoundStep {
    std::string label;
    bool infeasible = false;
    std::optional<double> r21;
    std::optional<Infeasible> certificate;
    std::optional<CoefficientSolution> solution;
    std::size_t generators_before = 0;
};

struct MregsBound {
    std::size_t num_parties = 0;
    std::size_t baseline = 0; // m(m-1)/2 EPR pairs
    std::size_t bound = 0;
    std::optional<double> epr_r21;
    std::vector<BoundStep> trace;
    std::string note;
};

/// Entropy-level lower bound on the size of a minimal reversible generating
/// set: the m(m-1)/2 EPR pairs plus one for every probe whose entropy vector
/// lies outside the cone of everything accepted so far.
inline MregsBound mregs_lower_bound(std::size_t m, const std::vector<Probe>& probes) {
    if (m < 2 || m > 12) throw std::invalid_argument("mregs_lower_bound: m must be in [2, 12]");
    MregsBound out;
    out.num_parties = m;
    auto gens = make_entropy_matrix(m);
    const auto eprs = states::eprs_factors(m);
    for (std::size_t i = 0, k = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j, ++k)
            gens.add("EPR(" + party_name(i) + party_name(j) + ")", entropy_vector(eprs[k]));
    out.baseline = gens.size();
    out.bound = gens.size();
    if (m >= 3) out.epr_r21 = entropy_ratio_r21(entropy_vector(std::span<const PureState>(eprs))).ratio;

    for (const auto& p : probes) {
        if (p.entropies.num_parties() != m) throw std::invalid_argument("mregs_lower_bound: malformed probe " + p.label);
        BoundStep step;
        step.label = p.label;
        step.generators_before = gens.size();
        if (m >= 3) step.r21 = entropy_ratio_r21(p.entropies).ratio;
        const auto target = to_rational_vector(p.entropies);
        auto res = solve_coefficients(gens, target);
        if (auto* inf = std::get_if<Infeasible>(&res)) {
            step.infeasible = true;
            step.certificate = *inf;
            ++out.bound;
            gens.add(p.label, target);
        } else {
            step.solution = std::get<CoefficientSolution>(res);
        }
        out.trace.push_back(std::move(step));
    }
    if (m == 3) {
        out.note = "entropy-level bound only; GHZ is entropy-feasible over the three EPR pairs, while "
                   "relative-entropy arguments raise the three-party bound to 4";
    }
    return out;
}

inline MregsBound mregs_lower_bound(std::size_t m) { return mregs_lower_bound(m, default_probes(m)); }

struct R21Row {
    std::size_t parties = 0;
    std::string state;
    Rational ratio;
    double value = 0.0;
};

/// Entropy ratio S_AB / S_A for the Cat, complete-graph EPR and codeword
/// states; EPR collections are handled as factor lists so six parties never
/// need the 2^30-dimensional vector.
inline std::vector<R21Row> r21_table() {
    std::vector<R21Row> rows;
    auto add = [&](std::size_t m, std::string label, const EntropyVector& ev) {
        const auto r = entropy_ratio_r21(ev);
        if (!r.ratio) throw DomainError("r21_table: " + label + ": " + r.diagnostic);
        const Rational s1 = lp::to_rational(ev.single(0));
        const Rational s2 = lp::to_rational(ev.at(Partition(m, {0, 1})));
        rows.push_back({m, std::move(label), s2 / s1, *r.ratio});
    };
    auto eprs = [](std::size_t m) {
        const auto f = states::eprs_factors(m);
        return entropy_vector(std::span<const PureState>(f));
    };
    add(3, "Cat", entropy_vector(states::cat(3)));
    add(3, "3EPRs", eprs(3));
    add(4, "Cat", entropy_vector(states::cat(4)));
    add(4, "6EPRs", eprs(4));
    add(5, "Cat", entropy_vector(states::cat(5)));
    add(5, "10EPRs", eprs(5));
    add(5, "codeword", entropy_vector(states::codeword5()));
    add(6, "Cat", entropy_vector(states::cat(6)));
    add(6, "15EPRs", eprs(6));
    return rows;
}

} // namespace mpent
