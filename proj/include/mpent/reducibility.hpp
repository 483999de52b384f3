#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mpent/entropy.hpp"
#include "mpent/state.hpp"
#include "mpent/states.hpp"

namespace mpent {

/// Descending probabilities summing to one.
using SchmidtSpectrum = std::vector<double>;

inline constexpr double kMajorizationTolerance = 1e-10;
inline constexpr double kSpectralTolerance = 1e-8;

inline SchmidtSpectrum schmidt_spectrum(const PureState& s, const Partition& cut) {
    auto ev = reduced_spectrum(s, cut);
    for (auto& x : ev) x = std::max(x, 0.0);
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

/// p majorizes q: every partial sum of sorted p dominates that of q.
inline bool majorizes(SchmidtSpectrum p, SchmidtSpectrum q) {
    std::sort(p.rbegin(), p.rend());
    std::sort(q.rbegin(), q.rend());
    const std::size_t n = std::max(p.size(), q.size());
    p.resize(n, 0.0);
    q.resize(n, 0.0);
    double sp = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sp += p[k];
        sq += q[k];
        if (sp < sq - kMajorizationTolerance) return false;
    }
    return true;
}

inline bool same_spectrum(SchmidtSpectrum p, SchmidtSpectrum q, double tol = kSpectralTolerance) {
    std::sort(p.rbegin(), p.rend());
    std::sort(q.rbegin(), q.rend());
    const std::size_t n = std::max(p.size(), q.size());
    p.resize(n, 0.0);
    q.resize(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(p[k] - q[k]) > tol) return false;
    return true;
}

namespace detail {
inline void check_cut(const PureState& a, const PureState& b, const Partition& cut) {
    if (a.num_parties() != b.num_parties() || cut.num_parties() != a.num_parties()) {
        throw std::invalid_argument("bipartite comparison: party-count mismatch");
    }
    if (cut.size() == 0 || cut.size() == cut.num_parties()) throw std::invalid_argument("bipartite comparison: trivial cut");
}
inline Partition default_cut(const PureState& s) {
    if (s.num_parties() != 2) throw std::invalid_argument("bipartite comparison: pass a cut for more than two parties");
    return Partition(2, {0});
}
} // namespace detail

/// psi -> phi with certainty by LOCC across `cut` (each side acting as one
/// party) iff spectrum(psi) is majorized by spectrum(phi).
inline bool exact_bipartite_reducible(const PureState& psi, const PureState& phi, const Partition& cut) {
    detail::check_cut(psi, phi, cut);
    return majorizes(schmidt_spectrum(phi, cut), schmidt_spectrum(psi, cut));
}

inline bool exact_bipartite_reducible(const PureState& psi, const PureState& phi) {
    return exact_bipartite_reducible(psi, phi, detail::default_cut(psi));
}

inline bool lu_equivalent_bipartite(const PureState& psi, const PureState& phi, const Partition& cut) {
    detail::check_cut(psi, phi, cut);
    return same_spectrum(schmidt_spectrum(psi, cut), schmidt_spectrum(phi, cut));
}

inline bool lu_equivalent_bipartite(const PureState& psi, const PureState& phi) {
    return lu_equivalent_bipartite(psi, phi, detail::default_cut(psi));
}

/// rho^{T_B} for a density matrix on dA x dB.
inline Matrix partial_transpose(const Matrix& rho, std::size_t da, std::size_t db) {
    if (!rho.is_square() || rho.rows() != da * db) throw std::invalid_argument("partial_transpose: shape mismatch");
    Matrix out(rho.rows(), rho.cols());
    for (std::size_t a = 0; a < da; ++a)
        for (std::size_t b = 0; b < db; ++b)
            for (std::size_t a2 = 0; a2 < da; ++a2)
                for (std::size_t b2 = 0; b2 < db; ++b2) out(a * db + b, a2 * db + b2) = rho(a * db + b2, a2 * db + b);
    return out;
}

struct PptResult {
    bool is_ppt = true;
    double min_eigenvalue = 0.0;
    std::vector<double> eigenvalues; // descending
};

/// Peres test on a two-qubit density matrix, transposing the second qubit.
inline PptResult ppt_test(const Matrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4) throw std::invalid_argument("ppt_test: expects a 4x4 two-qubit density matrix");
    PptResult r;
    r.eigenvalues = hermitian_eigenvalues(partial_transpose(rho, 2, 2), 1e-9);
    r.min_eigenvalue = r.eigenvalues.back();
    r.is_ppt = r.min_eigenvalue >= -1e-10;
    return r;
}

inline PptResult ppt_test(const DensityMatrix& rho) { return ppt_test(rho.matrix()); }

enum class Verdict { LUEquivalent, ReducibleAtoB, ReducibleBtoA, Incomparable, IncomparableByEntropy, Unknown };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::LUEquivalent: return "LUEquivalent";
    case Verdict::ReducibleAtoB: return "ReducibleAtoB";
    case Verdict::ReducibleBtoA: return "ReducibleBtoA";
    case Verdict::Incomparable: return "Incomparable";
    case Verdict::IncomparableByEntropy: return "IncomparableByEntropy";
    case Verdict::Unknown: return "Unknown";
    }
    return "?";
}

struct Evidence {
    std::string reason;
    std::optional<Partition> witness;       // partition (or party pair) carrying the obstruction
    std::vector<double> spectrum_a, spectrum_b;
    std::optional<double> pt_min_a, pt_min_b; // partial-transpose minima on the witness pair
    bool ppt_witness = false;                 // one side PPT, the other NPT on the witness pair
    bool entropy_monotonicity_incomparable = false;
};

struct ComparisonVerdict {
    Verdict verdict = Verdict::Unknown;
    Evidence evidence;
};

namespace detail {

// Partial-transpose spectrum of the two-party reduction on (i, j), transposing j.
inline std::vector<double> pair_pt_spectrum(const PureState& s, std::size_t i, std::size_t j) {
    const auto rho = partial_trace(s, Partition(s.num_parties(), {i, j}));
    return hermitian_eigenvalues(partial_transpose(rho.matrix(), s.dim(i), s.dim(j)), 1e-9);
}

// Party-by-party alignment of nondegenerate marginal eigenbases, then a
// diagonal phase gauge. Returns true only when the constructed local
// unitaries map psi to phi with fidelity 1 - 1e-9. Sets `obstruction` when
// nondegeneracy makes a mismatch conclusive.
inline bool align_lu(const PureState& psi, const PureState& phi, std::string& why, bool& obstruction) {
    obstruction = false;
    const std::size_t m = psi.num_parties();
    std::vector<Matrix> u_psi, u_phi;
    for (std::size_t p = 0; p < m; ++p) {
        const auto ea = hermitian_eigensystem(partial_trace(psi, Partition(m, {p})).matrix());
        const auto eb = hermitian_eigensystem(partial_trace(phi, Partition(m, {p})).matrix());
        for (std::size_t k = 0; k + 1 < ea.values.size(); ++k) {
            if (std::abs(ea.values[k] - ea.values[k + 1]) < 1e-6) {
                why = "degenerate marginal on party " + party_name(p);
                return false;
            }
        }
        u_psi.push_back(ea.vectors);
        u_phi.push_back(eb.vectors);
    }
    // Coordinates of both states in their own marginal eigenbases.
    auto rotate = [&](const PureState& s, const std::vector<Matrix>& us) {
        PureState t = s;
        for (std::size_t p = 0; p < m; ++p) t = apply_local(t, p, us[p].adjoint());
        return t;
    };
    const PureState a = rotate(psi, u_psi), b = rotate(phi, u_phi);
    for (std::size_t g = 0; g < a.dimension(); ++g) {
        if (std::abs(std::abs(a.amplitude(g)) - std::abs(b.amplitude(g))) > 1e-7) {
            why = "amplitude moduli differ in the marginal eigenbases";
            obstruction = true;
            return false;
        }
    }
    // Solve theta_1(a_1) + ... + theta_m(a_m) = arg(b/a) on the support.
    std::vector<std::vector<std::optional<double>>> theta(m);
    for (std::size_t p = 0; p < m; ++p) theta[p].assign(a.dim(p), std::nullopt);
    std::vector<std::size_t> support;
    for (std::size_t g = 0; g < a.dimension(); ++g)
        if (std::abs(a.amplitude(g)) > 1e-7) support.push_back(g);
    std::vector<bool> used(support.size(), false);
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t s = 0; s < support.size(); ++s) {
            if (used[s]) continue;
            const auto dg = a.digits_of(support[s]);
            std::size_t unknown = 0, last = 0;
            double known = 0.0;
            for (std::size_t p = 0; p < m; ++p) {
                if (theta[p][dg[p]]) known += *theta[p][dg[p]];
                else {
                    ++unknown;
                    last = p;
                }
            }
            if (unknown == 1) {
                theta[last][dg[last]] = std::arg(b.amplitude(support[s]) / a.amplitude(support[s])) - known;
                used[s] = true;
                progress = true;
            } else if (unknown == 0) {
                used[s] = true;
            }
        }
        if (!progress) {
            // Fix one free phase to zero and continue.
            for (std::size_t s = 0; s < support.size() && !progress; ++s) {
                if (used[s]) continue;
                const auto dg = a.digits_of(support[s]);
                for (std::size_t p = 0; p < m; ++p)
                    if (!theta[p][dg[p]]) {
                        theta[p][dg[p]] = 0.0;
                        progress = true;
                        break;
                    }
            }
        }
    }
    PureState c = a;
    for (std::size_t p = 0; p < m; ++p) {
        std::vector<double> ph(a.dim(p));
        for (std::size_t k = 0; k < ph.size(); ++k) ph[k] = theta[p][k].value_or(0.0);
        Matrix d(a.dim(p), a.dim(p));
        for (std::size_t k = 0; k < ph.size(); ++k) d(k, k) = std::polar(1.0, ph[k]);
        c = apply_local(c, p, u_phi[p] * d);
    }
    if (fidelity(c, phi) >= 1.0 - 1e-9) {
        why = "local unitaries found by aligning marginal eigenbases";
        return true;
    }
    why = "eigenbasis alignment found no consistent phase gauge";
    return false;
}

} // namespace detail

/// Decision tree for exact LOCC comparison. Pairs with equal marginal
/// entropies are either LU-equivalent or LOCC-incomparable; pairs with equal
/// marginals but some unequal partial entropy are incomparable outright.
inline ComparisonVerdict classify_pair(const PureState& psi, const PureState& phi) {
    if (psi.num_parties() != phi.num_parties()) throw std::invalid_argument("classify: party-count mismatch");
    const std::size_t m = psi.num_parties();
    ComparisonVerdict out;
    auto& ev = out.evidence;

    if (psi.dims() == phi.dims() && fidelity(psi, phi) >= 1.0 - 1e-9) {
        out.verdict = Verdict::LUEquivalent;
        ev.reason = "states are equal up to a global phase";
        return out;
    }

    const auto ea = entropy_vector(psi), eb = entropy_vector(phi);
    bool a_above = false, b_above = false;
    for (std::size_t x = 0; x < ea.size(); ++x) {
        if (ea.values()[x] > eb.values()[x] + kEntropyTolerance) a_above = true;
        if (eb.values()[x] > ea.values()[x] + kEntropyTolerance) b_above = true;
    }
    ev.entropy_monotonicity_incomparable = a_above && b_above;

    if (m == 2) {
        const Partition cut(2, {0});
        ev.witness = cut;
        ev.spectrum_a = schmidt_spectrum(psi, cut);
        ev.spectrum_b = schmidt_spectrum(phi, cut);
        if (same_spectrum(ev.spectrum_a, ev.spectrum_b)) {
            out.verdict = Verdict::LUEquivalent;
            ev.reason = "equal Schmidt spectra";
        } else if (majorizes(ev.spectrum_b, ev.spectrum_a)) {
            out.verdict = Verdict::ReducibleAtoB;
            ev.reason = "spectrum of A is majorized by spectrum of B";
        } else if (majorizes(ev.spectrum_a, ev.spectrum_b)) {
            out.verdict = Verdict::ReducibleBtoA;
            ev.reason = "spectrum of B is majorized by spectrum of A";
        } else {
            out.verdict = Verdict::Incomparable;
            ev.reason = "neither Schmidt spectrum majorizes the other";
        }
        return out;
    }

    for (std::size_t x = 0; x < ea.size(); ++x) {
        if (ea.partitions()[x].size() != 1) continue;
        if (std::abs(ea.values()[x] - eb.values()[x]) > kEntropyTolerance) {
            ev.witness = ea.partitions()[x];
            ev.reason = "single-party entropies differ on " + ea.partitions()[x].to_string() +
                        "; exact reducibility is not decided by entropies";
            if (ev.entropy_monotonicity_incomparable) {
                ev.reason += " (neither entropy vector dominates, so neither direction is possible)";
            }
            return out; // Unknown
        }
    }
    for (std::size_t x = 0; x < ea.size(); ++x) {
        if (std::abs(ea.values()[x] - eb.values()[x]) > kEntropyTolerance) {
            out.verdict = Verdict::IncomparableByEntropy;
            ev.witness = ea.partitions()[x];
            ev.reason = "marginally isentropic but partial entropies differ on " + ea.partitions()[x].to_string();
            return out;
        }
    }

    // Fully isentropic: look for LU obstructions, then a positive certificate.
    for (const auto& x : ea.partitions()) {
        auto sa = schmidt_spectrum(psi, x), sb = schmidt_spectrum(phi, x);
        if (!same_spectrum(sa, sb)) {
            out.verdict = Verdict::Incomparable;
            ev.witness = x;
            ev.spectrum_a = std::move(sa);
            ev.spectrum_b = std::move(sb);
            ev.reason = "isentropic but not isospectral on " + x.to_string() + ", so not LU-equivalent";
            return out;
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            if (psi.dim(i) * psi.dim(j) > 64 || phi.dim(i) * phi.dim(j) > 64) continue;
            if (psi.dim(i) != phi.dim(i) || psi.dim(j) != phi.dim(j)) continue;
            auto pa = detail::pair_pt_spectrum(psi, i, j), pb = detail::pair_pt_spectrum(phi, i, j);
            if (same_spectrum(pa, pb)) continue;
            out.verdict = Verdict::Incomparable;
            ev.witness = Partition(m, {i, j});
            ev.pt_min_a = pa.back();
            ev.pt_min_b = pb.back();
            ev.spectrum_a = std::move(pa);
            ev.spectrum_b = std::move(pb);
            ev.ppt_witness = (*ev.pt_min_a >= -1e-10) != (*ev.pt_min_b >= -1e-10);
            ev.reason = ev.ppt_witness ? "isentropic; PPT witness on " + ev.witness->to_string() +
                                             ": one reduction is PPT, the other NPT, so not LU-equivalent"
                                       : "isentropic; partial-transpose spectra differ on " + ev.witness->to_string();
            return out;
        }

    if (m <= 3 && psi.dims() == phi.dims() &&
        std::all_of(psi.dims().begin(), psi.dims().end(), [](std::size_t d) { return d <= 4; })) {
        std::string why;
        bool obstruction = false;
        if (detail::align_lu(psi, phi, why, obstruction)) {
            out.verdict = Verdict::LUEquivalent;
        } else if (obstruction) {
            out.verdict = Verdict::Incomparable;
        }
        ev.reason = "isentropic; " + why;
        return out;
    }
    ev.reason = "isentropic with matching spectral invariants; LU equivalence not decided";
    return out;
}

struct GhzEprWitness {
    EntropyVector entropy_2ghz, entropy_3epr;
    bool all_two_bits = false;
    double rho_bc_2ghz_deviation = 0.0; // max |rho_BC(2GHZ) - I/16| entrywise
    std::vector<double> rho_bc_2ghz_eigenvalues;
    double rho_bc_2ghz_offdiagonal = 0.0; // diagonal in the product basis => separable
    double rho_bc_2ghz_pt_min = 0.0;
    double epr_factor_fidelity = 0.0;   // BC EPR factor of rho_BC(3EPR) vs |EPR><EPR|
    PptResult epr_factor_ppt;
    ComparisonVerdict verdict;
};

/// 2GHZ vs EPR^AB (x) EPR^BC (x) EPR^CA: equal entropy vectors (2 bits
/// everywhere) but rho_BC is maximally mixed for one and contains a
/// distillable EPR pair for the other.
inline GhzEprWitness ghz_epr_witness() {
    const PureState g2 = states::two_ghz(), e3 = states::three_epr();
    GhzEprWitness w{entropy_vector(g2), entropy_vector(e3), false, 0.0, {}, 0.0, 0.0, 0.0, {}, {}};
    w.all_two_bits = true;
    for (std::size_t x = 0; x < w.entropy_2ghz.size(); ++x) {
        if (std::abs(w.entropy_2ghz.values()[x] - 2.0) > kEntropyTolerance ||
            std::abs(w.entropy_3epr.values()[x] - 2.0) > kEntropyTolerance) {
            w.all_two_bits = false;
        }
    }
    const auto rho = partial_trace(g2, Partition(3, {1, 2})).matrix();
    for (std::size_t i = 0; i < rho.rows(); ++i)
        for (std::size_t j = 0; j < rho.cols(); ++j) {
            const cplx want = i == j ? 1.0 / 16.0 : 0.0;
            w.rho_bc_2ghz_deviation = std::max(w.rho_bc_2ghz_deviation, std::abs(rho(i, j) - want));
            if (i != j) w.rho_bc_2ghz_offdiagonal = std::max(w.rho_bc_2ghz_offdiagonal, std::abs(rho(i, j)));
        }
    w.rho_bc_2ghz_eigenvalues = hermitian_eigenvalues(rho);
    w.rho_bc_2ghz_pt_min = hermitian_eigenvalues(partial_transpose(rho, 4, 4), 1e-9).back();

    // Same amplitudes, one party per qubit: A(ab) A(ca) B(ab) B(bc) C(bc) C(ca).
    const PureState qubits(std::vector<std::size_t>(6, 2), {e3.amplitudes().begin(), e3.amplitudes().end()});
    const auto factor = partial_trace(qubits, Partition(6, {3, 4}));
    w.epr_factor_fidelity = fidelity(factor, states::epr());
    w.epr_factor_ppt = ppt_test(factor);
    w.verdict = classify_pair(g2, e3);
    return w;
}

} // namespace mpent
