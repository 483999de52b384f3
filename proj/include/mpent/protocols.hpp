#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "mpent/protocol.hpp"
#include "mpent/schmidt.hpp"
#include "mpent/states.hpp"

// Builders for the standard exact protocols: teleportation (through an EPR
// pair or a Cat state), Cat -> EPR, EPRs -> Cat, and the compress / teleport /
// decompress dilution circuit.
namespace mpent::protocols {

using Receiver = std::pair<std::size_t, std::string>; // party, register name

/// Teleports register `payload` of `sender` through the resource whose sender
/// leg is `sender_leg` and whose other legs are `receivers` (one receiver: an
/// EPR pair; several: a Cat state, which fans the qubit out). The outcome is
/// broadcast under `tag` as "zx"; every receiver applies X^x, the first also
/// Z^z. Both sender qubits are discarded; the layout is updated.
inline Protocol teleport(Layout& layout, std::size_t sender, const std::string& payload, const std::string& sender_leg,
                         const std::vector<Receiver>& receivers, const std::string& tag) {
    if (receivers.empty()) throw std::invalid_argument("teleport: missing resource factor");
    const auto sd = layout.subdims(sender);
    const std::size_t pp = layout.position(sender, payload), pl = layout.position(sender, sender_leg);
    if (sd[pp] != 2 || sd[pl] != 2) throw std::invalid_argument("teleport: payload and leg must be qubits");
    for (const auto& [party, reg] : receivers) {
        if (party == sender) throw std::invalid_argument("teleport: receiver equals sender");
        if (layout.subdims(party)[layout.position(party, reg)] != 2) {
            throw std::invalid_argument("teleport: receiver leg must be a qubit");
        }
    }

    Protocol p;
    p.push_back(LocalUnitary{sender, embed(gates::CNOT(), sd, {pp, pl})});
    p.push_back(LocalUnitary{sender, embed(gates::H(), sd, {pp})});
    p.push_back(computational_measurement(sender, tag, sd, {pp, pl}));
    for (std::size_t r = 0; r < receivers.size(); ++r) {
        const auto& [party, reg] = receivers[r];
        const auto rd = layout.subdims(party);
        const std::size_t pos = layout.position(party, reg);
        ConditionedUnitary c{party, {tag}, {}};
        for (unsigned z = 0; z < 2; ++z)
            for (unsigned x = 0; x < 2; ++x) {
                Matrix u = x ? gates::X() : gates::I2();
                if (r == 0 && z) u = gates::Z() * u;
                c.table[std::to_string(z) + std::to_string(x)] = embed(u, rd, {pos});
            }
        p.push_back(std::move(c));
    }
    p.push_back(layout.discard(sender, sender_leg));
    p.push_back(layout.discard(sender, payload));
    return p;
}

/// m-Cat -> EPR between parties i and j: every other party measures in the
/// Hadamard basis; i applies Z when the number of '-' outcomes is odd; the
/// helpers then discard their (now product) qubit and become dimension 1.
inline Protocol cat_to_epr(std::size_t m, std::size_t i, std::size_t j) {
    if (m < 3 || i >= m || j >= m || i == j) throw std::invalid_argument("cat_to_epr: need m >= 3 and distinct i, j < m");
    const double r = 1.0 / std::sqrt(2.0);
    const Matrix plus = Matrix::projector(std::vector<cplx>{r, r});
    const Matrix minus = Matrix::projector(std::vector<cplx>{r, -r});

    Protocol p;
    std::vector<std::string> tags;
    for (std::size_t h = 0; h < m; ++h) {
        if (h == i || h == j) continue;
        tags.push_back(party_name(h));
        p.push_back(LocalMeasurement{h, party_name(h), {plus, minus}, {"+", "-"}});
    }
    ConditionedUnitary fix{i, tags, {}};
    for (std::size_t mask = 0; mask < (std::size_t{1} << tags.size()); ++mask) {
        std::string key;
        for (std::size_t t = 0; t < tags.size(); ++t) {
            if (t) key += ',';
            key += ((mask >> t) & 1U) ? "-" : "+";
        }
        fix.table[key] = std::popcount(mask) % 2 ? gates::Z() : gates::I2();
    }
    p.push_back(std::move(fix));
    for (std::size_t h = 0; h < m; ++h)
        if (h != i && h != j) p.push_back(DiscardSubsystem{h, {2}, 0});
    return p;
}

/// Input for eprs_to_cat: party A holds a local m-qubit Cat (registers
/// c0..c{m-1}) followed by one EPR leg e1..e{m-1} per other party; party l
/// holds leg e{l}.
inline PureState eprs_to_cat_input(std::size_t m) {
    if (m < 2 || m > 8) throw std::invalid_argument("eprs_to_cat: m must be in [2, 8]");
    std::vector<std::size_t> dims(m, 2);
    dims[0] = std::size_t{1} << (2 * m - 1);
    std::vector<BasisTerm> terms;
    const std::size_t legs = m - 1;
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t b = 0; b < (std::size_t{1} << legs); ++b) {
            std::vector<std::size_t> digits(m, 0);
            const std::size_t cat_bits = c ? (std::size_t{1} << m) - 1 : 0;
            digits[0] = (cat_bits << legs) | b;
            for (std::size_t l = 1; l < m; ++l) digits[l] = (b >> (legs - l)) & 1U;
            terms.push_back({digits, 1.0});
        }
    return make_state(dims, terms);
}

inline Layout eprs_to_cat_layout(std::size_t m) {
    Layout layout(m);
    for (std::size_t c = 0; c < m; ++c) layout.add(0, "c" + std::to_string(c), 2);
    for (std::size_t l = 1; l < m; ++l) {
        layout.add(0, "e" + std::to_string(l), 2);
        layout.add(l, "e" + std::to_string(l), 2);
    }
    return layout;
}

/// m-1 EPR pairs from A to everyone -> m-Cat: A teleports qubit c{l} of
/// her local Cat to party l through EPR pair e{l}. 4^{m-1} branches.
inline Protocol eprs_to_cat(std::size_t m) {
    Layout layout = eprs_to_cat_layout(m);
    Protocol p;
    for (std::size_t l = 1; l < m; ++l) {
        const std::string e = "e" + std::to_string(l);
        auto frag = teleport(layout, 0, "c" + std::to_string(l), e, {{l, e}}, "t" + std::to_string(l));
        p.insert(p.end(), frag.begin(), frag.end());
    }
    return p;
}

using Edge = std::pair<std::size_t, std::size_t>;

namespace detail {

inline void validate_graph(std::size_t m, const std::vector<Edge>& edges) {
    if (m < 2) throw std::invalid_argument("graph: need at least two parties");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto [u, v] : edges) {
        if (u >= m || v >= m || u == v) throw std::invalid_argument("graph: edge endpoints must be distinct parties < m");
        if (!seen.insert({std::min(u, v), std::max(u, v)}).second) throw std::invalid_argument("graph: repeated edge");
    }
}

inline std::string edge_name(const Edge& e) { return "e" + party_name(e.first) + party_name(e.second); }

} // namespace detail

/// One EPR pair per edge; every party's registers are ordered as the edges.
inline PureState epr_graph_state(std::size_t m, const std::vector<Edge>& edges) {
    detail::validate_graph(m, edges);
    if (edges.empty()) throw std::invalid_argument("graph: no edges");
    PureState s = states::epr(m, edges[0].first, edges[0].second);
    for (std::size_t k = 1; k < edges.size(); ++k) s = tensor(s, states::epr(m, edges[k].first, edges[k].second));
    return s;
}

/// EPR pairs along a connected graph -> m-Cat. A BFS spanning tree from A is
/// fused edge by edge (CNOT from the Cat qubit onto the new leg, Z
/// measurement, X correction on the far end); legs of non-tree edges are
/// measured in Z and dropped.
inline Protocol graph_eprs_to_cat(std::size_t m, const std::vector<Edge>& edges) {
    detail::validate_graph(m, edges);
    Layout layout(m);
    std::vector<std::vector<std::size_t>> adj(m);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        layout.add(edges[k].first, detail::edge_name(edges[k]), 2);
        layout.add(edges[k].second, detail::edge_name(edges[k]), 2);
        adj[edges[k].first].push_back(k);
        adj[edges[k].second].push_back(k);
    }

    std::vector<bool> reached(m, false), tree_edge(edges.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> order; // (edge, parent)
    std::queue<std::size_t> q;
    reached[0] = true;
    q.push(0);
    while (!q.empty()) {
        const std::size_t u = q.front();
        q.pop();
        for (auto k : adj[u]) {
            const std::size_t v = edges[k].first == u ? edges[k].second : edges[k].first;
            if (reached[v]) continue;
            reached[v] = true;
            tree_edge[k] = true;
            order.push_back({k, u});
            q.push(v);
        }
    }
    if (std::find(reached.begin(), reached.end(), false) != reached.end()) {
        throw DomainError("graph_eprs_to_cat: graph is not connected");
    }

    Protocol p;
    std::vector<std::string> cat_reg(m);
    for (auto [k, u] : order) {
        const std::size_t v = edges[k].first == u ? edges[k].second : edges[k].first;
        const std::string leg = detail::edge_name(edges[k]);
        if (cat_reg[u].empty()) {
            cat_reg[u] = leg;
            cat_reg[v] = leg;
            continue;
        }
        const auto ud = layout.subdims(u);
        p.push_back(LocalUnitary{u, embed(gates::CNOT(), ud, {layout.position(u, cat_reg[u]), layout.position(u, leg)})});
        const std::string tag = "f" + leg.substr(1);
        p.push_back(computational_measurement(u, tag, ud, {layout.position(u, leg)}));
        const auto vd = layout.subdims(v);
        p.push_back(ConditionedUnitary{
            v, {tag}, {{"0", Matrix::identity(product(vd))}, {"1", embed(gates::X(), vd, {layout.position(v, leg)})}}});
        p.push_back(layout.discard(u, leg));
        cat_reg[v] = leg;
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (tree_edge[k]) continue;
        const std::string leg = detail::edge_name(edges[k]);
        for (std::size_t end : {edges[k].first, edges[k].second}) {
            p.push_back(computational_measurement(end, "z" + leg.substr(1) + party_name(end), layout.subdims(end),
                                                  {layout.position(end, leg)}));
            p.push_back(layout.discard(end, leg));
        }
    }
    return p;
}

/// Generalized measurement with Kraus operators on one register, realized as
/// an isometry onto an appended ancilla, a projective ancilla measurement and
/// a discard. `subdims` is the party's register split and `position` the
/// register acted on.
inline Protocol dilate_povm(std::size_t party, const std::vector<std::size_t>& subdims, std::size_t position,
                            const std::vector<Matrix>& kraus, std::vector<std::string> labels, const std::string& tag) {
    if (kraus.empty()) throw std::invalid_argument("dilate_povm: no Kraus operators");
    if (labels.size() != kraus.size()) throw std::invalid_argument("dilate_povm: one label per Kraus operator");
    const std::size_t d = subdims.at(position), k = kraus.size();
    Matrix v(d * k, d);
    for (std::size_t a = 0; a < k; ++a) {
        if (kraus[a].rows() != d || kraus[a].cols() != d) throw std::invalid_argument("dilate_povm: Kraus shape mismatch");
        for (std::size_t x = 0; x < d; ++x)
            for (std::size_t y = 0; y < d; ++y) v(x * k + a, y) = kraus[a](x, y);
    }
    Protocol p;
    p.push_back(LocalUnitary{party, embed(v, subdims, {position}, {d * k})});
    auto split = subdims;
    split.insert(split.begin() + static_cast<std::ptrdiff_t>(position) + 1, k);
    auto meas = computational_measurement(party, tag, split, {position + 1});
    meas.labels = std::move(labels);
    p.push_back(std::move(meas));
    p.push_back(DiscardSubsystem{party, split, position + 1});
    return p;
}

struct DilutionReport {
    ProtocolRun run;
    std::size_t copies = 0;
    std::size_t k = 0;
    double success_probability = 0.0; // compression junk register found empty
    double fidelity = 0.0;            // of the success branches to target^n
    double average_fidelity = 0.0;    // over all branches
    std::size_t classical_bits = 0;   // teleportation bits, 2k
    std::size_t broadcast_bits = 0;   // including the compression outcome
};

/// Dilution circuit on n copies of an m-orthogonal target with k shared
/// Cat states: A prepares sum_s sqrt(P(s)) |s>|s> locally, compresses the
/// second copy onto k qubits (the 2^k most likely strings; the rest go to a
/// junk register that she measures and broadcasts), teleports the k qubits to
/// everyone through the Cats, each receiver decompresses, and every party
/// rotates into its own local Schmidt basis.
inline DilutionReport dilution_end_to_end(const PureState& target, std::size_t n, std::size_t k) {
    if (n == 0) throw std::invalid_argument("dilution_end_to_end: n must be at least 1");
    const auto mo = is_m_orthogonal(target);
    if (mo.verdict != MOrthogonality::Yes) {
        throw DomainError(std::string("dilution_end_to_end: target is ") + to_string(mo.verdict));
    }
    const auto& form = *mo.form;
    const std::size_t m = target.num_parties(), r = form.coefficients.size();

    constexpr double kBudget = double(std::size_t{1} << 20);
    const double rn = std::pow(double(r), double(n));
    const double cats = std::pow(2.0, double(k));
    double worst = rn * rn * std::pow(cats, double(m));
    double final_dim = 1.0;
    for (std::size_t p = 0; p < m; ++p) final_dim *= std::pow(double(target.dim(p)), double(n));
    worst = std::max({worst, rn * rn * rn * std::pow(cats, double(m - 1)), final_dim * rn});
    if (worst > kBudget) throw DomainError("dilution_end_to_end: dimension overflow (needs more than 2^20 amplitudes)");

    const std::size_t R = static_cast<std::size_t>(rn), C = std::size_t{1} << k;
    const std::size_t J = (R + C - 1) / C;

    // String probabilities and their rank (most likely first, ties by index).
    std::vector<double> prob(R);
    for (std::size_t s = 0; s < R; ++s) {
        double pr = 1.0;
        std::size_t rem = s;
        for (std::size_t t = 0; t < n; ++t) {
            const double l = form.coefficients[rem % r];
            pr *= l * l;
            rem /= r;
        }
        prob[s] = pr;
    }
    std::vector<std::size_t> by_rank(R);
    std::iota(by_rank.begin(), by_rank.end(), std::size_t{0});
    std::stable_sort(by_rank.begin(), by_rank.end(), [&](std::size_t a, std::size_t b) { return prob[a] > prob[b]; });
    std::vector<std::size_t> rank(R);
    for (std::size_t i = 0; i < R; ++i) rank[by_rank[i]] = i;

    // Input: A holds [areg R][aprime R][k_0..k_{k-1}], others [k_0..k_{k-1}].
    Layout layout(m);
    layout.add(0, "areg", R);
    layout.add(0, "aprime", R);
    for (std::size_t t = 0; t < k; ++t)
        for (std::size_t p = 0; p < m; ++p) layout.add(p, "k" + std::to_string(t), 2);
    std::vector<std::size_t> dims(m);
    for (std::size_t p = 0; p < m; ++p) dims[p] = layout.dim(p);
    std::vector<cplx> amps(product(dims));
    {
        // Cat resources contribute sum_c |c..c> per Cat; party digit for the
        // Cat legs is the k-bit string c (same for all parties).
        std::vector<std::size_t> digits(m);
        for (std::size_t s = 0; s < R; ++s)
            for (std::size_t c = 0; c < C; ++c) {
                digits[0] = (s * R + s) * C + c;
                for (std::size_t p = 1; p < m; ++p) digits[p] = c;
                std::size_t idx = 0;
                for (std::size_t p = 0; p < m; ++p) idx = idx * dims[p] + digits[p];
                amps[idx] = std::sqrt(prob[s] / double(C));
            }
    }
    const PureState input = PureState::normalized(dims, std::move(amps));

    Protocol proto;
    // Compression: |s> -> |rank mod 2^k>|rank div 2^k>.
    Matrix v(C * J, R);
    for (std::size_t s = 0; s < R; ++s) v((rank[s] % C) * J + rank[s] / C, s) = 1.0;
    proto.push_back(LocalUnitary{0, embed(v, layout.subdims(0), {layout.position(0, "aprime")}, {C * J})});
    layout.set_dim(0, "aprime", C * J);
    layout.split(0, "aprime", {{"cq", C}, {"junk", J}});
    proto.push_back(computational_measurement(0, "compress", layout.subdims(0), {layout.position(0, "junk")}));
    proto.push_back(layout.discard(0, "junk"));
    if (k > 0) {
        std::vector<std::pair<std::string, std::size_t>> qubits;
        for (std::size_t t = 0; t < k; ++t) qubits.push_back({"q" + std::to_string(t), 2});
        layout.split(0, "cq", qubits);
    } else {
        layout.split(0, "cq", {});
    }

    // Teleport the compressed qubits through the Cats.
    for (std::size_t t = 0; t < k; ++t) {
        const std::string leg = "k" + std::to_string(t);
        std::vector<Receiver> rec;
        for (std::size_t p = 1; p < m; ++p) rec.push_back({p, leg});
        auto frag = teleport(layout, 0, "q" + std::to_string(t), leg, rec, "t" + std::to_string(t));
        proto.insert(proto.end(), frag.begin(), frag.end());
    }

    // Receivers decompress, conditioned on the junk outcome g:
    // |j> -> |s : rank(s) = g 2^k + j>|0>, unused j -> |j>|1>.
    for (std::size_t p = 1; p < m; ++p) {
        ConditionedUnitary dec{p, {"compress"}, {}};
        for (std::size_t g = 0; g < J; ++g) {
            Matrix d(R * 2, C);
            for (std::size_t j = 0; j < C; ++j) {
                const std::size_t rk = g * C + j;
                if (rk < R) d(by_rank[rk] * 2, j) = 1.0;
                else d((j % R) * 2 + 1, j) = 1.0;
            }
            dec.table[std::to_string(g)] = std::move(d);
        }
        proto.push_back(std::move(dec));
        proto.push_back(DiscardSubsystem{p, {R, 2}, 1});
    }

    // Everyone rotates |s> into their local Schmidt basis, copy by copy.
    for (std::size_t p = 0; p < m; ++p) {
        const std::size_t dp = target.dim(p);
        Matrix w(dp, r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t x = 0; x < dp; ++x) w(x, i) = form.per_party_bases[p][i][x];
        Matrix wn = w;
        for (std::size_t t = 1; t < n; ++t) wn = kron(wn, w);
        proto.push_back(LocalUnitary{p, wn});
    }

    DilutionReport rep{run(proto, input), n, k};
    rep.classical_bits = 2 * k;
    rep.broadcast_bits = classical_bits(proto);
    const PureState want = tensor_power(target, n);
    double fid_success = 0.0;
    for (const auto& b : rep.run.branches) {
        const double f = fidelity(b.state, want);
        rep.average_fidelity += b.probability * f;
        const bool success = std::any_of(b.transcript.begin(), b.transcript.end(),
                                         [](const Outcome& o) { return o.tag == "compress" && o.label == "0"; });
        if (success) {
            rep.success_probability += b.probability;
            fid_success += b.probability * f;
        }
    }
    rep.fidelity = rep.success_probability > 0.0 ? fid_success / rep.success_probability : 0.0;
    return rep;
}

} // namespace mpent::protocols
