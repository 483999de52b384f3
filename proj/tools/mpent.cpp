// mpent: command-line front end for the multipartite entanglement library.

#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpent/mpent.hpp"

namespace {

using namespace mpent;

enum class Format { Csv, Text };

struct Context {
    Format format = Format::Csv;
    std::uint64_t seed = 0;
    std::mt19937_64 rng;
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::size_t parse_party(const std::string& s) {
    if (s.size() == 1 && s[0] >= 'A' && s[0] <= 'Z') return static_cast<std::size_t>(s[0] - 'A');
    try {
        std::size_t pos = 0;
        const auto v = std::stoul(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("bad party '" + s + "' (use a letter or a 0-based index)");
}

std::size_t parse_count(const std::string& s) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoul(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("bad integer '" + s + "'");
}

std::vector<std::string> split_args(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

// Named states: ghz, 2ghz, 3epr, epr, epr(i,j[,m]), cat(m), eprs(m),
// codeword5, random(m,d), from-file(path); anything else is a file path.
PureState resolve_state(const std::string& text, Context& ctx) {
    static const std::regex call(R"(^([a-z0-9_-]+)\((.*)\)$)");
    std::smatch mt;
    if (text == "ghz") return states::ghz();
    if (text == "2ghz") return states::two_ghz();
    if (text == "3epr") return states::three_epr();
    if (text == "epr") return states::epr();
    if (text == "codeword5") return states::codeword5();
    if (std::regex_match(text, mt, call)) {
        const std::string name = mt[1];
        const auto args = split_args(mt[2]);
        if (name == "from-file") {
            if (args.size() != 1) throw std::invalid_argument("from-file(path) takes one argument");
            return io::state_from_json(io::parse(io::read_file(mt[2]), mt[2]));
        }
        if (name == "cat" && args.size() == 1) return states::cat(parse_count(args[0]));
        if (name == "eprs" && args.size() == 1) {
            const auto m = parse_count(args[0]);
            if (m > 5) throw DomainError("eprs(m): dense state needs m <= 5; use r21-table or mregs-bounds for larger m");
            return states::eprs(m);
        }
        if (name == "epr" && (args.size() == 2 || args.size() == 3)) {
            const auto i = parse_party(args[0]), j = parse_party(args[1]);
            const auto m = args.size() == 3 ? parse_count(args[2]) : std::max(i, j) + 1;
            return states::epr(std::max<std::size_t>(m, 2), i, j);
        }
        if (name == "random" && args.size() == 2) {
            const auto m = parse_count(args[0]), d = parse_count(args[1]);
            if (m < 1 || d < 1) throw std::invalid_argument("random(m,d) needs m, d >= 1");
            return states::random_state(std::vector<std::size_t>(m, d), ctx.rng);
        }
        throw std::invalid_argument("unknown named state '" + text + "'");
    }
    return io::state_from_json(io::parse(io::read_file(text), text));
}

Partition parse_cut(const std::string& s, std::size_t m) {
    std::vector<std::size_t> members;
    for (char c : s) {
        if (c < 'A' || c > 'Z') throw std::invalid_argument("cut must be party letters, e.g. AB");
        members.push_back(static_cast<std::size_t>(c - 'A'));
    }
    for (auto p : members)
        if (p >= m) throw std::invalid_argument("cut names a party outside the state");
    return Partition(m, members);
}

std::vector<double> parse_probabilities(const std::vector<std::string>& coeffs, const std::vector<std::string>& probs) {
    if (coeffs.empty() == probs.empty()) throw std::invalid_argument("give exactly one of --coeffs or --probs");
    std::vector<double> v;
    for (const auto& a : coeffs.empty() ? probs : coeffs) {
        try {
            v.push_back(std::stod(a));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad number '" + a + "'");
        }
    }
    if (v.empty()) throw std::invalid_argument("empty coefficient list");
    double total = 0.0;
    for (double& x : v) {
        if (!(x >= 0.0)) throw std::invalid_argument("coefficients must be nonnegative");
        if (!coeffs.empty()) x *= x;
        total += x;
    }
    if (total <= 0.0) throw std::invalid_argument("coefficients are all zero");
    for (double& x : v) x /= total;
    return v;
}

// ---------------------------------------------------------------------------

void cmd_entropy_table(Context& ctx, const std::string& state) {
    const auto s = resolve_state(state, ctx);
    const auto ev = entropy_vector(s);
    if (ctx.format == Format::Csv) std::cout << "partition,entropy_bits\n";
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto x = ev.partitions()[i];
        if (ctx.format == Format::Csv) std::cout << x.to_string() << ',' << num(ev.values()[i]) << '\n';
        else std::cout << "S(" << x.to_string() << ") = " << num(ev.values()[i]) << " bits\n";
    }
}

void cmd_r21_table(Context& ctx) {
    const auto rows = r21_table();
    if (ctx.format == Format::Csv) std::cout << "parties,state,r21\n";
    for (const auto& r : rows) {
        if (ctx.format == Format::Csv) std::cout << r.parties << ',' << r.state << ',' << lp::to_string(r.ratio) << '\n';
        else std::cout << r.parties << " parties  " << r.state << "  r21 = " << lp::to_string(r.ratio) << '\n';
    }
}

void cmd_schmidt(Context& ctx, const std::string& state, const std::string& cut) {
    const auto s = resolve_state(state, ctx);
    const Partition x = cut.empty() ? Partition(s.num_parties(), {0}) : parse_cut(cut, s.num_parties());
    const auto d = schmidt_decompose(s, x);
    std::optional<MOrthogonalResult> mo;
    if (s.num_parties() >= 2) mo = is_m_orthogonal(s);
    if (ctx.format == Format::Csv) {
        std::cout << "index,coefficient,probability\n";
        for (std::size_t i = 0; i < d.coefficients.size(); ++i) {
            std::cout << i << ',' << num(d.coefficients[i]) << ',' << num(d.coefficients[i] * d.coefficients[i]) << '\n';
        }
        return;
    }
    std::cout << "cut " << x.to_string() << " | " << x.complement().to_string() << ": Schmidt rank "
              << d.coefficients.size() << '\n';
    for (std::size_t i = 0; i < d.coefficients.size(); ++i) {
        std::cout << "  lambda_" << i << " = " << num(d.coefficients[i]) << "  (p = " << num(d.coefficients[i] * d.coefficients[i])
                  << ")\n";
    }
    if (mo) {
        std::cout << "m-orthogonality: " << to_string(mo->verdict) << " (" << mo->reason << ")\n";
        if (mo->verdict == MOrthogonality::Yes) std::cout << "Cat yield per copy: " << num(cat_yield(s)) << " bits\n";
    }
}

std::string verdict_line(const ComparisonVerdict& v) {
    std::string s = to_string(v.verdict);
    if (v.verdict == Verdict::Incomparable && v.evidence.ppt_witness) {
        s += " (LU obstruction: PPT witness on " + v.evidence.witness->to_string() + ")";
    }
    return s;
}

void cmd_classify(Context& ctx, const std::string& a, const std::string& b) {
    const auto sa = resolve_state(a, ctx), sb = resolve_state(b, ctx);
    const auto v = classify_pair(sa, sb);
    if (ctx.format == Format::Csv) {
        std::cout << "verdict,witness,ppt_witness,entropy_monotonicity_incomparable,reason\n"
                  << to_string(v.verdict) << ',' << (v.evidence.witness ? v.evidence.witness->to_string() : "") << ','
                  << (v.evidence.ppt_witness ? "true" : "false") << ','
                  << (v.evidence.entropy_monotonicity_incomparable ? "true" : "false") << ",\"" << v.evidence.reason
                  << "\"\n";
        return;
    }
    std::cout << verdict_line(v) << '\n' << "  " << v.evidence.reason << '\n';
    if (v.evidence.pt_min_a) {
        std::cout << "  partial-transpose minimum: a " << num(*v.evidence.pt_min_a) << ", b " << num(*v.evidence.pt_min_b)
                  << '\n';
    }
    if (v.evidence.entropy_monotonicity_incomparable) {
        std::cout << "  neither entropy vector dominates the other\n";
    }
}

void cmd_ghz_epr_witness(Context& ctx) {
    const auto w = ghz_epr_witness();
    auto joined = [](const EntropyVector& ev) {
        std::string s;
        for (std::size_t i = 0; i < ev.size(); ++i) s += (i ? ";" : "") + num(ev.values()[i]);
        return s;
    };
    if (ctx.format == Format::Csv) {
        std::cout << "quantity,value\n"
                  << "entropies_2ghz," << joined(w.entropy_2ghz) << '\n'
                  << "entropies_3epr," << joined(w.entropy_3epr) << '\n'
                  << "all_two_bits," << (w.all_two_bits ? "true" : "false") << '\n'
                  << "rho_bc_2ghz_max_deviation_from_I16," << num(w.rho_bc_2ghz_deviation) << '\n'
                  << "rho_bc_2ghz_offdiagonal," << num(w.rho_bc_2ghz_offdiagonal) << '\n'
                  << "rho_bc_2ghz_pt_min," << num(w.rho_bc_2ghz_pt_min) << '\n'
                  << "epr_factor_fidelity," << num(w.epr_factor_fidelity) << '\n'
                  << "epr_factor_pt_min," << num(w.epr_factor_ppt.min_eigenvalue) << '\n'
                  << "verdict," << to_string(w.verdict.verdict) << '\n';
        return;
    }
    std::cout << "2GHZ partial entropies: " << joined(w.entropy_2ghz) << '\n'
              << "3EPR partial entropies: " << joined(w.entropy_3epr) << '\n'
              << "all nontrivial partial entropies equal 2 bits: " << (w.all_two_bits ? "yes" : "no") << '\n'
              << "rho_BC(2GHZ): diagonal (off-diagonal max " << num(w.rho_bc_2ghz_offdiagonal)
              << "), partial-transpose minimum " << num(w.rho_bc_2ghz_pt_min) << ", max |rho - I/16| "
              << num(w.rho_bc_2ghz_deviation) << '\n'
              << "rho_BC(3EPR): EPR factor fidelity " << num(w.epr_factor_fidelity) << ", partial-transpose minimum "
              << num(w.epr_factor_ppt.min_eigenvalue) << (w.epr_factor_ppt.is_ppt ? " (PPT)" : " (NPT, entangled)") << '\n'
              << "verdict: " << verdict_line(w.verdict) << '\n';
}

struct BuiltinProtocol {
    Protocol steps;
    PureState input;
    PureState target;
};

std::optional<BuiltinProtocol> builtin_protocol(const std::string& text) {
    static const std::regex call(R"(^([a-z_]+)\((.*)\)$)");
    std::smatch mt;
    if (!std::regex_match(text, mt, call)) return std::nullopt;
    const std::string name = mt[1];
    const auto args = split_args(mt[2]);
    if (name == "cat_to_epr" && args.size() == 3) {
        const auto m = parse_count(args[0]), i = parse_party(args[1]), j = parse_party(args[2]);
        return BuiltinProtocol{protocols::cat_to_epr(m, i, j), states::cat(m), states::epr(m, i, j)};
    }
    if (name == "eprs_to_cat" && args.size() == 1) {
        const auto m = parse_count(args[0]);
        return BuiltinProtocol{protocols::eprs_to_cat(m), protocols::eprs_to_cat_input(m), states::cat(m)};
    }
    throw std::invalid_argument("unknown builtin protocol '" + text + "'");
}

void cmd_run_protocol(Context& ctx, const std::string& state, const std::string& proto, const std::string& target) {
    std::optional<PureState> input, want;
    Protocol steps;
    if (auto b = builtin_protocol(proto)) {
        steps = std::move(b->steps);
        input = std::move(b->input);
        want = std::move(b->target);
    } else {
        steps = io::protocol_from_json(io::parse(io::read_file(proto), proto));
    }
    if (!state.empty()) input = resolve_state(state, ctx);
    if (!input) throw std::invalid_argument("--state is required for protocol files");
    if (!target.empty()) want = resolve_state(target, ctx);

    const auto r = run(steps, *input);
    if (ctx.format == Format::Csv) std::cout << "transcript,probability,fidelity\n";
    for (const auto& b : r.branches) {
        std::string f;
        if (want) f = b.state.dims() == want->dims() ? num(fidelity(b.state, *want)) : "dims-mismatch";
        if (ctx.format == Format::Csv) {
            std::cout << to_string(b.transcript) << ',' << num(b.probability) << ',' << f << '\n';
        } else {
            std::cout << (b.transcript.empty() ? "(no outcomes)" : to_string(b.transcript)) << "  p = " << num(b.probability);
            if (want) std::cout << "  fidelity = " << f;
            std::cout << '\n';
        }
    }
    if (ctx.format == Format::Text) {
        std::cout << r.branches.size() << " branches, " << classical_bits(steps) << " classical bits broadcast\n";
    }
}

void cmd_concentrate(Context& ctx, std::size_t n, const std::vector<double>& p) {
    const auto res = concentration_yield_distribution(p, n);
    auto type_str = [](const std::vector<unsigned>& t) {
        std::string s;
        for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ";" : "") + std::to_string(t[i]);
        return s;
    };
    if (ctx.format == Format::Csv) {
        std::cout << "type,probability,yield_bits,yield_floor\n";
        for (const auto& b : res.branches) {
            std::cout << type_str(b.type) << ',' << num(b.probability) << ',' << num(b.yield_bits) << ',' << b.yield_floor
                      << '\n';
        }
        return;
    }
    std::cout << "copies: " << n << "  type classes: " << res.branches.size() << '\n'
              << "expected yield: " << num(res.expected_yield) << " bits (" << num(res.yield_per_copy())
              << " per copy)\n"
              << "entropy limit: " << num(res.entropy) << " bits per copy\n";
}

void cmd_dilute(Context& ctx, std::size_t n, std::size_t k, const std::vector<double>& p, std::size_t parties) {
    const double f = dilution_fidelity(p, n, k);
    std::optional<protocols::DilutionReport> rep;
    if (parties > 0) rep = protocols::dilution_end_to_end(states::m_orthogonal(p, parties), n, k);
    if (ctx.format == Format::Csv) {
        std::cout << "n,k,fidelity";
        if (rep) std::cout << ",simulated_fidelity,success_probability,average_fidelity,classical_bits";
        std::cout << '\n' << n << ',' << k << ',' << num(f);
        if (rep) {
            std::cout << ',' << num(rep->fidelity) << ',' << num(rep->success_probability) << ','
                      << num(rep->average_fidelity) << ',' << rep->classical_bits;
        }
        std::cout << '\n';
        return;
    }
    std::cout << "n = " << n << ", k = " << k << ": fidelity " << num(f) << '\n';
    if (rep) {
        std::cout << "simulated on " << parties << " parties: fidelity " << num(rep->fidelity) << ", success probability "
                  << num(rep->success_probability) << ", " << rep->run.branches.size() << " branches, "
                  << rep->classical_bits << " teleportation bits\n";
    }
}

void cmd_coeffs(Context& ctx, const std::vector<std::string>& gens, const std::string& target) {
    std::vector<PureState> gs;
    for (const auto& g : gens) gs.push_back(resolve_state(g, ctx));
    const auto t = resolve_state(target, ctx);
    auto mat = make_entropy_matrix(t.num_parties());
    for (std::size_t i = 0; i < gs.size(); ++i) {
        if (gs[i].num_parties() != t.num_parties()) throw std::invalid_argument("generator " + gens[i] + ": party-count mismatch");
        mat.add(gens[i], entropy_vector(gs[i]));
    }
    const auto res = solve_coefficients(mat, entropy_vector(t));
    const bool csv = ctx.format == Format::Csv;
    if (const auto* inf = std::get_if<Infeasible>(&res)) {
        const auto parts = canonical_partitions(t.num_parties());
        if (csv) std::cout << "result,partition,weight\n";
        else std::cout << "infeasible (entropy level); separating weights w with w.gen >= 0 and w.target = "
                       << lp::to_string(inf->margin) << ":\n";
        for (std::size_t x = 0; x < parts.size(); ++x) {
            if (inf->certificate[x] == 0) continue;
            if (csv) std::cout << "infeasible," << parts[x].to_string() << ',' << lp::to_string(inf->certificate[x]) << '\n';
            else std::cout << "  " << parts[x].to_string() << ": " << lp::to_string(inf->certificate[x]) << '\n';
        }
        return;
    }
    const auto& sol = std::get<CoefficientSolution>(res);
    if (csv) std::cout << "generator,coefficient,kernel_direction\n";
    else std::cout << (sol.unique ? "unique" : "non-unique") << " entropy-level coefficients"
                   << (mat.exact ? " (exact)" : "") << ":\n";
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const std::string d = sol.kernel_direction ? lp::to_string((*sol.kernel_direction)[i]) : "";
        if (csv) std::cout << gens[i] << ',' << lp::to_string(sol.coefficients[i]) << ',' << d << '\n';
        else {
            std::cout << "  " << gens[i] << ": " << lp::to_string(sol.coefficients[i]);
            if (!d.empty()) std::cout << "  (kernel direction " << d << ")";
            std::cout << '\n';
        }
    }
}

void cmd_mregs_bounds(Context& ctx, std::size_t m) {
    const auto b = mregs_lower_bound(m);
    const bool csv = ctx.format == Format::Csv;
    auto r21 = [](const std::optional<double>& r) { return r ? num(*r) : std::string(); };
    if (csv) {
        std::cout << "step,state,r21,entropy_feasible,bound\n";
        std::cout << "baseline," << m * (m - 1) / 2 << " EPRs," << r21(b.epr_r21) << ",," << b.baseline << '\n';
    } else {
        std::cout << "m = " << m << ": " << b.baseline << " EPR pairs (r21 = " << r21(b.epr_r21) << ")\n";
    }
    std::size_t bound = b.baseline, i = 0;
    for (const auto& s : b.trace) {
        if (s.infeasible) ++bound;
        if (csv) {
            std::cout << ++i << ',' << s.label << ',' << r21(s.r21) << ',' << (s.infeasible ? "false" : "true") << ','
                      << bound << '\n';
        } else {
            std::cout << "  " << s.label << " (r21 = " << r21(s.r21) << "): "
                      << (s.infeasible ? "outside the cone of " + std::to_string(s.generators_before) +
                                             " generators, certificate verified"
                                       : std::string("entropy-feasible"))
                      << '\n';
        }
    }
    if (!csv) {
        std::cout << "lower bound: " << b.bound << '\n';
        if (!b.note.empty()) std::cout << "note: " << b.note << '\n';
    }
}

void cmd_egs_check(Context& ctx, const std::string& state) {
    const auto s = resolve_state(state, ctx);
    const auto ev = entropy_vector(s);
    std::size_t worst = 0;
    for (std::size_t i = 1; i < ev.size(); ++i)
        if (ev.values()[i] < ev.values()[worst]) worst = i;
    const bool ok = egs_check(ev);
    if (ctx.format == Format::Csv) {
        std::cout << "egs,min_partition,min_entropy\n"
                  << (ok ? "true" : "false") << ',' << ev.partitions()[worst].to_string() << ',' << num(ev.values()[worst])
                  << '\n';
    } else {
        std::cout << (ok ? "generating set" : "not a generating set") << " (smallest partial entropy "
                  << num(ev.values()[worst]) << " on " << ev.partitions()[worst].to_string() << ")\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement invariants of multipartite pure states"};
    app.require_subcommand(1);
    app.fallthrough();
    Context ctx;
    std::string format = "csv";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "text"}));
    app.add_option("--seed", ctx.seed, "Seed for random(m,d) states");

    std::string state, a, b, proto, target, cut;
    std::vector<std::string> coeffs, probs;
    std::size_t n = 0, k = 0, m = 0, parties = 0;
    std::vector<std::string> gens;

    auto* entropy = app.add_subcommand("entropy-table", "Partial entropy of every nontrivial partition");
    entropy->add_option("--state", state, "Named state or JSON file")->required();
    auto* r21 = app.add_subcommand("r21-table", "S_AB / S_A for the standard states");
    auto* schmidt = app.add_subcommand("schmidt", "Schmidt decomposition across a cut");
    schmidt->add_option("--state", state)->required();
    schmidt->add_option("--cut", cut, "Parties on one side, e.g. AB (default A)");
    auto* classify = app.add_subcommand("classify", "Exact LOCC comparison of two states");
    classify->add_option("--a", a)->required();
    classify->add_option("--b", b)->required();
    auto* witness = app.add_subcommand("ghz-epr-witness", "2GHZ versus three EPR pairs");
    auto* runp = app.add_subcommand("run-protocol", "Expand every branch of an LOCC protocol");
    runp->add_option("--state", state);
    runp->add_option("--protocol", proto, "JSON file, cat_to_epr(m,i,j) or eprs_to_cat(m)")->required();
    runp->add_option("--target", target);
    auto* conc = app.add_subcommand("concentrate", "Type-class concentration yield on n copies");
    conc->add_option("--n", n)->required();
    conc->add_option("--coeffs", coeffs, "Schmidt coefficients (normalized)")->delimiter(',');
    conc->add_option("--probs", probs, "Schmidt probabilities (normalized)")->delimiter(',');
    auto* dil = app.add_subcommand("dilute", "Dilution fidelity with k Cat states for n copies");
    dil->add_option("--n", n)->required();
    dil->add_option("--k", k)->required();
    dil->add_option("--coeffs", coeffs)->delimiter(',');
    dil->add_option("--probs", probs)->delimiter(',');
    dil->add_option("--m", parties, "Also simulate the full circuit on this many parties");
    auto* co = app.add_subcommand("coeffs", "Entanglement coefficients of a target over generators");
    co->add_option("--gens", gens)->required();
    co->add_option("--target", target)->required();
    auto* mb = app.add_subcommand("mregs-bounds", "Entropy-level lower bound on a minimal generating set");
    mb->add_option("--m", m)->required();
    auto* egs = app.add_subcommand("egs-check", "Is every partial entropy positive?");
    egs->add_option("--state", state)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    ctx.format = format == "text" ? Format::Text : Format::Csv;
    ctx.rng.seed(ctx.seed);

    try {
        if (*entropy) cmd_entropy_table(ctx, state);
        else if (*r21) cmd_r21_table(ctx);
        else if (*schmidt) cmd_schmidt(ctx, state, cut);
        else if (*classify) cmd_classify(ctx, a, b);
        else if (*witness) cmd_ghz_epr_witness(ctx);
        else if (*runp) cmd_run_protocol(ctx, state, proto, target);
        else if (*conc) cmd_concentrate(ctx, n, parse_probabilities(coeffs, probs));
        else if (*dil) cmd_dilute(ctx, n, k, parse_probabilities(coeffs, probs), parties);
        else if (*co) cmd_coeffs(ctx, gens, target);
        else if (*mb) cmd_mregs_bounds(ctx, m);
        else if (*egs) cmd_egs_check(ctx, state);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
