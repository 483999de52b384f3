#pragma once

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>

#include "json.hpp"
#include "mpent/protocol.hpp"
#include "mpent/state.hpp"

// JSON formats.
//
// State:    {"dims": [d1, ...], "terms": [{"basis": [i1, ...], "re": x, "im": y}, ...]}
//           (unnormalized; "im" optional).
// Protocol: a list of steps, each an object with "op" one of
//   "unitary"     party, matrix
//   "measure"     party, tag, projectors (list of matrices), labels
//   "conditioned" party, depends_on (list of tags), table {key: matrix}
//   "discard"     party, subdims, index
// Matrices are nested row arrays whose entries are numbers or [re, im]
// pairs, or {"rows": r, "cols": c, "base64": ...} holding r*c (re, im)
// little-endian float64 pairs in row-major order.
namespace mpent::io {

using json = nlohmann::json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("malformed JSON in " + what + ": " + e.what());
    }
}

namespace detail {

inline std::string base64_decode(std::string s) {
    using namespace boost::archive::iterators;
    using It = transform_width<binary_from_base64<std::string::const_iterator>, 8, 6>;
    std::size_t pad = 0;
    while (!s.empty() && s.back() == '=') {
        s.pop_back();
        ++pad;
    }
    std::string out(It(s.cbegin()), It(s.cend()));
    // transform_width may emit a trailing partial byte.
    const std::size_t bytes = s.size() * 6 / 8;
    out.resize(bytes);
    return out;
}

inline std::string base64_encode(const std::string& bytes) {
    using namespace boost::archive::iterators;
    using It = base64_from_binary<transform_width<std::string::const_iterator, 6, 8>>;
    std::string out(It(bytes.cbegin()), It(bytes.cend()));
    out.append((3 - bytes.size() % 3) % 3, '=');
    return out;
}

inline double number(const json& j, const char* what) {
    if (!j.is_number()) throw std::invalid_argument(std::string("expected a number for ") + what);
    return j.get<double>();
}

inline std::size_t index(const json& j, const char* what) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw std::invalid_argument(std::string("expected a nonnegative integer for ") + what);
    }
    return j.get<std::size_t>();
}

inline const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
    return j.at(key);
}

} // namespace detail

inline Matrix matrix_from_json(const json& j) {
    if (j.is_object()) {
        const std::size_t r = detail::index(detail::field(j, "rows"), "rows");
        const std::size_t c = detail::index(detail::field(j, "cols"), "cols");
        const auto& b = detail::field(j, "base64");
        if (!b.is_string()) throw std::invalid_argument("matrix base64 payload must be a string");
        const std::string bytes = detail::base64_decode(b.get<std::string>());
        if (bytes.size() != r * c * 16) throw std::invalid_argument("matrix base64 payload has the wrong length");
        std::vector<cplx> data(r * c);
        for (std::size_t k = 0; k < r * c; ++k) {
            double re, im;
            std::memcpy(&re, bytes.data() + 16 * k, 8);
            std::memcpy(&im, bytes.data() + 16 * k + 8, 8);
            data[k] = {re, im};
        }
        return Matrix(r, c, std::move(data));
    }
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix must be a non-empty array of rows");
    const std::size_t r = j.size();
    const std::size_t c = j.front().is_array() ? j.front().size() : 0;
    if (c == 0) throw std::invalid_argument("matrix rows must be non-empty arrays");
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (!j[i].is_array() || j[i].size() != c) throw std::invalid_argument("matrix rows must have equal length");
        for (std::size_t k = 0; k < c; ++k) {
            const auto& e = j[i][k];
            if (e.is_array()) {
                if (e.size() != 2) throw std::invalid_argument("complex entries are [re, im]");
                m(i, k) = {detail::number(e[0], "re"), detail::number(e[1], "im")};
            } else {
                m(i, k) = detail::number(e, "matrix entry");
            }
        }
    }
    return m;
}

inline json matrix_to_json(const Matrix& m, bool base64 = false) {
    if (base64) {
        std::string bytes(m.rows() * m.cols() * 16, '\0');
        for (std::size_t k = 0; k < m.data().size(); ++k) {
            const double re = m.data()[k].real(), im = m.data()[k].imag();
            std::memcpy(bytes.data() + 16 * k, &re, 8);
            std::memcpy(bytes.data() + 16 * k + 8, &im, 8);
        }
        return {{"rows", m.rows()}, {"cols", m.cols()}, {"base64", detail::base64_encode(bytes)}};
    }
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) {
            const cplx v = m(i, k);
            if (v.imag() == 0.0) row.push_back(v.real());
            else row.push_back({v.real(), v.imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline PureState state_from_json(const json& j) {
    const auto& dims_j = detail::field(j, "dims");
    if (!dims_j.is_array() || dims_j.empty()) throw std::invalid_argument("'dims' must be a non-empty array");
    std::vector<std::size_t> dims;
    for (const auto& d : dims_j) {
        dims.push_back(detail::index(d, "dims"));
        if (dims.back() == 0) throw std::invalid_argument("dimensions must be positive");
    }
    const auto& terms_j = detail::field(j, "terms");
    if (!terms_j.is_array()) throw std::invalid_argument("'terms' must be an array");
    std::vector<BasisTerm> terms;
    for (const auto& t : terms_j) {
        BasisTerm term;
        const auto& b = detail::field(t, "basis");
        if (!b.is_array()) throw std::invalid_argument("'basis' must be an array");
        for (const auto& x : b) term.basis.push_back(detail::index(x, "basis"));
        const double re = detail::number(detail::field(t, "re"), "re");
        const double im = t.contains("im") ? detail::number(t.at("im"), "im") : 0.0;
        term.amplitude = {re, im};
        terms.push_back(std::move(term));
    }
    return make_state(dims, terms);
}

inline json state_to_json(const PureState& s, double drop_below = 0.0) {
    json terms = json::array();
    for (std::size_t g = 0; g < s.dimension(); ++g) {
        const cplx a = s.amplitude(g);
        if (std::abs(a) <= drop_below) continue;
        terms.push_back({{"basis", s.digits_of(g)}, {"re", a.real()}, {"im", a.imag()}});
    }
    return {{"dims", s.dims()}, {"terms", std::move(terms)}};
}

inline Protocol protocol_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("protocol must be a JSON list of steps");
    Protocol p;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& s = j[i];
        const auto& op_j = detail::field(s, "op");
        if (!op_j.is_string()) throw std::invalid_argument("step " + std::to_string(i) + ": 'op' must be a string");
        const std::string op = op_j.get<std::string>();
        const std::size_t party = detail::index(detail::field(s, "party"), "party");
        if (op == "unitary") {
            p.push_back(LocalUnitary{party, matrix_from_json(detail::field(s, "matrix"))});
        } else if (op == "measure") {
            LocalMeasurement m{party, detail::field(s, "tag").get<std::string>(), {}, {}};
            for (const auto& pj : detail::field(s, "projectors")) m.projectors.push_back(matrix_from_json(pj));
            for (const auto& l : detail::field(s, "labels")) m.labels.push_back(l.get<std::string>());
            p.push_back(std::move(m));
        } else if (op == "conditioned") {
            ConditionedUnitary c{party, {}, {}};
            for (const auto& t : detail::field(s, "depends_on")) c.depends_on.push_back(t.get<std::string>());
            const auto& table = detail::field(s, "table");
            if (!table.is_object()) throw std::invalid_argument("step " + std::to_string(i) + ": 'table' must be an object");
            for (const auto& [key, mat] : table.items()) c.table[key] = matrix_from_json(mat);
            p.push_back(std::move(c));
        } else if (op == "discard") {
            DiscardSubsystem d{party, {}, detail::index(detail::field(s, "index"), "index")};
            for (const auto& x : detail::field(s, "subdims")) d.subdims.push_back(detail::index(x, "subdims"));
            p.push_back(std::move(d));
        } else {
            throw std::invalid_argument("step " + std::to_string(i) + ": unknown op '" + op + "'");
        }
    }
    return p;
}

inline json protocol_to_json(const Protocol& p, bool base64 = false) {
    json out = json::array();
    for (const auto& step : p) {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, LocalUnitary>) {
                    out.push_back({{"op", "unitary"}, {"party", s.party}, {"matrix", matrix_to_json(s.matrix, base64)}});
                } else if constexpr (std::is_same_v<T, LocalMeasurement>) {
                    json proj = json::array();
                    for (const auto& m : s.projectors) proj.push_back(matrix_to_json(m, base64));
                    out.push_back({{"op", "measure"},
                                   {"party", s.party},
                                   {"tag", s.tag},
                                   {"projectors", std::move(proj)},
                                   {"labels", s.labels}});
                } else if constexpr (std::is_same_v<T, ConditionedUnitary>) {
                    json table = json::object();
                    for (const auto& [k, m] : s.table) table[k] = matrix_to_json(m, base64);
                    out.push_back(
                        {{"op", "conditioned"}, {"party", s.party}, {"depends_on", s.depends_on}, {"table", std::move(table)}});
                } else {
                    out.push_back({{"op", "discard"}, {"party", s.party}, {"subdims", s.subdims}, {"index", s.index}});
                }
            },
            step);
    }
    return out;
}

} // namespace mpent::io
