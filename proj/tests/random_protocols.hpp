#pragma once

#include <random>

#include "mpent/protocol.hpp"
#include "mpent/states.hpp"

namespace mpent::testkit {

// Random LOCC protocol on qubit parties: local unitaries, rank-one
// measurements in random bases and unitaries conditioned on earlier outcomes.
inline Protocol random_protocol(std::size_t m, std::size_t steps, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> party(0, m - 1), kind(0, 2);
    Protocol p;
    std::vector<std::string> tags;
    for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t q = party(rng);
        const std::size_t k = tags.empty() && s % 3 == 2 ? 1 : kind(rng);
        if (k == 0) {
            p.push_back(LocalUnitary{q, states::random_unitary(2, rng)});
        } else if (k == 1 || tags.empty()) {
            const Matrix u = states::random_unitary(2, rng);
            const std::string tag = "t" + std::to_string(s);
            p.push_back(LocalMeasurement{q, tag, {Matrix::projector(u.column(0)), Matrix::projector(u.column(1))}, {"0", "1"}});
            tags.push_back(tag);
        } else {
            ConditionedUnitary c{q, {tags.back()}, {}};
            c.table["0"] = states::random_unitary(2, rng);
            c.table["1"] = states::random_unitary(2, rng);
            p.push_back(std::move(c));
        }
    }
    return p;
}

} // namespace mpent::testkit
