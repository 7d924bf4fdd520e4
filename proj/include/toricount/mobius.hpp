#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "toricount/model.hpp"

namespace toricount {

// Salberger's generalized Mobius function over the fan: the boolean-lattice
// inverse of the local coprimality indicator. mu tables are precomputed per
// model over all 2^{n+r} support patterns.
class MobiusTable {
public:
    explicit MobiusTable(const ToricModel& m);

    // 1 iff gcd over maximal cones of prod_{i not in sigma} e_i equals 1
    int chi(std::span<const long long> e) const;

    // pattern is a subset of {1..n+r} as a bitmask: true iff it lies inside some cone
    bool pattern_covered(std::uint32_t pattern) const { return covered_[pattern]; }

    // mu(S) = sum_{T subset S} (-1)^{|S\T|} [T covered]
    int mu_local(std::uint32_t pattern) const { return mu_[pattern]; }

    // 0 unless e is squarefree in every coordinate pattern; otherwise the product
    // over primes p of mu_local(supp_p(e))
    int mu_global(std::span<const long long> e) const;

    struct TruncationReport {
        int f = 0;                       // min cardinality of an uncovered ray set
        double per_prime_factor = 0.0;   // sum_S |mu(S)| X^{-|S|} evaluated at p = X... (see cpp)
        double tail_estimate = 0.0;      // heuristic tail of the Euler product beyond X
        std::vector<int> min_set_cards;  // cardinalities of all minimal uncovered sets
    };
    // f and the s = 1 convergence data for the |mu| Euler product truncated at X
    TruncationReport mu_partial_sum_bound(long long X) const;

private:
    const ToricModel* model_;
    int nr_;
    std::vector<std::int8_t> covered_;
    std::vector<int> mu_;
};

}  // namespace toricount
