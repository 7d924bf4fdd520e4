#include "toricount/mobius.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace toricount {

MobiusTable::MobiusTable(const ToricModel& m) : model_(&m), nr_(m.num_rays()) {
    if (nr_ > 22) throw BudgetExceeded("MobiusTable: 2^(n+r) pattern table too large");
    const std::uint32_t size = 1u << nr_;
    std::vector<std::uint32_t> cone_masks;
    for (const auto& c : m.cones) {
        std::uint32_t msk = 0;
        for (int i : c) msk |= 1u << i;
        cone_masks.push_back(msk);
    }
    covered_.assign(size, 0);
    for (std::uint32_t s = 0; s < size; ++s)
        for (std::uint32_t cm : cone_masks)
            if ((s & cm) == s) { covered_[s] = 1; break; }

    // Mobius inversion on the boolean lattice via the subset transform:
    // start from f(T) = [T covered], alternate signs bit by bit.
    mu_.assign(size, 0);
    for (std::uint32_t s = 0; s < size; ++s) mu_[s] = covered_[s];
    for (int b = 0; b < nr_; ++b)
        for (std::uint32_t s = 0; s < size; ++s)
            if (s >> b & 1) mu_[s] -= mu_[s ^ (1u << b)];
}

int MobiusTable::chi(std::span<const long long> e) const {
    const auto& m = *model_;
    __int128 g = 0;
    for (int ci = 0; ci < m.num_cones(); ++ci) {
        __int128 prod = 1;
        for (int i : m.off_rays(ci)) {
            prod *= e[i] < 0 ? -e[i] : e[i];
            if (prod > (__int128(1) << 100)) throw OverflowError("chi: sigma-monomial too large");
        }
        // gcd with the convention gcd(0, a) = |a|
        __int128 a = g, b = prod;
        while (b) { __int128 t = a % b; a = b; b = t; }
        g = a;
        if (g == 1) return 1;
    }
    return g == 1 ? 1 : 0;
}

int MobiusTable::mu_global(std::span<const long long> e) const {
    // factor the coordinates jointly, collecting per-prime support patterns
    std::vector<long long> rest(e.begin(), e.end());
    for (long long v : rest)
        if (v < 1) throw ModelError(ModelFault::BadFile, "mu_global: entries must be >= 1");
    int result = 1;
    for (long long p = 2; ; ++p) {
        long long remaining_max = *std::max_element(rest.begin(), rest.end());
        if (remaining_max == 1) break;
        if (p * p > remaining_max) {
            // every remaining entry is 1 or prime; group equal primes
            std::vector<long long> primes;
            for (long long v : rest)
                if (v > 1) primes.push_back(v);
            std::sort(primes.begin(), primes.end());
            primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
            for (long long q : primes) {
                std::uint32_t pattern = 0;
                for (int i = 0; i < nr_; ++i)
                    if (rest[i] == q) pattern |= 1u << i;
                result *= mu_local(pattern);
                if (!result) return 0;
            }
            break;
        }
        std::uint32_t pattern = 0;
        bool any = false;
        for (int i = 0; i < nr_; ++i) {
            if (rest[i] % p) continue;
            rest[i] /= p;
            if (rest[i] % p == 0) return 0;   // exponent >= 2 kills mu
            pattern |= 1u << i;
            any = true;
        }
        if (any) {
            result *= mu_local(pattern);
            if (!result) return 0;
        }
    }
    return result;
}

MobiusTable::TruncationReport MobiusTable::mu_partial_sum_bound(long long X) const {
    if (X < 2) throw ModelError(ModelFault::BadFile, "mu_partial_sum_bound: X must be >= 2");
    TruncationReport rep;
    auto sets = model_->minimal_uncovered_sets();
    rep.f = nr_ + 1;
    for (const auto& s : sets) {
        rep.min_set_cards.push_back(int(s.size()));
        rep.f = std::min(rep.f, int(s.size()));
    }
    if (rep.f < 2)
        throw ModelError(ModelFault::NoSolution,
                         "DivergentMobiusProduct: min uncovered cardinality f = " +
                             std::to_string(rep.f) + " < 2");
    // per-prime factor of the |mu| Euler product at s = 1, evaluated at p = X
    double factor = 0;
    double csum_f = 0;   // sum of |mu(S)| over the lightest uncovered patterns
    for (std::uint32_t s = 0; s < (1u << nr_); ++s) {
        int mu = mu_[s];
        if (!mu) continue;
        int card = __builtin_popcount(s);
        factor += std::abs(mu) * std::pow(double(X), -card);
        if (card == rep.f) csum_f += std::abs(mu);
    }
    rep.per_prime_factor = factor;
    // heuristic: sum_{n > X} c_f n^{-f} bounds the log of the tail product
    rep.tail_estimate = csum_f * std::pow(double(X), 1.0 - rep.f) / (rep.f - 1);
    return rep;
}

}  // namespace toricount
