#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "toricount/mobius.hpp"
#include "toricount/model.hpp"
#include "toricount/qform.hpp"
#include "toricount/rational.hpp"

namespace toricount {

struct DensityReport {
    long long p = 0;
    std::vector<Rat> values;             // M*_p(m)/p^{m(n+r-1)} for m = 1..m_max
    std::optional<int> stabilized_at;    // first m >= 2 with values[m] == values[m-1]
    Rat sigma;                           // stabilized value, or last value with a warning
    bool stabilized = false;
};

struct SeriesFactor {
    long long p = 0;
    double sigma = 0.0;
    bool stabilized = false;
};

struct SeriesResult {
    double value = 1.0;
    double tail_bound = 0.0;             // heuristic: sum of |sigma_p - 1| over the last decade
    std::vector<SeriesFactor> factors;
    bool any_unstable = false;
    long long prime_bound = 0;
    int m_max = 0;
};

struct MStarCheck {
    Rat lhs;
    double rhs = 0.0;
    bool ok = false;
};

// Non-archimedean local data for one model/polynomial pair.
class LocalDensities {
public:
    LocalDensities(const ToricModel& m, const QuasiForm& f, const MobiusTable& mob)
        : m_(m), f_(f), mob_(mob) {}

    static constexpr long long kDefaultBudget = 100'000'000;   // residue evaluations per prime

    // S_{a,q,e} = sum over b mod q of e((a/q) F(e.b)), by full residue enumeration
    std::complex<double> complete_sum(long long a, long long q, std::span<const long long> e,
                                      long long budget = kDefaultBudget) const;

    // A_e(q) = q^{-(n+r)} sum_{gcd(a,q)=1} S_{a,q,e}; computed exactly via value-class
    // counts and Ramanujan sums (one residue pass per q)
    double A_of_q(long long q, std::span<const long long> e,
                  long long budget = kDefaultBudget) const;

    // M*_p(m): residues mod p^m with F = 0 and the mod-p coprimality pattern.
    // Direct scan within budget, else a level-1 pass with Hensel lift accounting.
    __int128 m_star(long long p, int m, long long budget = kDefaultBudget) const;

    DensityReport sigma_p(long long p, int m_max, long long budget = kDefaultBudget) const;

    SeriesResult singular_series(long long prime_bound, int m_max,
                                 long long budget = kDefaultBudget) const;

    // the exact identity M*_p(m)/p^{m(n+r-1)} = sum_{k<=m} sum_nu mu(p^nu) p^{-|nu|} A_{p^nu}(p^k)
    MStarCheck mstar_identity_check(long long p, int m, long long budget = kDefaultBudget,
                                    double tol = 1e-8) const;

private:
    // counts of residues b mod q by the value class F(e.b) mod q
    std::vector<long long> value_class_counts(long long q, std::span<const long long> e,
                                              long long budget) const;
    struct Level1 {
        __int128 nonsingular = 0;                     // level-1 solutions with nonzero gradient
        std::vector<std::vector<long long>> singular;  // explicit singular residues
    };
    Level1 hensel_level1(long long p, long long budget) const;
    __int128 m_star_direct(long long p, int m, long long budget) const;
    __int128 m_star_hensel(long long p, int m, long long budget) const;
    __int128 count_lifts(std::vector<long long>& x, long long p, int level, int m,
                         long long& budget) const;

    const ToricModel& m_;
    const QuasiForm& f_;
    const MobiusTable& mob_;
};

std::vector<long long> primes_up_to(long long n);

}  // namespace toricount
