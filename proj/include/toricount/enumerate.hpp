#pragma once

#include <span>
#include <vector>

#include "toricount/model.hpp"
#include "toricount/qform.hpp"
#include "toricount/rational.hpp"

namespace toricount {

// true iff some sigma-monomial is nonzero and the gcd over maximal cones of
// |x^{underline sigma}| is 1 (gcd(0,a) = |a|)
bool is_torsor_point(const ToricModel& m, std::span<const long long> x);

// H_0(x) = max over maximal cones of |x^{D(sigma)}|
__int128 height_wide(const ToricModel& m, std::span<const long long> x);
long long height(const ToricModel& m, std::span<const long long> x);

// lowest-index maximal cone achieving the height maximum
int dominant_cone(const ToricModel& m, std::span<const long long> x);

struct CountOptions {
    std::vector<long long> e;          // divisibility moduli (empty = all ones)
    bool all_nonzero = true;
    bool coprime = true;               // torsor gcd condition
    long long budget = 10'000'000'000; // leaf visits across all cells
    int workers = 1;
};

struct CountRecord {
    long long B = 0;
    long long total = 0;
    std::vector<long long> per_cone;   // dominant-cone partition (lowest-index tie-break)
    Rat rational;                      // total / 2^r
    bool all_nonzero = true;
    bool coprime = true;
    bool used_polynomial = true;
    std::vector<long long> e;
};

// Exact bounded-height torsor count. f == nullptr counts all torsor points
// (the "no F" mode used by the quotient identity).
CountRecord count_torsor(const ToricModel& m, const QuasiForm* f, long long B,
                         const CountOptions& opt = {});

// Fiber functions h-bar (upper) and h-underline (lower) for one cone,
// all-nonzero convention, F = 0 included.
long long fiber_count(const ToricModel& m, const QuasiForm& f, int cone,
                      std::span<const long long> e, std::span<const long long> k, bool upper,
                      long long budget = 10'000'000'000);

// The per-cone count N_{e,sigma,U}(B): all coordinates nonzero, e_i | x_i,
// F(x) = 0, closed cone region |x_i| <= |x^{E(i)}|, |x^{D(sigma)}| <= B.
// No coprimality and no tie-break; this is what the fiber sums sandwich.
long long cone_count(const ToricModel& m, const QuasiForm& f, int cone,
                     std::span<const long long> e, long long B,
                     long long budget = 10'000'000'000);

}  // namespace toricount
