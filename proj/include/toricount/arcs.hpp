#pragma once

#include <complex>
#include <span>
#include <vector>

#include "toricount/model.hpp"
#include "toricount/qform.hpp"

namespace toricount {

struct ArcProbe {
    long long a = 0, q = 1;
    double beta = 0.0;
    std::vector<long long> P;
    std::vector<long long> e;
    std::complex<double> lhs;   // direct generating sum S_e(alpha)
    std::complex<double> rhs;   // factorized main term
    double rel_err = 0.0;
};

// Direct evaluation of the generating sums S_e(alpha) = sum e(alpha F(x))
// over the per-cone summation regions floor|x^{E(n+j)}| <= P_j with
// the coupled box bounds, summed over the maximal cones (each cone's region
// scanned independently).
std::complex<double> direct_S(const ToricModel& m, const QuasiForm& f,
                              std::span<const long long> e, std::span<const long long> P,
                              long long a, long long q, double beta,
                              long long budget = 10'000'000'000);

// Major-arc factorization check at alpha = a/q + beta:
// lhs = S_e(alpha), rhs = (prod e_i)^{-1} q^{-(n+r)} S_{a,q,e} (sum_sigma I_sigma(Pd beta)) prod P_j^{n_j}
// with Pd = prod P_j^{d_j}.
ArcProbe major_arc_probe(const ToricModel& m, const QuasiForm& f, std::span<const long long> e,
                         std::span<const long long> P, long long a, long long q, double beta,
                         long long mc_samples = 1'000'000, std::uint64_t seed = 42,
                         long long budget = 10'000'000'000);

}  // namespace toricount
