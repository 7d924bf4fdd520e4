#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "toricount/model.hpp"

namespace toricount {

// Quasi-r-homogeneous integer polynomial F in the n+r Cox coordinates:
// every term satisfies sum_i a_{i,j} expo_i = d_j for each j.
class QuasiForm {
public:
    // merges duplicate exponent vectors, drops zero terms, checks the weight identity
    static QuasiForm check_quasi_homogeneous(const ToricModel& m, std::vector<QTerm> terms);

    std::vector<QTerm> terms;
    std::vector<int> degrees;

    long long eval_int(std::span<const long long> x) const;       // throws OverflowError
    __int128 eval_int_wide(std::span<const long long> x) const;   // throws OverflowError past 128 bits
    std::uint32_t eval_mod(std::span<const long long> x, std::uint32_t mod) const;
    double eval_real(std::span<const double> u) const;

    // partial derivative value mod p
    std::uint32_t eval_grad_mod(std::span<const long long> x, int var, std::uint32_t p) const;
    // max exponent of variable var over the terms
    int degree_in(int var) const;

private:
    int nvars_ = 0;
};

struct SingularWitness {
    long long p;
    std::vector<long long> x;   // residues mod p
};

struct SmoothnessReport {
    std::vector<SingularWitness> witnesses;
    long long points_checked = 0;
    bool n_f_condition_verified = false;   // always false: the dimension-theoretic n(F) bound is not computed
};

// Random falsifier: samples residues with F = 0 mod p and reports any point where
// the torsor coprimality pattern holds but the gradient vanishes mod p.
SmoothnessReport smoothness_sample(const ToricModel& m, const QuasiForm& f,
                                   std::span<const long long> primes, long long samples,
                                   std::uint64_t seed);

}  // namespace toricount
