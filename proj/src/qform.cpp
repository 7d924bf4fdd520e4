#include "toricount/qform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "toricount/mobius.hpp"
#include "toricount/rng.hpp"

namespace toricount {

QuasiForm QuasiForm::check_quasi_homogeneous(const ToricModel& m, std::vector<QTerm> terms) {
    const int nr = m.num_rays();
    for (const auto& t : terms) {
        if (int(t.expo.size()) != nr)
            throw ModelError(ModelFault::BadFile, "term exponent vector must have n+r entries");
        for (int e : t.expo)
            if (e < 0) throw ModelError(ModelFault::BadFile, "negative exponent in term");
    }
    std::sort(terms.begin(), terms.end(),
              [](const QTerm& a, const QTerm& b) { return a.expo < b.expo; });
    std::vector<QTerm> merged;
    for (auto& t : terms) {
        if (!merged.empty() && merged.back().expo == t.expo)
            merged.back().coeff += t.coeff;
        else
            merged.push_back(std::move(t));
    }
    std::erase_if(merged, [](const QTerm& t) { return t.coeff == 0; });
    if (merged.empty())
        throw ModelError(ModelFault::BadFile, "polynomial has no nonzero term");

    for (size_t ti = 0; ti < merged.size(); ++ti) {
        for (int j = 0; j < m.r; ++j) {
            long long w = 0;
            for (int i = 0; i < nr; ++i) w += (long long)m.weight[i][j] * merged[ti].expo[i];
            if (w != m.degrees[j])
                throw ModelError(ModelFault::WeightMismatch,
                                 "term " + std::to_string(ti + 1) + " has weight " +
                                     std::to_string(w) + " != d_" + std::to_string(j + 1) + " = " +
                                     std::to_string(m.degrees[j]));
        }
    }

    QuasiForm f;
    f.terms = std::move(merged);
    f.degrees = m.degrees;
    f.nvars_ = nr;
    return f;
}

namespace {

inline long long checked_mul(long long a, long long b) {
    long long out;
    if (__builtin_mul_overflow(a, b, &out)) throw OverflowError("eval_int: 64-bit overflow");
    return out;
}

inline __int128 wide_mul(__int128 a, __int128 b) {
    if (a == 0 || b == 0) return 0;
    __int128 out = a * b;
    if (out / b != a) throw OverflowError("eval_int_wide: 128-bit overflow");
    return out;
}

}  // namespace

long long QuasiForm::eval_int(std::span<const long long> x) const {
    long long acc = 0;
    for (const auto& t : terms) {
        long long prod = t.coeff;
        for (int i = 0; i < nvars_; ++i)
            for (int e = 0; e < t.expo[i]; ++e) prod = checked_mul(prod, x[i]);
        if (__builtin_add_overflow(acc, prod, &acc)) throw OverflowError("eval_int: 64-bit overflow");
    }
    return acc;
}

__int128 QuasiForm::eval_int_wide(std::span<const long long> x) const {
    __int128 acc = 0;
    for (const auto& t : terms) {
        __int128 prod = t.coeff;
        for (int i = 0; i < nvars_; ++i)
            for (int e = 0; e < t.expo[i]; ++e) prod = wide_mul(prod, x[i]);
        acc += prod;   // bounded by term count * max |prod|; fine below 2^126
    }
    return acc;
}

std::uint32_t QuasiForm::eval_mod(std::span<const long long> x, std::uint32_t mod) const {
    std::uint64_t m = mod;
    std::uint64_t acc = 0;
    for (const auto& t : terms) {
        std::uint64_t prod = std::uint64_t(((t.coeff % (long long)m) + (long long)m) % (long long)m);
        for (int i = 0; i < nvars_; ++i) {
            if (!t.expo[i]) continue;
            std::uint64_t xi = std::uint64_t(((x[i] % (long long)m) + (long long)m) % (long long)m);
            for (int e = 0; e < t.expo[i]; ++e) prod = prod * xi % m;
        }
        acc = (acc + prod) % m;
    }
    return std::uint32_t(acc);
}

double QuasiForm::eval_real(std::span<const double> u) const {
    double acc = 0;
    for (const auto& t : terms) {
        double prod = double(t.coeff);
        for (int i = 0; i < nvars_; ++i)
            if (t.expo[i]) prod *= std::pow(u[i], t.expo[i]);
        acc += prod;
    }
    return acc;
}

std::uint32_t QuasiForm::eval_grad_mod(std::span<const long long> x, int var, std::uint32_t p) const {
    std::uint64_t m = p;
    std::uint64_t acc = 0;
    for (const auto& t : terms) {
        if (!t.expo[var]) continue;
        std::uint64_t prod =
            std::uint64_t(((t.coeff * t.expo[var] % (long long)m) + (long long)m) % (long long)m);
        for (int i = 0; i < nvars_; ++i) {
            int e = t.expo[i] - (i == var ? 1 : 0);
            if (!e) continue;
            std::uint64_t xi = std::uint64_t(((x[i] % (long long)m) + (long long)m) % (long long)m);
            for (int k = 0; k < e; ++k) prod = prod * xi % m;
        }
        acc = (acc + prod) % m;
    }
    return std::uint32_t(acc);
}

int QuasiForm::degree_in(int var) const {
    int d = 0;
    for (const auto& t : terms) d = std::max(d, t.expo[var]);
    return d;
}

SmoothnessReport smoothness_sample(const ToricModel& m, const QuasiForm& f,
                                   std::span<const long long> primes, long long samples,
                                   std::uint64_t seed) {
    SmoothnessReport rep;
    const int nr = m.num_rays();
    MobiusTable mob(m);
    for (long long p : primes) {
        if (p < 3 || p % 2 == 0)
            throw ModelError(ModelFault::BadFile, "smoothness_sample: primes must be odd");
        CounterRng rng(seed, std::uint64_t(p));
        std::vector<long long> x(nr);
        long long found = 0;
        for (long long s = 0; s < samples; ++s) {
            // rejection-sample a root of F mod p
            bool root = false;
            for (int tries = 0; tries < 4 * int(p); ++tries) {
                for (auto& xi : x) xi = (long long)rng.next_below(std::uint64_t(p));
                if (f.eval_mod(x, std::uint32_t(p)) == 0) { root = true; break; }
            }
            if (!root) continue;
            ++rep.points_checked;
            std::uint32_t pattern = 0;
            for (int i = 0; i < nr; ++i)
                if (x[i] % p == 0) pattern |= 1u << i;
            if (!mob.pattern_covered(pattern)) continue;   // coprimality fails at p: not a torsor residue
            bool grad_zero = true;
            for (int i = 0; i < nr && grad_zero; ++i)
                if (f.eval_grad_mod(x, i, std::uint32_t(p)) != 0) grad_zero = false;
            if (grad_zero) {
                rep.witnesses.push_back({p, x});
                if (++found >= 8) break;   // enough witnesses for this prime
            }
        }
    }
    return rep;
}

}  // namespace toricount
