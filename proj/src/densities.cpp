#include "toricount/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace toricount {

namespace {

inline std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t mod) {
    return (std::uint64_t)((unsigned __int128)a * b % mod);
}

std::uint64_t ipow_mod(std::uint64_t b, int e, std::uint64_t mod) {
    std::uint64_t r = 1 % mod;
    while (e-- > 0) r = mulmod64(r, b % mod, mod);
    return r;
}

__int128 ipow128(long long b, long long e) {
    __int128 p = 1;
    while (e-- > 0) {
        p *= b;
        if (p > (__int128(1) << 124)) throw OverflowError("power overflow");
    }
    return p;
}

int moebius_of(long long n) {
    int m = 1;
    for (long long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        m = -m;
    }
    if (n > 1) m = -m;
    return m;
}

// #{z in (F_p^*)^s : z_1 + ... + z_s = t} — classical closed form
__int128 units_sum_count(long long p, int s, long long t_mod_p) {
    __int128 pm = 1;
    for (int i = 0; i < s; ++i) pm *= (p - 1);
    __int128 sign = (s % 2 == 0) ? 1 : -1;
    __int128 base = (pm - sign) / p;
    return base + (t_mod_p % p == 0 ? sign : 0);
}

struct ScaledForm {
    std::vector<std::uint64_t> coeff;   // term coefficients times prod e^expo, mod q
    const std::vector<QTerm>* terms;
    std::uint64_t q;
    int nvars;
};

ScaledForm scale_form(const QuasiForm& f, std::span<const long long> e, std::uint64_t q, int nvars) {
    ScaledForm s;
    s.terms = &f.terms;
    s.q = q;
    s.nvars = nvars;
    for (const auto& t : f.terms) {
        std::uint64_t c = std::uint64_t(((t.coeff % (long long)q) + (long long)q) % (long long)q);
        for (int i = 0; i < nvars; ++i)
            if (t.expo[i] && !e.empty()) c = mulmod64(c, ipow_mod(std::uint64_t(e[i]), t.expo[i], q), q);
        s.coeff.push_back(c);
    }
    return s;
}

int pick_linear_var(const QuasiForm& f, int nvars) {
    for (int i = nvars - 1; i >= 0; --i)
        if (f.degree_in(i) <= 1) return i;
    return -1;
}

}  // namespace

std::vector<long long> primes_up_to(long long n) {
    std::vector<long long> out;
    if (n < 2) return out;
    std::vector<char> sieve(n + 1, 1);
    for (long long i = 2; i <= n; ++i) {
        if (!sieve[i]) continue;
        out.push_back(i);
        for (long long j = i * i; j <= n; j += i) sieve[j] = 0;
    }
    return out;
}

std::vector<long long> LocalDensities::value_class_counts(long long q, std::span<const long long> e,
                                                          long long budget) const {
    const int nr = m_.num_rays();
    if (std::pow(double(q), nr) > double(budget))
        throw BudgetExceeded("residue scan q^(n+r) exceeds budget");
    ScaledForm sf = scale_form(f_, e, std::uint64_t(q), nr);
    std::vector<long long> cnt(q, 0);
    const int inner = pick_linear_var(f_, nr);
    std::vector<std::uint64_t> x(nr, 0);

    if (inner < 0) {
        // plain odometer over all coordinates
        while (true) {
            std::uint64_t val = 0;
            for (size_t t = 0; t < sf.terms->size(); ++t) {
                std::uint64_t p = sf.coeff[t];
                const auto& expo = (*sf.terms)[t].expo;
                for (int i = 0; i < nr; ++i)
                    for (int k = 0; k < expo[i]; ++k) p = mulmod64(p, x[i], q);
                val = (val + p) % q;
            }
            ++cnt[val];
            int i = 0;
            while (i < nr && ++x[i] == std::uint64_t(q)) x[i++] = 0;
            if (i == nr) break;
        }
        return cnt;
    }

    // odometer over the other coordinates; F = c0 + c1 * x_inner walks the inner line
    while (true) {
        std::uint64_t c0 = 0, c1 = 0;
        for (size_t t = 0; t < sf.terms->size(); ++t) {
            std::uint64_t p = sf.coeff[t];
            const auto& expo = (*sf.terms)[t].expo;
            for (int i = 0; i < nr; ++i) {
                if (i == inner) continue;
                for (int k = 0; k < expo[i]; ++k) p = mulmod64(p, x[i], q);
            }
            if (expo[inner] == 0)
                c0 = (c0 + p) % q;
            else
                c1 = (c1 + p) % q;
        }
        std::uint64_t val = c0;
        for (long long t = 0; t < q; ++t) {
            ++cnt[val];
            val += c1;
            if (val >= std::uint64_t(q)) val -= q;
        }
        int i = 0;
        while (i < nr) {
            if (i == inner) {
                ++i;
                continue;
            }
            if (++x[i] == std::uint64_t(q)) {
                x[i++] = 0;
            } else {
                break;
            }
        }
        if (i == nr) break;
    }
    return cnt;
}

std::complex<double> LocalDensities::complete_sum(long long a, long long q,
                                                  std::span<const long long> e,
                                                  long long budget) const {
    if (q < 1) throw ModelError(ModelFault::BadFile, "complete_sum: q must be >= 1");
    if (q == 1) return {1.0, 0.0};
    auto cnt = value_class_counts(q, e, budget);
    // S = sum_v cnt[v] e(a v / q), accumulated with Kahan compensation
    double re = 0, im = 0, cre = 0, cim = 0;
    for (long long v = 0; v < q; ++v) {
        if (!cnt[v]) continue;
        double phase = 2.0 * std::numbers::pi * double((__int128(a) * v) % q) / double(q);
        double tr = double(cnt[v]) * std::cos(phase) - cre;
        double sr = re + tr;
        cre = (sr - re) - tr;
        re = sr;
        double ti = double(cnt[v]) * std::sin(phase) - cim;
        double si = im + ti;
        cim = (si - im) - ti;
        im = si;
    }
    return {re, im};
}

double LocalDensities::A_of_q(long long q, std::span<const long long> e, long long budget) const {
    if (q < 1) throw ModelError(ModelFault::BadFile, "A_of_q: q must be >= 1");
    if (q == 1) return 1.0;
    auto cnt = value_class_counts(q, e, budget);
    // Ramanujan sums: c_q(v) = sum_{d | gcd(v,q)} d mu(q/d), exact integers
    std::vector<long long> divs;
    for (long long d = 1; d <= q; ++d)
        if (q % d == 0) divs.push_back(d);
    std::vector<long long> cq_of_div(divs.size(), 0);
    for (size_t gi = 0; gi < divs.size(); ++gi) {
        long long g = divs[gi], s = 0;
        for (long long d : divs)
            if (g % d == 0) s += d * moebius_of(q / d);
        cq_of_div[gi] = s;
    }
    __int128 total = 0;
    for (long long v = 0; v < q; ++v) {
        if (!cnt[v]) continue;
        long long g = std::gcd(v, q);
        size_t gi = std::lower_bound(divs.begin(), divs.end(), g) - divs.begin();
        total += __int128(cnt[v]) * cq_of_div[gi];
    }
    const int nr = m_.num_rays();
    return double(total) / std::pow(double(q), nr);
}

__int128 LocalDensities::m_star_direct(long long p, int m, long long budget) const {
    const int nr = m_.num_rays();
    const long long q = (long long)ipow128(p, m);
    if (std::pow(double(q), nr) > double(budget))
        throw BudgetExceeded("m_star direct scan exceeds budget");
    ScaledForm sf = scale_form(f_, {}, std::uint64_t(q), nr);
    const int inner = pick_linear_var(f_, nr);
    std::vector<std::uint64_t> x(nr, 0);
    std::vector<std::uint32_t> bit(nr);
    for (int i = 0; i < nr; ++i) bit[i] = 1u << i;
    __int128 count = 0;

    auto pattern_prefix = [&]() {
        std::uint32_t msk = 0;
        for (int i = 0; i < nr; ++i)
            if (i != inner && x[i] % p == 0) msk |= bit[i];
        return msk;
    };

    if (inner < 0) {
        while (true) {
            std::uint64_t val = 0;
            for (size_t t = 0; t < sf.terms->size(); ++t) {
                std::uint64_t pr = sf.coeff[t];
                const auto& expo = (*sf.terms)[t].expo;
                for (int i = 0; i < nr; ++i)
                    for (int k = 0; k < expo[i]; ++k) pr = mulmod64(pr, x[i], q);
                val = (val + pr) % q;
            }
            if (val == 0) {
                std::uint32_t msk = 0;
                for (int i = 0; i < nr; ++i)
                    if (x[i] % p == 0) msk |= bit[i];
                if (mob_.pattern_covered(msk)) ++count;
            }
            int i = 0;
            while (i < nr && ++x[i] == std::uint64_t(q)) x[i++] = 0;
            if (i == nr) break;
        }
        return count;
    }

    while (true) {
        std::uint64_t c0 = 0, c1 = 0;
        for (size_t t = 0; t < sf.terms->size(); ++t) {
            std::uint64_t pr = sf.coeff[t];
            const auto& expo = (*sf.terms)[t].expo;
            for (int i = 0; i < nr; ++i) {
                if (i == inner) continue;
                for (int k = 0; k < expo[i]; ++k) pr = mulmod64(pr, x[i], q);
            }
            if (expo[inner] == 0)
                c0 = (c0 + pr) % q;
            else
                c1 = (c1 + pr) % q;
        }
        std::uint32_t msk = pattern_prefix();
        bool ok_div = mob_.pattern_covered(msk | bit[inner]);
        bool ok_unit = mob_.pattern_covered(msk);
        if (ok_div || ok_unit) {
            std::uint64_t val = c0;
            long long pc = 0;   // t mod p
            for (long long t = 0; t < q; ++t) {
                if (val == 0 && (pc == 0 ? ok_div : ok_unit)) ++count;
                val += c1;
                if (val >= std::uint64_t(q)) val -= q;
                if (++pc == p) pc = 0;
            }
        }
        int i = 0;
        while (i < nr) {
            if (i == inner) {
                ++i;
                continue;
            }
            if (++x[i] == std::uint64_t(q)) {
                x[i++] = 0;
            } else {
                break;
            }
        }
        if (i == nr) break;
    }
    return count;
}

static long long eval_scaled_mod(const QuasiForm& f, std::span<const long long> x, std::uint64_t q) {
    std::uint64_t val = 0;
    for (const auto& t : f.terms) {
        std::uint64_t pr = std::uint64_t(((t.coeff % (long long)q) + (long long)q) % (long long)q);
        for (size_t i = 0; i < x.size(); ++i) {
            std::uint64_t xi = std::uint64_t(((x[i] % (long long)q) + (long long)q) % (long long)q);
            for (int k = 0; k < t.expo[i]; ++k) pr = mulmod64(pr, xi, q);
        }
        val = (val + pr) % q;
    }
    return (long long)val;
}

__int128 LocalDensities::count_lifts(std::vector<long long>& x, long long p, int level, int m,
                                     long long& budget) const {
    if (level >= m) return 1;
    const int nr = m_.num_rays();
    bool singular = true;
    for (int i = 0; i < nr && singular; ++i)
        if (f_.eval_grad_mod(x, i, std::uint32_t(p)) != 0) singular = false;
    if (!singular) {
        __int128 lifts = 1;
        for (int l = 0; l < (m - level) * (nr - 1); ++l) lifts *= p;
        return lifts;
    }
    const std::uint64_t qq = (std::uint64_t)ipow128(p, level + 1);
    if (eval_scaled_mod(f_, x, qq) != 0) return 0;
    // gradient vanishes mod p and F = 0 mod p^{level+1}: every lift is a solution
    // at the next level; branch explicitly
    __int128 branches = ipow128(p, nr);
    if (branches > budget) throw BudgetExceeded("singular lift recursion exceeds budget");
    budget -= (long long)branches;
    const long long pl = (long long)ipow128(p, level);
    __int128 total = 0;
    std::vector<long long> t(nr, 0);
    while (true) {
        std::vector<long long> xx(nr);
        for (int i = 0; i < nr; ++i) xx[i] = x[i] + pl * t[i];
        total += count_lifts(xx, p, level + 1, m, budget);
        int i = 0;
        while (i < nr && ++t[i] == p) t[i++] = 0;
        if (i == nr) break;
    }
    return total;
}

__int128 LocalDensities::m_star_hensel(long long p, int m, long long budget) const {
    Level1 lvl = hensel_level1(p, budget);
    const int nr = m_.num_rays();
    __int128 lift = 1;
    for (int l = 0; l < (m - 1) * (nr - 1); ++l) lift *= p;
    if (lvl.nonsingular != 0 && lift > (__int128(1) << 124) / lvl.nonsingular)
        throw OverflowError("m_star overflows 128 bits");
    __int128 total = lvl.nonsingular * lift;
    if (m == 1) return total + __int128(lvl.singular.size());
    long long lift_budget = budget;
    for (const auto& pt : lvl.singular) {
        std::vector<long long> x = pt;
        total += count_lifts(x, p, 1, m, lift_budget);
    }
    return total;
}

LocalDensities::Level1 LocalDensities::hensel_level1(long long p, long long budget) const {
    const int nr = m_.num_rays();
    // greedy linear block: F must have joint degree <= 1 in the chosen variables
    std::vector<int> ydeg(f_.terms.size(), 0);
    std::vector<int> Y, X;
    std::vector<char> in_y(nr, 0);
    for (int i = 0; i < nr; ++i) {
        bool ok = true;
        for (size_t t = 0; t < f_.terms.size(); ++t)
            if (ydeg[t] + f_.terms[t].expo[i] > 1) { ok = false; break; }
        if (ok) {
            in_y[i] = 1;
            Y.push_back(i);
            for (size_t t = 0; t < f_.terms.size(); ++t) ydeg[t] += f_.terms[t].expo[i];
        }
    }
    for (int i = 0; i < nr; ++i)
        if (!in_y[i]) X.push_back(i);
    if (Y.empty()) throw BudgetExceeded("m_star: no linear block; direct scan exceeds budget");
    if (std::pow(double(p), int(X.size())) * double(1 << Y.size()) > double(budget))
        throw BudgetExceeded("m_star level-1 block scan exceeds budget");

    __int128 nonsingular = 0;
    std::vector<std::vector<long long>> singular;
    long long lift_budget = budget;
    std::vector<long long> xfull(nr, 0);
    std::vector<long long> xv(X.size(), 0);

    while (true) {
        for (size_t i = 0; i < X.size(); ++i) xfull[X[i]] = xv[i];
        std::uint32_t xmask = 0;
        for (size_t i = 0; i < X.size(); ++i)
            if (xv[i] % p == 0) xmask |= 1u << X[i];
        // F = c0(x) + sum_{i in Y} c_i(x) y_i
        long long c0 = 0;
        std::vector<long long> cy(Y.size(), 0);
        for (size_t t = 0; t < f_.terms.size(); ++t) {
            const auto& term = f_.terms[t];
            std::uint64_t pr = std::uint64_t(((term.coeff % p) + p) % p);
            for (int xi : X)
                for (int k = 0; k < term.expo[xi]; ++k)
                    pr = mulmod64(pr, std::uint64_t(xfull[xi]), std::uint64_t(p));
            int slot = -1;
            for (size_t yi = 0; yi < Y.size(); ++yi)
                if (term.expo[Y[yi]] == 1) slot = int(yi);
            if (slot < 0)
                c0 = (c0 + (long long)pr) % p;
            else
                cy[slot] = (cy[slot] + (long long)pr) % p;
        }
        bool any_c = false;
        for (long long c : cy)
            if (c) any_c = true;

        if (any_c) {
            // every solution over this prefix has a nonzero y-gradient component
            for (std::uint32_t tb = 0; tb < (1u << Y.size()); ++tb) {
                std::uint32_t full = xmask;
                int a1 = 0, a0 = 0;
                for (size_t yi = 0; yi < Y.size(); ++yi) {
                    if (tb >> yi & 1) {
                        full |= 1u << Y[yi];
                    } else {
                        (cy[yi] ? a1 : a0)++;
                    }
                }
                if (!mob_.pattern_covered(full)) continue;
                __int128 ways = units_sum_count(p, a1, (p - c0) % p);
                for (int k = 0; k < a0; ++k) ways *= (p - 1);
                nonsingular += ways;
            }
        } else if (c0 == 0) {
            // F vanishes identically on the fiber: scan it, tracking singular points
            __int128 fib = ipow128(p, (long long)Y.size());
            if (fib > lift_budget) throw BudgetExceeded("degenerate fiber scan exceeds budget");
            lift_budget -= (long long)fib;
            std::vector<long long> yv(Y.size(), 0);
            while (true) {
                for (size_t i = 0; i < Y.size(); ++i) xfull[Y[i]] = yv[i];
                std::uint32_t full = xmask;
                for (size_t i = 0; i < Y.size(); ++i)
                    if (yv[i] == 0) full |= 1u << Y[i];
                if (mob_.pattern_covered(full)) {
                    bool sing = true;
                    for (int i = 0; i < nr && sing; ++i)
                        if (f_.eval_grad_mod(xfull, i, std::uint32_t(p)) != 0) sing = false;
                    if (!sing) {
                        ++nonsingular;
                    } else {
                        if (singular.size() >= 1u << 20)
                            throw BudgetExceeded("too many singular residues to track");
                        singular.push_back(xfull);
                    }
                }
                size_t i = 0;
                while (i < Y.size() && ++yv[i] == p) yv[i++] = 0;
                if (i == Y.size()) break;
            }
            for (size_t i = 0; i < Y.size(); ++i) xfull[Y[i]] = 0;
        }

        size_t i = 0;
        while (i < X.size() && ++xv[i] == p) xv[i++] = 0;
        if (i == X.size()) break;
    }

    Level1 out;
    out.nonsingular = nonsingular;
    out.singular = std::move(singular);
    return out;
}

__int128 LocalDensities::m_star(long long p, int m, long long budget) const {
    if (m < 1) throw ModelError(ModelFault::BadFile, "m_star: m must be >= 1");
    const int nr = m_.num_rays();
    if (std::pow(double(p), double(m) * nr) <= double(budget)) return m_star_direct(p, m, budget);
    return m_star_hensel(p, m, budget);
}

DensityReport LocalDensities::sigma_p(long long p, int m_max, long long budget) const {
    DensityReport rep;
    rep.p = p;
    const int nr = m_.num_rays();
    // one level-1 pass serves every m when the direct scan is out of reach
    bool direct_all = std::pow(double(p), double(m_max) * nr) <= double(budget);
    if (direct_all) {
        for (int m = 1; m <= m_max; ++m) {
            __int128 ms = m_star_direct(p, m, budget);
            rep.values.push_back(Rat(ms, ipow128(p, (long long)m * (nr - 1))));
        }
    } else {
        try {
            Level1 lvl = hensel_level1(p, budget);
            for (int m = 1; m <= m_max; ++m) {
                long long lift_budget = budget;
                __int128 lift = 1;
                for (int l = 0; l < (m - 1) * (nr - 1); ++l) lift *= p;
                if (lvl.nonsingular != 0 && lift > (__int128(1) << 124) / lvl.nonsingular)
                    throw OverflowError("m_star overflows 128 bits");
                __int128 ms = lvl.nonsingular * lift;
                if (m == 1) {
                    ms += __int128(lvl.singular.size());
                } else {
                    for (const auto& pt : lvl.singular) {
                        std::vector<long long> x = pt;
                        ms += count_lifts(x, p, 1, m, lift_budget);
                    }
                }
                rep.values.push_back(Rat(ms, ipow128(p, (long long)m * (nr - 1))));
            }
        } catch (const BudgetExceeded&) {
            // keep whatever levels were computed; stabilization stays unconfirmed
        }
    }
    if (rep.values.empty()) throw BudgetExceeded("sigma_p: no level computable within budget");
    for (size_t m = 1; m < rep.values.size(); ++m) {
        if (rep.values[m] == rep.values[m - 1]) {
            rep.stabilized_at = int(m + 1);
            rep.stabilized = true;
            break;
        }
    }
    rep.sigma = rep.values.back();
    return rep;
}

SeriesResult LocalDensities::singular_series(long long prime_bound, int m_max,
                                             long long budget) const {
    SeriesResult res;
    res.prime_bound = prime_bound;
    res.m_max = m_max;
    if (prime_bound < 2) {
        res.tail_bound = std::numeric_limits<double>::infinity();
        return res;
    }
    auto primes = primes_up_to(prime_bound);
    for (long long p : primes) {
        DensityReport rep = sigma_p(p, m_max, budget);
        double s = rep.sigma.to_double();
        res.factors.push_back({p, s, rep.stabilized});
        if (!rep.stabilized) res.any_unstable = true;
        res.value *= s;
    }
    // crude tail proxy: |sigma_p - 1| summed over the last decade of primes
    for (const auto& f : res.factors)
        if (f.p > prime_bound / 10) res.tail_bound += std::abs(f.sigma - 1.0);
    return res;
}

MStarCheck LocalDensities::mstar_identity_check(long long p, int m, long long budget,
                                                double tol) const {
    MStarCheck chk;
    if (m == 0) {
        // empty modulus: both sides are 1 by convention
        chk.lhs = Rat(1);
        chk.rhs = 1.0;
        chk.ok = true;
        return chk;
    }
    const int nr = m_.num_rays();
    chk.lhs = Rat(m_star(p, m, budget), ipow128(p, (long long)m * (nr - 1)));
    double rhs = 0;
    for (int k = 0; k <= m; ++k) {
        long long q = (long long)ipow128(p, k);
        for (std::uint32_t s = 0; s < (1u << nr); ++s) {
            int mu = mob_.mu_local(s);
            if (!mu) continue;
            std::vector<long long> e(nr, 1);
            int card = 0;
            for (int i = 0; i < nr; ++i)
                if (s >> i & 1) {
                    e[i] = p;
                    ++card;
                }
            rhs += double(mu) / std::pow(double(p), card) * A_of_q(q, e, budget);
        }
    }
    chk.rhs = rhs;
    chk.ok = std::abs(chk.lhs.to_double() - rhs) <= tol;
    return chk;
}

}  // namespace toricount
