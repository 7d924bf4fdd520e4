#include "toricount/arcs.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "toricount/archimedean.hpp"
#include "toricount/densities.hpp"
#include "toricount/mobius.hpp"

namespace toricount {

namespace {

inline __int128 abs128(__int128 v) { return v < 0 ? -v : v; }

long long ipow_ll(long long b, int e) {
    long long p = 1;
    while (e-- > 0) p *= b;
    return p;
}

}  // namespace

std::complex<double> direct_S(const ToricModel& m, const QuasiForm& f,
                              std::span<const long long> e, std::span<const long long> P,
                              long long a, long long q, double beta, long long budget) {
    const int nr = m.num_rays();
    if (int(P.size()) != m.r) throw ModelError(ModelFault::BadFile, "P must have r entries");
    std::vector<long long> ee(e.begin(), e.end());
    if (ee.empty()) ee.assign(nr, 1);
    std::complex<double> total = 0;

    std::vector<long long> x(nr), k(m.r);
    for (int ci = 0; ci < m.num_cones(); ++ci) {
        const auto& off = m.off_rays(ci);
        const auto& bmat = m.cone_beta(ci);
        for (const auto& row : bmat)
            for (int b : row)
                if (b < 0)
                    throw ModelError(ModelFault::NoSolution,
                                     "direct_S requires nonnegative inverse weight submatrices");
        std::vector<char> is_off(nr, 0);
        for (int i : off) is_off[i] = 1;
        // iterate cells k <= P componentwise
        std::fill(k.begin(), k.end(), 1);
        while (true) {
            // coordinate bounds for this cell
            std::vector<long long> lo(nr, 1), hi(nr, 1);
            double volume = 1;
            for (int i = 0; i < nr; ++i) {
                long long l = 1, h = 1;
                for (int j = 0; j < m.r; ++j) {
                    l *= ipow_ll(k[j], m.weight[i][j]);
                    h *= ipow_ll(k[j] + 1, m.weight[i][j]);
                }
                lo[i] = l;
                hi[i] = h;
                volume *= is_off[i] ? 2.0 * double(h - l) : 2.0 * double(h);
            }
            if (volume > double(budget)) throw BudgetExceeded("direct_S cell too large");
            budget -= (long long)volume;

            std::function<void(int)> rec = [&](int i) {
                if (i == nr) {
                    // fiber check: |x^{E(n+j)}| in [k_j, k_j+1)  (integral, so == k_j)
                    for (int j = 0; j < m.r; ++j) {
                        __int128 mj = 1;
                        for (int l2 = 0; l2 < m.r; ++l2) {
                            __int128 av = abs128(x[off[l2]] * ee[off[l2]]);
                            for (int t = 0; t < bmat[j][l2]; ++t) mj *= av;
                        }
                        if (mj != k[j]) return;
                    }
                    std::vector<long long> ex(nr);
                    for (int t = 0; t < nr; ++t) ex[t] = x[t] * ee[t];
                    __int128 fv = f.eval_int_wide(ex);
                    double phase = 0;
                    if (q > 1 && a != 0) {
                        long long fm = (long long)(((fv % q) + q) % q);
                        phase += 2.0 * std::numbers::pi * double((__int128(a) * fm) % q) / double(q);
                    }
                    phase += 2.0 * std::numbers::pi * beta * double(fv);
                    total += std::complex<double>(std::cos(phase), std::sin(phase));
                    return;
                }
                // x_i ranges over integers with |e_i x_i| inside the cell bounds
                long long top = (is_off[i] ? hi[i] - 1 : hi[i]) / ee[i];
                long long start = is_off[i] ? (lo[i] + ee[i] - 1) / ee[i] : 1;
                for (long long t = std::max(start, 1LL); t <= top; ++t) {
                    x[i] = t;
                    rec(i + 1);
                    x[i] = -t;
                    rec(i + 1);
                }
            };
            rec(0);

            int j = 0;
            while (j < m.r && ++k[j] > P[j]) k[j++] = 1;
            if (j == m.r) break;
        }
    }
    return total;
}

ArcProbe major_arc_probe(const ToricModel& m, const QuasiForm& f, std::span<const long long> e,
                         std::span<const long long> P, long long a, long long q, double beta,
                         long long mc_samples, std::uint64_t seed, long long budget) {
    if (q < 1 || a < 0 || a >= std::max(q, 1LL) || std::gcd(a, q) != 1)
        throw ModelError(ModelFault::BadFile, "major_arc_probe: need 0 <= a < q, gcd(a,q) = 1");
    ArcProbe probe;
    probe.a = a;
    probe.q = q;
    probe.beta = beta;
    probe.P.assign(P.begin(), P.end());
    probe.e.assign(e.begin(), e.end());
    if (probe.e.empty()) probe.e.assign(m.num_rays(), 1);

    probe.lhs = direct_S(m, f, probe.e, P, a, q, beta, budget);

    MobiusTable mob(m);
    LocalDensities loc(m, f, mob);
    std::complex<double> saq = loc.complete_sum(a, q, probe.e, budget);

    // I(Pd * beta) summed over cones, Pd = prod P_j^{d_j}
    double Pd = 1;
    for (int j = 0; j < m.r; ++j) Pd *= std::pow(double(P[j]), m.degrees[j]);
    Archimedean arch(m, f);
    std::complex<double> isum = 0;
    for (int ci = 0; ci < m.num_cones(); ++ci) {
        auto est = arch.I_beta(ci, Pd * beta, mc_samples, seed);
        isum += std::complex<double>(est.value, est.imag);
    }

    double pn = 1;
    for (int j = 0; j < m.r; ++j) pn *= std::pow(double(P[j]), m.anticanonical[j]);
    double einv = 1;
    for (long long v : probe.e) einv /= double(v);
    probe.rhs = einv * std::pow(double(q), -m.num_rays()) * saq * isum * pn;
    double denom = std::max({std::abs(probe.lhs), std::abs(probe.rhs), 1e-12});
    probe.rel_err = std::abs(probe.lhs - probe.rhs) / denom;
    return probe;
}

}  // namespace toricount
