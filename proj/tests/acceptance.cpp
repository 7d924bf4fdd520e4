// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
// Usage: acceptance <models_dir> <cli_path>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "toricount/arcs.hpp"
#include "toricount/archimedean.hpp"
#include "toricount/constant.hpp"
#include "toricount/densities.hpp"
#include "toricount/enumerate.hpp"
#include "toricount/hyperbolic.hpp"
#include "toricount/io.hpp"
#include "toricount/mobius.hpp"

using namespace toricount;

namespace {

int g_failures = 0;

void report(int crit, bool pass, const std::string& what) {
    printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", crit, what.c_str());
    if (!pass) ++g_failures;
    fflush(stdout);
}

double now_s() { return double(clock()) / CLOCKS_PER_SEC; }

// ---- criterion 1: exact Mobius inversion over divisors of 12 ----
bool mobius_inversion_exact(const LoadedModel& lm) {
    const ToricModel& m = lm.model;
    MobiusTable mob(m);
    const int nr = m.num_rays();
    // divisor candidates with nonzero mu are squarefree 6-smooth patterns
    struct DCand {
        std::vector<long long> d;
        int mu;
    };
    std::vector<std::uint32_t> live;
    for (std::uint32_t s = 0; s < (1u << nr); ++s)
        if (mob.mu_local(s) != 0) live.push_back(s);
    std::vector<DCand> cands;
    for (std::uint32_t s2 : live)
        for (std::uint32_t s3 : live) {
            DCand c;
            c.d.assign(nr, 1);
            for (int i = 0; i < nr; ++i) {
                if (s2 >> i & 1) c.d[i] *= 2;
                if (s3 >> i & 1) c.d[i] *= 3;
            }
            c.mu = mob.mu_local(s2) * mob.mu_local(s3);
            cands.push_back(c);
        }
    const std::vector<long long> choices = {1, 2, 3, 4, 6, 12};
    std::vector<long long> e(nr, 1);
    std::vector<int> idx(nr, 0);
    while (true) {
        for (int i = 0; i < nr; ++i) e[i] = choices[idx[i]];
        long long sum = 0;
        for (const auto& c : cands) {
            bool divides = true;
            for (int i = 0; i < nr && divides; ++i)
                if (e[i] % c.d[i]) divides = false;
            if (divides) sum += c.mu;
        }
        if (sum != mob.chi(e)) return false;
        int i = 0;
        while (i < nr && ++idx[i] == int(choices.size())) idx[i++] = 0;
        if (i == nr) break;
    }
    return true;
}

// ---- criterion 7 helpers: naive projective rational point counts ----
long long projective_count_pp1(long long B) {
    // primitive pairs with nonzero coordinates, first coordinate positive
    std::vector<long long> byh(B + 1, 0);
    for (long long a = 1; a <= B; ++a)
        for (long long b = -B; b <= B; ++b) {
            if (b == 0 || std::gcd(a, std::llabs(b)) != 1) continue;
            long long h = std::max(a, std::llabs(b));
            if (h <= B) ++byh[h];
        }
    long long total = 0;
    for (long long h1 = 1; h1 <= B; ++h1)
        for (long long h2 = 1; h1 * h2 <= B; ++h2) total += byh[h1] * byh[h2];
    return total;
}

long long projective_count_pp2(long long B) {
    long long H = (long long)std::floor(std::sqrt(double(B)));
    while ((H + 1) * (H + 1) <= B) ++H;
    while (H * H > B) --H;
    std::vector<long long> byh(H + 1, 0);
    for (long long a = 1; a <= H; ++a)
        for (long long b = -H; b <= H; ++b)
            for (long long c = -H; c <= H; ++c) {
                if (b == 0 || c == 0) continue;
                if (std::gcd(std::gcd(a, std::llabs(b)), std::llabs(c)) != 1) continue;
                long long h = std::max({a, std::llabs(b), std::llabs(c)});
                if (h <= H) ++byh[h];
            }
    long long total = 0;
    for (long long h1 = 1; h1 <= H; ++h1)
        for (long long h2 = 1; h1 * h2 <= H; ++h2) total += byh[h1] * byh[h2];
    return total;
}

bool files_identical(const std::string& a, const std::string& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return sa.str() == sb.str() && !sa.str().empty();
}

}  // namespace

int main(int argc, char** argv) {
    std::string models_dir = argc > 1 ? argv[1] : "models";
    std::string cli_path = argc > 2 ? argv[2] : "";

    LoadedModel pp1 = load_model_file(models_dir + "/pp1.json");
    LoadedModel pp2 = load_model_file(models_dir + "/pp2.json");

    // 1. exact Mobius inversion on both models, runtime < 10 s
    {
        double t0 = now_s();
        bool ok = mobius_inversion_exact(pp1) && mobius_inversion_exact(pp2);
        double dt = now_s() - t0;
        ok = ok && dt < 10.0;
        char buf[160];
        snprintf(buf, sizeof buf,
                 "Mobius inversion chi = sum mu, e in {1,2,3,4,6,12}^(n+r), both models (%.1fs)",
                 dt);
        report(1, ok, buf);
    }

    // 2. A_e multiplicativity for coprime q1 q2 <= 30, e in {1, (2,1,...,1)}
    {
        double t0 = now_s();
        bool ok = true;
        double worst = 0;
        for (const LoadedModel* lm : {&pp1, &pp2}) {
            MobiusTable mob(lm->model);
            LocalDensities loc(lm->model, lm->form, mob);
            std::vector<std::vector<long long>> evs;
            evs.push_back(std::vector<long long>(lm->model.num_rays(), 1));
            std::vector<long long> e2(lm->model.num_rays(), 1);
            e2[0] = 2;
            evs.push_back(e2);
            for (const auto& e : evs) {
                std::vector<double> A(31, 0.0);
                for (long long q = 1; q <= 30; ++q) A[q] = loc.A_of_q(q, e, 2'000'000'000);
                for (long long q1 = 2; q1 <= 30; ++q1)
                    for (long long q2 = q1 + 1; q1 * q2 <= 30; ++q2) {
                        if (std::gcd(q1, q2) != 1) continue;
                        double diff = std::abs(A[q1 * q2] - A[q1] * A[q2]);
                        worst = std::max(worst, diff);
                        if (diff > 1e-8) ok = false;
                    }
            }
        }
        double dt = now_s() - t0;
        ok = ok && dt < 60.0;
        char buf[160];
        snprintf(buf, sizeof buf,
                 "A_e multiplicativity, q1 q2 <= 30 coprime, both models (max dev %.2e, %.1fs)",
                 worst, dt);
        report(2, ok, buf);
    }

    // 3. M*_p identity for p in {2,3}, m in {1,2}, both fixtures
    {
        double t0 = now_s();
        bool ok = true;
        for (const LoadedModel* lm : {&pp1, &pp2}) {
            MobiusTable mob(lm->model);
            LocalDensities loc(lm->model, lm->form, mob);
            for (long long p : {2, 3})
                for (int m : {1, 2})
                    if (!loc.mstar_identity_check(p, m, LocalDensities::kDefaultBudget, 1e-8).ok)
                        ok = false;
        }
        double dt = now_s() - t0;
        ok = ok && dt < 120.0;
        char buf[160];
        snprintf(buf, sizeof buf, "M*_p identity, p in {2,3}, m in {1,2}, both fixtures (%.1fs)",
                 dt);
        report(3, ok, buf);
    }

    // 4. Hensel stabilization on pp2 for p in {2,3,5}: values constant from m = 2
    {
        MobiusTable mob(pp2.model);
        LocalDensities loc(pp2.model, pp2.form, mob);
        bool ok = true;
        for (long long p : {2, 3, 5}) {
            DensityReport rep = loc.sigma_p(p, 3);
            if (rep.values.size() < 3) ok = false;
            for (size_t m = 1; m + 1 < rep.values.size() && ok; ++m)
                if (!(rep.values[m] == rep.values[m + 1])) ok = false;
        }
        report(4, ok, "normalized M*_p constant from m = 2 on, pp2, p in {2,3,5}, exact");
    }

    // 5. hyperbolic summation vs the Dirichlet divisor asymptotic
    {
        double t0 = now_s();
        FiberFamily div;
        div.r = 2;
        div.alpha = {1, 1};
        div.h = [](std::span<const long long>) { return 1.0; };
        std::vector<std::pair<double, double>> samples;
        for (double P : {1e5, 1e6, 1e7}) samples.push_back({P, upsilon(div, P)});
        FitResult fit = fit_leading_constant(samples, 2);
        double dt = now_s() - t0;
        bool ok = std::abs(fit.c_hat - 1.0) <= 0.05 && dt < 60.0;
        char buf[160];
        snprintf(buf, sizeof buf, "divisor family fit c_hat = %.4f (target 1 +- 0.05, %.1fs)",
                 fit.c_hat, dt);
        report(5, ok, buf);
    }

    // 6. fiber sandwich on pp2 at B in {100, 1000, 10000}
    {
        bool ok = true;
        const ToricModel& m = pp2.model;
        for (long long B : {100, 1000, 10000}) {
            for (int c = 0; c < m.num_cones() && ok; ++c) {
                long long lo = 0, hi = 0;
                for (long long k1 = 1; k1 * k1 <= B; ++k1)
                    for (long long k2 = 1; k1 * k1 * k2 * k2 <= B; ++k2) {
                        std::vector<long long> k = {k1, k2};
                        lo += fiber_count(m, pp2.form, c, {}, k, false);
                        hi += fiber_count(m, pp2.form, c, {}, k, true);
                    }
                long long mid = cone_count(m, pp2.form, c, {}, B);
                if (!(lo <= mid && mid <= hi)) ok = false;
            }
        }
        report(6, ok, "sum h_lower <= per-cone count <= sum h_upper, pp2, B in {1e2,1e3,1e4}");
    }

    // 7. torsor quotient identity at B = 100
    {
        CountOptions opt;
        opt.all_nonzero = true;
        CountRecord c1 = count_torsor(pp1.model, nullptr, 100, opt);
        CountRecord c2 = count_torsor(pp2.model, nullptr, 100, opt);
        long long p1 = projective_count_pp1(100);
        long long p2 = projective_count_pp2(100);
        bool ok = c1.total == 4 * p1 && c2.total == 4 * p2;
        char buf[160];
        snprintf(buf, sizeof buf,
                 "all-torsor count = 2^r x projective count at B=100 (pp1 %lld=4x%lld, pp2 %lld=4x%lld)",
                 c1.total, p1, c2.total, p2);
        report(7, ok, buf);
    }

    // 8. analytic shell densities on [-1,1]^2
    {
        std::vector<double> eps = {1e-2, 1e-3};
        auto f1 = [](std::span<const double> u) { return u[0]; };
        auto f2 = [](std::span<const double> u) { return u[0] - u[1]; };
        auto d1 = shell_density_box(2, f1, eps, 1'000'000, 42);
        auto d2 = shell_density_box(2, f2, eps, 1'000'000, 42);
        bool ok = std::abs(d1.value - 2.0) <= 3 * d1.std_error &&
                  std::abs(d2.value - 2.0) <= 3 * d2.std_error;
        char buf[160];
        snprintf(buf, sizeof buf, "shell density 2.0 within 3 sigma: u1 -> %.4f+-%.4f, u1-u2 -> %.4f+-%.4f",
                 d1.value, d1.std_error, d2.value, d2.std_error);
        report(8, ok, buf);
    }

    // 9. end-to-end Manin check on pp2
    {
        double t0 = now_s();
        MobiusTable mob(pp2.model);
        LocalDensities loc(pp2.model, pp2.form, mob);
        SeriesResult series = loc.singular_series(200, 3);
        Archimedean arch(pp2.model, pp2.form);
        std::vector<double> eps = {1e-2, 3e-3};
        DensityEstimate J = arch.J_total(eps, 10'000'000, 42);
        double C = 0.25 * series.value * J.value;

        std::vector<std::pair<double, double>> samples;
        std::vector<double> ratios;
        bool ok = true;
        for (long long B : {1000, 10000, 100000}) {
            CountOptions opt;
            opt.all_nonzero = true;
            CountRecord rec = count_torsor(pp2.model, &pp2.form, B, opt);
            double NB = rec.rational.to_double();
            samples.push_back({double(B), NB});
            ratios.push_back(NB / (C * B * std::log(double(B))));
        }
        FitResult fit = fit_leading_constant(samples, 2);
        double rel = std::abs(fit.a / C - 1.0);
        if (rel > 0.15) ok = false;
        for (size_t i = 1; i < ratios.size(); ++i)
            if (!(std::abs(ratios[i] - 1.0) < std::abs(ratios[i - 1] - 1.0))) ok = false;
        double dt = now_s() - t0;
        ok = ok && dt < 1800.0;
        char buf[240];
        snprintf(buf, sizeof buf,
                 "end-to-end pp2: C=%.4f (S=%.4f, J=%.3f+-%.3f), fit a=%.4f, |a/C-1|=%.3f, "
                 "ratios %.3f %.3f %.3f (%.0fs)",
                 C, series.value, J.value, J.std_error, fit.a, rel, ratios[0], ratios[1],
                 ratios[2], dt);
        report(9, ok, buf);
    }

    // 10. major-arc probe error trend at (q,a,beta) = (2,1,0) on pp1
    {
        std::vector<long long> e;
        std::vector<double> errs;
        for (long long P : {20, 40, 80}) {
            std::vector<long long> Pv = {P, P};
            ArcProbe probe = major_arc_probe(pp1.model, pp1.form, e, Pv, 1, 2, 0.0, 2'000'000, 42);
            errs.push_back(probe.rel_err);
        }
        bool ok = errs[1] < errs[0] && errs[2] < errs[1];
        char buf[160];
        snprintf(buf, sizeof buf, "probe rel_err decreasing: %.4f > %.4f > %.4f", errs[0], errs[1],
                 errs[2]);
        report(10, ok, buf);
    }

    // 11. byte-identical reruns of the CLI with a fixed seed and one worker
    {
        bool ok = false;
        std::string what = "CLI determinism";
        if (cli_path.empty()) {
            what += " (no CLI path given)";
        } else {
            std::string base = models_dir + "/pp1.json";
            auto run = [&](const std::string& args, const std::string& out) {
                std::string cmd = cli_path + " " + args + " --out " + out + " 2>/dev/null";
                return std::system(cmd.c_str()) == 0;
            };
            std::string d = "acceptance_tmp";
            if (std::system(("mkdir -p " + d).c_str()) != 0) what += " (tmpdir failed)";
            bool r1 = run("count --model " + base + " --B 300 --all-nonzero --seed 7 --workers 1",
                          d + "/c1.csv");
            bool r2 = run("count --model " + base + " --B 300 --all-nonzero --seed 7 --workers 1",
                          d + "/c2.csv");
            bool r3 = run("density --model " + base +
                              " --samples 400000 --eps 3e-2,1e-2 --seed 7 --workers 1 --format json",
                          d + "/d1.json");
            bool r4 = run("density --model " + base +
                              " --samples 400000 --eps 3e-2,1e-2 --seed 7 --workers 1 --format json",
                          d + "/d2.json");
            ok = r1 && r2 && r3 && r4 && files_identical(d + "/c1.csv", d + "/c2.csv") &&
                 files_identical(d + "/d1.json", d + "/d2.json");
        }
        report(11, ok, what);
    }

    printf("%s: %d criterion(s) failed\n", g_failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED",
           g_failures);
    return g_failures ? 1 : 0;
}
