#include <doctest.h>

#include <cmath>

#include "toricount/enumerate.hpp"
#include "toricount/hyperbolic.hpp"
#include "toricount/rng.hpp"
#include "test_models.hpp"

using namespace toricount;

namespace {

FiberFamily divisor_family() {
    FiberFamily fam;
    fam.r = 2;
    fam.alpha = {1, 1};
    fam.h = [](std::span<const long long>) { return 1.0; };
    return fam;
}

}  // namespace

TEST_CASE("upsilon: Dirichlet divisor sums and trivial families") {
    FiberFamily div = divisor_family();
    // sum_{k<=10} floor(10/k) = 27
    CHECK(upsilon(div, 10) == doctest::Approx(27.0));
    long long direct = 0;
    for (long long a = 1; a <= 100; ++a)
        for (long long b = 1; a * b <= 100; ++b) ++direct;
    CHECK(upsilon(div, 100) == doctest::Approx(double(direct)));

    FiberFamily unit;
    unit.r = 1;
    unit.alpha = {1};
    unit.h = [](std::span<const long long>) { return 1.0; };
    CHECK(upsilon(unit, 100) == doctest::Approx(100.0));

    FiberFamily syn;
    syn.r = 2;
    syn.alpha = {2, 1};
    syn.h = [](std::span<const long long> x) { return 2.0 * double(x[0]); };
    double oracle = 0;
    for (long long a = 1; a * a <= 100; ++a)
        for (long long b = 1; a * a * b <= 100; ++b) oracle += 2.0 * double(a);
    CHECK(upsilon(syn, 100) == doctest::Approx(oracle));
}

TEST_CASE("upsilon budget guard") {
    FiberFamily div = divisor_family();
    CHECK_THROWS_AS(upsilon(div, 1e7, 1000), BudgetExceeded);
}

TEST_CASE("V_{r,j} exact values and Monte Carlo cross-check") {
    CHECK(V_rj(1, 0) == Rat(1));
    CHECK(V_rj(3, 0) == Rat(1));
    CHECK(V_rj(1, 1) == Rat(1, 2));
    CHECK(V_rj(2, 1) == Rat(1));
    for (int r = 1; r <= 4; ++r) {
        for (int j = 0; j <= 4; ++j) {
            // MC integration of (xi_1+...+xi_r)^j over the unit cube
            CounterRng rng(17, std::uint64_t(r * 16 + j));
            const int N = 200'000;
            double sum = 0, sumsq = 0;
            for (int s = 0; s < N; ++s) {
                double t = 0;
                for (int i = 0; i < r; ++i) t += rng.next_unit();
                double v = std::pow(t, j);
                sum += v;
                sumsq += v * v;
            }
            double mean = sum / N;
            double err = std::sqrt(std::max(sumsq / N - mean * mean, 0.0) / N);
            CHECK(std::abs(V_rj(r, j).to_double() - mean) < 3 * err + 1e-12);
        }
    }
}

TEST_CASE("p_r values and recurrence") {
    CHECK(p_r_eval(1, 0.0) == doctest::Approx(1.0));
    CHECK(p_r_eval(1, 5.0) == doctest::Approx(1.0));
    for (double t : {-1.0, 0.0, 0.5, 2.0}) CHECK(p_r_eval(2, t) == doctest::Approx(t - 1.0));
    CHECK(p_r_eval(3, 0.0) == doctest::Approx(1.0));
    // p_r(t) - t^{r-1}/(r-1)! = -p_{r-1}(t)
    for (int r = 2; r <= 5; ++r) {
        double fact = 1;
        for (int i = 2; i <= r - 1; ++i) fact *= i;
        for (double t : {-2.0, 0.0, 1.0, 3.0})
            CHECK(p_r_eval(r, t) - std::pow(t, r - 1) / fact ==
                  doctest::Approx(-p_r_eval(r - 1, t)).epsilon(1e-9));
    }
}

TEST_CASE("leading-constant fit on the divisor family") {
    FiberFamily div = divisor_family();
    std::vector<std::pair<double, double>> samples;
    for (double P : {1e5, 1e6, 1e7}) samples.push_back({P, upsilon(div, P)});
    FitResult fit = fit_leading_constant(samples, 2);
    CHECK(std::abs(fit.c_hat - 1.0) < 0.05);
    // the subleading coefficient approaches 2*gamma - 1
    CHECK(std::abs(fit.b - 0.1544) < 0.05);
}

TEST_CASE("leading-constant fit on the synthetic (2,1) family") {
    FiberFamily syn;
    syn.r = 2;
    syn.alpha = {2, 1};
    syn.h = [](std::span<const long long> x) { return 2.0 * double(x[0]); };
    std::vector<std::pair<double, double>> samples;
    for (double P : {1e5, 1e6, 1e7}) samples.push_back({P, upsilon(syn, P)});
    FitResult fit = fit_leading_constant(samples, 2);
    CHECK(std::abs(fit.c_hat - 1.0) < 0.1);
}

TEST_CASE("exact linear family at r = 1") {
    std::vector<std::pair<double, double>> samples = {{10, 10}, {100, 100}, {1000, 1000}};
    FitResult fit = fit_leading_constant(samples, 1);
    CHECK(fit.c_hat == doctest::Approx(1.0));
}

TEST_CASE("ill-conditioned sample sets are rejected") {
    std::vector<std::pair<double, double>> samples = {{100, 460}, {100, 460}, {100, 460}};
    CHECK_THROWS_AS(fit_leading_constant(samples, 2), ModelError);
}

TEST_CASE("upsilon over the toric fiber family reproduces the sandwich sums") {
    // plug the upper fiber function of pp1 cone 0 into the hyperbolic engine
    // with alpha_j = n_j - d_j and compare against the direct double loop
    const auto& lm = load_pp1();
    for (bool upper : {true, false}) {
        FiberFamily fam;
        fam.r = 2;
        fam.alpha = {1, 1};
        fam.h = [&](std::span<const long long> k) {
            return double(fiber_count(lm.model, lm.form, 0, {}, k, upper));
        };
        for (long long B : {4, 16, 36}) {
            double direct = 0;
            for (long long k1 = 1; k1 <= B; ++k1)
                for (long long k2 = 1; k1 * k2 <= B; ++k2) {
                    std::vector<long long> k = {k1, k2};
                    direct += double(fiber_count(lm.model, lm.form, 0, {}, k, upper));
                }
            CHECK(upsilon(fam, double(B)) == doctest::Approx(direct));
        }
    }
    // same on pp2 where the height exponents are (2,2)
    const auto& lm2 = load_pp2();
    FiberFamily fam2;
    fam2.r = 2;
    fam2.alpha = {2, 2};
    fam2.h = [&](std::span<const long long> k) {
        return double(fiber_count(lm2.model, lm2.form, 0, {}, k, true));
    };
    double direct2 = 0;
    for (long long k1 = 1; k1 * k1 <= 100; ++k1)
        for (long long k2 = 1; k1 * k1 * k2 * k2 <= 100; ++k2) {
            std::vector<long long> k = {k1, k2};
            direct2 += double(fiber_count(lm2.model, lm2.form, 0, {}, k, true));
        }
    CHECK(upsilon(fam2, 100.0) == doctest::Approx(direct2));
}
