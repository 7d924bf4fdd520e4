#include <doctest.h>

#include <cmath>
#include <complex>

#include "toricount/densities.hpp"
#include "test_models.hpp"

using namespace toricount;

namespace {

struct Ctx {
    const LoadedModel& lm;
    MobiusTable mob;
    LocalDensities loc;
    explicit Ctx(const LoadedModel& lm) : lm(lm), mob(lm.model), loc(lm.model, lm.form, mob) {}
};

Ctx& ctx1() {
    static Ctx c(load_pp1());
    return c;
}

Ctx& ctx2() {
    static Ctx c(load_pp2());
    return c;
}

// brute-force residue zero count, the independent oracle
long long zeros_mod(const QuasiForm& f, int nr, long long q) {
    std::vector<long long> x(nr, 0);
    long long cnt = 0;
    while (true) {
        if (f.eval_mod(x, std::uint32_t(q)) == 0) ++cnt;
        int i = 0;
        while (i < nr && ++x[i] == q) x[i++] = 0;
        if (i == nr) break;
    }
    return cnt;
}

// brute-force complete sum, the independent oracle
std::complex<double> complete_sum_oracle(const QuasiForm& f, int nr, long long a, long long q,
                                         std::span<const long long> e) {
    std::vector<long long> x(nr, 0), ex(nr);
    std::complex<double> s = 0;
    while (true) {
        for (int i = 0; i < nr; ++i) ex[i] = (e.empty() ? 1 : e[i]) * x[i];
        double ph = 2.0 * M_PI * double(a) * double(f.eval_mod(ex, std::uint32_t(q))) / double(q);
        s += std::complex<double>(std::cos(ph), std::sin(ph));
        int i = 0;
        while (i < nr && ++x[i] == q) x[i++] = 0;
        if (i == nr) break;
    }
    return s;
}

}  // namespace

TEST_CASE("complete sums: trivial and brute-forced values") {
    auto& c = ctx1();
    CHECK(c.loc.complete_sum(0, 1, {}).real() == doctest::Approx(1.0));
    // S_{0,q,e} = q^{n+r}
    CHECK(c.loc.complete_sum(0, 3, {}).real() == doctest::Approx(81.0));
    // q=2, a=1: 2 N(2) - 16 with N(2) = 10
    CHECK(zeros_mod(c.lm.form, 4, 2) == 10);
    CHECK(c.loc.complete_sum(1, 2, {}).real() == doctest::Approx(4.0));
    CHECK(c.loc.complete_sum(1, 2, {}).imag() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("complete sums match the direct oracle for small q") {
    auto& c = ctx1();
    for (long long q : {2, 3, 4, 5}) {
        for (long long a = 0; a < q; ++a) {
            auto got = c.loc.complete_sum(a, q, {});
            auto want = complete_sum_oracle(c.lm.form, 4, a, q, {});
            CHECK(std::abs(got - want) < 1e-6);
        }
    }
    // scaled e as well
    std::vector<long long> e = {2, 1, 1, 1};
    auto got = c.loc.complete_sum(1, 3, e);
    auto want = complete_sum_oracle(c.lm.form, 4, 1, 3, e);
    CHECK(std::abs(got - want) < 1e-6);
}

TEST_CASE("orthogonality: q^{-1} sum_t S_{t,q} = residue zero count") {
    auto& c = ctx1();
    for (long long q : {2, 3, 4, 6, 8, 9, 16}) {
        std::complex<double> total = 0;
        for (long long t = 0; t < q; ++t) total += c.loc.complete_sum(t, q, {});
        CHECK(total.real() / double(q) == doctest::Approx(double(zeros_mod(c.lm.form, 4, q))));
        CHECK(std::abs(total.imag()) < 1e-6);
    }
}

TEST_CASE("A(q): trivial value and the prime formula") {
    auto& c = ctx1();
    CHECK(c.loc.A_of_q(1, {}) == doctest::Approx(1.0));
    // split quadric in 4 variables: N(p) = p^3 + p^2 - p, so A(p) = 1/p - 1/p^2
    for (long long p : {2, 3, 5, 7}) {
        CHECK(zeros_mod(c.lm.form, 4, p) == p * p * p + p * p - p);
        CHECK(c.loc.A_of_q(p, {}) == doctest::Approx(1.0 / p - 1.0 / (p * p)).epsilon(1e-12));
    }
}

TEST_CASE("A(q) agrees with summed complete sums for q <= 8") {
    auto& c = ctx1();
    for (long long q = 2; q <= 8; ++q) {
        std::complex<double> s = 0;
        for (long long a = 0; a < q; ++a)
            if (std::gcd(a, q) == 1) s += c.loc.complete_sum(a, q, {});
        double want = s.real() / std::pow(double(q), 4);
        CHECK(std::abs(s.imag()) < 1e-8);
        CHECK(c.loc.A_of_q(q, {}) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("A(q) multiplicativity at (2,3)") {
    auto& c = ctx1();
    CHECK(c.loc.A_of_q(6, {}) ==
          doctest::Approx(c.loc.A_of_q(2, {}) * c.loc.A_of_q(3, {})).epsilon(1e-12));
}

TEST_CASE("m_star values against an in-test residue oracle") {
    auto& c1 = ctx1();
    // oracle: scan residues mod p^m, count zeros of F whose divisibility
    // pattern lies in some cone
    auto oracle = [](const Ctx& c, long long p, int m) {
        long long q = 1;
        for (int t = 0; t < m; ++t) q *= p;
        const int nr = c.lm.model.num_rays();
        std::vector<long long> x(nr, 0);
        long long cnt = 0;
        while (true) {
            if (c.lm.form.eval_mod(x, std::uint32_t(q)) == 0) {
                std::uint32_t pattern = 0;
                for (int i = 0; i < nr; ++i)
                    if (x[i] % p == 0) pattern |= 1u << i;
                if (c.mob.pattern_covered(pattern)) ++cnt;
            }
            int i = 0;
            while (i < nr && ++x[i] == q) x[i++] = 0;
            if (i == nr) break;
        }
        return cnt;
    };
    CHECK((long long)c1.loc.m_star(2, 1) == oracle(c1, 2, 1));
    CHECK((long long)c1.loc.m_star(2, 1) == 3);
    CHECK((long long)c1.loc.m_star(2, 2) == oracle(c1, 2, 2));
    CHECK((long long)c1.loc.m_star(3, 2) == oracle(c1, 3, 2));
    CHECK((long long)c1.loc.m_star(3, 2) == 432);   // 16/27 * 3^6
    auto& c2 = ctx2();
    CHECK((long long)c2.loc.m_star(2, 1) == oracle(c2, 2, 1));
    CHECK((long long)c2.loc.m_star(2, 1) == 21);
    CHECK((long long)c2.loc.m_star(3, 1) == 208);
    CHECK((long long)c2.loc.m_star(5, 1) == 2976);
}

TEST_CASE("hensel path agrees with the direct scan") {
    auto& c2 = ctx2();
    // budgets below the direct-scan cost but above the level-1 block cost
    // force the lift path; the results must match exactly
    CHECK((long long)c2.loc.m_star(2, 2, 100'000'000) == (long long)c2.loc.m_star(2, 2, 1000));
    CHECK((long long)c2.loc.m_star(3, 1, 100'000'000) == (long long)c2.loc.m_star(3, 1, 700));
    CHECK((long long)c2.loc.m_star(3, 2, 100'000'000) == (long long)c2.loc.m_star(3, 2, 3000));
    CHECK((long long)c2.loc.m_star(5, 2, 300'000'000) == (long long)c2.loc.m_star(5, 2, 2000));
}

TEST_CASE("sigma_p stabilizes for the shipped smooth forms") {
    auto& c1 = ctx1();
    auto rep = c1.loc.sigma_p(3, 2);
    REQUIRE(rep.values.size() == 2);
    CHECK(rep.values[0] == rep.values[1]);
    CHECK(rep.values[0] == Rat(16, 27));
    CHECK(rep.stabilized);

    auto& c2 = ctx2();
    auto rep2 = c2.loc.sigma_p(2, 3);
    CHECK(rep2.stabilized);
    CHECK(*rep2.stabilized_at == 2);
    CHECK(rep2.sigma == Rat(21, 32));
}

TEST_CASE("sigma_p values are exact rationals with p-power denominators") {
    auto& c2 = ctx2();
    for (long long p : {2, 3, 5}) {
        auto rep = c2.loc.sigma_p(p, 2);
        for (const auto& v : rep.values) {
            __int128 den = v.den();
            while (den % p == 0) den /= p;
            CHECK(den == 1);
        }
    }
}

TEST_CASE("m_star identity ties mu, A and M*") {
    auto& c1 = ctx1();
    for (long long p : {2, 3})
        for (int m : {1, 2}) CHECK(c1.loc.mstar_identity_check(p, m).ok);
    CHECK(c1.loc.mstar_identity_check(2, 0).ok);   // m = 0 edge: both sides 1
    auto& c2 = ctx2();
    CHECK(c2.loc.mstar_identity_check(2, 1).ok);
}

TEST_CASE("singular series: empty product and self-consistency") {
    auto& c2 = ctx2();
    auto empty = c2.loc.singular_series(1, 2);
    CHECK(empty.value == doctest::Approx(1.0));
    CHECK(std::isinf(empty.tail_bound));

    auto s50 = c2.loc.singular_series(50, 2);
    auto s97 = c2.loc.singular_series(97, 2);
    CHECK(std::abs(s97.value - s50.value) < s50.tail_bound);
    for (const auto& f : s50.factors) CHECK(f.stabilized);
}

TEST_CASE("budget exhaustion raises when no path fits") {
    auto& c1 = ctx1();
    CHECK_THROWS_AS(c1.loc.m_star(101, 3, 100), BudgetExceeded);
}
