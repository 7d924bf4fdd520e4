#include <doctest.h>

#include "toricount/mobius.hpp"
#include "test_models.hpp"

using namespace toricount;

namespace {

// independent inclusion-exclusion oracle over explicit subsets
int mu_oracle(const ToricModel& m, std::uint32_t s) {
    const int nr = m.num_rays();
    auto covered = [&](std::uint32_t t) {
        for (int c = 0; c < m.num_cones(); ++c) {
            bool sub = true;
            for (int i = 0; i < nr && sub; ++i)
                if ((t >> i & 1) && !m.ray_in_cone(c, i)) sub = false;
            if (sub) return 1;
        }
        return 0;
    };
    int total = 0;
    for (std::uint32_t t = s;; t = (t - 1) & s) {
        int diff = __builtin_popcount(s) - __builtin_popcount(t);
        total += (diff % 2 == 0 ? 1 : -1) * covered(t);
        if (t == 0) break;
    }
    return total;
}

}  // namespace

TEST_CASE("chi on the shipped models") {
    MobiusTable t1(load_pp1().model);
    CHECK(t1.chi(std::vector<long long>{1, 1, 1, 1}) == 1);
    CHECK(t1.chi(std::vector<long long>{2, 1, 2, 1}) == 0);
    MobiusTable t2(load_pp2().model);
    CHECK(t2.chi(std::vector<long long>{2, 1, 1, 1, 1, 1}) == 1);
}

TEST_CASE("mu_local matches the subset inclusion-exclusion oracle everywhere") {
    for (const auto* lm : {&load_pp1(), &load_pp2()}) {
        MobiusTable t(lm->model);
        const int nr = lm->model.num_rays();
        for (std::uint32_t s = 0; s < (1u << nr); ++s)
            CHECK(t.mu_local(s) == mu_oracle(lm->model, s));
    }
}

TEST_CASE("mu_local spot values") {
    MobiusTable t1(load_pp1().model);
    CHECK(t1.mu_local(0) == 1);
    CHECK(t1.mu_local(0b0101) == -1);   // {1,3}
    MobiusTable t2(load_pp2().model);
    CHECK(t2.mu_local(0b000111) == -1);   // {1,2,3}
    CHECK(t2.mu_local(0b000011) == 0);    // {1,2}
}

TEST_CASE("mu_local vanishes on nonempty covered patterns") {
    for (const auto* lm : {&load_pp1(), &load_pp2()}) {
        MobiusTable t(lm->model);
        const int nr = lm->model.num_rays();
        for (std::uint32_t s = 1; s < (1u << nr); ++s)
            if (t.pattern_covered(s)) CHECK(t.mu_local(s) == 0);
    }
}

TEST_CASE("mu_global spot values") {
    MobiusTable t(load_pp1().model);
    CHECK(t.mu_global(std::vector<long long>{1, 1, 1, 1}) == 1);
    CHECK(t.mu_global(std::vector<long long>{2, 1, 2, 1}) == -1);
    CHECK(t.mu_global(std::vector<long long>{6, 1, 6, 1}) == 1);
    CHECK(t.mu_global(std::vector<long long>{4, 1, 2, 1}) == 0);
}

TEST_CASE("mu_global is multiplicative over coprime supports") {
    MobiusTable t(load_pp2().model);
    std::vector<long long> d = {2, 1, 2, 1, 1, 1};
    std::vector<long long> e = {1, 3, 3, 1, 1, 1};
    std::vector<long long> de(6);
    for (int i = 0; i < 6; ++i) de[i] = d[i] * e[i];
    CHECK(t.mu_global(de) == t.mu_global(d) * t.mu_global(e));
}

TEST_CASE("exact Mobius identity on pp1 over divisors of 12") {
    const auto& lm = load_pp1();
    MobiusTable t(lm.model);
    const std::vector<long long> choices = {1, 2, 3, 4, 6, 12};
    std::vector<long long> e(4), d(4);
    for (long long a : choices)
        for (long long b : choices)
            for (long long c : choices)
                for (long long dd : choices) {
                    e = {a, b, c, dd};
                    long long total = 0;
                    // componentwise divisors of e with nonzero mu are squarefree 6-smooth
                    const std::vector<long long> divs = {1, 2, 3, 6};
                    for (long long u : divs)
                        for (long long v : divs)
                            for (long long w : divs)
                                for (long long z : divs) {
                                    d = {u, v, w, z};
                                    bool divides = true;
                                    for (int i = 0; i < 4; ++i)
                                        if (e[i] % d[i]) divides = false;
                                    if (divides) total += t.mu_global(d);
                                }
                    CHECK(total == t.chi(e));
                }
}

TEST_CASE("truncation report") {
    MobiusTable t1(load_pp1().model);
    auto rep1 = t1.mu_partial_sum_bound(100);
    CHECK(rep1.f == 2);
    CHECK(rep1.per_prime_factor > 1.0);
    CHECK(rep1.tail_estimate > 0.0);
    MobiusTable t2(load_pp2().model);
    CHECK(t2.mu_partial_sum_bound(100).f == 3);
}
