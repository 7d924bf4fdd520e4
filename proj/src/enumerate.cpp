#include "toricount/enumerate.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <memory>
#include <thread>

namespace toricount {

namespace {

inline __int128 abs128(__int128 v) { return v < 0 ? -v : v; }

inline __int128 gcd128(__int128 a, __int128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline __int128 mono_eval(std::span<const long long> x, const Expo& expo) {
    __int128 p = 1;
    for (size_t i = 0; i < expo.size(); ++i)
        for (int e = 0; e < expo[i]; ++e) {
            p *= x[i];
            if (abs128(p) > (__int128(1) << 110)) throw OverflowError("monomial overflow");
        }
    return p;
}

long long ipow_checked(long long b, int e) {
    __int128 p = 1;
    while (e-- > 0) {
        p *= b;
        if (p > __int128(4e18)) throw BudgetExceeded("cell bound exceeds 2^62");
    }
    return (long long)p;
}

}  // namespace

bool is_torsor_point(const ToricModel& m, std::span<const long long> x) {
    __int128 g = 0;
    for (int ci = 0; ci < m.num_cones(); ++ci) {
        __int128 prod = 1;
        for (int i : m.off_rays(ci)) prod *= x[i];
        g = gcd128(g, prod);
        if (g == 1) return true;
    }
    return false;
}

__int128 height_wide(const ToricModel& m, std::span<const long long> x) {
    __int128 best = 0;
    for (int ci = 0; ci < m.num_cones(); ++ci) {
        __int128 v = abs128(mono_eval(x, m.divisor_D_sigma(ci)));
        if (v > best) best = v;
    }
    return best;
}

long long height(const ToricModel& m, std::span<const long long> x) {
    __int128 h = height_wide(m, x);
    if (h > __int128(9'000'000'000'000'000'000LL)) throw OverflowError("height exceeds 64 bits");
    return (long long)h;
}

int dominant_cone(const ToricModel& m, std::span<const long long> x) {
    __int128 best = -1;
    int arg = 0;
    for (int ci = 0; ci < m.num_cones(); ++ci) {
        __int128 v = abs128(mono_eval(x, m.divisor_D_sigma(ci)));
        if (v > best) {
            best = v;
            arg = ci;
        }
    }
    return arg;
}

namespace {

// Scans one fiber cell of one cone: the off-ray coordinates run over the
// annulus prod base^a <= |x_i| < prod (base+1)^a and are filtered by the exact
// condition |x^{E(n+j)}| in [base_j, base_j+1); cone coordinates run over
// boxes |x_i| <= prod (base+1)^a (or prod base^a when tight). When F is linear
// in some cone coordinate the innermost loop solves F = 0 instead of scanning.
class CellScanner {
public:
    CellScanner(const ToricModel& m, const QuasiForm* f, int ci, std::span<const long long> e,
                bool include_zero, bool tight_box)
        : m_(m), f_(f), ci_(ci), include_zero_(include_zero), tight_(tight_box) {
        nr_ = m.num_rays();
        e_.assign(e.begin(), e.end());
        if (e_.empty()) e_.assign(nr_, 1);
        if (int(e_.size()) != nr_)
            throw ModelError(ModelFault::BadFile, "divisibility vector must have n+r entries");
        for (long long v : e_)
            if (v < 1) throw ModelError(ModelFault::BadFile, "divisibility entries must be >= 1");
        off_ = m.off_rays(ci);
        beta_ = m.cone_beta(ci);
        for (const auto& row : beta_)
            for (int v : row)
                if (v < 0)
                    throw ModelError(ModelFault::NoSolution,
                                     "enumeration requires nonnegative inverse weight submatrices");
        if (include_zero_) {
            const auto& dsig = m.divisor_D_sigma(ci);
            for (int i : off_)
                if (dsig[i] <= 0)
                    throw ModelError(ModelFault::NoSolution,
                                     "boundary counting needs D(sigma) positive on off rays");
        }
        is_off_.assign(nr_, 0);
        for (int i : off_) is_off_[i] = 1;
        x_.assign(nr_, 0);
        values_.resize(nr_);
    }

    void run(std::span<const long long> base, std::atomic<long long>& budget,
             const std::function<void(std::span<const long long>)>& visit) {
        base_.assign(base.begin(), base.end());
        lo_.assign(nr_, 1);
        hi_.assign(nr_, 1);
        for (int i = 0; i < nr_; ++i) {
            __int128 lo = 1, hi = 1;
            for (int j = 0; j < m_.r; ++j) {
                int a = m_.weight[i][j];
                if (!a) continue;
                lo *= ipow_checked(base_[j], a);
                hi *= ipow_checked(base_[j] + 1, a);
                if (hi > __int128(4e18)) throw BudgetExceeded("cell bound exceeds 2^62");
            }
            lo_[i] = (long long)lo;
            hi_[i] = (long long)hi;
        }

        order_.clear();
        for (int i : off_) order_.push_back(i);
        for (int i = 0; i < nr_; ++i)
            if (!is_off_[i]) order_.push_back(i);

        // widest cone coordinate in which F is linear becomes the solved variable
        solve_ = -1;
        if (f_) {
            long long best = -1;
            for (int i = 0; i < nr_; ++i)
                if (!is_off_[i] && f_->degree_in(i) <= 1) {
                    long long range = (tight_ ? lo_[i] : hi_[i]) / e_[i];
                    if (range > best) {
                        best = range;
                        solve_ = i;
                    }
                }
            if (solve_ >= 0) order_.erase(std::find(order_.begin(), order_.end(), solve_));
        }

        double prefix = 1;
        for (int i : order_) prefix *= double(range_count(i));
        if (prefix > 4e18) throw BudgetExceeded("cell volume too large");
        charge(budget, (long long)prefix);

        for (int i : order_) fill_values(i);
        if (solve_ >= 0) fill_values(solve_);
        visit_ = &visit;
        budget_ = &budget;
        rec(0);
    }

private:
    static void charge(std::atomic<long long>& budget, long long amount) {
        if (budget.fetch_sub(amount, std::memory_order_relaxed) < amount)
            throw BudgetExceeded("enumeration work budget exceeded");
    }

    long long bound_of(int i) const { return (is_off_[i] || !tight_) ? hi_[i] : lo_[i]; }

    long long range_count(int i) const {
        long long n = 0;
        long long lo = 1;
        if (is_off_[i])
            lo = lo_[i];
        else if (include_zero_)
            n += 1;
        long long top = is_off_[i] ? bound_of(i) - 1 : bound_of(i);
        if (top >= lo) n += 2 * (top / e_[i] - (lo - 1) / e_[i]);
        return n;
    }

    void fill_values(int i) {
        auto& v = values_[i];
        v.clear();
        long long lo = 1;
        if (is_off_[i])
            lo = lo_[i];
        else if (include_zero_)
            v.push_back(0);
        long long top = is_off_[i] ? bound_of(i) - 1 : bound_of(i);
        long long first = ((lo + e_[i] - 1) / e_[i]) * e_[i];
        for (long long t = first; t <= top; t += e_[i]) {
            v.push_back(t);
            v.push_back(-t);
        }
    }

    bool fiber_ok() const {
        for (int j = 0; j < m_.r; ++j) {
            __int128 mj = 1;
            for (int l = 0; l < m_.r; ++l) {
                long long v = x_[off_[l]];
                __int128 a = v < 0 ? -v : v;
                for (int t = 0; t < beta_[j][l]; ++t) mj *= a;
            }
            if (mj != base_[j]) return false;
        }
        return true;
    }

    void rec(size_t depth) {
        if (depth == order_.size()) {
            leaf();
            return;
        }
        int i = order_[depth];
        bool check_fiber = depth + 1 == off_.size();
        for (long long v : values_[i]) {
            x_[i] = v;
            if (check_fiber && !fiber_ok()) continue;
            rec(depth + 1);
        }
    }

    void leaf() {
        if (solve_ < 0) {
            if (!f_ || f_->eval_int_wide(x_) == 0) (*visit_)(x_);
            return;
        }
        const int v = solve_;
        __int128 c0 = 0, c1 = 0;
        for (const auto& t : f_->terms) {
            __int128 p = t.coeff;
            for (int i = 0; i < nr_; ++i) {
                if (i == v) continue;
                for (int k = 0; k < t.expo[i]; ++k) {
                    p *= x_[i];
                    if (abs128(p) > (__int128(1) << 110)) throw OverflowError("term overflow");
                }
            }
            if (t.expo[v] == 0)
                c0 += p;
            else
                c1 += p;
        }
        if (c1 != 0) {
            if (c0 % c1 != 0) return;
            __int128 root = -(c0 / c1);
            if (abs128(root) > bound_of(v)) return;
            long long rv = (long long)root;
            if (rv == 0 && !include_zero_) return;
            if (rv % e_[v] != 0) return;
            x_[v] = rv;
            (*visit_)(x_);
        } else if (c0 == 0) {
            // F vanishes identically on this line; walk it
            charge(*budget_, (long long)values_[v].size());
            for (long long t : values_[v]) {
                x_[v] = t;
                (*visit_)(x_);
            }
        }
    }

    const ToricModel& m_;
    const QuasiForm* f_;
    int ci_;
    bool include_zero_;
    bool tight_;
    int nr_ = 0;
    std::vector<long long> e_;
    std::vector<int> off_;
    std::vector<std::vector<int>> beta_;
    std::vector<char> is_off_;
    std::vector<long long> base_, lo_, hi_, x_;
    std::vector<std::vector<long long>> values_;
    std::vector<int> order_;
    int solve_ = -1;
    const std::function<void(std::span<const long long>)>* visit_ = nullptr;
    std::atomic<long long>* budget_ = nullptr;
};

// all base vectors >= 1 with prod base_j^{n_j - d_j} <= B
void walk_bases(const ToricModel& m, long long B,
                const std::function<void(const std::vector<long long>&)>& out) {
    std::vector<int> nd(m.r);
    for (int j = 0; j < m.r; ++j) nd[j] = m.anticanonical[j] - m.degrees[j];
    std::vector<long long> base(m.r, 1);
    std::function<void(int, __int128)> rec = [&](int j, __int128 prod) {
        if (j == m.r) {
            out(base);
            return;
        }
        for (long long k = 1;; ++k) {
            __int128 p = prod;
            bool over = false;
            for (int t = 0; t < nd[j] && !over; ++t) {
                p *= k;
                if (p > B) over = true;
            }
            if (over) break;
            base[j] = k;
            rec(j + 1, p);
        }
        base[j] = 1;
    };
    rec(0, 1);
}

}  // namespace

CountRecord count_torsor(const ToricModel& m, const QuasiForm* f, long long B,
                         const CountOptions& opt) {
    if (B < 0) throw ModelError(ModelFault::BadFile, "B must be >= 0");
    CountRecord rec;
    rec.B = B;
    rec.per_cone.assign(m.num_cones(), 0);
    rec.all_nonzero = opt.all_nonzero;
    rec.coprime = opt.coprime;
    rec.used_polynomial = f != nullptr;
    rec.e = opt.e.empty() ? std::vector<long long>(m.num_rays(), 1) : opt.e;

    struct Job {
        int ci;
        std::vector<long long> base;
    };
    std::vector<Job> jobs;
    for (int ci = 0; ci < m.num_cones(); ++ci)
        walk_bases(m, B, [&](const std::vector<long long>& b) { jobs.push_back({ci, b}); });

    std::atomic<long long> budget{opt.budget};
    std::atomic<size_t> next{0};
    const int workers = std::max(1, opt.workers);
    std::vector<std::vector<long long>> per_worker(workers, std::vector<long long>(m.num_cones(), 0));
    std::vector<std::exception_ptr> errors(workers);

    auto work = [&](int w) {
        try {
            std::vector<std::unique_ptr<CellScanner>> scanners(m.num_cones());
            auto& counts = per_worker[w];
            int current_cone = -1;
            std::function<void(std::span<const long long>)> visit =
                [&](std::span<const long long> x) {
                    __int128 best = -1;
                    int arg = -1;
                    for (int ci = 0; ci < m.num_cones(); ++ci) {
                        __int128 v = abs128(mono_eval(x, m.divisor_D_sigma(ci)));
                        if (v > best) {
                            best = v;
                            arg = ci;
                        }
                    }
                    if (arg != current_cone) return;   // counted by its dominant cone only
                    if (best == 0 || best > B) return;
                    if (opt.coprime) {
                        if (!is_torsor_point(m, x)) return;
                    }
                    ++counts[current_cone];
                };
            for (size_t j; (j = next.fetch_add(1)) < jobs.size();) {
                const Job& job = jobs[j];
                if (!scanners[job.ci])
                    scanners[job.ci] = std::make_unique<CellScanner>(m, f, job.ci, rec.e,
                                                                     !opt.all_nonzero, true);
                current_cone = job.ci;
                scanners[job.ci]->run(job.base, budget, visit);
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    for (int ci = 0; ci < m.num_cones(); ++ci)
        for (int w = 0; w < workers; ++w) rec.per_cone[ci] += per_worker[w][ci];
    for (long long c : rec.per_cone) rec.total += c;
    rec.rational = Rat(rec.total, __int128(1) << m.r);
    return rec;
}

long long fiber_count(const ToricModel& m, const QuasiForm& f, int cone,
                      std::span<const long long> e, std::span<const long long> k, bool upper,
                      long long budget) {
    if (int(k.size()) != m.r) throw ModelError(ModelFault::BadFile, "k must have r entries");
    std::vector<long long> base(k.begin(), k.end());
    if (!upper)
        for (auto& b : base) --b;
    for (long long b : base)
        if (b < 1) return 0;   // |x^{E(n+j)}| >= 1 once all coordinates are nonzero
    // upper: fiber |x^{E(n+j)}| in [k_j, k_j+1) with boxes prod (k_j+1)^a;
    // lower: fiber in [k_j-1, k_j) with the cell's own boxes prod (k_j-1)^a,
    // which is what the summed lower bounds need to stay below the exact
    // per-cone count cell by cell
    CellScanner scan(m, &f, cone, e, false, !upper);
    long long count = 0;
    std::atomic<long long> bud{budget};
    std::function<void(std::span<const long long>)> visit =
        [&](std::span<const long long>) { ++count; };
    scan.run(base, bud, visit);
    return count;
}

long long cone_count(const ToricModel& m, const QuasiForm& f, int cone,
                     std::span<const long long> e, long long B, long long budget) {
    CellScanner scan(m, &f, cone, e, false, true);
    long long count = 0;
    std::atomic<long long> bud{budget};
    std::function<void(std::span<const long long>)> visit =
        [&](std::span<const long long>) { ++count; };
    walk_bases(m, B, [&](const std::vector<long long>& base) { scan.run(base, bud, visit); });
    return count;
}

}  // namespace toricount
