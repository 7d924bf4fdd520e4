#include "toricount/archimedean.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "toricount/rng.hpp"

namespace toricount {

namespace {

constexpr long long kBatch = 1 << 16;

// Deterministic batched reduction: batch b draws from stream (seed, stream_hi | b)
// and partial results merge in batch order, independent of the worker count.
template <class State>
void run_batches(long long samples, int workers, std::uint64_t seed, std::uint64_t stream_hi,
                 const std::function<void(CounterRng&, long long, State&)>& body,
                 const std::function<void(const State&)>& merge) {
    const long long nbatch = (samples + kBatch - 1) / kBatch;
    std::vector<State> partial(nbatch);
    std::atomic<long long> next{0};
    auto work = [&]() {
        for (long long b; (b = next.fetch_add(1)) < nbatch;) {
            CounterRng rng(seed, stream_hi << 20 | std::uint64_t(b));
            long long count = std::min(kBatch, samples - b * kBatch);
            body(rng, count, partial[b]);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& s : partial) merge(s);
}

struct MomentState {
    double sum = 0, sumsq = 0;
    double sum_im = 0, sumsq_im = 0;
    long long n = 0;
};

}  // namespace

Archimedean::Archimedean(const ToricModel& m, const QuasiForm& f) : m_(m), f_(f) {
    if (m.r > 16) throw BudgetExceeded("Archimedean: Picard rank above 16 unsupported");
}

bool Archimedean::in_region(int cone, std::span<const double> u) const {
    const int nr = m_.num_rays();
    const auto& off = m_.off_rays(cone);
    const auto& beta = m_.cone_beta(cone);
    double mval[16];
    for (int j = 0; j < m_.r; ++j) {
        double v = 1;
        for (int l = 0; l < m_.r; ++l) {
            double a = std::abs(u[off[l]]);
            for (int t = 0; t < beta[j][l]; ++t) v *= a;
            for (int t = 0; t > beta[j][l]; --t) v /= a;
        }
        if (v > 1.0) return false;
        mval[j] = v;
    }
    for (int i = 0; i < nr; ++i) {
        double lim = 1;
        for (int j = 0; j < m_.r; ++j)
            for (int t = 0; t < m_.weight[i][j]; ++t) lim *= mval[j];
        if (std::abs(u[i]) > lim) return false;
    }
    return true;
}

DensityEstimate Archimedean::region_volume(int cone, long long samples, std::uint64_t seed) const {
    DensityEstimate est;
    est.method = "volume";
    est.seed = seed;
    est.samples = samples;
    if (samples <= 0) {
        est.value = std::numeric_limits<double>::quiet_NaN();
        return est;
    }
    const int nr = m_.num_rays();
    const double box = std::pow(2.0, nr);
    long long hits = 0;
    std::function<void(CounterRng&, long long, long long&)> body =
        [&](CounterRng& rng, long long count, long long& acc) {
            std::vector<double> u(nr);
            for (long long s = 0; s < count; ++s) {
                for (auto& v : u) v = rng.next_sym();
                if (in_region(cone, u)) ++acc;
            }
        };
    std::function<void(const long long&)> merge = [&](const long long& acc) { hits += acc; };
    run_batches<long long>(samples, 1, seed, std::uint64_t(cone), body, merge);
    double p = double(hits) / double(samples);
    est.value = box * p;
    est.std_error = box * std::sqrt(std::max(p * (1 - p), 0.0) / double(samples));
    return est;
}

DensityEstimate Archimedean::I_beta(int cone, double beta, long long samples,
                                    std::uint64_t seed) const {
    if (samples < 1000)
        throw ModelError(ModelFault::BadFile, "I_beta: need at least 1000 samples");
    const int nr = m_.num_rays();
    const double box = std::pow(2.0, nr);
    MomentState total;
    std::function<void(CounterRng&, long long, MomentState&)> body =
        [&](CounterRng& rng, long long count, MomentState& st) {
            std::vector<double> u(nr);
            for (long long s = 0; s < count; ++s) {
                for (auto& v : u) v = rng.next_sym();
                double re = 0, im = 0;
                if (in_region(cone, u)) {
                    double ph = 2.0 * std::numbers::pi * beta * f_.eval_real(u);
                    re = std::cos(ph);
                    im = std::sin(ph);
                }
                st.sum += re;
                st.sumsq += re * re;
                st.sum_im += im;
                st.sumsq_im += im * im;
                ++st.n;
            }
        };
    std::function<void(const MomentState&)> merge = [&](const MomentState& st) {
        total.sum += st.sum;
        total.sumsq += st.sumsq;
        total.sum_im += st.sum_im;
        total.sumsq_im += st.sumsq_im;
        total.n += st.n;
    };
    run_batches<MomentState>(samples, 1, seed, std::uint64_t(cone) + 101, body, merge);

    DensityEstimate est;
    est.method = "ibeta";
    est.seed = seed;
    est.samples = samples;
    double mean = total.sum / double(total.n);
    double var = std::max(total.sumsq / double(total.n) - mean * mean, 0.0);
    est.value = box * mean;
    est.std_error = box * std::sqrt(var / double(total.n));
    double mean_im = total.sum_im / double(total.n);
    double var_im = std::max(total.sumsq_im / double(total.n) - mean_im * mean_im, 0.0);
    est.imag = box * mean_im;
    est.imag_error = box * std::sqrt(var_im / double(total.n));
    return est;
}

namespace {

struct ShellState {
    std::vector<long long> hits;
};

DensityEstimate shell_core(int dim, const std::function<bool(std::span<const double>)>& accept,
                           const std::function<double(std::span<const double>)>& f,
                           std::span<const double> eps, long long samples, std::uint64_t seed,
                           std::uint64_t stream_hi) {
    if (eps.size() < 2)
        throw ModelError(ModelFault::BadFile, "shell estimator needs at least two eps values");
    for (size_t i = 1; i < eps.size(); ++i)
        if (eps[i] >= eps[i - 1])
            throw ModelError(ModelFault::BadFile, "eps list must be strictly decreasing");
    const double box = std::pow(2.0, dim);
    const size_t ne = eps.size();
    std::vector<long long> hits(ne, 0);
    std::function<void(CounterRng&, long long, ShellState&)> body =
        [&](CounterRng& rng, long long count, ShellState& st) {
            st.hits.assign(ne, 0);
            std::vector<double> u(dim);
            for (long long s = 0; s < count; ++s) {
                for (auto& v : u) v = rng.next_sym();
                if (!accept(u)) continue;
                double fv = std::abs(f(u));
                for (size_t k = 0; k < ne; ++k)
                    if (fv <= eps[k]) ++st.hits[k];
            }
        };
    std::function<void(const ShellState&)> merge = [&](const ShellState& st) {
        for (size_t k = 0; k < ne; ++k) hits[k] += st.hits[k];
    };
    run_batches<ShellState>(samples, 1, seed, stream_hi, body, merge);

    DensityEstimate est;
    est.method = "shell";
    est.seed = seed;
    est.samples = samples;
    est.eps.assign(eps.begin(), eps.end());
    std::vector<double> vals(ne), errs(ne);
    for (size_t k = 0; k < ne; ++k) {
        double p = double(hits[k]) / double(samples);
        vals[k] = box * p / (2 * eps[k]);
        errs[k] = box * std::sqrt(std::max(p * (1 - p), 0.0) / double(samples)) / (2 * eps[k]);
        est.eps_values.push_back(vals[k]);
        est.eps_hits.push_back(hits[k]);
    }
    if (hits[ne - 1] < 100)
        throw InsufficientHits("shell estimator: only " + std::to_string(hits[ne - 1]) +
                               " samples in the smallest shell");
    // linear-in-eps Richardson step through the two smallest widths
    double e1 = eps[ne - 1], e2 = eps[ne - 2];
    double alpha = e2 / (e2 - e1), gamma = e1 / (e2 - e1);
    est.value = alpha * vals[ne - 1] - gamma * vals[ne - 2];
    est.std_error = std::hypot(alpha * errs[ne - 1], gamma * errs[ne - 2]);
    return est;
}

}  // namespace

DensityEstimate Archimedean::leray_density(int cone, std::span<const double> eps,
                                           long long samples, std::uint64_t seed) const {
    auto accept = [this, cone](std::span<const double> u) { return in_region(cone, u); };
    auto fv = [this](std::span<const double> u) { return f_.eval_real(u); };
    return shell_core(m_.num_rays(), accept, fv, eps, samples, seed, std::uint64_t(cone) + 301);
}

DensityEstimate shell_density_box(int dim, const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> eps, long long samples,
                                  std::uint64_t seed) {
    auto accept = [](std::span<const double>) { return true; };
    return shell_core(dim, accept, f, eps, samples, seed, 977);
}

DensityEstimate Archimedean::J_sigma_oscillatory(int cone, double phi, long long samples,
                                                 std::uint64_t seed) const {
    // int_{|beta|<=phi} I(beta) dbeta = int_region sin(2 pi phi F)/(pi F) du
    const int nr = m_.num_rays();
    const double box = std::pow(2.0, nr);
    MomentState total;
    std::function<void(CounterRng&, long long, MomentState&)> body =
        [&](CounterRng& rng, long long count, MomentState& st) {
            std::vector<double> u(nr);
            for (long long s = 0; s < count; ++s) {
                for (auto& v : u) v = rng.next_sym();
                double val = 0;
                if (in_region(cone, u)) {
                    double fv = f_.eval_real(u);
                    double z = 2.0 * std::numbers::pi * phi * fv;
                    val = std::abs(z) < 1e-9 ? 2.0 * phi
                                             : std::sin(z) / (std::numbers::pi * fv);
                }
                st.sum += val;
                st.sumsq += val * val;
                ++st.n;
            }
        };
    std::function<void(const MomentState&)> merge = [&](const MomentState& st) {
        total.sum += st.sum;
        total.sumsq += st.sumsq;
        total.n += st.n;
    };
    run_batches<MomentState>(samples, 1, seed, std::uint64_t(cone) + 601, body, merge);

    DensityEstimate est;
    est.method = "oscillatory";
    est.seed = seed;
    est.samples = samples;
    double mean = total.sum / double(total.n);
    double var = std::max(total.sumsq / double(total.n) - mean * mean, 0.0);
    est.value = box * mean;
    est.std_error = box * std::sqrt(var / double(total.n));
    return est;
}

DensityEstimate Archimedean::J_total(std::span<const double> eps, long long samples_per_cone,
                                     std::uint64_t seed, int workers) const {
    DensityEstimate out;
    out.method = "shell";
    out.seed = seed;
    out.samples = samples_per_cone;
    out.eps.assign(eps.begin(), eps.end());
    double err2 = 0;
    std::vector<DensityEstimate> parts(m_.num_cones());
    std::atomic<int> next{0};
    auto work = [&]() {
        for (int c; (c = next.fetch_add(1)) < m_.num_cones();)
            parts[c] = leray_density(c, eps, samples_per_cone, seed);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& p : parts) {
        out.value += p.value;
        err2 += p.std_error * p.std_error;
    }
    out.std_error = std::sqrt(err2);
    return out;
}

DensityEstimate Archimedean::J_total_oscillatory(double phi, long long samples_per_cone,
                                                 std::uint64_t seed, int workers) const {
    DensityEstimate out;
    out.method = "oscillatory";
    out.seed = seed;
    out.samples = samples_per_cone;
    double err2 = 0;
    std::vector<DensityEstimate> parts(m_.num_cones());
    std::atomic<int> next{0};
    auto work = [&]() {
        for (int c; (c = next.fetch_add(1)) < m_.num_cones();)
            parts[c] = J_sigma_oscillatory(c, phi, samples_per_cone, seed);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& p : parts) {
        out.value += p.value;
        err2 += p.std_error * p.std_error;
    }
    out.std_error = std::sqrt(err2);
    return out;
}

}  // namespace toricount
