#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "toricount/model.hpp"
#include "toricount/qform.hpp"

namespace toricount {

class InsufficientHits : public std::runtime_error {
public:
    explicit InsufficientHits(const std::string& what) : std::runtime_error(what) {}
};

struct DensityEstimate {
    double value = 0.0;
    double std_error = 0.0;
    double imag = 0.0;         // oscillatory estimates carry an imaginary part
    double imag_error = 0.0;
    std::string method;
    std::uint64_t seed = 0;
    long long samples = 0;
    std::vector<double> eps;             // shell widths, outermost first
    std::vector<double> eps_values;      // raw shell estimate per width
    std::vector<long long> eps_hits;
};

// Archimedean estimators over the bounded per-cone regions
//   |u_i| <= |u^{E(i)}| for all i,   |u^{E(n+j)}| <= 1 for all j,
// every one of which lies inside [-1,1]^{n+r}.
class Archimedean {
public:
    Archimedean(const ToricModel& m, const QuasiForm& f);

    // acceptance-ratio volume of the cone region, with binomial error
    DensityEstimate region_volume(int cone, long long samples, std::uint64_t seed) const;

    // Monte Carlo I(beta) = integral of e(beta F(u)) over the cone region
    DensityEstimate I_beta(int cone, double beta, long long samples, std::uint64_t seed) const;

    // shell estimator vol{|F| <= eps}/(2 eps) with Richardson extrapolation to eps -> 0
    DensityEstimate leray_density(int cone, std::span<const double> eps, long long samples,
                                  std::uint64_t seed) const;

    // truncated oscillatory integral int_{|beta|<=phi} I(beta) dbeta, one MC pass
    DensityEstimate J_sigma_oscillatory(int cone, double phi, long long samples,
                                        std::uint64_t seed) const;

    // J = sum over maximal cones of J_sigma; shell method by default
    DensityEstimate J_total(std::span<const double> eps, long long samples_per_cone,
                            std::uint64_t seed, int workers = 1) const;
    DensityEstimate J_total_oscillatory(double phi, long long samples_per_cone,
                                        std::uint64_t seed, int workers = 1) const;

    bool in_region(int cone, std::span<const double> u) const;

private:
    const ToricModel& m_;
    const QuasiForm& f_;
};

// Generic shell estimator on [-1,1]^dim for an arbitrary function (the analytic
// reference cases); same estimator core as the toric one.
DensityEstimate shell_density_box(int dim, const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> eps, long long samples,
                                  std::uint64_t seed);

}  // namespace toricount
