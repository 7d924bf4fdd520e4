#pragma once

#include "toricount/archimedean.hpp"
#include "toricount/densities.hpp"
#include "toricount/model.hpp"
#include "toricount/rational.hpp"

namespace toricount {

struct ConstantBreakdown {
    Rat alpha;                 // 1/((r-1)! prod_j (n_j - d_j))
    int beta = 1;              // trivial Galois action on Pic for split models
    SeriesResult series;       // truncated singular series
    DensityEstimate J;         // archimedean factor, sum over cones
    double tau_H = 0.0;        // (1/2^r) prod(n_j-d_j) * S * J
    double C = 0.0;            // (1/2^r) (1/(r-1)!) * S * J
    double C_error = 0.0;      // from the J Monte Carlo error
    int r = 0;
};

struct SeriesConfig {
    long long prime_bound = 100;
    int m_max = 3;
    long long budget = LocalDensities::kDefaultBudget;
};

struct DensityConfig {
    std::vector<double> eps = {1e-2, 1e-3};
    long long samples = 1'000'000;
    std::uint64_t seed = 42;
    int workers = 1;
};

Rat alpha_of(const ToricModel& m);

ConstantBreakdown assemble_constant(const ToricModel& m, const QuasiForm& f,
                                    const SeriesConfig& series_cfg, const DensityConfig& density_cfg);

// C * B * (log B)^{r-1}
double predict(const ConstantBreakdown& breakdown, double B);

}  // namespace toricount
