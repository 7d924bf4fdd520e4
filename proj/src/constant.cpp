#include "toricount/constant.hpp"

#include <cmath>

#include "toricount/mobius.hpp"

namespace toricount {

Rat alpha_of(const ToricModel& m) {
    __int128 den = 1;
    for (int t = 2; t <= m.r - 1; ++t) den *= t;
    for (int j = 0; j < m.r; ++j) den *= (m.anticanonical[j] - m.degrees[j]);
    return Rat(1, den);
}

ConstantBreakdown assemble_constant(const ToricModel& m, const QuasiForm& f,
                                    const SeriesConfig& series_cfg,
                                    const DensityConfig& density_cfg) {
    ConstantBreakdown out;
    out.r = m.r;
    out.alpha = alpha_of(m);
    out.beta = 1;   // split torus: Galois acts trivially on Pic

    MobiusTable mob(m);
    LocalDensities loc(m, f, mob);
    out.series = loc.singular_series(series_cfg.prime_bound, series_cfg.m_max, series_cfg.budget);

    Archimedean arch(m, f);
    out.J = arch.J_total(density_cfg.eps, density_cfg.samples, density_cfg.seed,
                         density_cfg.workers);

    double fact = 1;
    for (int t = 2; t <= m.r - 1; ++t) fact *= t;
    double nd = 1;
    for (int j = 0; j < m.r; ++j) nd *= (m.anticanonical[j] - m.degrees[j]);
    double twor = std::pow(2.0, m.r);

    out.tau_H = (1.0 / twor) * nd * out.series.value * out.J.value;
    out.C = (1.0 / twor) * (1.0 / fact) * out.series.value * out.J.value;
    out.C_error = (1.0 / twor) * (1.0 / fact) * out.series.value * out.J.std_error;

    // internal identity: alpha * beta * tau_H == C
    double lhs = out.alpha.to_double() * out.beta * out.tau_H;
    if (std::abs(lhs - out.C) > 1e-12 * std::max(std::abs(out.C), 1.0))
        throw std::logic_error("constant identity alpha*beta*tau_H != C");
    return out;
}

double predict(const ConstantBreakdown& b, double B) {
    if (B <= 1) throw ModelError(ModelFault::BadFile, "predict: B must be > 1");
    return b.C * B * std::pow(std::log(B), b.r - 1);
}

}  // namespace toricount
