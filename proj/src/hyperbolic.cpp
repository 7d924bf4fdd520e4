#include "toricount/hyperbolic.hpp"

#include <cmath>

namespace toricount {

namespace {

double rfact(int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

double upsilon(const FiberFamily& fam, double P, long long budget) {
    if (P < 1) return 0;
    if (fam.r < 1 || int(fam.alpha.size()) != fam.r)
        throw ModelError(ModelFault::BadFile, "upsilon: alpha must have r entries");
    for (int a : fam.alpha)
        if (a < 1) throw ModelError(ModelFault::BadFile, "upsilon: alpha_j >= 1 required");
    std::vector<long long> x(fam.r, 1);
    double total = 0;
    long long used = 0;
    // nested loops over x_1..x_r with the remaining-budget pruning
    std::function<void(int, double)> rec = [&](int j, double rem) {
        if (j == fam.r) {
            total += fam.h(x);
            return;
        }
        for (long long v = 1;; ++v) {
            double pw = std::pow(double(v), fam.alpha[j]);
            if (pw > rem * (1 + 1e-12)) break;
            if (++used > budget) throw BudgetExceeded("upsilon: work budget exceeded");
            x[j] = v;
            rec(j + 1, rem / pw);
        }
        x[j] = 1;
    };
    rec(0, P);
    return total;
}

Rat V_rj(int r, int j) {
    if (r < 1 || j < 0) throw ModelError(ModelFault::BadFile, "V_rj: need r >= 1, j >= 0");
    // sum over compositions a_1+...+a_r = j of  j! / prod a_i! / prod (a_i + 1)
    Rat total(0);
    std::function<void(int, int, Rat)> rec = [&](int i, int left, Rat partial) {
        // partial carries j!/(a_1! ... a_{i-1}!) * 1/((a_1+1)...(a_{i-1}+1))
        if (i == r - 1) {
            Rat term = partial;
            for (int t = 2; t <= left; ++t) term = term / Rat(t);   // a_r! division
            term = term / Rat(left + 1);
            total = total + term;
            return;
        }
        for (int v = 0; v <= left; ++v) {
            Rat t = partial;
            for (int k = 2; k <= v; ++k) t = t / Rat(k);
            t = t / Rat(v + 1);
            rec(i + 1, left - v, t);
        }
    };
    Rat jfact(1);
    for (int t = 2; t <= j; ++t) jfact = jfact * Rat(t);
    if (r == 1) {
        return Rat(1, j + 1);
    }
    rec(0, j, jfact);
    return total;
}

double p_r_eval(int r, double t) {
    if (r < 1) throw ModelError(ModelFault::BadFile, "p_r_eval: r >= 1");
    double acc = 0, tp = 1, lf = 1;
    for (int l = 0; l <= r - 1; ++l) {
        double sign = ((r + 1 + l) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * tp / lf;
        tp *= t;
        lf *= (l + 1);
    }
    return acc;
}

FitResult fit_leading_constant(std::span<const std::pair<double, double>> samples, int r) {
    if (samples.size() < 3)
        throw ModelError(ModelFault::BadFile, "fit_leading_constant: need >= 3 samples");
    // design: Upsilon = a P L^{r-1} + b P L^{r-2}, L = log P
    double s11 = 0, s12 = 0, s22 = 0, t1 = 0, t2 = 0;
    for (auto [P, y] : samples) {
        double L = std::log(P);
        double f1 = P * std::pow(L, r - 1);
        double f2 = r >= 2 ? P * std::pow(L, r - 2) : 0.0;
        s11 += f1 * f1;
        s12 += f1 * f2;
        s22 += f2 * f2;
        t1 += f1 * y;
        t2 += f2 * y;
    }
    FitResult out;
    if (r == 1) {
        out.a = t1 / s11;
        out.b = 0;
    } else {
        double det = s11 * s22 - s12 * s12;
        double scale = std::max({std::abs(s11), std::abs(s22), 1.0});
        if (std::abs(det) < 1e-12 * scale * scale)
            throw ModelError(ModelFault::NoSolution,
                             "IllConditioned: sample P values too close for the two-term fit");
        out.a = (t1 * s22 - t2 * s12) / det;
        out.b = (s11 * t2 - s12 * t1) / det;
    }
    out.c_hat = out.a * rfact(r - 1);
    double ss = 0;
    for (auto [P, y] : samples) {
        double L = std::log(P);
        double fit = out.a * P * std::pow(L, r - 1) + (r >= 2 ? out.b * P * std::pow(L, r - 2) : 0.0);
        if (y != 0) ss += (fit - y) / y * ((fit - y) / y);
    }
    out.residual = std::sqrt(ss / double(samples.size()));
    return out;
}

}  // namespace toricount
