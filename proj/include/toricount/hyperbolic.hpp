#pragma once

#include <functional>
#include <span>
#include <vector>

#include "toricount/model.hpp"
#include "toricount/rational.hpp"

namespace toricount {

// A family of nonnegative fiber functions h on N^r summed over the hyperbolic
// region x^alpha <= P.
struct FiberFamily {
    int r = 0;
    std::vector<int> alpha;                                        // alpha_j >= 1
    std::function<double(std::span<const long long>)> h;           // fiber oracle
};

// Upsilon(P) = sum over x in N^r, prod x_j^{alpha_j} <= P, of h(x);
// nested loops with the pruning x_j <= (P / prod_{l<j} x_l^{alpha_l})^{1/alpha_j}.
double upsilon(const FiberFamily& fam, double P, long long budget = 4'000'000'000);

// V_{r,j} = int_{[0,1]^r} (xi_1+...+xi_r)^j dxi, exact via the multinomial sum
Rat V_rj(int r, int j);

// p_r(t) = sum_{l=0}^{r-1} (-1)^{r+1+l} t^l / l!
double p_r_eval(int r, double t);

struct FitResult {
    double c_hat = 0.0;       // a * (r-1)!, the estimated analytic leading constant
    double a = 0.0;           // leading coefficient of a P (log P)^{r-1}
    double b = 0.0;           // subleading coefficient of b P (log P)^{r-2}
    double residual = 0.0;    // rms relative residual of the fit
};

// least-squares fit of Upsilon(P) = a P (log P)^{r-1} + b P (log P)^{r-2}
FitResult fit_leading_constant(std::span<const std::pair<double, double>> samples, int r);

}  // namespace toricount
