#pragma once

#include <span>

#include "clustervol/panel.hpp"

namespace clustervol {

inline constexpr double kAlpha1Max = 5.0;

struct Arch1MleFit {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double loglik = 0.0;
    bool converged = false;
};

// sum_t -0.5 ln(2 pi) - 0.5 ln s2_t - e_t^2 / (2 s2_t). Throws on s2_t <= 0.
double gaussian_loglik(std::span<const double> residuals, std::span<const double> sigma2);

// Conditional ARCH(1) log-likelihood over t >= 2 (sigma2_t = a0 + a1 e_{t-1}^2).
double arch1_loglik(std::span<const double> residuals, double alpha0, double alpha1);

// Maximum likelihood ARCH(1) over alpha0 > 0, alpha1 in [0, kAlpha1Max]:
// Nelder-Mead in (ln alpha0, logit(alpha1 / kAlpha1Max)) from four starts.
// Needs at least 8 nonconstant residuals; throws NonConvergence if no start
// reaches a finite optimum.
Arch1MleFit fit_arch1_mle(std::span<const double> residuals);

// P(chi2_1 > statistic) = erfc(sqrt(statistic / 2)).
double chi2_1_upper_tail(double statistic);

struct LrTestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject = false;
    OlsFit ar_fit;
    bool nonstationary = false;  // |phi| >= 1
    Arch1MleFit arch_fit;
    double loglik_null = 0.0;
};

// Univariate LR test of ARCH(1) against constant variance on the residuals
// of a CLS AR(1) fit. Needs at least 10 observations.
LrTestResult lr_test_arch(std::span<const double> series, double significance);

}  // namespace clustervol
