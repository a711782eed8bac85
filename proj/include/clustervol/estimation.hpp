#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clustervol/matrix.hpp"
#include "clustervol/panel.hpp"

namespace clustervol {

struct BackfitOptions {
    std::size_t resamples = 500;  // R, bootstrap resamples of the per-series phi estimates
    double epsilon = 1e-4;
    std::size_t max_iterations = 50;
    std::uint64_t seed = 1;

    void validate() const;
};

// Unconstrained ARCH(1) coefficient estimates; negative values are allowed.
struct ArchEstimate {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    friend bool operator==(const ArchEstimate&, const ArchEstimate&) = default;
};

struct FittedModel {
    double phi_hat = 0.0;                   // bootstrap-aggregated common AR coefficient
    std::vector<double> phi_boot;           // R resample means
    std::vector<double> phi_series;         // per-series CLS slopes (NaN where degenerate)
    std::vector<double> lambda_hat;         // per-series random effects
    std::vector<ArchEstimate> arch_series;  // per-series ARCH OLS
    std::vector<ArchEstimate> arch_hat;     // per-cluster means
    Matrix residuals_star3;                 // r***, N x (T-1), columns are t = 2..T
    std::size_t iterations = 0;
    bool converged = false;
    double last_change = 0.0;  // max |parameter change| in the final iteration

    friend bool operator==(const FittedModel&, const FittedModel&) = default;
};

struct Residuals {
    Matrix r_star;   // Y_it - lambda_i
    Matrix r_star2;  // Y_it - phi * Y_i,t-1
    Matrix r_star3;  // Y_it - lambda_i - phi * Y_i,t-1
};

struct PhiBootstrap {
    double phi_hat = 0.0;
    std::vector<double> phi_boot;
};

// Per-series mean over all T observations.
std::vector<double> initialize_random_effects(const Panel& panel);

// Per-series mean of the current residual rows.
std::vector<double> estimate_random_effects(const Matrix& residuals);

// Conditional least squares AR(1): regress y_t on y_{t-1}, t = 2..T.
OlsFit cls_ar1(std::span<const double> series);

// R resamples of size N with replacement; phi_boot holds the resample means
// and phi_hat their mean.
PhiBootstrap bootstrap_phi(std::span<const double> phi_estimates, std::size_t resamples,
                           std::uint64_t seed);

// All three residual forms for t = 2..T. r_star is returned over t = 2..T
// as well so the matrices line up column for column.
Residuals compute_residuals(const Panel& panel, std::span<const double> lambda_hat, double phi_hat);

// OLS of u_t^2 on u_{t-1}^2 with u = r***; falls back to (mean u^2, 0) when
// the lagged squares have no variance.
ArchEstimate arch_ols_per_series(std::span<const double> r_star3);

// Cluster means of the per-series estimates.
std::vector<ArchEstimate> aggregate_cluster_arch(std::span<const ArchEstimate> per_series,
                                                 const Panel& panel);

// Iterates random effects -> CLS + phi bootstrap -> residuals -> ARCH OLS
// until no parameter moves by epsilon or max_iterations is hit.
// Throws AllSeriesDegenerate when no series admits a CLS fit.
FittedModel backfit(const Panel& panel, const BackfitOptions& options);

}  // namespace clustervol
