#include "clustervol/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "clustervol/error.hpp"
#include "clustervol/kernels.hpp"
#include "clustervol/rng.hpp"

namespace clustervol {

void BackfitOptions::validate() const {
    if (resamples < 1) throw InvalidInput("backfit: R must be >= 1");
    if (!(epsilon > 0.0)) throw InvalidInput("backfit: epsilon must be > 0");
    if (max_iterations < 1) throw InvalidInput("backfit: max_iterations must be >= 1");
}

std::vector<double> initialize_random_effects(const Panel& panel) {
    std::vector<double> lambda(panel.series_count());
    for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] = mean(panel.series(i));
    return lambda;
}

std::vector<double> estimate_random_effects(const Matrix& residuals) {
    std::vector<double> lambda(residuals.rows());
    for (std::size_t i = 0; i < lambda.size(); ++i) lambda[i] = mean(residuals.row(i));
    return lambda;
}

OlsFit cls_ar1(std::span<const double> series) {
    if (series.size() < 3) throw InvalidInput("cls_ar1: need at least three observations");
    return ols_fit(series.first(series.size() - 1), series.subspan(1));
}

PhiBootstrap bootstrap_phi(std::span<const double> phi_estimates, std::size_t resamples,
                           std::uint64_t seed) {
    if (phi_estimates.empty()) throw InvalidInput("bootstrap_phi: no estimates to resample");
    if (resamples < 1) throw InvalidInput("bootstrap_phi: R must be >= 1");

    const std::size_t n = phi_estimates.size();
    Engine engine = make_engine(seed, {});
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    PhiBootstrap out;
    out.phi_boot.resize(resamples);
    for (auto& m : out.phi_boot) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += phi_estimates[pick(engine)];
        m = s / static_cast<double>(n);
    }
    out.phi_hat = mean(out.phi_boot);
    // A mean of means of the inputs cannot leave their range; rounding can.
    const auto [lo, hi] = std::minmax_element(phi_estimates.begin(), phi_estimates.end());
    out.phi_hat = std::clamp(out.phi_hat, *lo, *hi);
    return out;
}

Residuals compute_residuals(const Panel& panel, std::span<const double> lambda_hat, double phi_hat) {
    const std::size_t n = panel.series_count();
    const std::size_t cols = panel.length() - 1;
    if (lambda_hat.size() != n) throw InvalidInput("compute_residuals: one lambda per series");

    Residuals r{Matrix(n, cols), Matrix(n, cols), Matrix(n, cols)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto y = panel.series(i);
        const auto cur = y.subspan(1);
        const auto lag = y.first(cols);
        kernels::affine_residual(cur, lag, lambda_hat[i], 0.0, r.r_star.row(i));
        kernels::affine_residual(cur, lag, 0.0, phi_hat, r.r_star2.row(i));
        kernels::affine_residual(cur, lag, lambda_hat[i], phi_hat, r.r_star3.row(i));
    }
    return r;
}

ArchEstimate arch_ols_per_series(std::span<const double> r_star3) {
    if (r_star3.size() < 2) throw InvalidInput("arch_ols_per_series: need at least two residuals");
    std::vector<double> sq(r_star3.size());
    kernels::square(r_star3, sq);
    const std::span<const double> u2(sq);
    try {
        const OlsFit fit = ols_fit(u2.first(u2.size() - 1), u2.subspan(1));
        return {fit.intercept, fit.slope};
    } catch (const DegenerateRegressor&) {
        return {mean(u2), 0.0};
    }
}

std::vector<ArchEstimate> aggregate_cluster_arch(std::span<const ArchEstimate> per_series,
                                                 const Panel& panel) {
    if (per_series.size() != panel.series_count())
        throw InvalidInput("aggregate_cluster_arch: one estimate per series required");
    std::vector<ArchEstimate> out(panel.cluster_count());
    for (const auto& cluster : panel.clusters()) {
        // Members are visited in index order, so the sum is reproducible.
        ArchEstimate& acc = out[cluster.index];
        for (std::size_t i : cluster.members) {
            acc.alpha0 += per_series[i].alpha0;
            acc.alpha1 += per_series[i].alpha1;
        }
        const auto size = static_cast<double>(cluster.size());
        acc.alpha0 /= size;
        acc.alpha1 /= size;
    }
    return out;
}

namespace {

double max_abs_change(const FittedModel& prev, const FittedModel& next) {
    double change = std::abs(next.phi_hat - prev.phi_hat);
    for (std::size_t i = 0; i < next.lambda_hat.size(); ++i)
        change = std::max(change, std::abs(next.lambda_hat[i] - prev.lambda_hat[i]));
    for (std::size_t k = 0; k < next.arch_hat.size(); ++k) {
        change = std::max(change, std::abs(next.arch_hat[k].alpha0 - prev.arch_hat[k].alpha0));
        change = std::max(change, std::abs(next.arch_hat[k].alpha1 - prev.arch_hat[k].alpha1));
    }
    return change;
}

}  // namespace

FittedModel backfit(const Panel& panel, const BackfitOptions& options) {
    options.validate();
    const std::size_t n = panel.series_count();
    const std::size_t t_len = panel.length();

    FittedModel model;
    Matrix r_star2;  // previous iteration's r**, source of the random effects
    Matrix r_star(n, t_len);
    std::vector<double> admitted;
    admitted.reserve(n);

    for (std::size_t iter = 1; iter <= options.max_iterations; ++iter) {
        FittedModel next;
        next.lambda_hat =
            iter == 1 ? initialize_random_effects(panel) : estimate_random_effects(r_star2);

        for (std::size_t i = 0; i < n; ++i) {
            const auto y = panel.series(i);
            auto row = r_star.row(i);
            for (std::size_t t = 0; t < t_len; ++t) row[t] = y[t] - next.lambda_hat[i];
        }

        next.phi_series.assign(n, std::numeric_limits<double>::quiet_NaN());
        admitted.clear();
        for (std::size_t i = 0; i < n; ++i) {
            try {
                next.phi_series[i] = cls_ar1(r_star.row(i)).slope;
                admitted.push_back(next.phi_series[i]);
            } catch (const DegenerateRegressor&) {
            }
        }
        if (admitted.empty()) throw AllSeriesDegenerate();

        // Same resampling indices every iteration: with fresh draws phi_hat
        // would wander by its Monte Carlo error and never settle below epsilon.
        auto boot = bootstrap_phi(admitted, options.resamples, options.seed);
        next.phi_hat = boot.phi_hat;
        next.phi_boot = std::move(boot.phi_boot);

        Residuals res = compute_residuals(panel, next.lambda_hat, next.phi_hat);
        next.arch_series.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            next.arch_series[i] = arch_ols_per_series(res.r_star3.row(i));
        next.arch_hat = aggregate_cluster_arch(next.arch_series, panel);
        next.residuals_star3 = std::move(res.r_star3);
        r_star2 = std::move(res.r_star2);
        next.iterations = iter;

        if (iter > 1) {
            next.last_change = max_abs_change(model, next);
            next.converged = next.last_change < options.epsilon;
        }
        model = std::move(next);
        if (model.converged) break;
    }
    return model;
}

}  // namespace clustervol
