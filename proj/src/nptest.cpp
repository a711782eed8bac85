#include "clustervol/nptest.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/core.h>

#include "clustervol/error.hpp"
#include "clustervol/kernels.hpp"
#include "clustervol/parallel.hpp"
#include "clustervol/rng.hpp"

namespace clustervol {

void TestOptions::validate() const {
    if (replicates < 20) throw InvalidInput("test: B must be >= 20");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("test: alpha must lie in (0, 1)");
    if (variance_floor && !(*variance_floor > 0.0))
        throw InvalidInput("test: variance floor must be > 0");
}

double default_variance_floor(const FittedModel& fitted) {
    const auto r = fitted.residuals_star3.data();
    const double mu = mean(r);
    double ss = 0.0;
    for (double v : r) ss += (v - mu) * (v - mu);
    const double var = r.size() > 1 ? ss / static_cast<double>(r.size() - 1) : 0.0;
    return var > 0.0 ? 1e-8 * var : 1e-8;
}

Matrix reconstruct_variances(const FittedModel& fitted, const Panel& panel, double floor) {
    const Matrix& r3 = fitted.residuals_star3;
    if (r3.rows() != panel.series_count() || r3.cols() + 1 != panel.length())
        throw InvalidInput("reconstruct_variances: model was not fitted on this panel");

    Matrix sigma2(r3.rows(), r3.cols());
    std::vector<double> lag_sq(r3.cols());
    for (std::size_t i = 0; i < r3.rows(); ++i) {
        const auto u = r3.row(i);
        std::span<double> lag(lag_sq);
        kernels::square(u.first(u.size() - 1), lag.subspan(1));
        // u^2 at t = 1 does not exist; stand in the series mean of u^2.
        lag[0] = (kernels::sum(lag.subspan(1)) + u.back() * u.back()) / static_cast<double>(u.size());
        const ArchEstimate& a = fitted.arch_hat[panel.cluster_of(i)];
        kernels::arch_variance(lag, a.alpha0, a.alpha1, floor, sigma2.row(i));
    }
    return sigma2;
}

Panel generate_replicate(const FittedModel& fitted, const Panel& panel, const Matrix& sigma2,
                         std::uint64_t seed) {
    const std::size_t n = panel.series_count();
    const std::size_t t_len = panel.length();
    if (sigma2.rows() != n || sigma2.cols() + 1 != t_len)
        throw InvalidInput("generate_replicate: variance matrix does not match the panel");

    Matrix values(n, t_len);
    for (std::size_t i = 0; i < n; ++i) {
        Engine engine = make_engine(seed, {i});
        std::normal_distribution<double> normal(0.0, 1.0);
        double y = panel(i, 0);
        values(i, 0) = y;
        for (std::size_t t = 1; t < t_len; ++t) {
            const double u = normal(engine) * std::sqrt(sigma2(i, t - 1));
            y = fitted.phi_hat * y + fitted.lambda_hat[i] + u;
            values(i, t) = y;
        }
    }
    return panel.with_values(std::move(values));
}

Panel generate_recursive_replicate(const FittedModel& fitted, const Panel& panel, double floor,
                                   std::uint64_t seed) {
    const std::size_t n = panel.series_count();
    const std::size_t t_len = panel.length();
    const Matrix& r3 = fitted.residuals_star3;
    if (r3.rows() != n || r3.cols() + 1 != t_len)
        throw InvalidInput("generate_recursive_replicate: model was not fitted on this panel");

    Matrix values(n, t_len);
    for (std::size_t i = 0; i < n; ++i) {
        Engine engine = make_engine(seed, {i});
        std::normal_distribution<double> normal(0.0, 1.0);
        // ARCH(1) needs a nonnegative slope to be a variance recursion.
        const double a0 = fitted.arch_hat[panel.cluster_of(i)].alpha0;
        const double a1 = std::max(fitted.arch_hat[panel.cluster_of(i)].alpha1, 0.0);
        std::vector<double> sq(r3.cols());
        kernels::square(r3.row(i), sq);
        double lag_sq = mean(sq);
        double y = panel(i, 0);
        values(i, 0) = y;
        for (std::size_t t = 1; t < t_len; ++t) {
            const double sigma2 = std::max(a0 + a1 * lag_sq, floor);
            const double u = normal(engine) * std::sqrt(sigma2);
            lag_sq = u * u;
            y = fitted.phi_hat * y + fitted.lambda_hat[i] + u;
            values(i, t) = y;
        }
    }
    return panel.with_values(std::move(values));
}

bool interval_excludes_zero(double lower, double upper) { return lower > 0.0 || upper < 0.0; }

VolatilityTestResult bootstrap_test(const Panel& panel, const BackfitOptions& backfit_options,
                                    const TestOptions& test_options) {
    backfit_options.validate();
    test_options.validate();

    VolatilityTestResult result;
    result.fitted = backfit(panel, backfit_options);
    result.m = panel.cluster_count();
    result.alpha = test_options.alpha;
    result.corrected_level = test_options.alpha / static_cast<double>(result.m);

    const double floor = test_options.variance_floor.value_or(default_variance_floor(result.fitted));
    const Matrix sigma2 = reconstruct_variances(result.fitted, panel, floor);

    const std::size_t b_count = test_options.replicates;
    std::vector<std::optional<std::vector<ArchEstimate>>> boot(b_count);
    parallel_for(b_count, test_options.threads, [&](std::size_t b) {
        BackfitOptions opts = backfit_options;
        opts.seed = derive_seed(backfit_options.seed, {b});
        for (std::size_t attempt = 0; attempt <= kReplicateRetries; ++attempt) {
            try {
                const std::uint64_t seed = derive_seed(test_options.seed, {b, attempt});
                const Panel replicate =
                    test_options.variance_path == VariancePath::Observed
                        ? generate_replicate(result.fitted, panel, sigma2, seed)
                        : generate_recursive_replicate(result.fitted, panel, floor, seed);
                boot[b] = backfit(replicate, opts).arch_hat;
                return;
            } catch (const NumericalError&) {
            }
        }
    });

    result.clusters.resize(result.m);
    for (std::size_t k = 0; k < result.m; ++k) {
        result.clusters[k].alpha1_hat = result.fitted.arch_hat[k].alpha1;
        result.clusters[k].boot_alpha1.reserve(b_count);
    }
    for (const auto& fit : boot) {
        if (!fit) {
            ++result.replicate_errors;
            continue;
        }
        for (std::size_t k = 0; k < result.m; ++k)
            result.clusters[k].boot_alpha1.push_back((*fit)[k].alpha1);
    }
    if (result.replicate_errors == b_count)
        throw NonConvergence(fmt::format("all {} bootstrap replicate fits failed", b_count));

    const double tail = result.corrected_level / 2.0;
    for (auto& c : result.clusters) {
        c.ci_lower = percentile(c.boot_alpha1, tail);
        c.ci_upper = percentile(c.boot_alpha1, 1.0 - tail);
        c.reject = interval_excludes_zero(c.ci_lower, c.ci_upper);
    }
    return result;
}

}  // namespace clustervol
