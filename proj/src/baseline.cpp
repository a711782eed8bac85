#include "clustervol/baseline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "clustervol/error.hpp"
#include "clustervol/estimation.hpp"
#include "clustervol/kernels.hpp"

namespace clustervol {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2 pi)

using Point = std::array<double, 2>;

struct SimplexResult {
    Point x;
    double value;
    bool converged;
};

// Nelder-Mead minimizer for two parameters (standard coefficients).
SimplexResult nelder_mead(const std::function<double(const Point&)>& f, Point start, double step,
                          std::size_t max_evals = 4000, double tol = 1e-12) {
    std::array<Point, 3> p{start, start, start};
    p[1][0] += step;
    p[2][1] += step;
    std::array<double, 3> v{f(p[0]), f(p[1]), f(p[2])};
    std::size_t evals = 3;

    auto along = [](const Point& c, const Point& w, double t) {
        return Point{c[0] + t * (w[0] - c[0]), c[1] + t * (w[1] - c[1])};
    };

    while (evals < max_evals) {
        std::array<std::size_t, 3> order{0, 1, 2};
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        const std::size_t best = order[0], mid = order[1], worst = order[2];

        const double spread = std::abs(v[worst] - v[best]);
        const double size = std::max({std::abs(p[worst][0] - p[best][0]),
                                      std::abs(p[worst][1] - p[best][1]),
                                      std::abs(p[mid][0] - p[best][0]),
                                      std::abs(p[mid][1] - p[best][1])});
        if (spread <= tol * (std::abs(v[best]) + tol) && size < 1e-7)
            return {p[best], v[best], true};

        const Point centroid{(p[best][0] + p[mid][0]) / 2, (p[best][1] + p[mid][1]) / 2};
        const Point refl = along(centroid, p[worst], -1.0);
        const double fr = f(refl);
        ++evals;
        if (fr < v[best]) {
            const Point exp = along(centroid, p[worst], -2.0);
            const double fe = f(exp);
            ++evals;
            if (fe < fr) {
                p[worst] = exp;
                v[worst] = fe;
            } else {
                p[worst] = refl;
                v[worst] = fr;
            }
            continue;
        }
        if (fr < v[mid]) {
            p[worst] = refl;
            v[worst] = fr;
            continue;
        }
        const bool outside = fr < v[worst];
        const Point con = along(centroid, outside ? refl : p[worst], 0.5);
        const double fc = f(con);
        ++evals;
        if (fc < (outside ? fr : v[worst])) {
            p[worst] = con;
            v[worst] = fc;
            continue;
        }
        for (std::size_t i : {mid, worst}) {
            p[i] = along(p[best], p[i], 0.5);
            v[i] = f(p[i]);
            ++evals;
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
    return {p[best], v[best], false};
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

double gaussian_loglik(std::span<const double> residuals, std::span<const double> sigma2) {
    if (residuals.size() != sigma2.size())
        throw InvalidInput("gaussian_loglik: residuals and variances differ in length");
    double log_sum = 0.0;
    for (double s2 : sigma2) {
        if (!(s2 > 0.0)) throw InvalidInput("gaussian_loglik: variance must be positive");
        log_sum += std::log(s2);
    }
    std::vector<double> sq(residuals.size());
    kernels::square(residuals, sq);
    const double quad = kernels::ratio_sum(sq, sigma2);
    return -kHalfLog2Pi * static_cast<double>(residuals.size()) - 0.5 * log_sum - 0.5 * quad;
}

double arch1_loglik(std::span<const double> residuals, double alpha0, double alpha1) {
    const std::size_t n = residuals.size();
    if (n < 2) throw InvalidInput("arch1_loglik: need at least two residuals");
    std::vector<double> lag_sq(n - 1);
    std::vector<double> sigma2(n - 1);
    kernels::square(residuals.first(n - 1), lag_sq);
    kernels::arch_variance(lag_sq, alpha0, alpha1, 0.0, sigma2);
    return gaussian_loglik(residuals.subspan(1), sigma2);
}

Arch1MleFit fit_arch1_mle(std::span<const double> residuals) {
    if (residuals.size() < 8) throw InvalidInput("fit_arch1_mle: need at least 8 residuals");
    for (double e : residuals)
        if (!std::isfinite(e)) throw InvalidInput("fit_arch1_mle: non-finite residual");

    const auto tail = residuals.subspan(1);
    double var = 0.0;
    for (double e : tail) var += e * e;
    var /= static_cast<double>(tail.size());
    const double spread = *std::max_element(residuals.begin(), residuals.end()) -
                          *std::min_element(residuals.begin(), residuals.end());
    if (!(var > 0.0) || !(spread > 0.0)) throw InvalidInput("fit_arch1_mle: constant residuals");

    auto objective = [&](const Point& z) {
        const double a0 = std::exp(z[0]);
        const double a1 = kAlpha1Max * logistic(z[1]);
        if (!(a0 > 0.0) || !std::isfinite(a0)) return std::numeric_limits<double>::infinity();
        double ll;
        try {
            ll = arch1_loglik(residuals, a0, a1);
        } catch (const InvalidInput&) {
            return std::numeric_limits<double>::infinity();
        }
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };

    Arch1MleFit best;
    best.loglik = -std::numeric_limits<double>::infinity();
    for (double a1 : {1e-3, 0.2, 0.5, 0.9 * kAlpha1Max}) {
        const double a0 = var * std::max(1.0 - a1, 0.1);
        const auto r = nelder_mead(objective, {std::log(a0), logit(a1 / kAlpha1Max)}, 0.5);
        if (!std::isfinite(r.value)) continue;
        if (-r.value > best.loglik) {
            best.alpha0 = std::exp(r.x[0]);
            best.alpha1 = kAlpha1Max * logistic(r.x[1]);
            best.loglik = -r.value;
            best.converged = r.converged;
        }
    }
    // The boundary alpha1 = 0 lies in the closed parameter space but not on
    // the logit scale; it is also where the constant-variance fit sits.
    const double boundary = arch1_loglik(residuals, var, 0.0);
    if (boundary >= best.loglik) best = {var, 0.0, boundary, true};

    if (!std::isfinite(best.loglik)) throw NonConvergence("ARCH(1) likelihood search failed");
    return best;
}

double chi2_1_upper_tail(double statistic) {
    if (!(statistic > 0.0)) return 1.0;
    return std::erfc(std::sqrt(statistic / 2.0));
}

LrTestResult lr_test_arch(std::span<const double> series, double significance) {
    if (series.size() < 10) throw InvalidInput("lr_test_arch: need at least 10 observations");
    if (!(significance > 0.0 && significance < 1.0))
        throw InvalidInput("lr_test_arch: significance must lie in (0, 1)");

    LrTestResult out;
    out.ar_fit = cls_ar1(series);
    out.nonstationary = std::abs(out.ar_fit.slope) >= 1.0;

    std::vector<double> e(series.size() - 1);
    kernels::affine_residual(series.subspan(1), series.first(e.size()), out.ar_fit.intercept,
                             out.ar_fit.slope, e);

    out.arch_fit = fit_arch1_mle(e);
    const std::span<const double> tail = std::span<const double>(e).subspan(1);
    double var = 0.0;
    for (double v : tail) var += v * v;
    var /= static_cast<double>(tail.size());
    const std::vector<double> flat(tail.size(), var);
    out.loglik_null = gaussian_loglik(tail, flat);

    out.statistic = std::max(0.0, 2.0 * (out.arch_fit.loglik - out.loglik_null));
    out.p_value = chi2_1_upper_tail(out.statistic);
    out.reject = out.p_value < significance;
    return out;
}

}  // namespace clustervol
