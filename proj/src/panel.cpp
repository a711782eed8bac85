#include "clustervol/panel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "clustervol/error.hpp"
#include "clustervol/kernels.hpp"

namespace clustervol {

Panel::Panel(Matrix values, std::vector<std::string> series_ids, std::vector<std::size_t> cluster_of,
             std::vector<std::string> cluster_names)
    : values_(std::move(values)),
      series_ids_(std::move(series_ids)),
      cluster_of_(std::move(cluster_of)),
      cluster_names_(std::move(cluster_names)) {
    const std::size_t n = values_.rows();
    if (n == 0) throw InvalidInput("panel needs at least one series");
    if (values_.cols() < kMinSeriesLength)
        throw InvalidInput(fmt::format("panel needs T >= {} time points, got {}", kMinSeriesLength,
                                       values_.cols()));
    if (series_ids_.empty()) {
        series_ids_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) series_ids_.push_back(fmt::format("s{}", i + 1));
    }
    if (series_ids_.size() != n)
        throw InvalidInput(fmt::format("{} series ids for {} series", series_ids_.size(), n));
    if (cluster_of_.size() != n)
        throw InvalidInput(fmt::format("{} cluster labels for {} series", cluster_of_.size(), n));
    for (double v : values_.data())
        if (!std::isfinite(v)) throw InvalidInput("panel contains a non-finite value");

    const std::size_t m = *std::max_element(cluster_of_.begin(), cluster_of_.end()) + 1;
    clusters_.resize(m);
    for (std::size_t k = 0; k < m; ++k) clusters_[k].index = k;
    for (std::size_t i = 0; i < n; ++i) clusters_[cluster_of_[i]].members.push_back(i);
    for (const auto& c : clusters_)
        if (c.members.empty())
            throw InvalidInput(fmt::format("cluster {} has no members", c.index + 1));

    if (cluster_names_.empty()) {
        for (std::size_t k = 0; k < m; ++k) cluster_names_.push_back(std::to_string(k + 1));
    }
    if (cluster_names_.size() != m)
        throw InvalidInput(fmt::format("{} cluster names for {} clusters", cluster_names_.size(), m));
}

Panel Panel::with_values(Matrix values) const {
    if (values.rows() != series_count())
        throw InvalidInput("replacement values have a different series count");
    return Panel(std::move(values), series_ids_, cluster_of_, cluster_names_);
}

double mean(std::span<const double> values) {
    if (values.empty()) throw InvalidInput("mean of an empty sequence");
    return kernels::sum(values) / static_cast<double>(values.size());
}

OlsFit ols_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidInput("ols_fit: x and y differ in length");
    if (x.size() < 2) throw InvalidInput("ols_fit: need at least two points");

    const double xbar = mean(x);
    const double ybar = mean(y);
    const auto m = kernels::centered_cross(x, xbar, y, ybar);

    // Centering a constant sequence leaves only rounding noise, so zero
    // variance is judged relative to the regressor's magnitude.
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    if (!(m.sxx > static_cast<double>(x.size()) * noise * noise)) throw DegenerateRegressor();

    const double slope = m.sxy / m.sxx;
    return {ybar - slope * xbar, slope};
}

double percentile(std::span<const double> samples, double q) {
    if (samples.empty()) throw InvalidInput("percentile of an empty sample");
    if (!(q > 0.0 && q < 1.0)) throw InvalidInput("percentile level must lie in (0, 1)");

    const auto b = static_cast<double>(samples.size());
    const double pos = std::ceil(q * b * (1.0 - 1e-12));
    const auto j = static_cast<std::size_t>(std::clamp(pos, 1.0, b));

    std::vector<double> sorted(samples.begin(), samples.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(j - 1),
                     sorted.end());
    return sorted[j - 1];
}

Panel first_difference(const Panel& panel) {
    const std::size_t t_len = panel.length();
    if (t_len < kMinSeriesLength + 1)
        throw InvalidInput(fmt::format("first differencing needs T >= {}, got {}",
                                       kMinSeriesLength + 1, t_len));
    Matrix diff(panel.series_count(), t_len - 1);
    for (std::size_t i = 0; i < panel.series_count(); ++i) {
        const auto y = panel.series(i);
        for (std::size_t t = 0; t + 1 < t_len; ++t) diff(i, t) = y[t + 1] - y[t];
    }
    return panel.with_values(std::move(diff));
}

}  // namespace clustervol
