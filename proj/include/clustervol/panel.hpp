#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "clustervol/matrix.hpp"

namespace clustervol {

// Minimum series length: residuals exist for t = 2..T and the ARCH(1)
// regression needs lagged squared-residual pairs for t = 3..T.
inline constexpr std::size_t kMinSeriesLength = 4;

struct ClusterSummary {
    std::size_t index = 0;
    std::vector<std::size_t> members;
    std::size_t size() const noexcept { return members.size(); }
};

// N series x T time points with a cluster label per series. Cluster labels
// are 0-based here; files and reports use the names in cluster_names().
class Panel {
public:
    Panel(Matrix values, std::vector<std::string> series_ids, std::vector<std::size_t> cluster_of,
          std::vector<std::string> cluster_names = {});

    std::size_t series_count() const noexcept { return values_.rows(); }
    std::size_t length() const noexcept { return values_.cols(); }
    std::size_t cluster_count() const noexcept { return clusters_.size(); }

    const Matrix& values() const noexcept { return values_; }
    std::span<const double> series(std::size_t i) const { return values_.row(i); }
    double operator()(std::size_t i, std::size_t t) const { return values_(i, t); }

    const std::vector<std::string>& series_ids() const noexcept { return series_ids_; }
    const std::vector<std::size_t>& cluster_of() const noexcept { return cluster_of_; }
    std::size_t cluster_of(std::size_t i) const { return cluster_of_[i]; }
    const std::vector<std::string>& cluster_names() const noexcept { return cluster_names_; }
    const std::vector<ClusterSummary>& clusters() const noexcept { return clusters_; }

    // Same ids and clusters, new values (any column count >= kMinSeriesLength).
    Panel with_values(Matrix values) const;

    friend bool operator==(const Panel& a, const Panel& b) {
        return a.values_ == b.values_ && a.series_ids_ == b.series_ids_ &&
               a.cluster_of_ == b.cluster_of_ && a.cluster_names_ == b.cluster_names_;
    }

private:
    Matrix values_;
    std::vector<std::string> series_ids_;
    std::vector<std::size_t> cluster_of_;
    std::vector<std::string> cluster_names_;
    std::vector<ClusterSummary> clusters_;
};

struct OlsFit {
    double intercept = 0.0;
    double slope = 0.0;
};

// Least squares line through (x, y). Throws DegenerateRegressor when x has
// (numerically) zero variance.
OlsFit ols_fit(std::span<const double> x, std::span<const double> y);

// Order statistic j = clamp(ceil(q * B), 1, B) of the samples.
double percentile(std::span<const double> samples, double q);

// Y'(i, t) = Y(i, t + 1) - Y(i, t). Requires T >= 5.
Panel first_difference(const Panel& panel);

double mean(std::span<const double> values);

}  // namespace clustervol
