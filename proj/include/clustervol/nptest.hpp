#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "clustervol/estimation.hpp"
#include "clustervol/matrix.hpp"
#include "clustervol/panel.hpp"

namespace clustervol {

// How replicate innovations get their variances.
//   Observed:  sigma2_it from the observed squared residuals (fixed path).
//   Recursive: sigma2*_it = a0 + a1 * u*_{i,t-1}^2 along the replicate itself.
enum class VariancePath { Observed, Recursive };

struct TestOptions {
    std::size_t replicates = 500;  // B
    double alpha = 0.05;           // familywise level
    // Lower bound on reconstructed variances; defaults to 1e-8 times the
    // pooled sample variance of r***.
    std::optional<double> variance_floor;
    std::uint64_t seed = 1;
    unsigned threads = 1;  // workers for the replicate fits; 0 = all cores
    VariancePath variance_path = VariancePath::Recursive;

    void validate() const;
};

inline constexpr std::size_t kReplicateRetries = 3;

struct ClusterTest {
    double alpha1_hat = 0.0;
    std::vector<double> boot_alpha1;  // alpha1* from each successful replicate, by index
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    bool reject = false;
};

struct VolatilityTestResult {
    FittedModel fitted;
    std::vector<ClusterTest> clusters;
    std::size_t m = 0;
    double alpha = 0.05;
    double corrected_level = 0.05;  // alpha / m
    std::size_t replicate_errors = 0;
};

double default_variance_floor(const FittedModel& fitted);

// sigma2(i, c) for t = c + 2: max(a0_k + a1_k * u^2_{i,t-1}, floor) with the
// observed u = r***. The lag at t = 2 is the series mean of u^2.
Matrix reconstruct_variances(const FittedModel& fitted, const Panel& panel, double floor);

// Y*_{i,1} = Y_{i,1}; Y*_{it} = phi * Y*_{i,t-1} + lambda_i + N(0, sigma2(i, t-2)).
Panel generate_replicate(const FittedModel& fitted, const Panel& panel, const Matrix& sigma2,
                         std::uint64_t seed);

// Replicate whose innovation variances follow the fitted ARCH(1) recursion
// on the replicate's own innovations, floored at `floor`. The first lag is
// the series mean of the observed u^2.
Panel generate_recursive_replicate(const FittedModel& fitted, const Panel& panel, double floor,
                                   std::uint64_t seed);

// Zero-exclusion decision on the Bonferroni percentile interval.
bool interval_excludes_zero(double lower, double upper);

// Fits the panel, simulates B replicates from the fit, refits each, and
// forms [q(alpha/2m), q(1 - alpha/2m)] of the replicate alpha1 per cluster.
VolatilityTestResult bootstrap_test(const Panel& panel, const BackfitOptions& backfit_options,
                                    const TestOptions& test_options);

}  // namespace clustervol
