#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clustervol/dgp.hpp"
#include "clustervol/estimation.hpp"
#include "clustervol/nptest.hpp"

namespace clustervol {

// Replication error rate above which a row is flagged invalid.
inline constexpr double kMaxErrorRate = 0.05;

struct SizePowerRow {
    std::string scenario_id;
    std::size_t replications = 0;  // requested
    std::size_t completed = 0;     // replications whose bootstrap test succeeded
    std::vector<bool> cluster_volatile;           // true ARCH status of each cluster label
    std::vector<double> np_reject_rate_per_cluster;
    std::optional<double> np_power;  // mean rate over volatile clusters
    std::optional<double> np_size;   // mean rate over non-volatile clusters
    double np_familywise_rate = 0.0;  // fraction of replications with any rejection
    std::optional<double> param_reject_rate_volatile;  // per-series LR rejections, volatile series
    std::optional<double> param_reject_rate_null;      // same, non-volatile series
    std::size_t error_count = 0;
    std::size_t param_error_count = 0;  // (replication, series) LR fits that failed

    bool valid() const noexcept {
        return replications > 0 &&
               static_cast<double>(error_count) <= kMaxErrorRate * static_cast<double>(replications);
    }
};

struct MonteCarloOptions {
    std::size_t replications = 200;
    BackfitOptions backfit{200, 1e-4, 50, 1};
    TestOptions test{200, 0.05, std::nullopt, 1, 1};
    std::uint64_t master_seed = 1;
    unsigned threads = 1;  // workers across replications
};

// Replication r simulates with a seed derived from (master_seed, r), runs the
// bootstrap test and per-series LR tests, and the decisions are reduced in
// replication order. Seeds inside options.backfit/test are ignored.
SizePowerRow run_scenario(const std::string& scenario_id, const ScenarioConfig& scenario,
                          const MonteCarloOptions& options);

struct MisclassificationResult {
    SizePowerRow row;
    std::size_t cluster = 0;  // the contaminated cluster
    double reject_rate = 0.0;
};

// Rejection rate of the contaminated cluster (the first cluster with a
// positive contamination fraction, or cluster 0 when there is none).
MisclassificationResult run_misclassification(const std::string& scenario_id,
                                              const ScenarioConfig& scenario,
                                              const MonteCarloOptions& options);

struct SummaryRecord {
    std::string scenario_id;
    std::size_t replications = 0;
    std::optional<double> np_power, np_power_se;
    std::optional<double> np_size, np_size_se;
    std::optional<double> param_power, param_power_se;
    std::optional<double> param_size, param_size_se;
    double np_familywise_rate = 0.0;
    std::size_t error_count = 0;
    bool valid = true;
};

// sqrt(p (1 - p) / n)
double binomial_se(double p, std::size_t n);

std::vector<SummaryRecord> summarize(const std::vector<SizePowerRow>& rows);

}  // namespace clustervol
