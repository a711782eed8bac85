#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "clustervol/panel.hpp"

namespace clustervol {

// ARCH(1) variance: sigma_t^2 = alpha0 + alpha1 * u_{t-1}^2.
struct ArchConfig {
    double alpha0 = 1.0;
    double alpha1 = 0.0;

    bool is_volatile() const noexcept { return alpha1 > 0.0; }
    friend bool operator==(const ArchConfig&, const ArchConfig&) = default;
};

// One simulation design: clustered AR(1) panel with random effects and
// cluster-level ARCH(1) innovations. Random effects are N(0, sigma_lambda^2).
struct ScenarioConfig {
    std::size_t series_count = 50;  // N
    std::size_t length = 50;        // T (retained points)
    double phi = 0.6;
    double sigma_lambda = 1.0;
    std::vector<std::size_t> cluster_sizes{50};
    std::vector<ArchConfig> arch{ArchConfig{}};
    // Per cluster, fraction of members whose volatility status is flipped.
    // Empty means no contamination anywhere.
    std::vector<double> contamination;
    // alpha1 given to flipped members of a cluster whose own alpha1 is 0.
    double contamination_alpha1 = 1.0;
    std::uint64_t seed = 1;

    std::size_t cluster_count() const noexcept { return cluster_sizes.size(); }
    double contamination_of(std::size_t k) const {
        return k < contamination.size() ? contamination[k] : 0.0;
    }
    // round(fraction * n_k)
    std::size_t flipped_count(std::size_t k) const;

    // Throws InvalidInput on any violated invariant.
    void validate() const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct SimulatedPanel {
    Panel panel;
    std::vector<double> lambda;          // true random effect per series
    std::vector<ArchConfig> series_arch;  // ARCH parameters each series was generated with
};

// Recursively generates 2T points per series from Y_{i,0} = lambda_i,
// u_{i,0} = 0 and keeps the last T. Series streams are keyed by
// (seed, series index); contaminated members keep their cluster label.
SimulatedPanel simulate_panel(const ScenarioConfig& config);

struct NamedScenario {
    std::string id;
    std::string label;
    ScenarioConfig config;
};

// The 12 clustering/volatility cells and 8 misclassification rows of the
// simulation study, all with N = T = 50.
std::vector<NamedScenario> scenario_catalog();

// Throws InvalidInput for an unknown id.
const NamedScenario& find_scenario(const std::string& id);

}  // namespace clustervol
