#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clustervol/dgp.hpp"
#include "clustervol/panel.hpp"

namespace clustervol {

// (series_id, cluster_id) pairs in file order.
using ClusterMap = std::vector<std::pair<std::string, std::string>>;

// Two columns, series_id,cluster_id; an optional header row whose first
// field is "series_id" is skipped.
ClusterMap read_cluster_map(std::istream& in);
ClusterMap load_cluster_map(const std::filesystem::path& path);

// Inline form "AAPL=US,BMW=EU,...".
ClusterMap parse_cluster_assignments(const std::string& text);

// Wide CSV: header "time,<id1>,<id2>,..." then one row per time point whose
// first field is the time label. Clusters are numbered in order of first
// appearance across the series columns. Without a map every series joins a
// single cluster named "all".
Panel read_panel_csv(std::istream& in, const std::optional<ClusterMap>& clusters);
Panel load_panel_csv(const std::filesystem::path& path, const std::optional<ClusterMap>& clusters);

// Writes values with round-trip precision and time labels 1..T.
void write_panel_csv(std::ostream& out, const Panel& panel);
void write_cluster_map(std::ostream& out, const Panel& panel);

// JSON object with keys N, T, phi, sigma_lambda, cluster_sizes,
// arch ([{alpha0, alpha1}, ...]), contamination, contamination_alpha1, seed.
// Missing keys take the ScenarioConfig defaults.
ScenarioConfig read_scenario_config(std::istream& in);
void write_scenario_config(std::ostream& out, const ScenarioConfig& config);

}  // namespace clustervol
