#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clustervol/baseline.hpp"
#include "clustervol/estimation.hpp"
#include "clustervol/montecarlo.hpp"
#include "clustervol/nptest.hpp"
#include "clustervol/panel.hpp"

namespace clustervol {

enum class Format { Human, Csv, Json };

// "human", "csv" or "json"; throws InvalidInput otherwise.
Format parse_format(std::string_view name);

struct UnivariateRow {
    std::string series_id;
    std::string cluster;
    LrTestResult test;
};

std::vector<UnivariateRow> univariate_analysis(const Panel& panel, double significance);

// Common phi, random effects and per-cluster ARCH(1) estimates.
std::string render_report(const FittedModel& fitted, const Panel& panel, Format format);

// Common phi and per-cluster alpha1 with the Bonferroni interval; a '*'
// marks clusters whose interval excludes zero.
std::string render_report(const VolatilityTestResult& result, const Panel& panel, Format format);

// Per-series AR(1) estimate and LR p-value.
std::string render_report(std::span<const UnivariateRow> rows, Format format);

// Size/power table with Monte Carlo standard errors. Labels, when given,
// line up with rows.
std::string render_report(std::span<const SizePowerRow> rows, Format format,
                          std::span<const std::string> labels = {});

}  // namespace clustervol
