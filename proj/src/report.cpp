#include "clustervol/report.hpp"

#include <cmath>
#include <optional>

#include <fmt/core.h>

#include "clustervol/error.hpp"
#include "json.hpp"

namespace clustervol {

namespace {

using nlohmann::json;

// Shortest representation that parses back to the same double.
std::string num(double v) {
    if (!std::isfinite(v)) return "nan";
    return fmt::format("{}", v);
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string opt_csv(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string opt_human(const std::optional<double>& v, const std::optional<double>& se) {
    if (!v) return "-";
    return se ? fmt::format("{:.4f} ({:.4f})", *v, *se) : fmt::format("{:.4f}", *v);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Format parse_format(std::string_view name) {
    if (name == "human") return Format::Human;
    if (name == "csv") return Format::Csv;
    if (name == "json") return Format::Json;
    throw InvalidInput(fmt::format("unsupported output format '{}'", name));
}

std::vector<UnivariateRow> univariate_analysis(const Panel& panel, double significance) {
    std::vector<UnivariateRow> rows;
    rows.reserve(panel.series_count());
    for (std::size_t i = 0; i < panel.series_count(); ++i)
        rows.push_back({panel.series_ids()[i], panel.cluster_names()[panel.cluster_of(i)],
                        lr_test_arch(panel.series(i), significance)});
    return rows;
}

std::string render_report(const FittedModel& fitted, const Panel& panel, Format format) {
    const auto& names = panel.cluster_names();
    switch (format) {
        case Format::Json: {
            json clusters = json::array();
            for (std::size_t k = 0; k < fitted.arch_hat.size(); ++k)
                clusters.push_back({{"cluster", names[k]},
                                    {"size", panel.clusters()[k].size()},
                                    {"alpha0", fitted.arch_hat[k].alpha0},
                                    {"alpha1", fitted.arch_hat[k].alpha1}});
            json series = json::array();
            for (std::size_t i = 0; i < panel.series_count(); ++i)
                series.push_back({{"series", panel.series_ids()[i]},
                                  {"cluster", names[panel.cluster_of(i)]},
                                  {"lambda", fitted.lambda_hat[i]},
                                  {"phi", finite_or_null(fitted.phi_series[i])},
                                  {"alpha0", fitted.arch_series[i].alpha0},
                                  {"alpha1", fitted.arch_series[i].alpha1}});
            json j{{"phi", fitted.phi_hat},
                   {"iterations", fitted.iterations},
                   {"converged", fitted.converged},
                   {"clusters", clusters},
                   {"series", series}};
            return j.dump(2) + "\n";
        }
        case Format::Csv: {
            std::string out = "record,id,cluster,phi,lambda,alpha0,alpha1\n";
            out += fmt::format("common,,,{},,,\n", num(fitted.phi_hat));
            for (std::size_t k = 0; k < fitted.arch_hat.size(); ++k)
                out += fmt::format("cluster,,{},,,{},{}\n", names[k], num(fitted.arch_hat[k].alpha0),
                                   num(fitted.arch_hat[k].alpha1));
            for (std::size_t i = 0; i < panel.series_count(); ++i)
                out += fmt::format("series,{},{},{},{},{},{}\n", panel.series_ids()[i],
                                   names[panel.cluster_of(i)], num(fitted.phi_series[i]),
                                   num(fitted.lambda_hat[i]), num(fitted.arch_series[i].alpha0),
                                   num(fitted.arch_series[i].alpha1));
            return out;
        }
        case Format::Human:
            break;
    }
    std::string out;
    out += fmt::format("Common autoregressive parameter (phi): {:.4f}\n", fitted.phi_hat);
    out += fmt::format("Backfitting: {} iteration(s), {}\n\n", fitted.iterations,
                       fitted.converged ? "converged" : "NOT converged");
    out += fmt::format("{:<16} {:>5} {:>12} {:>12}\n", "Cluster", "n", "alpha0", "alpha1");
    for (std::size_t k = 0; k < fitted.arch_hat.size(); ++k)
        out += fmt::format("{:<16} {:>5} {:>12.4f} {:>12.4f}\n", names[k], panel.clusters()[k].size(),
                           fitted.arch_hat[k].alpha0, fitted.arch_hat[k].alpha1);
    out += fmt::format("\n{:<16} {:<16} {:>12} {:>12}\n", "Series", "Cluster", "lambda", "phi_i");
    for (std::size_t i = 0; i < panel.series_count(); ++i)
        out += fmt::format("{:<16} {:<16} {:>12.4f} {:>12}\n", panel.series_ids()[i],
                           names[panel.cluster_of(i)], fitted.lambda_hat[i],
                           std::isfinite(fitted.phi_series[i])
                               ? fmt::format("{:.4f}", fitted.phi_series[i])
                               : std::string("degenerate"));
    return out;
}

std::string render_report(const VolatilityTestResult& result, const Panel& panel, Format format) {
    const auto& names = panel.cluster_names();
    switch (format) {
        case Format::Json: {
            json clusters = json::array();
            for (std::size_t k = 0; k < result.clusters.size(); ++k) {
                const auto& c = result.clusters[k];
                clusters.push_back({{"cluster", names[k]},
                                    {"size", panel.clusters()[k].size()},
                                    {"alpha1", c.alpha1_hat},
                                    {"ci_lower", c.ci_lower},
                                    {"ci_upper", c.ci_upper},
                                    {"reject", c.reject},
                                    {"replicates", c.boot_alpha1.size()}});
            }
            json j{{"phi", result.fitted.phi_hat},
                   {"m", result.m},
                   {"alpha", result.alpha},
                   {"corrected_level", result.corrected_level},
                   {"replicate_errors", result.replicate_errors},
                   {"clusters", clusters}};
            return j.dump(2) + "\n";
        }
        case Format::Csv: {
            std::string out = "cluster,size,phi,alpha1,ci_lower,ci_upper,corrected_level,reject\n";
            for (std::size_t k = 0; k < result.clusters.size(); ++k) {
                const auto& c = result.clusters[k];
                out += fmt::format("{},{},{},{},{},{},{},{}\n", names[k], panel.clusters()[k].size(),
                                   num(result.fitted.phi_hat), num(c.alpha1_hat), num(c.ci_lower),
                                   num(c.ci_upper), num(result.corrected_level), c.reject ? 1 : 0);
            }
            return out;
        }
        case Format::Human:
            break;
    }
    std::string out;
    out += fmt::format("Common autoregressive parameter (phi): {:.4f}\n\n", result.fitted.phi_hat);
    out += fmt::format("{:<16} {:>5}  {}\n", "Cluster", "n", "Volatility slope alpha1 (interval)");
    for (std::size_t k = 0; k < result.clusters.size(); ++k) {
        const auto& c = result.clusters[k];
        out += fmt::format("{:<16} {:>5}  {:.3f} ({:.4f}, {:.4f}){}\n", names[k],
                           panel.clusters()[k].size(), c.alpha1_hat, c.ci_lower, c.ci_upper,
                           c.reject ? "*" : "");
    }
    out += fmt::format("\nBonferroni corrected {:g}% intervals: m = {}, alpha = {:g}, per-cluster level {:g}\n",
                       100.0 * (1.0 - result.alpha), result.m, result.alpha, result.corrected_level);
    out += "* interval excludes 0: reject no volatility\n";
    if (result.replicate_errors > 0)
        out += fmt::format("{} replicate fit(s) failed and were dropped\n", result.replicate_errors);
    return out;
}

std::string render_report(std::span<const UnivariateRow> rows, Format format) {
    switch (format) {
        case Format::Json: {
            json arr = json::array();
            for (const auto& r : rows)
                arr.push_back({{"series", r.series_id},
                               {"cluster", r.cluster},
                               {"ar_intercept", r.test.ar_fit.intercept},
                               {"ar_phi", r.test.ar_fit.slope},
                               {"nonstationary", r.test.nonstationary},
                               {"lr_statistic", r.test.statistic},
                               {"p_value", r.test.p_value},
                               {"reject", r.test.reject}});
            return json{{"series", arr}}.dump(2) + "\n";
        }
        case Format::Csv: {
            std::string out = "series,cluster,ar_phi,nonstationary,lr_statistic,p_value,reject\n";
            for (const auto& r : rows)
                out += fmt::format("{},{},{},{},{},{},{}\n", r.series_id, r.cluster,
                                   num(r.test.ar_fit.slope), r.test.nonstationary ? 1 : 0,
                                   num(r.test.statistic), num(r.test.p_value), r.test.reject ? 1 : 0);
            return out;
        }
        case Format::Human:
            break;
    }
    std::string out = fmt::format("{:<16} {:<16} {:>16} {:>14}\n", "Series", "Cluster",
                                  "AR(1) estimate", "ARCH(1) LR p");
    for (const auto& r : rows) {
        if (r.test.nonstationary) {
            out += fmt::format("{:<16} {:<16} {:>16} {:>14}\n", r.series_id, r.cluster,
                               "nonstationary", "---");
        } else {
            out += fmt::format("{:<16} {:<16} {:>16.6f} {:>14.6g}{}\n", r.series_id, r.cluster,
                               r.test.ar_fit.slope, r.test.p_value, r.test.reject ? " *" : "");
        }
    }
    return out;
}

std::string render_report(std::span<const SizePowerRow> rows, Format format,
                          std::span<const std::string> labels) {
    const std::vector<SizePowerRow> copy(rows.begin(), rows.end());
    const auto summary = summarize(copy);
    switch (format) {
        case Format::Json: {
            json arr = json::array();
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const auto& s = summary[r];
                arr.push_back({{"scenario", s.scenario_id},
                               {"replications", rows[r].replications},
                               {"completed", rows[r].completed},
                               {"np_reject_rate_per_cluster", rows[r].np_reject_rate_per_cluster},
                               {"np_power", opt_json(s.np_power)},
                               {"np_power_se", opt_json(s.np_power_se)},
                               {"np_size", opt_json(s.np_size)},
                               {"np_size_se", opt_json(s.np_size_se)},
                               {"np_familywise_rate", s.np_familywise_rate},
                               {"param_power", opt_json(s.param_power)},
                               {"param_power_se", opt_json(s.param_power_se)},
                               {"param_size", opt_json(s.param_size)},
                               {"param_size_se", opt_json(s.param_size_se)},
                               {"errors", s.error_count},
                               {"valid", s.valid}});
            }
            return json{{"scenarios", arr}}.dump(2) + "\n";
        }
        case Format::Csv: {
            std::string out =
                "scenario,replications,np_power,np_power_se,param_power,param_power_se,np_size,"
                "np_size_se,param_size,param_size_se,np_familywise_rate,errors,valid\n";
            for (const auto& s : summary)
                out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", s.scenario_id,
                                   s.replications, opt_csv(s.np_power), opt_csv(s.np_power_se),
                                   opt_csv(s.param_power), opt_csv(s.param_power_se),
                                   opt_csv(s.np_size), opt_csv(s.np_size_se), opt_csv(s.param_size),
                                   opt_csv(s.param_size_se), num(s.np_familywise_rate),
                                   s.error_count, s.valid ? 1 : 0);
            return out;
        }
        case Format::Human:
            break;
    }
    std::string out = fmt::format("{:<28} {:>5}  {:>17} {:>17}  {:>17} {:>17}  {:>6}\n", "Scenario",
                                  "reps", "NP power (se)", "Param power (se)", "NP size (se)",
                                  "Param size (se)", "FWER");
    for (std::size_t r = 0; r < summary.size(); ++r) {
        const auto& s = summary[r];
        out += fmt::format("{:<28} {:>5}  {:>17} {:>17}  {:>17} {:>17}  {:>6.4f}{}\n", s.scenario_id,
                           s.replications, opt_human(s.np_power, s.np_power_se),
                           opt_human(s.param_power, s.param_power_se),
                           opt_human(s.np_size, s.np_size_se),
                           opt_human(s.param_size, s.param_size_se), s.np_familywise_rate,
                           s.valid ? "" : "  (invalid: error rate > 5%)");
        if (r < labels.size() && !labels[r].empty()) out += fmt::format("  {}\n", labels[r]);
    }
    return out;
}

}  // namespace clustervol
