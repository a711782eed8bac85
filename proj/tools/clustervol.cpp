// clustervol: bootstrap test for ARCH(1) volatility in clustered panels.
//
//   clustervol fit       --input prices.csv --clusters map.csv
//   clustervol test      --input prices.csv --clusters map.csv --diff --boot 500
//   clustervol baseline  --input prices.csv --clusters map.csv
//   clustervol simulate  --scenario t1-single-phi0.60-vol --out panel.csv
//   clustervol bench     --reps 200 --threads 8
//   clustervol diff      --input prices.csv --out returns.csv
//
// Exit codes: 0 success, 2 input/validation error, 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "clustervol/dgp.hpp"
#include "clustervol/error.hpp"
#include "clustervol/estimation.hpp"
#include "clustervol/io.hpp"
#include "clustervol/montecarlo.hpp"
#include "clustervol/nptest.hpp"
#include "clustervol/panel.hpp"
#include "clustervol/report.hpp"
#include "clustervol/rng.hpp"

namespace cv = clustervol;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct PanelArgs {
    std::string input;
    std::string clusters;
    bool diff = false;
};

struct OutputArgs {
    std::string format = "human";
    std::string out;
};

void add_panel_options(CLI::App* cmd, PanelArgs& args) {
    cmd->add_option("-i,--input", args.input, "Wide CSV panel (time column, one column per series)")
        ->required();
    cmd->add_option("--clusters", args.clusters,
                    "Cluster map CSV (series_id,cluster_id) or inline id=cluster,...");
    cmd->add_flag("--diff", args.diff, "First-difference the series before analysis");
}

void add_output_options(CLI::App* cmd, OutputArgs& args) {
    cmd->add_option("--format", args.format, "human, csv or json")
        ->check(CLI::IsMember({"human", "csv", "json"}));
    cmd->add_option("-o,--out", args.out, "Write the report here instead of stdout");
}

cv::Panel read_panel(const PanelArgs& args) {
    std::optional<cv::ClusterMap> map;
    if (!args.clusters.empty()) {
        const bool inline_form = args.clusters.find('=') != std::string::npos &&
                                 !std::filesystem::exists(args.clusters);
        map = inline_form ? cv::parse_cluster_assignments(args.clusters)
                          : cv::load_cluster_map(args.clusters);
    }
    cv::Panel panel = cv::load_panel_csv(args.input, map);
    return args.diff ? cv::first_difference(panel) : panel;
}

void emit(const OutputArgs& args, const std::string& text) {
    if (args.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw cv::InvalidInput(fmt::format("cannot write '{}'", args.out));
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bootstrap test for ARCH(1) volatility in clustered multiple time series"};
    app.require_subcommand(1);

    const std::map<std::string, cv::VariancePath> variance_paths{
        {"observed", cv::VariancePath::Observed}, {"recursive", cv::VariancePath::Recursive}};
    cv::BackfitOptions backfit;
    cv::TestOptions test;
    std::uint64_t seed = 1;

    auto add_backfit_options = [&](CLI::App* cmd) {
        cmd->add_option("--resamples,-R", backfit.resamples, "Bootstrap resamples R for phi")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--epsilon", backfit.epsilon, "Convergence tolerance")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--max-iter", backfit.max_iterations, "Backfitting iteration cap")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed, "Master seed");
    };
    auto add_alpha = [&](CLI::App* cmd) {
        cmd->add_option("--alpha", test.alpha, "Familywise significance level")
            ->check(CLI::Range(0.0, 1.0));
    };

    // fit
    PanelArgs fit_panel;
    OutputArgs fit_out;
    auto* fit = app.add_subcommand("fit", "Backfit the clustered AR(1)-ARCH(1) model");
    add_panel_options(fit, fit_panel);
    add_output_options(fit, fit_out);
    add_backfit_options(fit);

    // test
    PanelArgs test_panel;
    OutputArgs test_out;
    auto* test_cmd = app.add_subcommand("test", "Bootstrap test for cluster volatility");
    add_panel_options(test_cmd, test_panel);
    add_output_options(test_cmd, test_out);
    add_backfit_options(test_cmd);
    add_alpha(test_cmd);
    test_cmd->add_option("--boot,-B", test.replicates, "Bootstrap replicates B (>= 20)");
    test_cmd->add_option("--threads", test.threads, "Worker threads (0 = all cores)");
    test_cmd->add_option("--variance-path", test.variance_path, "Replicate variances: observed or recursive")
        ->transform(CLI::CheckedTransformer(variance_paths, CLI::ignore_case));

    // baseline
    PanelArgs base_panel;
    OutputArgs base_out;
    auto* base = app.add_subcommand("baseline", "Per-series ARCH(1) likelihood-ratio tests");
    add_panel_options(base, base_panel);
    add_output_options(base, base_out);
    add_alpha(base);

    // simulate
    std::string sim_scenario;
    std::string sim_config;
    std::string sim_out;
    std::string sim_clusters_out;
    std::optional<std::uint64_t> sim_seed;
    auto* sim = app.add_subcommand("simulate", "Simulate a clustered panel");
    auto* sim_id = sim->add_option("--scenario", sim_scenario, "Catalog scenario id");
    auto* sim_cfg = sim->add_option("--config", sim_config, "Scenario config JSON file");
    sim_id->excludes(sim_cfg);
    sim->add_option("--seed", sim_seed, "Override the scenario seed");
    sim->add_option("-o,--out", sim_out, "Panel CSV output (default stdout)");
    sim->add_option("--clusters-out", sim_clusters_out, "Write the cluster map here");

    // bench
    std::vector<std::string> bench_ids;
    std::string bench_config;
    OutputArgs bench_out;
    cv::MonteCarloOptions mc;
    auto* bench = app.add_subcommand("bench", "Monte Carlo size/power study over catalog scenarios");
    bench->add_option("--scenario", bench_ids, "Catalog scenario id (repeatable; default all)");
    bench->add_option("--config", bench_config, "Scenario config JSON file instead of the catalog");
    bench->add_option("--reps", mc.replications, "Monte Carlo replications")
        ->check(CLI::PositiveNumber);
    bench->add_option("--boot,-B", mc.test.replicates, "Bootstrap replicates B (>= 20)");
    bench->add_option("--resamples,-R", mc.backfit.resamples, "Bootstrap resamples R for phi")
        ->check(CLI::PositiveNumber);
    bench->add_option("--epsilon", mc.backfit.epsilon, "Convergence tolerance")
        ->check(CLI::PositiveNumber);
    bench->add_option("--alpha", mc.test.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    bench->add_option("--seed", mc.master_seed, "Master seed");
    bench->add_option("--threads", mc.threads, "Worker threads (0 = all cores)");
    bench->add_option("--variance-path", mc.test.variance_path, "Replicate variances: observed or recursive")
        ->transform(CLI::CheckedTransformer(variance_paths, CLI::ignore_case));
    add_output_options(bench, bench_out);

    // diff
    PanelArgs diff_panel;
    std::string diff_out;
    auto* diff = app.add_subcommand("diff", "First-difference a panel CSV");
    diff->add_option("-i,--input", diff_panel.input, "Wide CSV panel")->required();
    diff->add_option("-o,--out", diff_out, "Output CSV (default stdout)");

    // scenarios
    auto* list = app.add_subcommand("scenarios", "List catalog scenario ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (fit->parsed()) {
            backfit.seed = seed;
            const auto panel = read_panel(fit_panel);
            const auto model = cv::backfit(panel, backfit);
            emit(fit_out, cv::render_report(model, panel, cv::parse_format(fit_out.format)));
        } else if (test_cmd->parsed()) {
            backfit.seed = cv::derive_seed(seed, {1});
            test.seed = cv::derive_seed(seed, {2});
            const auto panel = read_panel(test_panel);
            const auto result = cv::bootstrap_test(panel, backfit, test);
            emit(test_out, cv::render_report(result, panel, cv::parse_format(test_out.format)));
        } else if (base->parsed()) {
            const auto panel = read_panel(base_panel);
            const auto rows = cv::univariate_analysis(panel, test.alpha);
            emit(base_out, cv::render_report(std::span<const cv::UnivariateRow>(rows),
                                             cv::parse_format(base_out.format)));
        } else if (sim->parsed()) {
            cv::ScenarioConfig config;
            if (!sim_config.empty()) {
                std::ifstream in(sim_config);
                if (!in) throw cv::InvalidInput(fmt::format("cannot open '{}'", sim_config));
                config = cv::read_scenario_config(in);
            } else if (!sim_scenario.empty()) {
                config = cv::find_scenario(sim_scenario).config;
            } else {
                throw cv::InvalidInput("simulate needs --scenario or --config");
            }
            if (sim_seed) config.seed = *sim_seed;
            const auto simulated = cv::simulate_panel(config);
            std::ostringstream csv;
            cv::write_panel_csv(csv, simulated.panel);
            emit(OutputArgs{"human", sim_out}, csv.str());
            if (!sim_clusters_out.empty()) {
                std::ostringstream map;
                cv::write_cluster_map(map, simulated.panel);
                emit(OutputArgs{"human", sim_clusters_out}, map.str());
            }
        } else if (bench->parsed()) {
            std::vector<cv::NamedScenario> scenarios;
            if (!bench_config.empty()) {
                std::ifstream in(bench_config);
                if (!in) throw cv::InvalidInput(fmt::format("cannot open '{}'", bench_config));
                scenarios.push_back({std::filesystem::path(bench_config).stem().string(), "custom",
                                     cv::read_scenario_config(in)});
            } else if (bench_ids.empty()) {
                scenarios = cv::scenario_catalog();
            } else {
                for (const auto& id : bench_ids) scenarios.push_back(cv::find_scenario(id));
            }
            std::vector<cv::SizePowerRow> rows;
            std::vector<std::string> labels;
            for (std::size_t s = 0; s < scenarios.size(); ++s) {
                cv::MonteCarloOptions opts = mc;
                opts.master_seed = cv::derive_seed(mc.master_seed, {s});
                rows.push_back(cv::run_scenario(scenarios[s].id, scenarios[s].config, opts));
                labels.push_back(scenarios[s].label);
            }
            emit(bench_out, cv::render_report(std::span<const cv::SizePowerRow>(rows),
                                              cv::parse_format(bench_out.format), labels));
        } else if (diff->parsed()) {
            const auto panel = cv::first_difference(cv::load_panel_csv(diff_panel.input, std::nullopt));
            std::ostringstream csv;
            cv::write_panel_csv(csv, panel);
            emit(OutputArgs{"human", diff_out}, csv.str());
        } else if (list->parsed()) {
            for (const auto& s : cv::scenario_catalog()) fmt::print("{:<28} {}\n", s.id, s.label);
        }
    } catch (const cv::InvalidInput& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitInput;
    } catch (const cv::NumericalError& e) {
        fmt::print(stderr, "numerical failure: {}\n", e.what());
        return kExitNumerical;
    }
    return 0;
}
