#include "clustervol/montecarlo.hpp"

#include <cmath>

#include "clustervol/baseline.hpp"
#include "clustervol/error.hpp"
#include "clustervol/parallel.hpp"
#include "clustervol/rng.hpp"

namespace clustervol {

namespace {

struct ReplicationOutcome {
    bool ok = false;
    std::vector<bool> cluster_reject;
    std::size_t param_reject_volatile = 0, param_total_volatile = 0;
    std::size_t param_reject_null = 0, param_total_null = 0;
    std::size_t param_errors = 0;
};

ReplicationOutcome run_replication(const ScenarioConfig& scenario, const MonteCarloOptions& options,
                                   std::size_t r) {
    const std::uint64_t seed = derive_seed(options.master_seed, {r});
    ScenarioConfig config = scenario;
    config.seed = derive_seed(seed, {0});
    BackfitOptions backfit = options.backfit;
    backfit.seed = derive_seed(seed, {1});
    TestOptions test = options.test;
    test.seed = derive_seed(seed, {2});
    test.threads = 1;

    const SimulatedPanel sim = simulate_panel(config);
    ReplicationOutcome out;

    for (std::size_t i = 0; i < sim.panel.series_count(); ++i) {
        const bool vol = sim.series_arch[i].is_volatile();
        try {
            const bool reject = lr_test_arch(sim.panel.series(i), test.alpha).reject;
            (vol ? out.param_total_volatile : out.param_total_null) += 1;
            if (reject) (vol ? out.param_reject_volatile : out.param_reject_null) += 1;
        } catch (const std::exception&) {
            ++out.param_errors;
        }
    }

    try {
        const auto result = bootstrap_test(sim.panel, backfit, test);
        for (const auto& c : result.clusters) out.cluster_reject.push_back(c.reject);
        out.ok = true;
    } catch (const NumericalError&) {
    }
    return out;
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

SizePowerRow run_scenario(const std::string& scenario_id, const ScenarioConfig& scenario,
                          const MonteCarloOptions& options) {
    scenario.validate();
    options.backfit.validate();
    options.test.validate();
    if (options.replications < 1) throw InvalidInput("run_scenario: replications must be >= 1");

    std::vector<ReplicationOutcome> outcomes(options.replications);
    parallel_for(options.replications, options.threads,
                 [&](std::size_t r) { outcomes[r] = run_replication(scenario, options, r); });

    const std::size_t m = scenario.cluster_count();
    SizePowerRow row;
    row.scenario_id = scenario_id;
    row.replications = options.replications;
    for (std::size_t k = 0; k < m; ++k) row.cluster_volatile.push_back(scenario.arch[k].is_volatile());

    std::vector<std::size_t> rejects(m, 0);
    std::size_t any = 0;
    std::size_t pv = 0, tv = 0, pn = 0, tn = 0;
    for (const auto& o : outcomes) {
        pv += o.param_reject_volatile;
        tv += o.param_total_volatile;
        pn += o.param_reject_null;
        tn += o.param_total_null;
        row.param_error_count += o.param_errors;
        if (!o.ok) {
            ++row.error_count;
            continue;
        }
        ++row.completed;
        bool hit = false;
        for (std::size_t k = 0; k < m; ++k) {
            if (o.cluster_reject[k]) {
                ++rejects[k];
                hit = true;
            }
        }
        if (hit) ++any;
    }

    const double done = static_cast<double>(row.completed);
    double power_sum = 0.0, size_sum = 0.0;
    std::size_t n_vol = 0, n_null = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double rate = row.completed ? static_cast<double>(rejects[k]) / done : 0.0;
        row.np_reject_rate_per_cluster.push_back(rate);
        if (row.cluster_volatile[k]) {
            power_sum += rate;
            ++n_vol;
        } else {
            size_sum += rate;
            ++n_null;
        }
    }
    if (row.completed && n_vol) row.np_power = power_sum / static_cast<double>(n_vol);
    if (row.completed && n_null) row.np_size = size_sum / static_cast<double>(n_null);
    row.np_familywise_rate = row.completed ? static_cast<double>(any) / done : 0.0;
    row.param_reject_rate_volatile = ratio(pv, tv);
    row.param_reject_rate_null = ratio(pn, tn);
    return row;
}

MisclassificationResult run_misclassification(const std::string& scenario_id,
                                              const ScenarioConfig& scenario,
                                              const MonteCarloOptions& options) {
    MisclassificationResult out;
    for (std::size_t k = 0; k < scenario.cluster_count(); ++k) {
        if (scenario.contamination_of(k) > 0.0) {
            out.cluster = k;
            break;
        }
    }
    out.row = run_scenario(scenario_id, scenario, options);
    out.reject_rate = out.row.np_reject_rate_per_cluster.at(out.cluster);
    return out;
}

double binomial_se(double p, std::size_t n) {
    if (n == 0) return 0.0;
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

std::vector<SummaryRecord> summarize(const std::vector<SizePowerRow>& rows) {
    if (rows.empty()) throw InvalidInput("summarize: no rows");
    std::vector<SummaryRecord> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        SummaryRecord rec;
        rec.scenario_id = row.scenario_id;
        rec.replications = row.completed;
        auto with_se = [&](const std::optional<double>& p, std::size_t n, std::optional<double>& value,
                           std::optional<double>& se) {
            if (!p) return;
            value = *p;
            se = binomial_se(*p, n);
        };
        with_se(row.np_power, row.completed, rec.np_power, rec.np_power_se);
        with_se(row.np_size, row.completed, rec.np_size, rec.np_size_se);
        with_se(row.param_reject_rate_volatile, row.completed, rec.param_power, rec.param_power_se);
        with_se(row.param_reject_rate_null, row.completed, rec.param_size, rec.param_size_se);
        rec.np_familywise_rate = row.np_familywise_rate;
        rec.error_count = row.error_count;
        rec.valid = row.valid();
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace clustervol
