#include "clustervol/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/core.h>

#include "clustervol/error.hpp"
#include "clustervol/rng.hpp"

namespace clustervol {

std::size_t ScenarioConfig::flipped_count(std::size_t k) const {
    return static_cast<std::size_t>(
        std::llround(contamination_of(k) * static_cast<double>(cluster_sizes.at(k))));
}

void ScenarioConfig::validate() const {
    if (series_count == 0) throw InvalidInput("scenario: N must be positive");
    if (length < kMinSeriesLength)
        throw InvalidInput(fmt::format("scenario: T must be at least {}", kMinSeriesLength));
    if (!std::isfinite(phi)) throw InvalidInput("scenario: phi must be finite");
    if (!(sigma_lambda >= 0.0)) throw InvalidInput("scenario: sigma_lambda must be >= 0");
    if (cluster_sizes.empty()) throw InvalidInput("scenario: at least one cluster required");
    if (std::find(cluster_sizes.begin(), cluster_sizes.end(), 0u) != cluster_sizes.end())
        throw InvalidInput("scenario: empty cluster");
    if (std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), std::size_t{0}) != series_count)
        throw InvalidInput("scenario: cluster sizes must sum to N");
    if (arch.size() != cluster_sizes.size())
        throw InvalidInput("scenario: one ARCH configuration per cluster required");
    for (const auto& a : arch) {
        if (!(a.alpha0 > 0.0)) throw InvalidInput("scenario: alpha0 must be > 0");
        if (!(a.alpha1 >= 0.0)) throw InvalidInput("scenario: alpha1 must be >= 0");
    }
    if (!contamination.empty() && contamination.size() != cluster_sizes.size())
        throw InvalidInput("scenario: contamination must list one fraction per cluster");
    for (double c : contamination)
        if (!(c >= 0.0 && c < 1.0)) throw InvalidInput("scenario: contamination must lie in [0, 1)");
    if (!(contamination_alpha1 >= 0.0))
        throw InvalidInput("scenario: contamination_alpha1 must be >= 0");
}

SimulatedPanel simulate_panel(const ScenarioConfig& config) {
    config.validate();
    const std::size_t n = config.series_count;
    const std::size_t t_len = config.length;

    std::vector<std::size_t> cluster_of;
    std::vector<ArchConfig> series_arch;
    cluster_of.reserve(n);
    series_arch.reserve(n);
    for (std::size_t k = 0; k < config.cluster_count(); ++k) {
        const std::size_t size = config.cluster_sizes[k];
        const std::size_t flipped = config.flipped_count(k);
        ArchConfig flipped_arch = config.arch[k];
        flipped_arch.alpha1 = config.arch[k].is_volatile() ? 0.0 : config.contamination_alpha1;
        for (std::size_t j = 0; j < size; ++j) {
            cluster_of.push_back(k);
            series_arch.push_back(j >= size - flipped ? flipped_arch : config.arch[k]);
        }
    }

    Matrix values(n, t_len);
    std::vector<double> lambda(n);
    for (std::size_t i = 0; i < n; ++i) {
        Engine engine = make_engine(config.seed, {i});
        std::normal_distribution<double> normal(0.0, 1.0);
        const ArchConfig& a = series_arch[i];

        lambda[i] = config.sigma_lambda * normal(engine);
        double y = lambda[i];
        double u = 0.0;
        for (std::size_t t = 0; t < 2 * t_len; ++t) {
            const double sigma = std::sqrt(a.alpha0 + a.alpha1 * u * u);
            u = normal(engine) * sigma;
            y = config.phi * y + lambda[i] + u;
            if (t >= t_len) values(i, t - t_len) = y;
        }
    }

    std::vector<std::string> cluster_names;
    for (std::size_t k = 0; k < config.cluster_count(); ++k)
        cluster_names.push_back(fmt::format("c{}", k + 1));
    return {Panel(std::move(values), {}, std::move(cluster_of), std::move(cluster_names)),
            std::move(lambda), std::move(series_arch)};
}

namespace {

constexpr ArchConfig kVolatile{1.0, 1.0};
constexpr ArchConfig kCalm{1.0, 0.0};

ScenarioConfig base(double phi) {
    ScenarioConfig c;
    c.series_count = 50;
    c.length = 50;
    c.phi = phi;
    c.sigma_lambda = 1.0;
    return c;
}

std::string phi_tag(double phi) { return fmt::format("phi{:.2f}", phi); }

}  // namespace

std::vector<NamedScenario> scenario_catalog() {
    std::vector<NamedScenario> out;
    const double phis[] = {0.6, 0.95};

    struct Layout {
        const char* tag;
        const char* label;
        std::size_t clusters;
        std::size_t volatile_clusters;
    };
    const Layout layouts[] = {{"single", "Single cluster", 1, 1},
                              {"5c1v", "5 clusters, 1 with volatility", 5, 1},
                              {"5c3v", "5 clusters, 3 with volatility", 5, 3}};

    for (const auto& layout : layouts) {
        for (double phi : phis) {
            for (bool vol : {true, false}) {
                ScenarioConfig c = base(phi);
                c.cluster_sizes.assign(layout.clusters, c.series_count / layout.clusters);
                c.arch.assign(layout.clusters, kCalm);
                if (vol)
                    for (std::size_t k = 0; k < layout.volatile_clusters; ++k) c.arch[k] = kVolatile;
                out.push_back({fmt::format("t1-{}-{}-{}", layout.tag, phi_tag(phi), vol ? "vol" : "novol"),
                               fmt::format("{}, phi={}, {}", layout.label, phi,
                                           vol ? "volatility" : "no volatility"),
                               std::move(c)});
            }
        }
    }

    for (bool vol : {false, true}) {
        for (double phi : phis) {
            for (double frac : {0.02, 0.10}) {
                ScenarioConfig c = base(phi);
                c.arch = {vol ? kVolatile : kCalm};
                c.contamination = {frac};
                const int pct = static_cast<int>(std::lround(frac * 100));
                out.push_back(
                    {fmt::format("t2-{}-{}pct-{}", vol ? "vol" : "novol", pct, phi_tag(phi)),
                     vol ? fmt::format("With volatility ({}% no volatility), phi={}", pct, phi)
                         : fmt::format("No volatility ({}% with volatility), phi={}", pct, phi),
                     std::move(c)});
            }
        }
    }
    return out;
}

const NamedScenario& find_scenario(const std::string& id) {
    static const std::vector<NamedScenario> catalog = scenario_catalog();
    for (const auto& s : catalog)
        if (s.id == id) return s;
    throw InvalidInput(fmt::format("unknown scenario '{}'", id));
}

}  // namespace clustervol
