// Acceptance run: one line per criterion, exit status 1 if any fails.
// `acceptance C4` runs a single criterion; no argument runs them all and
// shares the Monte Carlo rows between criteria.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "clustervol/baseline.hpp"
#include "clustervol/dgp.hpp"
#include "clustervol/estimation.hpp"
#include "clustervol/montecarlo.hpp"
#include "clustervol/rng.hpp"
#include "oracles.hpp"

namespace cv = clustervol;

namespace {

constexpr std::uint64_t kMasterSeed = 1;
constexpr std::size_t kReplications = 200;
constexpr std::size_t kBoot = 200;

struct Outcome {
    bool pass;
    std::string detail;
};

cv::MonteCarloOptions study_options(const std::string& id) {
    cv::MonteCarloOptions o;
    o.replications = kReplications;
    o.backfit.resamples = kBoot;
    o.test.replicates = kBoot;
    o.test.alpha = 0.05;
    // Each scenario gets its own stream, keyed by its catalog position.
    const auto cat = cv::scenario_catalog();
    std::size_t pos = 0;
    while (cat[pos].id != id) ++pos;
    o.master_seed = cv::derive_seed(kMasterSeed, {pos});
    o.threads = 0;
    return o;
}

const cv::SizePowerRow& study(const std::string& id) {
    static std::map<std::string, cv::SizePowerRow> memo;
    auto it = memo.find(id);
    if (it == memo.end())
        it = memo.emplace(id, cv::run_scenario(id, cv::find_scenario(id).config, study_options(id))).first;
    return it->second;
}

std::string rate(const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : "n/a"; }

std::string row_note(const cv::SizePowerRow& r) {
    return fmt::format("[{} of {} replications, {} errors]", r.completed, r.replications, r.error_count);
}

Outcome c1() {
    const auto& r = study("t1-single-phi0.60-vol");
    const bool ok = r.valid() && r.np_power && *r.np_power >= 0.95;
    return {ok, fmt::format("single cluster phi=0.6 volatile: power {} >= 0.95 {}", rate(r.np_power),
                            row_note(r))};
}

Outcome c2() {
    const auto& a = study("t1-single-phi0.60-novol");
    const auto& b = study("t1-single-phi0.95-novol");
    const bool ok = a.valid() && b.valid() && a.np_size && b.np_size && *a.np_size <= 0.06 &&
                    *b.np_size <= 0.03;
    return {ok, fmt::format("single cluster size: phi=0.6 {} <= 0.06, phi=0.95 {} <= 0.03",
                            rate(a.np_size), rate(b.np_size))};
}

Outcome c3() {
    const auto& r = study("t1-single-phi0.60-vol");
    const bool ok = r.valid() && r.np_power && r.param_reject_rate_volatile &&
                    *r.np_power - *r.param_reject_rate_volatile >= 0.30;
    return {ok, fmt::format("nonparametric power {} minus per-series LR rejection {} >= 0.30",
                            rate(r.np_power), rate(r.param_reject_rate_volatile))};
}

Outcome c4() {
    const auto& r = study("t1-5c1v-phi0.60-vol");
    const bool ok = r.valid() && r.np_power && r.np_size && *r.np_power >= 0.45 && *r.np_power <= 0.80 &&
                    *r.np_size <= 0.05;
    return {ok, fmt::format("5 clusters, 1 volatile, phi=0.6: power {} in [0.45, 0.80], size {} <= 0.05 {}",
                            rate(r.np_power), rate(r.np_size), row_note(r))};
}

Outcome c5() {
    const auto& a = study("t2-vol-2pct-phi0.60");
    const auto& b = study("t2-vol-2pct-phi0.95");
    const double ra = a.np_reject_rate_per_cluster.at(0), rb = b.np_reject_rate_per_cluster.at(0);
    const bool ok = a.valid() && b.valid() && ra >= 0.95 && rb >= 0.65;
    return {ok, fmt::format("volatile cluster with 2% non-volatile members: phi=0.6 {:.4f} >= 0.95, "
                            "phi=0.95 {:.4f} >= 0.65",
                            ra, rb)};
}

Outcome c6() {
    const auto& a = study("t1-single-phi0.60-novol");
    const auto& b = study("t1-single-phi0.95-novol");
    const bool ok = a.param_reject_rate_null && b.param_reject_rate_null &&
                    *b.param_reject_rate_null > *a.param_reject_rate_null;
    return {ok, fmt::format("per-series LR size: phi=0.95 {} > phi=0.6 {}", rate(b.param_reject_rate_null),
                            rate(a.param_reject_rate_null))};
}

Outcome c7() {
    double phi_sum = 0, a1_sum = 0;
    const std::size_t seeds = 50;
    for (std::size_t s = 0; s < seeds; ++s) {
        cv::ScenarioConfig c;  // N = T = 50, one cluster, alpha = (1, 0)
        c.phi = 0.6;
        c.arch = {{1.0, 0.0}};
        c.seed = cv::derive_seed(kMasterSeed, {700, s});
        cv::BackfitOptions o;
        o.resamples = kBoot;
        o.seed = cv::derive_seed(kMasterSeed, {701, s});
        const auto fit = cv::backfit(cv::simulate_panel(c).panel, o);
        phi_sum += fit.phi_hat;
        a1_sum += fit.arch_hat[0].alpha1;
    }
    const double phi = phi_sum / seeds, a1 = a1_sum / seeds;
    const bool ok = std::abs(phi - 0.6) <= 0.05 && std::abs(a1) <= 0.1;
    return {ok, fmt::format("50 fits: mean phi {:.4f} in 0.6 +- 0.05, mean alpha1 {:.4f} in 0 +- 0.1", phi, a1)};
}

Outcome c8() {
    const auto& r = study("t1-5c1v-phi0.60-novol");
    const double bound = 0.05 + 2.0 * std::sqrt(0.05 * 0.95 / 200.0);
    const bool ok = r.valid() && r.np_familywise_rate <= bound;
    return {ok, fmt::format("5 null clusters: familywise rejection {:.4f} <= {:.4f} {}", r.np_familywise_rate,
                            bound, row_note(r))};
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-8 * std::abs(b) + 1e-14; }

Outcome c9() {
    std::mt19937_64 rng(cv::derive_seed(kMasterSeed, {900}));
    std::normal_distribution<double> z;
    std::uniform_int_distribution<int> len(6, 40);
    std::size_t bad[4] = {0, 0, 0, 0};
    for (int k = 0; k < 100; ++k) {
        const int n = len(rng);
        std::vector<double> x(n), y(n);
        const double a = 3 * z(rng), b = z(rng);
        for (int i = 0; i < n; ++i) {
            x[i] = 2 * z(rng);
            y[i] = a + b * x[i] + z(rng);
        }
        const auto f = cv::ols_fit(x, y);
        const auto [oa, ob] = oracle::normal_equations(x, y);
        bad[0] += !(close(f.intercept, oa) && close(f.slope, ob));

        std::vector<double> s(n);
        double prev = z(rng);
        for (auto& v : s) v = prev = 0.5 * z(rng) + 0.7 * prev + z(rng);
        const auto c = cv::cls_ar1(s);
        const auto [ca, cb] = oracle::cls_ar1(s);
        bad[1] += !(close(c.intercept, ca) && close(c.slope, cb));

        const auto e = cv::arch_ols_per_series(y);
        const auto [ea, eb] = oracle::arch_ols(y);
        bad[2] += !(close(e.alpha0, ea) && close(e.alpha1, eb));

        const double q = std::uniform_real_distribution<double>(0, 1)(rng);
        bad[3] += cv::percentile(y, q) != oracle::percentile_sorted(y, q);
    }
    const bool ok = bad[0] + bad[1] + bad[2] + bad[3] == 0;
    return {ok, fmt::format("100 random instances, mismatches: ols {}, cls {}, arch {}, percentile {}", bad[0],
                            bad[1], bad[2], bad[3])};
}

std::string run_cli(const std::string& args) {
    const auto out = std::filesystem::temp_directory_path() /
                     fmt::format("clustervol_acceptance_{}.txt", static_cast<long>(::getpid()));
    const std::string cmd = fmt::format("\"{}\" {} > \"{}\"", CLUSTERVOL_CLI, args, out.string());
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return "<exit " + std::to_string(status) + ">";
    std::ifstream in(out, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    std::filesystem::remove(out);
    return s.str();
}

Outcome c10() {
    const std::string base =
        "bench --scenario t1-5c1v-phi0.60-vol --scenario t2-novol-10pct-phi0.95 --reps 8 --boot 40 "
        "--resamples 40 --seed 7 --format json";
    const auto one = run_cli(base + " --threads 1");
    const auto eight = run_cli(base + " --threads 8");
    const bool ok = !one.empty() && one.front() == '{' && one == eight;
    return {ok, fmt::format("bench report at --threads 1 and 8: {} bytes, {}", one.size(),
                            one == eight ? "identical" : "different")};
}

Outcome c11() {
    const double tail = cv::chi2_1_upper_tail(3.841459);
    std::size_t rejects = 0;
    const std::size_t seeds = 1000;
    for (std::size_t s = 0; s < seeds; ++s) {
        auto engine = cv::make_engine(cv::derive_seed(kMasterSeed, {1100}), {s});
        std::normal_distribution<double> z;
        std::vector<double> y(200);
        for (auto& v : y) v = z(engine);
        rejects += cv::lr_test_arch(y, 0.05).reject;
    }
    const double size = static_cast<double>(rejects) / seeds;
    const bool ok = std::abs(tail - 0.05) <= 1e-4 && size <= 0.07;
    return {ok, fmt::format("chi2(1) tail at 3.841459 = {:.6f} (0.05 +- 1e-4), LR size on iid normal {:.4f} <= 0.07",
                            tail, size)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"C1", c1}, {"C2", c2}, {"C3", c3}, {"C4", c4},  {"C5", c5},  {"C6", c6},
        {"C7", c7}, {"C8", c8}, {"C9", c9}, {"C10", c10}, {"C11", c11}};

    bool all = true, matched = false;
    for (const auto& [name, check] : criteria) {
        if (argc > 1 && name != argv[1]) continue;
        matched = true;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, fmt::format("threw: {}", e.what())};
        }
        fmt::print("[{}] {} {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
        std::fflush(stdout);
        all = all && o.pass;
    }
    if (!matched) {
        fmt::print(stderr, "unknown criterion '{}'\n", argv[1]);
        return 2;
    }
    return all ? 0 : 1;
}
