#include <cmath>
#include <random>
#include <vector>

#include "clustervol/dgp.hpp"
#include "clustervol/estimation.hpp"
#include "clustervol/kernels.hpp"
#include "doctest.h"

namespace kn = clustervol::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale) {
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

// Restores the process-wide kernel choice when a test ends.
struct IsaGuard {
    kn::Isa saved = kn::active_isa();
    ~IsaGuard() { kn::select(saved); }
};

}  // namespace

TEST_CASE("scalar kernels match their definitions") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> y{2, 4, 5, 4, 5};
    const auto& s = kn::scalar_table();
    CHECK(s.sum(x.data(), x.size()) == 15.0);
    const auto m = s.centered_cross(x.data(), 3.0, y.data(), 4.0, x.size());
    CHECK(m.sxx == 10.0);
    CHECK(m.sxy == 6.0);

    std::vector<double> out(5);
    s.affine_residual(y.data(), x.data(), 1.0, 0.5, out.data(), out.size());
    CHECK(out == std::vector<double>{0.5, 2.0, 2.5, 1.0, 1.5});
    s.arch_variance(x.data(), 1.0, -1.0, 0.25, out.data(), out.size());
    CHECK(out == std::vector<double>{0.25, 0.25, 0.25, 0.25, 0.25});
    CHECK(s.ratio_sum(y.data(), x.data(), 5) == doctest::Approx(2 + 2 + 5.0 / 3 + 1 + 1));
}

TEST_CASE("select refuses an unsupported instruction set") {
    IsaGuard guard;
    CHECK(kn::select(kn::Isa::Scalar));
    CHECK(kn::active_isa() == kn::Isa::Scalar);
    if (!kn::cpu_supports(kn::Isa::Avx2)) CHECK_FALSE(kn::select(kn::Isa::Avx2));
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
    if (!kn::cpu_supports(kn::Isa::Avx2)) {
        MESSAGE("AVX2 not available on this CPU; skipping");
        return;
    }
    const auto& ref = kn::scalar_table();
    const auto& vec = *kn::avx2_table();
    std::mt19937_64 rng(17);

    // Lengths straddle the 4- and 8-lane blocks and the scalar tails.
    for (std::size_t n = 0; n <= 67; ++n) {
        CAPTURE(n);
        const auto x = random_vector(rng, n, 3.0);
        const auto y = random_vector(rng, n, 0.5);
        std::vector<double> den(n);
        for (std::size_t i = 0; i < n; ++i) den[i] = 0.1 + std::abs(y[i]);

        double abs_x = 0;
        for (double v : x) abs_x += std::abs(v);
        const double tol = 1e-14 * (abs_x + 1.0);
        CHECK(std::abs(vec.sum(x.data(), n) - ref.sum(x.data(), n)) <= tol);

        const auto a = ref.centered_cross(x.data(), 0.3, y.data(), -0.1, n);
        const auto b = vec.centered_cross(x.data(), 0.3, y.data(), -0.1, n);
        double abs_xy = 0;
        for (std::size_t i = 0; i < n; ++i) abs_xy += std::abs((x[i] - 0.3) * (y[i] + 0.1));
        CHECK(std::abs(a.sxx - b.sxx) <= 1e-14 * (a.sxx + 1.0));
        CHECK(std::abs(a.sxy - b.sxy) <= 1e-14 * (abs_xy + 1.0));

        const double rs = ref.ratio_sum(x.data(), den.data(), n);
        double abs_ratio = 0;
        for (std::size_t i = 0; i < n; ++i) abs_ratio += std::abs(x[i] / den[i]);
        CHECK(std::abs(rs - vec.ratio_sum(x.data(), den.data(), n)) <= 1e-14 * (abs_ratio + 1.0));

        // Element-wise kernels round identically.
        std::vector<double> o1(n), o2(n);
        ref.affine_residual(x.data(), y.data(), 0.7, 0.9, o1.data(), n);
        vec.affine_residual(x.data(), y.data(), 0.7, 0.9, o2.data(), n);
        CHECK(o1 == o2);
        ref.square(x.data(), o1.data(), n);
        vec.square(x.data(), o2.data(), n);
        CHECK(o1 == o2);
        ref.arch_variance(x.data(), 1.0, -0.4, 0.05, o1.data(), n);
        vec.arch_variance(x.data(), 1.0, -0.4, 0.05, o2.data(), n);
        CHECK(o1 == o2);
    }
}

TEST_CASE("backfit under scalar and AVX2 kernels agrees to rounding") {
    if (!kn::cpu_supports(kn::Isa::Avx2)) {
        MESSAGE("AVX2 not available on this CPU; skipping");
        return;
    }
    IsaGuard guard;
    clustervol::ScenarioConfig config;
    config.cluster_sizes = {20, 30};
    config.arch = {{1.0, 0.8}, {1.0, 0.0}};
    config.seed = 5;
    const auto sim = clustervol::simulate_panel(config);
    const clustervol::BackfitOptions opts{100, 1e-6, 50, 3};

    REQUIRE(kn::select(kn::Isa::Scalar));
    const auto a = clustervol::backfit(sim.panel, opts);
    REQUIRE(kn::select(kn::Isa::Avx2));
    const auto b = clustervol::backfit(sim.panel, opts);

    CHECK(a.iterations == b.iterations);
    CHECK(a.phi_hat == doctest::Approx(b.phi_hat).epsilon(1e-12));
    for (std::size_t k = 0; k < a.arch_hat.size(); ++k) {
        CHECK(a.arch_hat[k].alpha0 == doctest::Approx(b.arch_hat[k].alpha0).epsilon(1e-10));
        CHECK(a.arch_hat[k].alpha1 == doctest::Approx(b.arch_hat[k].alpha1).epsilon(1e-10));
    }
}
