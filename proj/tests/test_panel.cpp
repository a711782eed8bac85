#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "clustervol/error.hpp"
#include "clustervol/panel.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace clustervol;

namespace {

Panel make_panel(std::vector<std::vector<double>> rows, std::vector<std::size_t> clusters = {}) {
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t t = 0; t < rows[i].size(); ++t) m(i, t) = rows[i][t];
    if (clusters.empty()) clusters.assign(rows.size(), 0);
    return Panel(std::move(m), {}, std::move(clusters));
}

}  // namespace

TEST_CASE("ols_fit examples") {
    SUBCASE("exact identity") {
        const std::vector<double> x{1, 2, 3};
        const auto f = ols_fit(x, x);
        CHECK(f.intercept == doctest::Approx(0.0));
        CHECK(f.slope == doctest::Approx(1.0));
    }
    SUBCASE("exact line") {
        const auto f = ols_fit(std::vector<double>{0, 1, 2}, std::vector<double>{1, 3, 5});
        CHECK(f.intercept == doctest::Approx(1.0));
        CHECK(f.slope == doctest::Approx(2.0));
    }
    SUBCASE("least squares line, checked against grid minimization") {
        const std::vector<double> x{0, 1, 2}, y{0, 1, 1};
        // SSE is flat to rounding within ~sqrt(eps) of the minimizer, so the
        // grid search only pins the line down to about 1e-7.
        const auto [ga, gb] = oracle::grid_ols(x, y);
        CHECK(ga == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
        CHECK(gb == doctest::Approx(0.5).epsilon(1e-6));
        const auto f = ols_fit(x, y);
        CHECK(f.intercept == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
        CHECK(f.slope == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("zero-variance regressor") {
        CHECK_THROWS_AS(ols_fit(std::vector<double>{5, 5, 5}, std::vector<double>{1, 2, 3}),
                        DegenerateRegressor);
        CHECK_THROWS_AS(ols_fit(std::vector<double>{0.1, 0.1, 0.1, 0.1}, std::vector<double>{1, 2, 3, 4}),
                        DegenerateRegressor);
    }
    SUBCASE("input errors") {
        CHECK_THROWS_AS(ols_fit(std::vector<double>{1}, std::vector<double>{1}), InvalidInput);
        CHECK_THROWS_AS(ols_fit(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), InvalidInput);
    }
}

TEST_CASE("ols_fit properties on random instances") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<int> len(2, 60);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = len(rng);
        const double scale = std::pow(10.0, normal(rng));
        const double a = normal(rng) * scale, b = normal(rng);
        std::vector<double> x(n), y(n);
        for (int i = 0; i < n; ++i) x[i] = normal(rng) * scale + scale;

        // Exactly linear data returns the generating coefficients.
        for (int i = 0; i < n; ++i) y[i] = a + b * x[i];
        const auto exact = ols_fit(x, y);
        CHECK(exact.slope == doctest::Approx(b).epsilon(1e-10).scale(1.0));
        CHECK(exact.intercept == doctest::Approx(a).epsilon(1e-10).scale(std::abs(a) + scale));

        // Residuals are orthogonal to the centered regressor.
        for (int i = 0; i < n; ++i) y[i] += normal(rng) * scale;
        const auto f = ols_fit(x, y);
        const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / n;
        double dot = 0, norm = 0;
        for (int i = 0; i < n; ++i) {
            const double e = y[i] - f.intercept - f.slope * x[i];
            dot += (x[i] - xbar) * e;
            norm += std::abs((x[i] - xbar) * y[i]);
        }
        CHECK(std::abs(dot) <= 1e-8 * (norm + 1.0));
    }
}

TEST_CASE("percentile uses the ceil(q B) order statistic") {
    std::vector<double> s(100);
    std::iota(s.begin(), s.end(), 1.0);
    std::shuffle(s.begin(), s.end(), std::mt19937_64(3));
    CHECK(percentile(s, 0.025) == 3.0);
    CHECK(percentile(s, 0.975) == 98.0);
    CHECK(percentile(s, 0.05) == 5.0);
    CHECK(percentile(std::vector<double>{7.0}, 0.01) == 7.0);
    CHECK(percentile(std::vector<double>{7.0}, 0.99) == 7.0);
    CHECK_THROWS_AS(percentile(std::vector<double>{}, 0.5), InvalidInput);
    CHECK_THROWS_AS(percentile(s, 0.0), InvalidInput);
    CHECK_THROWS_AS(percentile(s, 1.0), InvalidInput);
}

TEST_CASE("percentile is monotone in q and returns an input element") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> s(1 + rep * 7);
        for (auto& v : s) v = normal(rng);
        double prev = -INFINITY;
        for (double q = 0.005; q < 1.0; q += 0.01) {
            const double p = percentile(s, q);
            CHECK(p >= prev);
            CHECK(std::find(s.begin(), s.end(), p) != s.end());
            CHECK(p == oracle::percentile_sorted(s, q));
            prev = p;
        }
    }
}

TEST_CASE("first_difference") {
    SUBCASE("differences and cluster labels") {
        const auto p = make_panel({{1, 3, 6, 10, 15}, {2, 2, 2, 2, 2}}, {0, 1});
        const auto d = first_difference(p);
        CHECK(d.length() == 4);
        CHECK(std::vector<double>(d.series(0).begin(), d.series(0).end()) ==
              std::vector<double>{2, 3, 4, 5});
        CHECK(std::vector<double>(d.series(1).begin(), d.series(1).end()) ==
              std::vector<double>{0, 0, 0, 0});
        CHECK(d.cluster_of() == p.cluster_of());
        CHECK(d.series_ids() == p.series_ids());
    }
    SUBCASE("too short") {
        const auto p = make_panel({{1, 3, 6, 7}});
        CHECK_THROWS_AS(first_difference(p), InvalidInput);
    }
    SUBCASE("cumulative sum from the first value inverts differencing") {
        std::mt19937_64 rng(4);
        std::uniform_int_distribution<int> d(-1000, 1000);
        std::vector<double> y(30);
        for (auto& v : y) v = d(rng) / 8.0;  // dyadic, so sums are exact
        const auto diff = first_difference(make_panel({y}));
        std::vector<double> rebuilt{y[0]};
        for (double v : diff.series(0)) rebuilt.push_back(rebuilt.back() + v);
        CHECK(rebuilt == y);
    }
    SUBCASE("translation invariance") {
        std::mt19937_64 rng(8);
        std::uniform_int_distribution<int> d(-1000, 1000);
        std::vector<double> y(12), shifted(12);
        for (std::size_t t = 0; t < y.size(); ++t) {
            y[t] = d(rng) / 4.0;
            shifted[t] = y[t] + 64.0;
        }
        CHECK(first_difference(make_panel({y})).values() == first_difference(make_panel({shifted})).values());
    }
}

TEST_CASE("panel invariants") {
    CHECK_THROWS_AS(make_panel({{1, 2, 3}}), InvalidInput);                      // T < 4
    CHECK_THROWS_AS(make_panel({{1, 2, 3, 4}, {1, 2, 3, 4}}, {0, 2}), InvalidInput);  // empty cluster
    CHECK_THROWS_AS(make_panel({{1, 2, NAN, 4}}), InvalidInput);
    CHECK_THROWS_AS(Panel(Matrix(0, 5), {}, {}), InvalidInput);

    const auto p = make_panel({{1, 2, 3, 4}, {1, 2, 3, 5}, {0, 0, 1, 1}}, {1, 0, 1});
    REQUIRE(p.cluster_count() == 2);
    CHECK(p.clusters()[0].members == std::vector<std::size_t>{1});
    CHECK(p.clusters()[1].members == std::vector<std::size_t>{0, 2});
    CHECK(p.clusters()[0].size() + p.clusters()[1].size() == p.series_count());
    CHECK(p.series_ids() == std::vector<std::string>{"s1", "s2", "s3"});
}
