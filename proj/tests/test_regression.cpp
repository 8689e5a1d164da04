#include "honesty/error.hpp"
#include "honesty/stats.hpp"

#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace honesty;
using namespace honesty::stats;
using Catch::Approx;

TEST_CASE("design matrix coding") {
    std::vector<DesignRow> rows{{0.5, 0.25, corpus::Party::Democrat}, {2.0, 3.0, corpus::Party::Republican}};
    auto dm = build_design_matrix(rows);
    CHECK(dm.term_names == std::vector<std::string>{"Intercept", "D_b", "D_t", "Republican", "D_b:D_t",
                                                    "D_b:Republican", "D_t:Republican", "D_b:D_t:Republican"});
    CHECK(dm.x(0, 3) == 0.0);
    CHECK(dm.x(0, 4) == 0.125);
    CHECK(dm.x(1, 3) == 1.0);
    CHECK(dm.x(1, 6) == 3.0);
    CHECK(dm.x(1, 7) == 6.0);

    auto flipped = build_design_matrix(rows, corpus::Party::Republican);
    CHECK(flipped.term_names[3] == "Democrat");
    CHECK(flipped.x(0, 3) == 1.0);

    std::vector<DesignRow> other{{0, 0, corpus::Party::Other}, {0, 0, corpus::Party::Democrat}};
    CHECK_THROWS_AS(build_design_matrix(other), DataError);
    std::vector<DesignRow> single{{0, 0, corpus::Party::Democrat}, {1, 0, corpus::Party::Democrat}};
    CHECK_THROWS_AS(build_design_matrix(single), DataError);
}

TEST_CASE("ols exact line") {
    Eigen::MatrixXd x(3, 2);
    x << 1, 0, 1, 1, 1, 2;
    Eigen::VectorXd y(3);
    y << 1, 3, 5;
    auto r = ols(x, y, {"Intercept", "x"});
    CHECK(r.coefficients[0] == Approx(1.0));
    CHECK(r.coefficients[1] == Approx(2.0));
    CHECK(r.r_squared == Approx(1.0));
    for (double e : r.residuals) CHECK(std::abs(e) < 1e-12);
}

TEST_CASE("ols constant response") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 0, 1, 1, 1, 2, 1, 5;
    Eigen::VectorXd y = Eigen::VectorXd::Constant(4, 3.0);
    auto r = ols(x, y);
    CHECK(r.coefficients[1] == Approx(0.0).margin(1e-14));
    CHECK(r.coefficients[0] == Approx(3.0));
    CHECK(r.r_squared == 0.0);
    CHECK(r.term_names == std::vector<std::string>{"x0", "x1"});
}

TEST_CASE("ols agrees with the normal-equations oracle and its own definitions") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> n;
    const int rows = 60, k = 4;
    Eigen::MatrixXd x(rows, k);
    Eigen::VectorXd y(rows);
    std::vector<std::vector<double>> xs(rows, std::vector<double>(k));
    std::vector<double> ys(rows);
    for (int i = 0; i < rows; ++i) {
        x(i, 0) = xs[i][0] = 1.0;
        for (int j = 1; j < k; ++j) x(i, j) = xs[i][j] = n(rng);
        y(i) = ys[i] = 0.3 + 0.5 * xs[i][1] - 0.2 * xs[i][3] + n(rng);
    }
    auto r = ols(x, y);
    auto o = oracle::normal_equations(xs, ys);
    for (int j = 0; j < k; ++j) {
        CHECK(r.coefficients[j] == Approx(static_cast<double>(o.beta[j])).epsilon(1e-10));
        CHECK(r.std_errors[j] == Approx(static_cast<double>(o.se[j])).epsilon(1e-10));
        CHECK(r.p_values[j] == Approx(static_cast<double>(o.p[j])).epsilon(1e-8));
        CHECK(r.ci_low[j] < r.coefficients[j]);
        CHECK(r.ci_high[j] > r.coefficients[j]);
    }
    CHECK(r.df_resid == rows - k);

    Eigen::Map<const Eigen::VectorXd> e(r.residuals.data(), rows);
    CHECK((x.transpose() * e).cwiseAbs().maxCoeff() < 1e-8);

    const double ssr = e.squaredNorm();
    const double sst = (y.array() - y.mean()).square().sum();
    CHECK(r.r_squared == Approx(1.0 - ssr / sst));
    CHECK(r.adj_r_squared == Approx(1.0 - (1.0 - r.r_squared) * (rows - 1) / (rows - k)));
    const double ll = -0.5 * rows * (std::log(2.0 * M_PI) + std::log(ssr / rows) + 1.0);
    CHECK(r.log_likelihood == Approx(ll));
    CHECK(r.aic == Approx(2.0 * k - 2.0 * ll));
    CHECK(r.bic == Approx(k * std::log(rows) - 2.0 * ll));
    double dw = 0.0;
    for (int i = 1; i < rows; ++i) dw += (e(i) - e(i - 1)) * (e(i) - e(i - 1));
    CHECK(r.durbin_watson == Approx(dw / ssr));
}

TEST_CASE("ols rejects rank deficiency and tiny samples") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 2, 1, 2, 1, 2, 1, 2;
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 4;
    CHECK_THROWS_AS(ols(x, y), RankDeficient);
    Eigen::MatrixXd sq(2, 2);
    sq << 1, 0, 1, 1;
    CHECK_THROWS_AS(ols(sq, Eigen::Vector2d(1, 2)), InsufficientData);
}

TEST_CASE("absorb: single group equals centering") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 1, 1, 2, 1, 3, 1, 6;
    Eigen::VectorXd y(4);
    y << 2, 4, 5, 9;
    std::vector<std::string> g(4, "g");
    auto a = absorb_group_intercepts(x, y, g, {"Intercept", "x"});
    CHECK(a.dropped_terms == std::vector<std::string>{"Intercept"});
    REQUIRE(a.x.cols() == 1);
    CHECK(a.x(0, 0) == Approx(-2.0));
    CHECK(a.x(3, 0) == Approx(3.0));
    CHECK(a.y.sum() == Approx(0.0).margin(1e-12));
}

TEST_CASE("absorb: singleton group contributes no variation") {
    Eigen::MatrixXd x(3, 1);
    x << 7, 1, 3;
    Eigen::VectorXd y(3);
    y << 5, 1, 2;
    std::vector<std::string> g{"solo", "pair", "pair"};
    auto a = absorb_group_intercepts(x, y, g);
    CHECK(a.x(0, 0) == 0.0);
    CHECK(a.y(0) == 0.0);
    CHECK(a.group_sizes.at("solo") == 1);
    CHECK(a.group_sizes.at("pair") == 2);
}

TEST_CASE("fixed effects remove intercept-confounding bias") {
    // Group B has larger x and a higher intercept; pooled OLS overstates the slope.
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 0.05);
    const int per = 200;
    Eigen::MatrixXd x(2 * per, 2);
    Eigen::VectorXd y(2 * per);
    std::vector<std::string> g;
    for (int i = 0; i < 2 * per; ++i) {
        const bool b = i >= per;
        const double xi = (b ? 5.0 : 0.0) + (i % per) / double(per);
        x(i, 0) = 1.0;
        x(i, 1) = xi;
        y(i) = (b ? 10.0 : 0.0) + 0.5 * xi + n(rng);
        g.push_back(b ? "B" : "A");
    }
    auto pooled = ols(x, y);
    auto fe = fixed_effects_ols(x, y, g, {"Intercept", "x"});
    CHECK(pooled.coefficients[1] > 1.5);
    REQUIRE(fe.term_names == std::vector<std::string>{"x"});
    CHECK(std::abs(fe.coefficients[0] - 0.5) < 4.0 * fe.std_errors[0]);
    CHECK(fe.df_resid == 2 * per - 1 - 2);
}
