#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "alphalab/martingale.hpp"
#include "alphalab/rng.hpp"

using namespace alphalab;

TEST_CASE("transform with no bets stays at the first increment") {
    const std::vector<double> d = {0.7, -1.0, 2.0, 0.3};
    const std::vector<int> u = {0, 0, 0};
    const auto dbar = snell_transform(d, u);
    for (double v : dbar) CHECK(v == 0.7);
}

TEST_CASE("transform with all bets accumulates everything") {
    const std::vector<double> d = {0.5, -1.0, 2.0};
    const std::vector<int> u = {1, 1};
    const auto dbar = snell_transform(d, u);
    CHECK(dbar[0] == 0.5);
    CHECK(dbar[1] == doctest::Approx(-0.5));
    CHECK(dbar[2] == doctest::Approx(1.5));
}

TEST_CASE("hand-computed partial sums") {
    const auto dbar = snell_transform({1.0, -2.0, 3.0}, {1, 0});
    REQUIRE(dbar.size() == 3);
    CHECK(dbar[0] == 1.0);
    CHECK(dbar[1] == -1.0);
    CHECK(dbar[2] == -1.0);
}

TEST_CASE("sequential-form identity dbar_k - dbar_{k-1} = u_{k-1} d_k") {
    Rng rng(8);
    std::vector<double> d(12);
    std::vector<int> u(11);
    for (auto& v : d) v = rng.normal();
    for (auto& b : u) b = rng.next_u64() & 1 ? 1 : 0;
    const auto dbar = snell_transform(d, u);
    CHECK(dbar[0] == d[0]);
    for (std::size_t k = 1; k < d.size(); ++k)
        CHECK(dbar[k] - dbar[k - 1] == doctest::Approx(u[k - 1] * d[k]).epsilon(1e-15));
}

TEST_CASE("transform is linear in the increments") {
    Rng rng(9);
    std::vector<double> d(10), scaled(10);
    std::vector<int> u(9);
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = rng.normal();
        scaled[i] = 2.5 * d[i];
    }
    for (auto& b : u) b = rng.next_u64() & 1 ? 1 : 0;
    const auto base = snell_transform(d, u);
    const auto big = snell_transform(scaled, u);
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(big[i] == doctest::Approx(2.5 * base[i]).epsilon(1e-13));
}

TEST_CASE("transform validation") {
    CHECK_THROWS_AS(snell_transform({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(snell_transform({1.0, 2.0, 3.0}, {1}), std::invalid_argument);
    CHECK_THROWS_AS(snell_transform({1.0, 2.0}, {2}), std::invalid_argument);
}

TEST_CASE("option ledger clips and accumulates") {
    const Eigen::VectorXd z = Eigen::VectorXd::Ones(1);
    std::vector<Eigen::VectorXd> z_rows(5, z), gammas(5, z);
    // payoffs: 1 + eps
    const std::vector<double> eps = {-0.4, 0.2, -3.0, 1.0, -1.0};
    // payoff_k = 1 + eps_k -> 0.6, 1.2, 0 (clipped), 2.0, 0 (clipped)
    const auto ledger = option_ledger(z_rows, gammas, eps, 0.25);
    REQUIRE(ledger.size() == 6);
    CHECK(ledger[0] == 0.25);
    CHECK(ledger[1] == doctest::Approx(0.85));
    CHECK(ledger[2] == doctest::Approx(2.05));
    CHECK(ledger[3] == doctest::Approx(2.05));
    CHECK(ledger[4] == doctest::Approx(4.05));
    CHECK(ledger[5] == doctest::Approx(4.05));
}

TEST_CASE("ledger is constant when every payoff is clipped") {
    const Eigen::VectorXd z = Eigen::VectorXd::Ones(2);
    std::vector<Eigen::VectorXd> z_rows(4, z), gammas(4, -z);
    const std::vector<double> eps = {0.0, -0.1, 0.5, 1.0}; // payoffs -2 + eps < 0
    const auto ledger = option_ledger(z_rows, gammas, eps, 1.5);
    for (double v : ledger) CHECK(v == 1.5);
}

TEST_CASE("ledger equals the plain cumulative sum when nothing clips") {
    const Eigen::VectorXd z = Eigen::VectorXd::Ones(1);
    std::vector<Eigen::VectorXd> z_rows(3, z), gammas(3, 2.0 * z);
    const std::vector<double> eps = {0.1, 0.2, 0.3};
    const auto ledger = option_ledger(z_rows, gammas, eps, 0.0);
    CHECK(ledger[1] == doctest::Approx(2.1));
    CHECK(ledger[2] == doctest::Approx(4.3));
    CHECK(ledger[3] == doctest::Approx(6.6));
}

TEST_CASE("ledger is nondecreasing for arbitrary inputs") {
    Rng rng(77);
    std::vector<Eigen::VectorXd> z_rows, gammas;
    std::vector<double> eps;
    for (int k = 0; k < 40; ++k) {
        Eigen::VectorXd z(3), g(3);
        for (int i = 0; i < 3; ++i) {
            z(i) = rng.normal();
            g(i) = rng.normal();
        }
        z_rows.push_back(z);
        gammas.push_back(g);
        eps.push_back(rng.normal());
    }
    const auto ledger = option_ledger(z_rows, gammas, eps, rng.normal());
    for (std::size_t k = 1; k < ledger.size(); ++k) CHECK(ledger[k] >= ledger[k - 1]);
}

TEST_CASE("ledger validates dimensions") {
    const Eigen::VectorXd z2 = Eigen::VectorXd::Ones(2);
    const Eigen::VectorXd z3 = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(option_ledger({z2}, {z3}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(option_ledger({z2, z2}, {z2}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("constant policy preserves the martingale mean") {
    const auto checks =
        snell_mc_check(IncrementKind::rademacher, make_policy("always"), 30000, 32, {8, 32}, 5);
    for (const auto& c : checks) {
        CHECK(c.holds);
        // dbar_k == running sum; both means are near zero
        CHECK(std::fabs(c.mean_dbar) <= 4.0 * c.diff_se + 0.05);
        CHECK(std::fabs(c.mean_d) <= 0.05);
    }
}

TEST_CASE("past-measurable policies cannot beat the walk") {
    for (const auto& name : policy_names()) {
        const auto checks = snell_mc_check(IncrementKind::rademacher, make_policy(name), 20000,
                                           32, {8, 32}, 11);
        for (const auto& c : checks) CHECK(c.holds);
    }
}

TEST_CASE("future-peeking control violates the inequality") {
    const auto checks = snell_mc_check_peeking(IncrementKind::rademacher, 20000, 32, {8, 32}, 13);
    for (const auto& c : checks) {
        CHECK_FALSE(c.holds);
        CHECK(c.diff > 3.0 * c.diff_se);
        // every bet wins half the time with unit payoff: E[dbar_k] ~ (k-1)/2
        CHECK(c.mean_dbar == doctest::Approx((c.k - 1) * 0.5).epsilon(0.05));
    }
}

TEST_CASE("policies asking for the future hit an interface error") {
    const Policy greedy = [](const PolicyView& past) {
        return past.value(past.size()) > 0 ? 1 : 0; // one step beyond the window
    };
    CHECK_THROWS_AS(snell_mc_check(IncrementKind::gaussian, greedy, 10, 16, {8}, 1),
                    std::out_of_range);
}

TEST_CASE("non-binary policies are rejected") {
    const Policy bad = [](const PolicyView&) { return 2; };
    CHECK_THROWS_AS(snell_mc_check(IncrementKind::gaussian, bad, 10, 16, {8}, 1),
                    std::invalid_argument);
}

TEST_CASE("unknown policy names are rejected") {
    CHECK_THROWS_AS(make_policy("clairvoyant"), std::invalid_argument);
}
