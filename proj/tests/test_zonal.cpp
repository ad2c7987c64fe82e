#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "alphalab/zonal.hpp"

using namespace alphalab;

TEST_CASE("monomial symmetric functions") {
    Eigen::VectorXd y(3);
    y << 0.7, 0.3, -0.2;
    CHECK(monomial_symmetric({1}, y) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(monomial_symmetric({2}, y) == doctest::Approx(0.49 + 0.09 + 0.04).epsilon(1e-14));
    // m_{1,1} = sum_{i<j} y_i y_j
    CHECK(monomial_symmetric({1, 1}, y) ==
          doctest::Approx(0.7 * 0.3 + 0.7 * -0.2 + 0.3 * -0.2).epsilon(1e-14));
    // more parts than variables
    CHECK(monomial_symmetric({1, 1, 1, 1}, y) == 0.0);
}

TEST_CASE("partition rising factorial, direct and log") {
    // (a)_kappa for kappa = (2,1), a = 2: (2)(3) * (1.5) = 9
    CHECK(pochhammer_partition(2.0, {2, 1}) == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(std::exp(log_pochhammer_partition(2.0, {2, 1})) ==
          doctest::Approx(9.0).epsilon(1e-12));
    // single row reduces to the ordinary rising factorial
    CHECK(pochhammer_partition(0.5, {3}) == doctest::Approx(0.5 * 1.5 * 2.5).epsilon(1e-14));
    CHECK_THROWS(log_pochhammer_partition(0.25, {1, 1})); // second row base is negative
}

TEST_CASE("zonal polynomials match the order-2 closed forms") {
    // C_(2) = m_2 + (2/3) m_11 and C_(11) = (4/3) m_11, equivalently
    // C_(2) = ((tr Y)^2 + 2 tr(Y^2))/3, C_(11) = 2((tr Y)^2 - tr(Y^2))/3.
    ZonalTable table(4, 3);
    Eigen::VectorXd y(2);
    y << 0.7, 0.3;
    const auto& parts = table.partitions(2);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0] == Partition{2});
    CHECK(parts[1] == Partition{1, 1});
    const auto vals = table.values(2, y);
    const double m2 = 0.49 + 0.09, m11 = 0.21;
    CHECK(vals[0] == doctest::Approx(m2 + 2.0 / 3.0 * m11).epsilon(1e-13));
    CHECK(vals[1] == doctest::Approx(4.0 / 3.0 * m11).epsilon(1e-13));
}

TEST_CASE("zonal polynomials sum to (tr Y)^k order by order") {
    ZonalTable table(10, 3);
    Eigen::VectorXd y(3);
    y << 1.3, 0.45, 0.17;
    const double trace = y.sum();
    for (int k = 0; k <= 10; ++k) {
        const auto vals = table.values(k, y);
        double sum = 0.0;
        for (double v : vals) sum += v;
        CHECK(sum == doctest::Approx(std::pow(trace, k)).epsilon(1e-11));
    }
}

TEST_CASE("zonal sum identity holds with negative and mixed eigenvalues") {
    ZonalTable table(8, 3);
    Eigen::VectorXd y(3);
    y << -0.9, 0.4, 0.25;
    const double trace = y.sum();
    for (int k = 0; k <= 8; ++k) {
        const auto vals = table.values(k, y);
        double sum = 0.0;
        for (double v : vals) sum += v;
        CHECK(sum == doctest::Approx(std::pow(trace, k)).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("single variable reduces zonal values to powers") {
    ZonalTable table(9, 1);
    Eigen::VectorXd y(1);
    y << 0.83;
    for (int k = 0; k <= 9; ++k) {
        const auto vals = table.values(k, y);
        REQUIRE(vals.size() == 1);
        CHECK(vals[0] == doctest::Approx(std::pow(0.83, k)).epsilon(1e-13));
    }
}

TEST_CASE("partitions with more parts than variables contribute zero") {
    ZonalTable table(5, 3);
    Eigen::VectorXd y(2);
    y << 0.5, 0.2;
    const auto& parts = table.partitions(3);
    const auto vals = table.values(3, y);
    double sum = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].size() > 2) CHECK(vals[i] == 0.0);
        sum += vals[i];
    }
    CHECK(sum == doctest::Approx(std::pow(0.7, 3)).epsilon(1e-12));
}
