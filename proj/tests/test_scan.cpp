#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qflo/benchmarks.hpp"
#include "qflo/scan.hpp"

using namespace qflo;
using namespace qflo::scan;

TEST_CASE("fit_loglog_slope")
{
    SUBCASE("exact power law")
    {
        const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
        std::vector<double> y;
        for (double v : x) {
            y.push_back(v * v);
        }
        const auto f = fit_loglog_slope(x, y);
        CHECK(std::abs(f.slope - 2.0) <= 1e-9);
        CHECK(std::abs(f.intercept) <= 1e-9);
        CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("constant data")
    {
        const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
        const std::vector<double> y{3.0, 3.0, 3.0, 3.0};
        const auto f = fit_loglog_slope(x, y);
        CHECK(std::abs(f.slope) <= 1e-12);
        CHECK(f.r_squared == 1.0);
    }
    SUBCASE("noisy power law")
    {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(-0.01, 0.01);
        std::vector<double> x, y;
        for (int i = 1; i <= 10; ++i) {
            x.push_back(i);
            y.push_back(3.0 * std::pow(i, 1.5) * (1.0 + u(rng)));
        }
        const auto f = fit_loglog_slope(x, y);
        CHECK(std::abs(f.slope - 1.5) <= 0.1);
        CHECK(f.r_squared > 0.99);
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}),
                        std::invalid_argument);
        CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 0, 3, 4}),
                        std::invalid_argument);
        CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{1, -2, 3, 4}, std::vector<double>{1, 2, 3, 4}),
                        std::invalid_argument);
        CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 2, 3}),
                        std::invalid_argument);
        CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{2, 2, 2, 2}, std::vector<double>{1, 2, 3, 4}),
                        std::invalid_argument);
    }
}

TEST_CASE("attach_fit")
{
    ScanResult r;
    for (double v : {1.0, 2.0, 3.0}) {
        r.rows.push_back({v, v, {}});
    }
    attach_fit(r);
    CHECK_FALSE(r.fit);
    r.rows.push_back({4.0, 4.0, {}});
    attach_fit(r);
    REQUIRE(r.fit);
    CHECK(r.fit->slope == doctest::Approx(1.0));
    r.rows.push_back({5.0, 0.0, {}});
    attach_fit(r);
    CHECK_FALSE(r.fit);
}

TEST_CASE("convergence scan is first order")
{
    const auto b = benchmarks::two_qubit();
    const std::vector<std::int64_t> n{16, 32, 64, 128};
    const auto r = convergence_scan(b.hamiltonian, b.observable, linalg::DensityMatrix::pure(b.initial_state), 1.0, n);
    REQUIRE(r.rows.size() == 4);
    REQUIRE(r.fit);
    CHECK(std::abs(r.fit->slope - 1.0) <= 0.1);
    CHECK(r.rows[0].x == 1.0 / 16);
    CHECK(r.rows[0].meta.size() == 3);
}

TEST_CASE("format_double round-trips")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("parse_state")
{
    const auto zero = benchmarks::parse_state("0", 1);
    CHECK(zero.size() == 2);
    CHECK(zero[0] == Complex(1.0, 0.0));

    // letter 0 is the most significant bit
    const auto s = benchmarks::parse_state("10", 2);
    CHECK(std::abs(s[2] - Complex(1.0, 0.0)) == 0.0);
    CHECK(s.norm() == doctest::Approx(1.0));

    const auto plus = benchmarks::parse_state("plus^3", 3);
    CHECK(plus.size() == 8);
    for (Eigen::Index i = 0; i < 8; ++i) {
        CHECK(plus[i].real() == doctest::Approx(1.0 / std::sqrt(8.0)));
    }
    CHECK(benchmarks::parse_state("plus", 2).size() == 4);

    CHECK_THROWS_AS(benchmarks::parse_state("012", 3), std::invalid_argument);
    CHECK_THROWS_AS(benchmarks::parse_state("01", 3), std::invalid_argument);
    CHECK_THROWS_AS(benchmarks::parse_state("plus^2", 3), std::invalid_argument);
}

TEST_CASE("parse_observable")
{
    const auto a = benchmarks::parse_observable("1 ZI");
    CHECK((a.matrix() - oracle::pauli_string("ZI")).cwiseAbs().maxCoeff() == 0.0);
    const auto b = benchmarks::parse_observable("0.5 X\n-0.25 Z");
    CHECK((b.matrix() - (0.5 * oracle::pauli('X') - 0.25 * oracle::pauli('Z'))).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK_THROWS_AS(benchmarks::parse_observable("1 Q"), std::invalid_argument);
}

TEST_CASE("benchmarks")
{
    CHECK(benchmarks::one_qubit().hamiltonian.lambda() == doctest::Approx(1.0));
    CHECK(benchmarks::two_qubit().hamiltonian.lambda() == doctest::Approx(1.0));
    CHECK(benchmarks::two_qubit().hamiltonian.qubits() == 2);
    CHECK(benchmarks::depolarizing().hamiltonian.size() == 4);
    RandomStream rng(8);
    const auto h = benchmarks::random_pauli_hamiltonian(2, 15, rng);
    CHECK(h.size() == 15);
    CHECK_THROWS_AS(benchmarks::random_pauli_hamiltonian(1, 4, rng), std::invalid_argument);
}
