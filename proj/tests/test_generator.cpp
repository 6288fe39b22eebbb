#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qflo/benchmarks.hpp"
#include "qflo/generator.hpp"
#include "qflo/qdrift.hpp"
#include "qflo/scan.hpp"

using namespace qflo;
using namespace qflo::generator;

namespace {

double max_abs(const Matrix &m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("channel superoperator")
{
    const auto b = benchmarks::two_qubit();
    CHECK(max_abs(channel_superoperator(b.hamiltonian, 0.0).matrix - Matrix::Identity(16, 16)) <= 1e-15);

    const auto single = parse_hamiltonian("0.8 XZ");
    const Matrix u = oracle::expm_i(oracle::pauli_string("XZ"), 0.8 * 0.3);
    CHECK(max_abs(channel_superoperator(single, 0.3).matrix - linalg::conjugation_superoperator(u).matrix) <= 1e-14);

    // against Kraus application and the row-major oracle
    const auto rho = DensityMatrix::pure(benchmarks::parse_state("plus^2", 2));
    const auto s = channel_superoperator(b.hamiltonian, 0.17);
    const Matrix via_super = linalg::apply_superoperator(s, rho.matrix());
    CHECK(max_abs(via_super - channel_apply_exact(b.hamiltonian, rho, 0.17).matrix()) <= 1e-12);
    const auto k = oracle::kraus({{0.4, "XX"}, {0.3, "ZI"}, {0.2, "IY"}, {0.1, "YZ"}}, 0.17);
    CHECK(max_abs(via_super - oracle::apply_channel(k, rho.matrix())) <= 1e-12);

    const auto report = linalg::cptp_check(s);
    CHECK(report.passes(1e-10));

    CHECK_THROWS_AS(channel_superoperator(parse_hamiltonian("1 XXXXX"), 0.1), DimensionError);
}

TEST_CASE("log existence")
{
    const auto dep = benchmarks::depolarizing();
    const auto none = log_existence_check(dep.hamiltonian, std::numbers::pi / 2);
    CHECK(none.min_eig_modulus <= 1e-10);
    CHECK_FALSE(none.exists);

    const auto yes = log_existence_check(dep.hamiltonian, 0.4);
    CHECK(yes.exists);
    const auto s = channel_superoperator(dep.hamiltonian, 0.4);
    CHECK(linalg::log_roundtrip_error(linalg::matrix_log_principal(s), s) <= 1e-8);

    const auto id = log_existence_check(dep.hamiltonian, 0.0);
    CHECK(id.exists);
    CHECK(id.min_eig_modulus == doctest::Approx(1.0).epsilon(1e-14));

    // generator() must propagate the failure with the spectrum attached
    CHECK_THROWS_AS(linalg::matrix_log_principal(channel_superoperator(dep.hamiltonian, std::numbers::pi / 2)),
                    linalg::LogarithmError);
}

TEST_CASE("log exists below the threshold for random (H, t)")
{
    RandomStream rng(404);
    for (int trial = 0; trial < 100; ++trial) {
        const int qubits = 1 + static_cast<int>(rng.next() % 2);
        const auto h = benchmarks::random_pauli_hamiltonian(qubits, 1 + static_cast<int>(rng.next() % (qubits == 1 ? 3 : 6)), rng);
        const double t = rng.uniform() * 0.4999 / h.lambda();
        CHECK(log_existence_check(h, t).exists);
        const auto s = channel_superoperator(h, t);
        CHECK(linalg::log_roundtrip_error(linalg::matrix_log_principal(s), s) <= 1e-8);
    }
}

TEST_CASE("generator examples")
{
    SUBCASE("single term is exactly lambda ad_H1")
    {
        const auto h = parse_hamiltonian("0.9 ZY");
        for (double s : {1.0 / 16, 1.0 / 64, 0.3}) {
            CHECK(generator::generator(h, s, 1.0).deviation <= 1e-9);
        }
    }
    SUBCASE("reconstructs the channel")
    {
        const auto b = benchmarks::two_qubit();
        const double s = 1.0 / 16;
        const auto probe = generator::generator(b.hamiltonian, s, 1.0);
        const Matrix rebuilt = (Complex(0.0, -s) * probe.generator.matrix).exp();
        const Matrix channel = channel_superoperator(b.hamiltonian, s).matrix;
        CHECK(linalg::spectral_norm(rebuilt - channel) / linalg::spectral_norm(channel) <= 1e-8);
        CHECK(probe.t == s);
    }
    SUBCASE("deviation decreases and scales like s")
    {
        const auto b = benchmarks::two_qubit();
        std::vector<double> s{1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
        double prev = 1e300;
        for (double si : s) {
            const double d = generator::generator(b.hamiltonian, si, 1.0).deviation;
            CHECK(d < prev);
            prev = d;
        }
        for (const auto &bench : {benchmarks::one_qubit(), benchmarks::two_qubit(), benchmarks::depolarizing()}) {
            const auto scan = scan::generator_scan(bench.hamiltonian, 1.0, s);
            REQUIRE(scan.fit);
            CHECK(scan.fit->slope >= 0.75);
        }
    }
    SUBCASE("preconditions")
    {
        const auto b = benchmarks::one_qubit();
        CHECK_THROWS_AS(generator::generator(b.hamiltonian, 0.5, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(generator::generator(b.hamiltonian, 0.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(generator::generator(parse_hamiltonian("1 XXX"), 0.01, 1.0), DimensionError);
    }
}

TEST_CASE("series probe")
{
    SUBCASE("quadratic synthetic data")
    {
        std::vector<double> s, f;
        for (int i = 1; i <= 6; ++i) {
            s.push_back(0.05 * i);
            f.push_back(0.3 + 1.7 * s.back() * s.back());
        }
        const auto r = series_probe(s, f, 0.3, 3);
        CHECK(std::abs(r.coefficients[0]) <= 1e-8);
        CHECK(std::abs(r.coefficients[1] - 1.7) <= 1e-8);
        CHECK(std::abs(r.coefficients[2]) <= 1e-8);
        CHECK(r.orders == std::vector<int>{1, 2, 3});
    }
    SUBCASE("single term has no s dependence")
    {
        const auto h = parse_hamiltonian("1 X");
        const auto rho = DensityMatrix::pure(benchmarks::parse_state("0", 1));
        const HermitianOperator z(oracle::pauli('Z'));
        std::vector<double> s, f;
        for (int n : {8, 12, 16, 24, 32}) {
            s.push_back(1.0 / n);
            f.push_back(expectation_exact(h, z, rho, 1.0, n));
        }
        const auto r = series_probe(s, f, expectation_exact_evolution(h, z, rho, 1.0), 3);
        for (double a : r.coefficients) {
            CHECK(std::abs(a) <= 1e-8);
        }
    }
    SUBCASE("one-qubit benchmark fixtures")
    {
        // Frozen from a fit to superoperator-power oracle values.
        const auto b = benchmarks::one_qubit();
        const auto rho = DensityMatrix::pure(b.initial_state);
        std::vector<double> s, f;
        for (int n : {16, 24, 32, 48, 64, 96, 128, 192}) {
            s.push_back(1.0 / n);
            f.push_back(expectation_exact(b.hamiltonian, b.observable, rho, 1.0, n));
        }
        const double f0 = expectation_exact_evolution(b.hamiltonian, b.observable, rho, 1.0);
        CHECK(f0 == doctest::Approx(0.57797184738268725).epsilon(1e-13));
        const auto r = series_probe(s, f, f0, 3);
        CHECK(r.coefficients[0] == doctest::Approx(-0.36437154579209807).epsilon(1e-8));
        CHECK(r.coefficients[1] == doctest::Approx(0.099641040256785537).epsilon(1e-7));
        CHECK(r.coefficients[2] == doctest::Approx(-0.04212082517382041).epsilon(1e-6));
        CHECK(r.fit_residual <= 1e-8);
    }
    SUBCASE("errors")
    {
        const std::vector<double> s{0.1, 0.2, 0.2};
        const std::vector<double> f{1.0, 2.0, 2.0};
        CHECK_THROWS_AS(series_probe(s, f, 0.0, 2), std::invalid_argument);
        CHECK_THROWS_AS(series_probe(s, std::vector<double>{1.0}, 0.0, 1), std::invalid_argument);
        CHECK_THROWS_AS(series_probe(s, f, 0.0, 0), std::invalid_argument);
        std::vector<double> close, vals;
        for (int i = 0; i < 10; ++i) {
            close.push_back(1.0 + 1e-9 * i);
            vals.push_back(0.0);
        }
        CHECK_THROWS_AS(series_probe(close, vals, 0.0, 6), NumericalError);
    }
}

TEST_CASE("E_k bound probe")
{
    SUBCASE("single term gives zero")
    {
        const auto h = parse_hamiltonian("0.7 XY");
        for (int k = 2; k <= 4; ++k) {
            CHECK(ek_bound_probe(h, 1.0, k).estimate <= 1e-6);
        }
    }
    SUBCASE("benchmarks stay within the bound")
    {
        for (const auto &b : {benchmarks::one_qubit(), benchmarks::two_qubit(), benchmarks::depolarizing()}) {
            for (int k = 2; k <= 4; ++k) {
                const auto p = ek_bound_probe(b.hamiltonian, 1.0, k);
                CHECK_FALSE(p.skipped);
                CHECK(p.within_bound());
                CHECK(p.bound == doctest::Approx(std::pow(4.0 * b.hamiltonian.lambda(), k)));
                CHECK(p.h * 1.0 * b.hamiltonian.lambda() * k <= 0.1 + 1e-15);
            }
        }
    }
    SUBCASE("agrees with a direct polynomial fit of G for k = 2")
    {
        // E_2 is the first-order coefficient of G in u = sT; fit G(u) = G0 + E2 u + E3 u^2 entrywise.
        const auto b = benchmarks::one_qubit();
        const auto probe = ek_bound_probe(b.hamiltonian, 1.0, 2);
        std::vector<double> us{0.002, 0.004, 0.006, 0.008, 0.01};
        const Matrix ad = linalg::adjoint_superoperator(dense(b.hamiltonian)).matrix;
        Eigen::MatrixXd design(static_cast<Eigen::Index>(us.size()), 2);
        std::vector<Matrix> gs;
        for (std::size_t i = 0; i < us.size(); ++i) {
            design(static_cast<Eigen::Index>(i), 0) = us[i];
            design(static_cast<Eigen::Index>(i), 1) = us[i] * us[i];
            gs.push_back(generator::generator(b.hamiltonian, us[i], 1.0).generator.matrix - ad);
        }
        Matrix e2(4, 4);
        const auto qr = design.colPivHouseholderQr();
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                Eigen::VectorXcd rhs(static_cast<Eigen::Index>(us.size()));
                for (std::size_t i = 0; i < us.size(); ++i) {
                    rhs[static_cast<Eigen::Index>(i)] = gs[i](r, c);
                }
                const Eigen::VectorXd re = qr.solve(Eigen::VectorXd(rhs.real()));
                const Eigen::VectorXd im = qr.solve(Eigen::VectorXd(rhs.imag()));
                e2(r, c) = Complex(re[0], im[0]);
            }
        }
        // the divided difference over {h, 2h} carries an O(h) bias from E_3
        CHECK(probe.estimate == doctest::Approx(linalg::spectral_norm(e2)).epsilon(0.1));
    }
    SUBCASE("lambda scaling")
    {
        const auto h = benchmarks::two_qubit().hamiltonian;
        const double base = ek_bound_probe(h, 1.0, 2).estimate;
        const double doubled = ek_bound_probe(h.scaled(2.0), 1.0, 2).estimate;
        CHECK(doubled / base == doctest::Approx(4.0).epsilon(0.2));
    }
    CHECK_THROWS_AS(ek_bound_probe(benchmarks::one_qubit().hamiltonian, 1.0, 5), std::invalid_argument);
}
