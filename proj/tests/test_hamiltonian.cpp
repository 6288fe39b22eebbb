#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qflo/benchmarks.hpp"
#include "qflo/hamiltonian.hpp"
#include "qflo/random.hpp"

using namespace qflo;

TEST_CASE("parse_hamiltonian examples")
{
    SUBCASE("weights and probabilities")
    {
        const auto h = parse_hamiltonian("0.3 X\n0.7 Z");
        CHECK(h.lambda() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(h.probabilities()[0] == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(h.probabilities()[1] == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(h.lambda_max() == doctest::Approx(0.7));
    }
    SUBCASE("sign folding")
    {
        const auto h = parse_hamiltonian("-0.5 XY");
        REQUIRE(h.size() == 1);
        CHECK(h.terms()[0].weight == 0.5);
        CHECK(h.terms()[0].sign == -1);
        const Matrix d = dense(h).matrix();
        CHECK((d - (-0.5) * oracle::pauli_string("XY")).cwiseAbs().maxCoeff() == 0.0);
        CHECK(linalg::spectral_norm(h.terms()[0].sign * h.terms()[0].op.dense()) ==
              doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_WITH_AS(parse_hamiltonian("0.5 XQ"), doctest::Contains("invalid Pauli character"),
                             std::invalid_argument);
        CHECK_THROWS_WITH_AS(parse_hamiltonian("0 X"), doctest::Contains("zero coefficient"), std::invalid_argument);
        CHECK_THROWS_WITH_AS(parse_hamiltonian("0.5 X\n0.5 ZZ"), doctest::Contains("inconsistent"),
                             std::invalid_argument);
        CHECK_THROWS_AS(parse_hamiltonian(""), std::invalid_argument);
        CHECK_THROWS_AS(parse_hamiltonian("# only a comment\n\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_hamiltonian("abc X"), std::invalid_argument);
        CHECK_THROWS_AS(parse_hamiltonian("0.5 X extra"), std::invalid_argument);
        CHECK_THROWS_AS(parse_hamiltonian("nan X"), std::invalid_argument);
    }
    SUBCASE("comments and whitespace")
    {
        const auto h = parse_hamiltonian("# header\n  0.25   ZZ   # trailing\n\n0.75 XI\n");
        CHECK(h.size() == 2);
        CHECK(h.qubits() == 2);
        CHECK(h.lambda() == 1.0);
    }
}

TEST_CASE("dense matches the Kronecker oracle")
{
    CHECK((dense(parse_hamiltonian("1.0 Z")).matrix() - oracle::pauli('Z')).cwiseAbs().maxCoeff() == 0.0);
    const Matrix half = 0.5 * (oracle::pauli('X') + oracle::pauli('Z'));
    CHECK((dense(parse_hamiltonian("0.5 X\n0.5 Z")).matrix() - half).cwiseAbs().maxCoeff() < 1e-15);

    const std::vector<oracle::Term> terms{{0.4, "XX"}, {-0.3, "ZI"}, {0.2, "IY"}, {0.1, "YZ"}};
    const auto h = parse_hamiltonian("0.4 XX\n-0.3 ZI\n0.2 IY\n0.1 YZ\n");
    CHECK((dense(h).matrix() - oracle::hamiltonian(terms)).cwiseAbs().maxCoeff() <= 1e-12);

    for (const char *s : {"XYZI", "IIZY", "YYYY"}) {
        CHECK((PauliString(s).dense() - oracle::pauli_string(s)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("Pauli string masks and phases")
{
    const PauliString p("XYZ");
    CHECK(p.flip_mask() == 0b110);
    CHECK(p.phase_mask() == 0b011);
    CHECK(p.y_count() == 1);
    CHECK_FALSE(p.is_identity());
    CHECK(PauliString("III").is_identity());
    const Matrix d = oracle::pauli_string("XYZ");
    for (std::uint64_t x = 0; x < 8; ++x) {
        CHECK(p.phase(x) == d(static_cast<Eigen::Index>(x ^ p.flip_mask()), static_cast<Eigen::Index>(x)));
    }
}

TEST_CASE("dense respects the qubit cap")
{
    const auto h = parse_hamiltonian("1 XXXX");
    CHECK_THROWS_AS(dense(h, 3), DimensionError);
    CHECK_NOTHROW(dense(h, 4));
}

TEST_CASE("decomposition invariants on random instances")
{
    RandomStream rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const int qubits = 1 + static_cast<int>(rng.next() % 3);
        const int terms = 1 + static_cast<int>(rng.next() % (qubits == 1 ? 3 : 5));
        const auto h = benchmarks::random_pauli_hamiltonian(qubits, terms, rng);
        double psum = 0.0;
        for (std::size_t j = 0; j < h.size(); ++j) {
            CHECK(h.terms()[j].weight > 0.0);
            psum += h.probabilities()[j];
            CHECK(linalg::spectral_norm(h.terms()[j].op.dense()) == doctest::Approx(1.0).epsilon(1e-14));
        }
        CHECK(std::abs(psum - 1.0) <= 1e-12);
        CHECK(h.lambda() >= h.lambda_max());
        CHECK(h.lambda() >= linalg::spectral_norm(dense(h).matrix()) - 1e-9);
    }
}

TEST_CASE("serialization is a fixed point")
{
    const auto h = parse_hamiltonian("0.1 XX\n-0.7 ZY\n0.123456789012345678 IZ\n");
    const std::string once = serialize_hamiltonian(h);
    const std::string twice = serialize_hamiltonian(parse_hamiltonian(once));
    CHECK(once == twice);
    const auto back = parse_hamiltonian(once);
    for (std::size_t j = 0; j < h.size(); ++j) {
        CHECK(back.terms()[j].weight == h.terms()[j].weight);
        CHECK(back.terms()[j].sign == h.terms()[j].sign);
    }
}

TEST_CASE("sample_term")
{
    SUBCASE("single term")
    {
        const auto h = parse_hamiltonian("2.0 Z");
        RandomStream rng(1);
        for (int i = 0; i < 100; ++i) {
            CHECK(sample_term(h, rng) == 0);
        }
    }
    SUBCASE("cdf boundaries")
    {
        const auto h = parse_hamiltonian("0.3 X\n0.7 Z");
        CHECK(h.sample_index(0.29) == 0);
        CHECK(h.sample_index(0.31) == 1);
        CHECK(h.sample_index(0.0) == 0);
        CHECK(h.sample_index(0.9999999999) == 1);
    }
    SUBCASE("binomial band at 1e5 draws")
    {
        const auto h = parse_hamiltonian("0.3 X\n0.7 Z");
        RandomStream rng(2024);
        const int n = 100000;
        int zeros = 0;
        for (int i = 0; i < n; ++i) {
            zeros += sample_term(h, rng) == 0 ? 1 : 0;
        }
        const double sigma = std::sqrt(n * 0.3 * 0.7);
        CHECK(std::abs(zeros - 0.3 * n) <= 3.0 * sigma);
    }
    SUBCASE("chi-square over four terms")
    {
        const auto h = parse_hamiltonian("0.4 XX\n0.3 ZI\n0.2 IY\n0.1 YZ\n");
        RandomStream rng(77);
        const int n = 100000;
        std::vector<int> counts(4, 0);
        for (int i = 0; i < n; ++i) {
            ++counts[sample_term(h, rng)];
        }
        double chi2 = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double e = n * h.probabilities()[static_cast<std::size_t>(j)];
            chi2 += (counts[static_cast<std::size_t>(j)] - e) * (counts[static_cast<std::size_t>(j)] - e) / e;
        }
        CHECK(oracle::chi_square_pvalue(chi2, 3) > 0.001);
    }
    SUBCASE("deterministic for a fixed stream")
    {
        const auto h = parse_hamiltonian("0.4 XX\n0.3 ZI\n0.2 IY\n0.1 YZ\n");
        RandomStream a(9), b(9);
        for (int i = 0; i < 1000; ++i) {
            CHECK(sample_term(h, a) == sample_term(h, b));
        }
    }
}

TEST_CASE("scaled decomposition")
{
    const auto h = parse_hamiltonian("0.3 X\n0.7 Z");
    const auto g = h.scaled(2.0);
    CHECK(g.lambda() == doctest::Approx(2.0));
    CHECK(g.probabilities() == h.probabilities());
    CHECK_THROWS(h.scaled(0.0));
}

TEST_CASE("random streams and seed derivation")
{
    RandomStream a(5), b(5);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(derive_seed(1, {0, 1}) != derive_seed(1, {1, 0}));
    CHECK(derive_seed(1, {0, 1}) == derive_seed(1, {0, 1}));
    CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
    CHECK(entropy_seed() != 0);
}
