#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qflo/linalg.hpp"

namespace qflo {

class RandomStream;

inline constexpr int kDefaultQubitCap = 10;

/// Tensor product of single-qubit Paulis. Letter 0 acts on the most
/// significant bit of the computational-basis index.
class PauliString {
  public:
    explicit PauliString(std::string letters);

    int qubits() const noexcept { return static_cast<int>(letters_.size()); }
    const std::string &letters() const noexcept { return letters_; }

    /// Bits flipped by the string (X or Y positions).
    std::uint64_t flip_mask() const noexcept { return flip_; }
    /// Bits contributing a (-1)^b sign (Y or Z positions).
    std::uint64_t phase_mask() const noexcept { return phase_; }
    int y_count() const noexcept { return y_count_; }

    /// <x ^ flip| P |x>; P|x> = phase(x) |x ^ flip>.
    Complex phase(std::uint64_t x) const noexcept;

    bool is_identity() const noexcept { return flip_ == 0 && phase_ == 0; }

    Matrix dense() const;

  private:
    std::string letters_;
    std::uint64_t flip_ = 0;
    std::uint64_t phase_ = 0;
    int y_count_ = 0;
};

/// h_j * sign_j * P_j with h_j > 0. The sign belongs to the unit-norm operator.
struct WeightedTerm {
    double weight;
    PauliString op;
    int sign = 1;
};

/// H = sum_j h_j H_j with h_j > 0, ||H_j|| = 1. Immutable after construction.
class HamiltonianDecomposition {
  public:
    explicit HamiltonianDecomposition(std::vector<WeightedTerm> terms);

    const std::vector<WeightedTerm> &terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    int qubits() const noexcept { return qubits_; }
    Eigen::Index dim() const noexcept { return Eigen::Index{1} << qubits_; }

    /// lambda = sum_j h_j
    double lambda() const noexcept { return lambda_; }
    /// max_j h_j, kept for reporting
    double lambda_max() const noexcept { return lambda_max_; }
    const std::vector<double> &probabilities() const noexcept { return probs_; }

    /// Index j with cdf_{j-1} <= u < cdf_j.
    std::size_t sample_index(double u) const noexcept;

    /// Copy with every weight multiplied by factor > 0.
    HamiltonianDecomposition scaled(double factor) const;

  private:
    std::vector<WeightedTerm> terms_;
    std::vector<double> probs_;
    std::vector<double> cdf_;
    double lambda_ = 0.0;
    double lambda_max_ = 0.0;
    int qubits_ = 0;
};

/// Parses "<coefficient> <letters>" per line; '#' starts a comment. Negative
/// coefficients fold their sign into the operator.
HamiltonianDecomposition parse_hamiltonian(std::string_view text);

HamiltonianDecomposition load_hamiltonian(const std::string &path);

std::string serialize_hamiltonian(const HamiltonianDecomposition &h);

linalg::HermitianOperator dense(const HamiltonianDecomposition &h, int qubit_cap = kDefaultQubitCap);

std::size_t sample_term(const HamiltonianDecomposition &h, RandomStream &rng);

} // namespace qflo
