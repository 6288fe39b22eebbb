#pragma once

#include <string>
#include <string_view>

#include "qflo/hamiltonian.hpp"
#include "qflo/linalg.hpp"
#include "qflo/random.hpp"

namespace qflo::benchmarks {

struct Benchmark {
    std::string name;
    HamiltonianDecomposition hamiltonian;
    linalg::HermitianOperator observable;
    Vector initial_state;
    double total_time = 1.0;
};

/// 0.5 X + 0.5 Z, A = Z, |0>, T = 1.
Benchmark one_qubit();

/// 0.4 XX + 0.3 ZI + 0.2 IY + 0.1 YZ (lambda = 1), A = ZI, |00>, T = 1.
Benchmark two_qubit();

/// 0.25 each of I, X, Y, Z, A = Z, |0>, T = 1.
Benchmark depolarizing();

/// `terms` distinct non-identity Pauli strings with weights uniform in
/// (0.05, 1] and random signs.
HamiltonianDecomposition random_pauli_hamiltonian(int qubits, int terms, RandomStream &rng);

/// Dense observable from Pauli-sum text.
linalg::HermitianOperator parse_observable(std::string_view text, int qubit_cap = kDefaultQubitCap);

/// "0110"-style basis labels (letter 0 is the most significant bit) or
/// "plus^n" / "plus" for |+>^n.
Vector parse_state(std::string_view label, int qubits);

} // namespace qflo::benchmarks
