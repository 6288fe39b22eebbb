#include "qflo/benchmarks.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qflo::benchmarks {

namespace {

Vector basis(Eigen::Index dim, Eigen::Index index)
{
    Vector v = Vector::Zero(dim);
    v[index] = 1.0;
    return v;
}

} // namespace

Benchmark one_qubit()
{
    auto h = parse_hamiltonian("0.5 X\n0.5 Z\n");
    return {"one_qubit", h, parse_observable("1 Z"), basis(2, 0), 1.0};
}

Benchmark two_qubit()
{
    auto h = parse_hamiltonian("0.4 XX\n0.3 ZI\n0.2 IY\n0.1 YZ\n");
    return {"two_qubit", h, parse_observable("1 ZI"), basis(4, 0), 1.0};
}

Benchmark depolarizing()
{
    auto h = parse_hamiltonian("0.25 I\n0.25 X\n0.25 Y\n0.25 Z\n");
    return {"depolarizing", h, parse_observable("1 Z"), basis(2, 0), 1.0};
}

HamiltonianDecomposition random_pauli_hamiltonian(int qubits, int terms, RandomStream &rng)
{
    if (qubits < 1 || qubits > 16) {
        throw std::invalid_argument("random_pauli_hamiltonian: qubits must be in [1, 16]");
    }
    const double available = std::pow(4.0, qubits) - 1.0;
    if (terms < 1 || terms > available) {
        throw std::invalid_argument("random_pauli_hamiltonian: bad term count");
    }
    static constexpr char kLetters[] = {'I', 'X', 'Y', 'Z'};
    std::set<std::string> seen;
    std::vector<WeightedTerm> out;
    while (static_cast<int>(out.size()) < terms) {
        std::string letters;
        for (int q = 0; q < qubits; ++q) {
            letters.push_back(kLetters[rng.next() & 3u]);
        }
        if (letters.find_first_not_of('I') == std::string::npos || !seen.insert(letters).second) {
            continue;
        }
        const double weight = 0.05 + 0.95 * (1.0 - rng.uniform());
        const int sign = (rng.next() & 1u) ? 1 : -1;
        out.push_back({weight, PauliString(letters), sign});
    }
    return HamiltonianDecomposition(std::move(out));
}

linalg::HermitianOperator parse_observable(std::string_view text, int qubit_cap)
{
    return dense(parse_hamiltonian(text), qubit_cap);
}

Vector parse_state(std::string_view label, int qubits)
{
    if (qubits < 1 || qubits > kDefaultQubitCap) {
        throw std::invalid_argument("parse_state: unsupported qubit count");
    }
    const Eigen::Index dim = Eigen::Index{1} << qubits;
    if (label.starts_with("plus")) {
        auto rest = label.substr(4);
        int n = 1;
        if (!rest.empty()) {
            if (rest.front() != '^') {
                throw std::invalid_argument("parse_state: expected plus^n, got '" + std::string(label) + "'");
            }
            rest.remove_prefix(1);
            const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), n);
            if (ec != std::errc() || ptr != rest.data() + rest.size()) {
                throw std::invalid_argument("parse_state: bad qubit count in '" + std::string(label) + "'");
            }
        } else {
            n = qubits;
        }
        if (n != qubits) {
            throw std::invalid_argument("parse_state: state has " + std::to_string(n) + " qubits, expected " +
                                        std::to_string(qubits));
        }
        return Vector::Constant(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
    }
    if (static_cast<int>(label.size()) != qubits) {
        throw std::invalid_argument("parse_state: label '" + std::string(label) + "' does not have " +
                                    std::to_string(qubits) + " qubits");
    }
    Eigen::Index index = 0;
    for (const char c : label) {
        if (c != '0' && c != '1') {
            throw std::invalid_argument("parse_state: invalid character in '" + std::string(label) + "'");
        }
        index = (index << 1) | (c == '1' ? 1 : 0);
    }
    return basis(dim, index);
}

} // namespace qflo::benchmarks
