#include "qflo/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "qflo/random.hpp"

namespace qflo {

PauliString::PauliString(std::string letters) : letters_(std::move(letters))
{
    if (letters_.empty()) {
        throw std::invalid_argument("PauliString: empty string");
    }
    if (letters_.size() > 62) {
        throw DimensionError("PauliString: too many qubits");
    }
    const int n = qubits();
    for (int q = 0; q < n; ++q) {
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
        switch (letters_[static_cast<std::size_t>(q)]) {
        case 'I':
            break;
        case 'X':
            flip_ |= bit;
            break;
        case 'Y':
            flip_ |= bit;
            phase_ |= bit;
            ++y_count_;
            break;
        case 'Z':
            phase_ |= bit;
            break;
        default:
            throw std::invalid_argument("invalid Pauli character '" +
                                        std::string(1, letters_[static_cast<std::size_t>(q)]) +
                                        "' in \"" + letters_ + "\"");
        }
    }
}

Complex PauliString::phase(std::uint64_t x) const noexcept
{
    // i^{#Y} * (-1)^{popcount(x & phase_mask)}
    static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    Complex p = kIPow[y_count_ & 3];
    if (std::popcount(x & phase_) & 1) {
        p = -p;
    }
    return p;
}

Matrix PauliString::dense() const
{
    const Eigen::Index d = Eigen::Index{1} << qubits();
    Matrix m = Matrix::Zero(d, d);
    for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(d); ++x) {
        m(static_cast<Eigen::Index>(x ^ flip_), static_cast<Eigen::Index>(x)) = phase(x);
    }
    return m;
}

HamiltonianDecomposition::HamiltonianDecomposition(std::vector<WeightedTerm> terms)
    : terms_(std::move(terms))
{
    if (terms_.empty()) {
        throw std::invalid_argument("Hamiltonian has no terms");
    }
    qubits_ = terms_.front().op.qubits();
    for (const auto &t : terms_) {
        if (!(t.weight > 0.0) || !std::isfinite(t.weight)) {
            throw std::invalid_argument("Hamiltonian term weights must be positive and finite");
        }
        if (t.sign != 1 && t.sign != -1) {
            throw std::invalid_argument("Hamiltonian term sign must be +1 or -1");
        }
        if (t.op.qubits() != qubits_) {
            throw std::invalid_argument("inconsistent Pauli string lengths");
        }
        lambda_ += t.weight;
        lambda_max_ = std::max(lambda_max_, t.weight);
    }
    probs_.reserve(terms_.size());
    cdf_.reserve(terms_.size());
    double acc = 0.0;
    for (const auto &t : terms_) {
        probs_.push_back(t.weight / lambda_);
        acc += probs_.back();
        cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
}

std::size_t HamiltonianDecomposition::sample_index(double u) const noexcept
{
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto j = static_cast<std::size_t>(it - cdf_.begin());
    return std::min(j, cdf_.size() - 1);
}

HamiltonianDecomposition HamiltonianDecomposition::scaled(double factor) const
{
    if (!(factor > 0.0)) {
        throw std::invalid_argument("scale factor must be positive");
    }
    auto copy = terms_;
    for (auto &t : copy) {
        t.weight *= factor;
    }
    return HamiltonianDecomposition(std::move(copy));
}

HamiltonianDecomposition parse_hamiltonian(std::string_view text)
{
    std::vector<WeightedTerm> terms;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        std::istringstream fields{std::string(line)};
        std::string coef_tok;
        std::string letters;
        if (!(fields >> coef_tok)) {
            continue;
        }
        const auto where = " (line " + std::to_string(line_no) + ")";
        std::string extra;
        if (!(fields >> letters) || (fields >> extra)) {
            throw std::invalid_argument("expected '<coefficient> <pauli letters>'" + where);
        }
        double coef = 0.0;
        const auto *first = coef_tok.data();
        const auto *last = first + coef_tok.size();
        if (*first == '+') {
            ++first;
        }
        const auto [ptr, ec] = std::from_chars(first, last, coef);
        if (ec != std::errc() || ptr != last || !std::isfinite(coef)) {
            throw std::invalid_argument("invalid coefficient '" + coef_tok + "'" + where);
        }
        if (coef == 0.0) {
            throw std::invalid_argument("zero coefficient" + where);
        }
        PauliString op(letters);
        if (!terms.empty() && op.qubits() != terms.front().op.qubits()) {
            throw std::invalid_argument("inconsistent Pauli string lengths" + where);
        }
        terms.push_back({std::abs(coef), std::move(op), coef < 0.0 ? -1 : 1});
    }
    if (terms.empty()) {
        throw std::invalid_argument("empty Hamiltonian file");
    }
    return HamiltonianDecomposition(std::move(terms));
}

HamiltonianDecomposition load_hamiltonian(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot read Hamiltonian file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_hamiltonian(buf.str());
}

std::string serialize_hamiltonian(const HamiltonianDecomposition &h)
{
    std::string out;
    char num[40];
    for (const auto &t : h.terms()) {
        std::snprintf(num, sizeof num, "%.17g", t.sign * t.weight);
        out += num;
        out += ' ';
        out += t.op.letters();
        out += '\n';
    }
    return out;
}

linalg::HermitianOperator dense(const HamiltonianDecomposition &h, int qubit_cap)
{
    if (h.qubits() > qubit_cap) {
        throw DimensionError("dense: " + std::to_string(h.qubits()) + " qubits exceeds cap of " +
                             std::to_string(qubit_cap));
    }
    const Eigen::Index d = h.dim();
    Matrix m = Matrix::Zero(d, d);
    for (const auto &t : h.terms()) {
        const double c = t.sign * t.weight;
        for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(d); ++x) {
            m(static_cast<Eigen::Index>(x ^ t.op.flip_mask()), static_cast<Eigen::Index>(x)) +=
                c * t.op.phase(x);
        }
    }
    return linalg::HermitianOperator(std::move(m));
}

std::size_t sample_term(const HamiltonianDecomposition &h, RandomStream &rng)
{
    return h.sample_index(rng.uniform());
}

} // namespace qflo
