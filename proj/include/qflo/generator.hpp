#pragma once

#include <span>
#include <vector>

#include "qflo/hamiltonian.hpp"
#include "qflo/linalg.hpp"

namespace qflo::generator {

using linalg::Superoperator;

/// Hard cap for superoperator construction (d^2 = 256).
inline constexpr int kSuperoperatorQubitCap = 4;
/// Default cap for logarithm-based generator work.
inline constexpr int kGeneratorQubitCap = 2;

/// sum_j p_j conj(U_j) (x) U_j with U_j = exp(-i lambda t H_j).
Superoperator channel_superoperator(const HamiltonianDecomposition &h, double t,
                                    int qubit_cap = kSuperoperatorQubitCap);

struct LogExistence {
    double min_eig_modulus = 0.0;
    bool exists = false;
};

/// Reports whether the channel at step time t has a logarithm (smallest
/// eigenvalue modulus above 1e-10). Never throws for numerical reasons.
LogExistence log_existence_check(const HamiltonianDecomposition &h, double t,
                                 int qubit_cap = kSuperoperatorQubitCap);

struct GeneratorProbe {
    double s = 0.0;
    double t = 0.0; // s T
    Superoperator generator;
    double deviation = 0.0; // ||G(s) - ad_H||_2
    linalg::LogSpectrum spectrum;
};

/// G(s) = log(E_s) / (-i s T). Requires s T lambda < 1/2.
GeneratorProbe generator(const HamiltonianDecomposition &h, double s, double total_time,
                         int qubit_cap = kGeneratorQubitCap);

struct SeriesProbeResult {
    std::vector<int> orders;
    std::vector<double> coefficients;
    double fit_residual = 0.0; // RMS
    double condition = 0.0;    // of the column-equilibrated design matrix
};

inline constexpr double kSeriesMaxCondition = 1e12;

/// Least-squares fit of f(s_i) - f0 = sum_{j=1}^{max_order} alpha_j s_i^j.
SeriesProbeResult series_probe(std::span<const double> s, std::span<const double> f, double f0, int max_order);

struct EkBoundProbe {
    int k = 0;
    double h = 0.0;           // spacing in s
    double estimate = 0.0;    // ||E_k|| proxy (spectral norm)
    double bound = 0.0;       // (4 lambda)^k
    double condition = 0.0;   // divided-difference stencil amplification
    bool skipped = false;
    std::string note;

    bool within_bound(double slack = 1.1) const noexcept { return skipped || estimate <= slack * bound; }
};

/// Divided difference of order k-1 of G over s in {h, ..., k h}, h = 0.1 / (T lambda 2^k),
/// taken in the variable sT. Only k in {2, 3, 4}.
EkBoundProbe ek_bound_probe(const HamiltonianDecomposition &h, double total_time, int k,
                            int qubit_cap = kGeneratorQubitCap);

} // namespace qflo::generator
