#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qflo/hamiltonian.hpp"
#include "qflo/linalg.hpp"

namespace qflo::scan {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares on (ln x, ln y). Needs >= 4 points, all positive.
SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct ScanRow {
    double x = 0.0;
    double y = 0.0;
    std::vector<std::pair<std::string, double>> meta;
};

struct ScanResult {
    std::string x_label;
    std::string y_label;
    std::vector<ScanRow> rows;
    std::optional<SlopeFit> fit; // present when >= 4 rows and every x, y > 0
};

/// Fills `fit` when the rows allow it.
void attach_fit(ScanResult &result);

/// x = 1/N, y = |f_A(1/N) - exact|; meta N, value, exact.
ScanResult convergence_scan(const HamiltonianDecomposition &h, const linalg::HermitianOperator &a,
                            const linalg::DensityMatrix &rho0, double total_time, std::span<const std::int64_t> n_list,
                            unsigned threads = 1);

/// x = s, y = ||G(s) - ad_H||; meta min_eig_modulus, eigvec_condition.
ScanResult generator_scan(const HamiltonianDecomposition &h, double total_time, std::span<const double> s_list);

/// Noiseless order-m estimates with the scale swept: x = s_m = 1/N_m,
/// y = |estimate - exact|; meta m, scale, N_m, estimate.
ScanResult order_scan(const HamiltonianDecomposition &h, const linalg::HermitianOperator &a,
                      const linalg::DensityMatrix &rho0, double total_time, int m, std::span<const double> scales);

/// 17 significant digits; round-trips every finite double.
std::string format_double(double v);

} // namespace qflo::scan
