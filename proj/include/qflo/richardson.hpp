#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qflo::richardson {

/// sin^2(pi (2j - 1) / (4k)) for 1 <= j <= k.
double chebyshev_x(int j, int k);

/// Squared: y_j = k_j^2 (the schedule whose conditioning is analysed).
/// Unsquared: y_j = k_j, the variant written in the qFLO pseudocode.
enum class NodeVariant { Squared, Unsquared };

struct ChebyshevNodes {
    int m = 0;
    double radius = 0.0;          // R = sqrt(8) m / pi
    std::vector<double> x;        // x_j^{(2m)}, increasing in j
    std::vector<std::int64_t> k;  // ceil(R / sqrt(x_j)), strictly decreasing
    std::vector<std::int64_t> y;  // k_j^2 (or k_j for the unsquared variant)
    NodeVariant variant = NodeVariant::Squared;
};

ChebyshevNodes build_nodes(int m, NodeVariant variant = NodeVariant::Squared);

/// Realized integer schedule: s_j = 1/N_j, t_j = T/N_j. `scale` is l in
/// s_j = l / y_j before rounding, i.e. y_m / N_m.
struct StepSchedule {
    std::vector<std::int64_t> step_counts;
    std::vector<double> step_sizes;
    std::vector<double> step_times;
    double scale = 0.0;
};

struct Weights {
    std::vector<double> b;
    double one_norm = 0.0;
};

/// Lagrange-at-zero weights b_k = prod_{j != k} 1 / (1 - t_k / t_j).
Weights weights_from_steps(std::span<const double> step_times);

/// Same weights from integer step counts, using t_k / t_j = N_j / N_k.
/// Independent of T.
Weights weights_from_step_counts(std::span<const std::int64_t> step_counts);

/// Weights for the ideal nodes (step counts proportional to y_j).
Weights ideal_weights(const ChebyshevNodes &nodes);

/// rho_0 = sum b - 1; rho_p = sum b_j s_j^p / sum |b_j| s_j^p for p = 1..max_power.
std::vector<double> vandermonde_residuals(const Weights &w, std::span<const double> step_sizes, int max_power);

/// sum_j b_j f_j, accumulated in descending |b_j| order with Neumaier summation.
double extrapolate(std::span<const double> values, const Weights &w);

struct ConditioningReport {
    double one_norm = 0.0;
    double threshold = 0.0; // 4 ln(m + 2), a diagnostic constant
    bool amplification_warning = false;
};

ConditioningReport conditioning_report(const Weights &w);

} // namespace qflo::richardson
