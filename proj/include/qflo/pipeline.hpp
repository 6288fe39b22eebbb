#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qflo/hamiltonian.hpp"
#include "qflo/qdrift.hpp"
#include "qflo/richardson.hpp"

namespace qflo::pipeline {

enum class Mode { Noiseless, ShotSampled };

/// Ceil: m = ceil(ln(1/eps)). LogLog: m = ceil(ln(1/eps) / ln ln(1/eps)).
/// Both are floored at 2.
enum class OrderPolicy { Ceil, LogLog };

/// Canonical: squared nodes y_j = k_j^2 and the (||b||_1 / eps)^(1/m) factor.
/// Pseudocode: unsquared nodes and a (ln(m) / eps)^(1/m) factor.
enum class ScheduleVariant { Canonical, Pseudocode };

int select_order(double epsilon, OrderPolicy policy = OrderPolicy::Ceil);

/// ceil(4 (8 lambda T)^2 (b_norm / eps)^(1/m))
std::int64_t base_step_count(double lambda, double total_time, double epsilon, int m, double b_one_norm);

/// N_j = ceil(N_m y_j / y_m), bumped upward where needed so all N_j are distinct.
richardson::StepSchedule step_counts(const richardson::ChebyshevNodes &nodes, std::int64_t base_steps,
                                     double total_time);

/// ceil(||A||^2 / eps_data^2 * ln(2m / delta))
std::int64_t shots_per_node(double a_norm, double eps_data, double delta, int m);

struct ErrorBudget {
    double extrapolation = 0.0;
    double data = 0.0;
};

/// eps_ext = eps/2, eps_data = eps/(2 ||b||_1).
ErrorBudget budget_split(double epsilon, double b_one_norm);

struct TheoreticalBound {
    double value = 0.0;
    double ratio = 0.0; // 8 lambda T s_m; the series converges when < 1
    bool converges = false;
    int terms = 0;
};

/// ||A|| ||b||_1 sum_{j >= m} (8 lambda T s_m)^j sum_{l=1}^{m} (8 lambda T)^l / l!
TheoreticalBound theoretical_bound(double lambda, double total_time, double s_m, int m, double b_one_norm,
                                   double a_norm);

struct QfloRequest {
    HamiltonianDecomposition hamiltonian;
    InitialState initial_state;
    HermitianOperator observable;
    double total_time = 1.0;
    double epsilon = 0.01;
    double delta = 0.05;
    std::uint64_t master_seed = 1;
    Mode mode = Mode::Noiseless;
    OrderPolicy order_policy = OrderPolicy::Ceil;
    ScheduleVariant schedule = ScheduleVariant::Canonical;
    unsigned threads = 1;
};

struct NodeResult {
    std::int64_t steps = 0;
    std::int64_t shots = 0;
    double mean = 0.0;
    double standard_error = 0.0;
};

struct QfloResult {
    double estimate = 0.0;
    int order = 0;
    richardson::ChebyshevNodes nodes;
    richardson::StepSchedule schedule;
    std::vector<NodeResult> per_node;
    richardson::Weights weights;       // from realized step counts
    double ideal_one_norm = 0.0;       // from ideal nodes, used for the budget
    ErrorBudget budget;
    std::int64_t base_steps = 0;       // N_m
    std::int64_t shot_budget = 0;      // per node, shot mode
    std::int64_t total_gate_count = 0; // sum_j N_j shots_j
    std::int64_t max_depth = 0;        // max_j N_j
    double observable_norm = 0.0;
    TheoreticalBound theoretical_bound;
};

void validate(const QfloRequest &request);

QfloResult run(const QfloRequest &request);

/// Noiseless order-m estimate with s_j = scale / y_j (N_m = ceil(y_m / scale)).
struct ScaledEstimate {
    richardson::StepSchedule schedule;
    richardson::Weights weights;
    std::vector<double> node_values;
    double estimate = 0.0;
};

ScaledEstimate noiseless_estimate_at_scale(const HamiltonianDecomposition &h, const HermitianOperator &a,
                                           const DensityMatrix &rho0, double total_time, int m, double scale);

} // namespace qflo::pipeline
