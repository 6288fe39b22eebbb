#include "qflo/pipeline.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qflo/parallel.hpp"

namespace qflo::pipeline {

namespace {

constexpr int kMinOrder = 2;
constexpr double kBoundTermCutoff = 1e-16;
constexpr int kBoundMaxTerms = 200;

std::int64_t ceil_tolerant(double x)
{
    // ceil, ignoring relative rounding noise just above an integer
    return static_cast<std::int64_t>(std::ceil(x - 1e-12 * std::max(1.0, std::abs(x))));
}

std::vector<double> node_values_noiseless(const HamiltonianDecomposition &h, const HermitianOperator &a,
                                          const DensityMatrix &rho0, double total_time,
                                          const std::vector<std::int64_t> &steps, unsigned threads)
{
    std::vector<double> values(steps.size());
    parallel_for(steps.size(), threads,
                 [&](std::size_t j) { values[j] = expectation_exact(h, a, rho0, total_time, steps[j]); });
    return values;
}

} // namespace

int select_order(double epsilon, OrderPolicy policy)
{
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("select_order: epsilon must lie in (0, 1)");
    }
    const double log_inv = std::log(1.0 / epsilon);
    double raw = log_inv;
    if (policy == OrderPolicy::LogLog) {
        raw = log_inv / std::max(1.0, std::log(log_inv));
    }
    return std::max<int>(kMinOrder, static_cast<int>(ceil_tolerant(raw)));
}

std::int64_t base_step_count(double lambda, double total_time, double epsilon, int m, double b_one_norm)
{
    if (!(lambda * total_time > 0.0)) {
        throw std::invalid_argument("base_step_count: lambda T must be positive");
    }
    if (!(epsilon > 0.0) || !(b_one_norm > 0.0) || m < 1) {
        throw std::invalid_argument("base_step_count: epsilon, ||b||_1 and m must be positive");
    }
    const double lt8 = 8.0 * lambda * total_time;
    const double n = 4.0 * lt8 * lt8 * std::pow(b_one_norm / epsilon, 1.0 / m);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(n)));
}

richardson::StepSchedule step_counts(const richardson::ChebyshevNodes &nodes, std::int64_t base_steps,
                                     double total_time)
{
    if (base_steps < 1) {
        throw std::invalid_argument("step_counts: N_m must be >= 1");
    }
    const std::size_t m = nodes.y.size();
    const std::int64_t y_m = nodes.y.back();
    richardson::StepSchedule schedule;
    schedule.step_counts.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        schedule.step_counts[j] = (base_steps * nodes.y[j] + y_m - 1) / y_m;
    }
    for (std::size_t j = m - 1; j-- > 0;) {
        if (schedule.step_counts[j] <= schedule.step_counts[j + 1]) {
            schedule.step_counts[j] = schedule.step_counts[j + 1] + 1;
        }
    }
    for (const auto n : schedule.step_counts) {
        schedule.step_sizes.push_back(1.0 / static_cast<double>(n));
        schedule.step_times.push_back(total_time / static_cast<double>(n));
    }
    schedule.scale = static_cast<double>(y_m) / static_cast<double>(base_steps);
    return schedule;
}

std::int64_t shots_per_node(double a_norm, double eps_data, double delta, int m)
{
    if (!(eps_data > 0.0)) {
        throw std::invalid_argument("shots_per_node: eps_data must be positive");
    }
    if (!(delta > 0.0 && delta < 1.0) || m < 1) {
        throw std::invalid_argument("shots_per_node: need 0 < delta < 1 and m >= 1");
    }
    const double n = (a_norm * a_norm) / (eps_data * eps_data) * std::log(2.0 * m / delta);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(n)));
}

ErrorBudget budget_split(double epsilon, double b_one_norm)
{
    if (!(epsilon > 0.0) || !(b_one_norm > 0.0)) {
        throw std::invalid_argument("budget_split: epsilon and ||b||_1 must be positive");
    }
    return {epsilon / 2.0, epsilon / (2.0 * b_one_norm)};
}

TheoreticalBound theoretical_bound(double lambda, double total_time, double s_m, int m, double b_one_norm,
                                   double a_norm)
{
    TheoreticalBound bound;
    const double lt8 = 8.0 * lambda * total_time;
    bound.ratio = lt8 * s_m;
    if (!(bound.ratio < 1.0)) {
        bound.value = std::numeric_limits<double>::infinity();
        return bound;
    }
    bound.converges = true;
    double inner = 0.0;
    double term = 1.0;
    for (int l = 1; l <= m; ++l) {
        term *= lt8 / l;
        inner += term;
    }
    const double prefactor = a_norm * b_one_norm * inner;
    double power = std::pow(bound.ratio, m);
    for (int j = 0; j < kBoundMaxTerms; ++j) {
        const double t = prefactor * power;
        bound.value += t;
        ++bound.terms;
        if (t < kBoundTermCutoff) {
            break;
        }
        power *= bound.ratio;
    }
    return bound;
}

void validate(const QfloRequest &request)
{
    if (!(request.epsilon > 0.0 && request.epsilon < 1.0)) {
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    }
    if (!(request.delta > 0.0 && request.delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0, 1)");
    }
    if (!(request.total_time > 0.0)) {
        throw std::invalid_argument("total time must be positive");
    }
    if (request.initial_state.dim() != request.hamiltonian.dim() ||
        request.observable.dim() != request.hamiltonian.dim()) {
        throw std::invalid_argument("state, observable and Hamiltonian dimensions differ");
    }
}

QfloResult run(const QfloRequest &request)
{
    validate(request);
    const auto &h = request.hamiltonian;
    const double lambda = h.lambda();
    QfloResult result;

    result.order = select_order(request.epsilon, request.order_policy);
    const int m = result.order;
    const bool canonical = request.schedule == ScheduleVariant::Canonical;
    result.nodes = richardson::build_nodes(m, canonical ? richardson::NodeVariant::Squared
                                                        : richardson::NodeVariant::Unsquared);

    // The budget is fixed from the ideal nodes before any rounding.
    result.ideal_one_norm = richardson::ideal_weights(result.nodes).one_norm;
    result.budget = budget_split(request.epsilon, result.ideal_one_norm);
    const double power_numerator = canonical ? result.ideal_one_norm : std::log(static_cast<double>(m));
    result.base_steps =
        base_step_count(lambda, request.total_time, result.budget.extrapolation, m, power_numerator);
    result.schedule = step_counts(result.nodes, result.base_steps, request.total_time);
    result.weights = richardson::weights_from_step_counts(result.schedule.step_counts);

    const ObservableMeasurer measurer(request.observable);
    result.observable_norm = measurer.norm();
    result.shot_budget = shots_per_node(result.observable_norm, result.budget.data, request.delta, m);

    const auto &steps = result.schedule.step_counts;
    result.per_node.resize(steps.size());
    if (request.mode == Mode::Noiseless) {
        const auto values = node_values_noiseless(h, request.observable, request.initial_state.density(),
                                                  request.total_time, steps, request.threads);
        for (std::size_t j = 0; j < steps.size(); ++j) {
            result.per_node[j] = {steps[j], 0, values[j], 0.0};
        }
    } else {
        for (std::size_t j = 0; j < steps.size(); ++j) {
            const QdriftSampler sampler(h, request.initial_state, request.observable, request.total_time, steps[j]);
            const auto shots = sampler.shots(request.master_seed, j, static_cast<std::size_t>(result.shot_budget),
                                             request.threads);
            const auto summary = summarize(shots);
            result.per_node[j] = {steps[j], result.shot_budget, summary.mean, summary.standard_error};
        }
    }

    std::vector<double> means;
    for (const auto &node : result.per_node) {
        means.push_back(node.mean);
        result.total_gate_count += node.steps * node.shots;
        result.max_depth = std::max(result.max_depth, node.steps);
    }
    result.estimate = richardson::extrapolate(means, result.weights);
    result.theoretical_bound = theoretical_bound(lambda, request.total_time, result.schedule.step_sizes.back(), m,
                                                 result.weights.one_norm, result.observable_norm);
    return result;
}

ScaledEstimate noiseless_estimate_at_scale(const HamiltonianDecomposition &h, const HermitianOperator &a,
                                           const DensityMatrix &rho0, double total_time, int m, double scale)
{
    if (!(scale > 0.0)) {
        throw std::invalid_argument("scale must be positive");
    }
    const auto nodes = richardson::build_nodes(m);
    const auto base = std::max<std::int64_t>(1, ceil_tolerant(static_cast<double>(nodes.y.back()) / scale));
    ScaledEstimate out;
    out.schedule = step_counts(nodes, base, total_time);
    out.weights = richardson::weights_from_step_counts(out.schedule.step_counts);
    out.node_values = node_values_noiseless(h, a, rho0, total_time, out.schedule.step_counts, 1);
    out.estimate = richardson::extrapolate(out.node_values, out.weights);
    return out;
}

} // namespace qflo::pipeline
