#include "qflo/richardson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qflo::richardson {

namespace {

double neumaier_sum(std::span<const double> terms)
{
    double sum = 0.0;
    double comp = 0.0;
    for (const double t : terms) {
        const double next = sum + t;
        if (std::abs(sum) >= std::abs(t)) {
            comp += (sum - next) + t;
        } else {
            comp += (t - next) + sum;
        }
        sum = next;
    }
    return sum + comp;
}

Weights finish(std::vector<double> b)
{
    Weights w{std::move(b), 0.0};
    for (const double v : w.b) {
        w.one_norm += std::abs(v);
    }
    return w;
}

} // namespace

double chebyshev_x(int j, int k)
{
    if (k < 1 || j < 1 || j > k) {
        throw std::out_of_range("chebyshev_x: need 1 <= j <= k (j=" + std::to_string(j) +
                                ", k=" + std::to_string(k) + ")");
    }
    const double s = std::sin(std::numbers::pi * (2.0 * j - 1.0) / (4.0 * k));
    return s * s;
}

ChebyshevNodes build_nodes(int m, NodeVariant variant)
{
    if (m < 1) {
        throw std::invalid_argument("build_nodes: order must be >= 1");
    }
    ChebyshevNodes nodes;
    nodes.m = m;
    nodes.variant = variant;
    nodes.radius = std::sqrt(8.0) * m / std::numbers::pi;
    for (int j = 1; j <= m; ++j) {
        const double x = chebyshev_x(j, 2 * m);
        nodes.x.push_back(x);
        nodes.k.push_back(static_cast<std::int64_t>(std::ceil(nodes.radius / std::sqrt(x))));
    }
    // Collisions after the ceiling: push the smaller-index node upward.
    for (int j = m - 2; j >= 0; --j) {
        auto &kj = nodes.k[static_cast<std::size_t>(j)];
        const auto next = nodes.k[static_cast<std::size_t>(j + 1)];
        while (kj <= next) {
            ++kj;
        }
    }
    for (const auto k : nodes.k) {
        nodes.y.push_back(variant == NodeVariant::Squared ? k * k : k);
    }
    return nodes;
}

Weights weights_from_steps(std::span<const double> step_times)
{
    const std::size_t m = step_times.size();
    if (m == 0) {
        throw std::invalid_argument("weights_from_steps: no step times");
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (!(step_times[i] > 0.0)) {
            throw std::invalid_argument("weights_from_steps: step times must be positive");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (step_times[i] == step_times[j]) {
                throw std::invalid_argument("weights_from_steps: duplicate step times");
            }
        }
    }
    std::vector<double> b(m, 1.0);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            if (j != k) {
                b[k] /= 1.0 - step_times[k] / step_times[j];
            }
        }
    }
    return finish(std::move(b));
}

Weights weights_from_step_counts(std::span<const std::int64_t> step_counts)
{
    const std::size_t m = step_counts.size();
    if (m == 0) {
        throw std::invalid_argument("weights_from_step_counts: no step counts");
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (step_counts[i] <= 0) {
            throw std::invalid_argument("weights_from_step_counts: step counts must be positive");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (step_counts[i] == step_counts[j]) {
                throw std::invalid_argument("weights_from_step_counts: duplicate step counts");
            }
        }
    }
    // 1 / (1 - t_k/t_j) = N_k / (N_k - N_j)
    std::vector<double> b(m, 1.0);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            if (j != k) {
                b[k] *= static_cast<double>(step_counts[k]) /
                        static_cast<double>(step_counts[k] - step_counts[j]);
            }
        }
    }
    return finish(std::move(b));
}

Weights ideal_weights(const ChebyshevNodes &nodes)
{
    return weights_from_step_counts(nodes.y);
}

std::vector<double> vandermonde_residuals(const Weights &w, std::span<const double> step_sizes, int max_power)
{
    if (step_sizes.size() != w.b.size()) {
        throw std::invalid_argument("vandermonde_residuals: length mismatch");
    }
    std::vector<double> res;
    res.push_back(neumaier_sum(w.b) - 1.0);
    std::vector<double> terms(w.b.size());
    for (int p = 1; p <= max_power; ++p) {
        double scale = 0.0;
        for (std::size_t j = 0; j < w.b.size(); ++j) {
            terms[j] = w.b[j] * std::pow(step_sizes[j], p);
            scale += std::abs(terms[j]);
        }
        res.push_back(scale > 0.0 ? neumaier_sum(terms) / scale : 0.0);
    }
    return res;
}

double extrapolate(std::span<const double> values, const Weights &w)
{
    if (values.size() != w.b.size()) {
        throw std::invalid_argument("extrapolate: " + std::to_string(values.size()) + " values for " +
                                    std::to_string(w.b.size()) + " weights");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(w.b[a]) > std::abs(w.b[b]); });
    std::vector<double> terms;
    terms.reserve(values.size());
    for (const auto j : order) {
        terms.push_back(w.b[j] * values[j]);
    }
    return neumaier_sum(terms);
}

ConditioningReport conditioning_report(const Weights &w)
{
    ConditioningReport r;
    r.one_norm = w.one_norm;
    r.threshold = 4.0 * std::log(static_cast<double>(w.b.size()) + 2.0);
    r.amplification_warning = r.one_norm > r.threshold;
    return r;
}

} // namespace qflo::richardson
