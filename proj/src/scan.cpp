#include "qflo/scan.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qflo/generator.hpp"
#include "qflo/parallel.hpp"
#include "qflo/pipeline.hpp"
#include "qflo/qdrift.hpp"

namespace qflo::scan {

SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) {
        throw std::invalid_argument("fit_loglog_slope: x and y lengths differ");
    }
    if (x.size() < 4) {
        throw std::invalid_argument("fit_loglog_slope: need at least 4 points");
    }
    const auto n = static_cast<double>(x.size());
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::invalid_argument("fit_loglog_slope: data must be strictly positive");
        }
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const double mx = pairwise_sum(lx) / n;
    const double my = pairwise_sum(ly) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double dx = lx[i] - mx;
        const double dy = ly[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("fit_loglog_slope: all x values are equal");
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    // constant y: the fit is exact
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

void attach_fit(ScanResult &result)
{
    result.fit.reset();
    if (result.rows.size() < 4) {
        return;
    }
    std::vector<double> x, y;
    for (const auto &row : result.rows) {
        if (!(row.x > 0.0) || !(row.y > 0.0)) {
            return;
        }
        x.push_back(row.x);
        y.push_back(row.y);
    }
    result.fit = fit_loglog_slope(x, y);
}

ScanResult convergence_scan(const HamiltonianDecomposition &h, const linalg::HermitianOperator &a,
                            const linalg::DensityMatrix &rho0, double total_time, std::span<const std::int64_t> n_list,
                            unsigned threads)
{
    const double exact = expectation_exact_evolution(h, a, rho0, total_time);
    std::vector<double> values(n_list.size());
    parallel_for(n_list.size(), threads,
                 [&](std::size_t i) { values[i] = expectation_exact(h, a, rho0, total_time, n_list[i]); });
    ScanResult result{"s", "abs_error", {}, std::nullopt};
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        const auto n = static_cast<double>(n_list[i]);
        result.rows.push_back({1.0 / n, std::abs(values[i] - exact), {{"N", n}, {"value", values[i]}, {"exact", exact}}});
    }
    attach_fit(result);
    return result;
}

ScanResult generator_scan(const HamiltonianDecomposition &h, double total_time, std::span<const double> s_list)
{
    ScanResult result{"s", "deviation", {}, std::nullopt};
    for (const double s : s_list) {
        const auto probe = generator::generator(h, s, total_time);
        result.rows.push_back({s,
                               probe.deviation,
                               {{"min_eig_modulus", probe.spectrum.min_eig_modulus},
                                {"eigvec_condition", probe.spectrum.eigvec_condition}}});
    }
    attach_fit(result);
    return result;
}

ScanResult order_scan(const HamiltonianDecomposition &h, const linalg::HermitianOperator &a,
                      const linalg::DensityMatrix &rho0, double total_time, int m, std::span<const double> scales)
{
    const double exact = expectation_exact_evolution(h, a, rho0, total_time);
    ScanResult result{"s_m", "abs_error", {}, std::nullopt};
    for (const double scale : scales) {
        const auto est = pipeline::noiseless_estimate_at_scale(h, a, rho0, total_time, m, scale);
        const auto n_m = static_cast<double>(est.schedule.step_counts.back());
        result.rows.push_back({1.0 / n_m,
                               std::abs(est.estimate - exact),
                               {{"m", static_cast<double>(m)},
                                {"scale", scale},
                                {"N_m", n_m},
                                {"one_norm", est.weights.one_norm},
                                {"estimate", est.estimate}}});
    }
    attach_fit(result);
    return result;
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace qflo::scan
