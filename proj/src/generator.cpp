#include "qflo/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace qflo::generator {

namespace {

void check_cap(const HamiltonianDecomposition &h, int qubit_cap, const char *what)
{
    if (h.qubits() > qubit_cap) {
        throw DimensionError(std::string(what) + ": " + std::to_string(h.qubits()) +
                             " qubits exceeds cap of " + std::to_string(qubit_cap));
    }
}

} // namespace

Superoperator channel_superoperator(const HamiltonianDecomposition &h, double t, int qubit_cap)
{
    check_cap(h, std::min(qubit_cap, kSuperoperatorQubitCap), "channel_superoperator");
    const Eigen::Index d = h.dim();
    Matrix out = Matrix::Zero(d * d, d * d);
    const auto &p = h.probabilities();
    for (std::size_t j = 0; j < h.size(); ++j) {
        const auto &term = h.terms()[j];
        const linalg::HermitianOperator hj(static_cast<double>(term.sign) * term.op.dense());
        out += p[j] * linalg::conjugation_superoperator(linalg::unitary_exp(hj, h.lambda() * t)).matrix;
    }
    return Superoperator(std::move(out));
}

LogExistence log_existence_check(const HamiltonianDecomposition &h, double t, int qubit_cap)
{
    const Superoperator s = channel_superoperator(h, t, qubit_cap);
    Eigen::ComplexEigenSolver<Matrix> es(s.matrix, false);
    LogExistence r;
    r.min_eig_modulus = es.eigenvalues().cwiseAbs().minCoeff();
    r.exists = r.min_eig_modulus > linalg::kLogMinModulus;
    return r;
}

GeneratorProbe generator(const HamiltonianDecomposition &h, double s, double total_time, int qubit_cap)
{
    check_cap(h, qubit_cap, "generator");
    if (!(s > 0.0) || !(total_time > 0.0)) {
        throw std::invalid_argument("generator: s and T must be positive");
    }
    const double t = s * total_time;
    if (!(t * h.lambda() < 0.5)) {
        throw std::invalid_argument("generator: s T lambda must be below 1/2");
    }
    GeneratorProbe probe;
    probe.s = s;
    probe.t = t;
    const Superoperator log = linalg::matrix_log_principal(channel_superoperator(h, t, qubit_cap), &probe.spectrum);
    // log / (-i t) = i log / t
    probe.generator = Superoperator(Complex(0.0, 1.0 / t) * log.matrix);
    const Superoperator ad = linalg::adjoint_superoperator(dense(h, qubit_cap));
    probe.deviation = linalg::spectral_norm(probe.generator.matrix - ad.matrix);
    return probe;
}

SeriesProbeResult series_probe(std::span<const double> s, std::span<const double> f, double f0, int max_order)
{
    if (max_order < 1) {
        throw std::invalid_argument("series_probe: max_order must be >= 1");
    }
    if (s.size() != f.size()) {
        throw std::invalid_argument("series_probe: node and value counts differ");
    }
    std::vector<double> distinct(s.begin(), s.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (static_cast<int>(distinct.size()) < max_order + 1) {
        throw std::invalid_argument("series_probe: need at least max_order + 1 distinct nodes");
    }

    const auto rows = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd design(rows, max_order);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        double p = 1.0;
        for (int j = 0; j < max_order; ++j) {
            p *= s[static_cast<std::size_t>(i)];
            design(i, j) = p;
        }
        rhs[i] = f[static_cast<std::size_t>(i)] - f0;
    }
    Eigen::VectorXd col_scale = design.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < col_scale.size(); ++j) {
        if (col_scale[j] == 0.0) {
            throw NumericalError("series_probe: zero column in design matrix");
        }
    }
    const Eigen::MatrixXd scaled = design * col_scale.cwiseInverse().asDiagonal();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto &sv = svd.singularValues();
    SeriesProbeResult result;
    result.condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : std::numeric_limits<double>::infinity();
    if (result.condition > kSeriesMaxCondition) {
        std::ostringstream os;
        os << "series_probe: design matrix condition number " << result.condition << " exceeds "
           << kSeriesMaxCondition;
        throw NumericalError(os.str());
    }
    const Eigen::VectorXd beta = svd.solve(rhs);
    const Eigen::VectorXd alpha = beta.cwiseQuotient(col_scale);
    const Eigen::VectorXd resid = design * alpha - rhs;
    result.fit_residual = std::sqrt(resid.squaredNorm() / static_cast<double>(rows));
    for (int j = 0; j < max_order; ++j) {
        result.orders.push_back(j + 1);
        result.coefficients.push_back(alpha[j]);
    }
    return result;
}

EkBoundProbe ek_bound_probe(const HamiltonianDecomposition &h, double total_time, int k, int qubit_cap)
{
    if (k < 2 || k > 4) {
        throw std::invalid_argument("ek_bound_probe: k must be 2, 3 or 4");
    }
    EkBoundProbe probe;
    probe.k = k;
    probe.bound = std::pow(4.0 * h.lambda(), k);
    probe.h = 0.1 / (total_time * h.lambda() * std::ldexp(1.0, k));

    // Newton divided difference over u_i = s_i T:
    //   G[u_1..u_k] = sum_i G(u_i) / prod_{l != i} (u_i - u_l)
    std::vector<double> u(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        u[static_cast<std::size_t>(i)] = (i + 1) * probe.h * total_time;
    }
    const Eigen::Index dd = h.dim() * h.dim();
    Matrix diff = Matrix::Zero(dd, dd);
    double weight_sum = 0.0;
    try {
        for (int i = 0; i < k; ++i) {
            double denom = 1.0;
            for (int l = 0; l < k; ++l) {
                if (l != i) {
                    denom *= u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(l)];
                }
            }
            const auto g = generator(h, (i + 1) * probe.h, total_time, qubit_cap);
            diff += g.generator.matrix / denom;
            weight_sum += 1.0 / std::abs(denom);
        }
    } catch (const linalg::LogarithmError &e) {
        probe.skipped = true;
        probe.note = e.what();
        return probe;
    }
    // Amplification of relative errors in G, in units of the widest node.
    probe.condition = weight_sum * std::pow(u.back(), k - 1);
    probe.estimate = linalg::spectral_norm(diff);
    return probe;
}

} // namespace qflo::generator
