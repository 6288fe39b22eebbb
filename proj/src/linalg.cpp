#include "qflo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace qflo::linalg {

namespace {

double max_abs(const Matrix &m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_square(const Matrix &m, const char *what)
{
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
    }
}

Eigen::Index isqrt_exact(Eigen::Index n)
{
    auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    return r * r == n ? r : -1;
}

} // namespace

double hermiticity_defect(const Matrix &m)
{
    return max_abs(m - m.adjoint());
}

HermitianOperator::HermitianOperator(Matrix m) : m_(std::move(m))
{
    require_square(m_, "HermitianOperator");
    const double defect = hermiticity_defect(m_);
    if (defect > kHermitianTol * max_abs(m_)) {
        std::ostringstream os;
        os << "HermitianOperator: matrix is not Hermitian (max |M - M^dag| = " << defect << ")";
        throw std::invalid_argument(os.str());
    }
}

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m))
{
    require_square(m_, "DensityMatrix");
    const double defect = hermiticity_defect(m_);
    if (defect > kHermitianTol * std::max(1.0, max_abs(m_))) {
        throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    }
    const Complex tr = m_.trace();
    if (std::abs(tr - Complex(1.0)) > kDensityTol) {
        std::ostringstream os;
        os << "DensityMatrix: trace " << tr << " differs from 1";
        throw std::invalid_argument(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kDensityTol) {
        std::ostringstream os;
        os << "DensityMatrix: negative eigenvalue " << es.eigenvalues().minCoeff();
        throw std::invalid_argument(os.str());
    }
}

DensityMatrix DensityMatrix::pure(const Vector &psi)
{
    if (std::abs(psi.norm() - 1.0) > kDensityTol) {
        throw std::invalid_argument("DensityMatrix::pure: state is not normalized");
    }
    return DensityMatrix(psi * psi.adjoint());
}

Superoperator::Superoperator(Matrix m) : matrix(std::move(m))
{
    if (matrix.rows() != matrix.cols()) {
        throw std::invalid_argument("Superoperator: matrix must be square");
    }
    op_dim_ = isqrt_exact(matrix.rows());
    if (op_dim_ <= 0) {
        throw std::invalid_argument("Superoperator: dimension is not a perfect square");
    }
}

Superoperator Superoperator::identity(Eigen::Index d)
{
    return Superoperator(Matrix::Identity(d * d, d * d));
}

EigenDecomposition hermitian_eig(const HermitianOperator &h)
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
    if (es.info() != Eigen::Success) {
        throw NumericalError("hermitian_eig: eigensolver did not converge");
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

Matrix unitary_exp(const HermitianOperator &h, double theta)
{
    const auto eig = hermitian_eig(h);
    Vector phases(eig.values.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) {
        phases[i] = std::exp(Complex(0.0, -theta * eig.values[i]));
    }
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

Matrix matrix_exp(const Matrix &m)
{
    return m.exp();
}

Superoperator matrix_log_principal(const Superoperator &s, LogSpectrum *spectrum)
{
    Eigen::ComplexEigenSolver<Matrix> es(s.matrix, true);
    if (es.info() != Eigen::Success) {
        throw NumericalError("matrix_log_principal: eigensolver did not converge");
    }
    const Vector &w = es.eigenvalues();
    const Matrix &v = es.eigenvectors();

    LogSpectrum report;
    report.min_eig_modulus = w.cwiseAbs().minCoeff();

    Eigen::BDCSVD<Matrix> svd(v);
    const auto &sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    report.eigvec_condition = smin > 0.0 ? sv[0] / smin : std::numeric_limits<double>::infinity();
    if (spectrum != nullptr) {
        *spectrum = report;
    }

    if (report.min_eig_modulus <= kLogMinModulus) {
        std::ostringstream os;
        os << "logarithm does not exist: minimum eigenvalue modulus " << report.min_eig_modulus;
        throw LogarithmError(LogarithmError::Kind::DoesNotExist, report, os.str());
    }
    if (report.eigvec_condition > kLogMaxCondition) {
        std::ostringstream os;
        os << "near-defective superoperator: eigenvector condition number " << report.eigvec_condition;
        throw LogarithmError(LogarithmError::Kind::NearDefective, report, os.str());
    }

    Vector logw(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        logw[i] = std::log(w[i]); // principal branch, arg in (-pi, pi]
    }
    const Matrix vinv = v.partialPivLu().inverse();
    return Superoperator(v * logw.asDiagonal() * vinv);
}

double log_roundtrip_error(const Superoperator &log, const Superoperator &s)
{
    const Matrix back = matrix_exp(log.matrix);
    return spectral_norm(back - s.matrix) / spectral_norm(s.matrix);
}

Superoperator adjoint_superoperator(const HermitianOperator &h)
{
    const Eigen::Index d = h.dim();
    const Matrix &m = h.matrix();
    Matrix out = Matrix::Zero(d * d, d * d);
    // I (x) H - H^T (x) I, written blockwise.
    for (Eigen::Index j = 0; j < d; ++j) {
        out.block(j * d, j * d, d, d) += m;
        for (Eigen::Index i = 0; i < d; ++i) {
            const Complex hji = m(j, i); // (H^T)(i, j)
            if (hji != Complex(0.0)) {
                out.block(i * d, j * d, d, d).diagonal().array() -= hji;
            }
        }
    }
    return Superoperator(std::move(out));
}

Superoperator conjugation_superoperator(const Matrix &u)
{
    require_square(u, "conjugation_superoperator");
    const Eigen::Index d = u.rows();
    Matrix out(d * d, d * d);
    const Matrix uc = u.conjugate();
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            out.block(i * d, j * d, d, d) = uc(i, j) * u;
        }
    }
    return Superoperator(std::move(out));
}

Vector vectorize(const Matrix &b)
{
    return Eigen::Map<const Vector>(b.data(), b.size());
}

Matrix devectorize(const Vector &v, Eigen::Index d)
{
    if (d <= 0 || v.size() != d * d) {
        throw std::invalid_argument("devectorize: length does not match d^2");
    }
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

Matrix apply_superoperator(const Superoperator &s, const Matrix &b)
{
    if (b.rows() != s.op_dim() || b.cols() != s.op_dim()) {
        throw std::invalid_argument("apply_superoperator: dimension mismatch");
    }
    return devectorize(s.matrix * vectorize(b), s.op_dim());
}

Matrix choi_matrix(const Superoperator &s)
{
    const Eigen::Index d = s.op_dim();
    Matrix choi(d * d, d * d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            // S(|i><j|) is column i + j d of the superoperator.
            choi.block(i * d, j * d, d, d) = devectorize(s.matrix.col(i + j * d), d);
        }
    }
    return choi;
}

CptpReport cptp_check(const Superoperator &s)
{
    const Eigen::Index d = s.op_dim();
    CptpReport report;
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            Complex tr = 0.0;
            for (Eigen::Index k = 0; k < d; ++k) {
                tr += s.matrix(k + k * d, i + j * d);
            }
            const double expected = i == j ? 1.0 : 0.0;
            report.trace_preservation_defect =
                std::max(report.trace_preservation_defect, std::abs(tr - expected));
        }
    }
    const Matrix choi = choi_matrix(s);
    const Matrix herm = 0.5 * (choi + choi.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    report.choi_min_eig = es.eigenvalues().minCoeff();
    return report;
}

double spectral_norm(const Matrix &m)
{
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues()[0];
}

double trace_norm(const Matrix &m)
{
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::BDCSVD<Matrix> svd(m);
    return svd.singularValues().sum();
}

} // namespace qflo::linalg
