#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qflo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised when a numerical routine cannot produce a trustworthy result
/// (missing logarithm, ill-conditioned fit, divergent series). The CLI maps
/// this to exit code 3.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when an operation would exceed a configured dimension cap.
class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

namespace linalg {

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kDensityTol = 1e-10;
inline constexpr double kLogMinModulus = 1e-10;
inline constexpr double kLogMaxCondition = 1e8;

/// Square complex matrix that is Hermitian within kHermitianTol relative to its
/// largest entry. Construction validates; inputs are never symmetrized.
class HermitianOperator {
  public:
    explicit HermitianOperator(Matrix m);

    const Matrix &matrix() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }

  private:
    Matrix m_;
};

/// Trace-one, Hermitian, positive semidefinite matrix.
class DensityMatrix {
  public:
    explicit DensityMatrix(Matrix m);

    static DensityMatrix pure(const Vector &psi);

    const Matrix &matrix() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }

  private:
    Matrix m_;
};

/// Linear map on d x d operators stored as a d^2 x d^2 matrix acting on
/// column-stacked vectors. Conjugation X -> U X U^dag is conj(U) (x) U.
struct Superoperator {
    Matrix matrix;

    Superoperator() = default;
    explicit Superoperator(Matrix m);

    /// Dimension d of the operators the map acts on.
    Eigen::Index op_dim() const noexcept { return op_dim_; }

    static Superoperator identity(Eigen::Index d);

  private:
    Eigen::Index op_dim_ = 0;
};

struct EigenDecomposition {
    RealVector values; // ascending
    Matrix vectors;    // columns are orthonormal eigenvectors
};

EigenDecomposition hermitian_eig(const HermitianOperator &h);

/// exp(-i theta H), through the eigendecomposition of H.
Matrix unitary_exp(const HermitianOperator &h, double theta);

/// Scaling-and-squaring exponential of an arbitrary square matrix.
Matrix matrix_exp(const Matrix &m);

/// Spectral data gathered while taking a logarithm; also attached to errors.
struct LogSpectrum {
    double min_eig_modulus = 0.0;
    double eigvec_condition = 0.0;
};

class LogarithmError : public NumericalError {
  public:
    enum class Kind { DoesNotExist, NearDefective };

    LogarithmError(Kind kind, LogSpectrum spectrum, const std::string &what)
        : NumericalError(what), kind_(kind), spectrum_(spectrum) {}

    Kind kind() const noexcept { return kind_; }
    const LogSpectrum &spectrum() const noexcept { return spectrum_; }

  private:
    Kind kind_;
    LogSpectrum spectrum_;
};

/// Principal logarithm by diagonalization. Throws LogarithmError when an
/// eigenvalue modulus is <= kLogMinModulus ("does not exist") or when the
/// eigenvector matrix has condition number above kLogMaxCondition.
Superoperator matrix_log_principal(const Superoperator &s, LogSpectrum *spectrum = nullptr);

/// ||exp(log) - s|| / ||s|| in the spectral norm.
double log_roundtrip_error(const Superoperator &log, const Superoperator &s);

/// Matrix of ad_H = [H, .], i.e. I (x) H - H^T (x) I.
Superoperator adjoint_superoperator(const HermitianOperator &h);

Superoperator conjugation_superoperator(const Matrix &u);

Vector vectorize(const Matrix &b);
Matrix devectorize(const Vector &v, Eigen::Index d);
Matrix apply_superoperator(const Superoperator &s, const Matrix &b);

struct CptpReport {
    double trace_preservation_defect = 0.0;
    double choi_min_eig = 0.0;

    bool passes(double tol) const noexcept
    {
        return trace_preservation_defect <= tol && choi_min_eig >= -tol;
    }
};

CptpReport cptp_check(const Superoperator &s);

/// Choi matrix sum_ij |i><j| (x) S(|i><j|).
Matrix choi_matrix(const Superoperator &s);

double spectral_norm(const Matrix &m);
double trace_norm(const Matrix &m);

/// Largest |m_ij - conj(m_ji)|.
double hermiticity_defect(const Matrix &m);

} // namespace linalg
} // namespace qflo
