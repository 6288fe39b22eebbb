#include "qflo/qdrift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qflo/parallel.hpp"

namespace qflo {

namespace {

constexpr double kImagResidueTol = 1e-10;
constexpr Complex kI{0.0, 1.0};

double real_trace_product(const HermitianOperator &a, const Matrix &rho)
{
    // tr(A rho) = sum_ij A_ij rho_ji
    const Complex v = (a.matrix().transpose().cwiseProduct(rho)).sum();
    if (std::abs(v.imag()) > kImagResidueTol * std::max(1.0, a.matrix().cwiseAbs().maxCoeff())) {
        std::ostringstream os;
        os << "expectation value has imaginary residue " << v.imag();
        throw NumericalError(os.str());
    }
    return v.real();
}

void check_dims(const HamiltonianDecomposition &h, Eigen::Index d, const char *what)
{
    if (h.qubits() > kDefaultQubitCap) {
        throw DimensionError(std::string(what) + ": qubit count exceeds cap");
    }
    if (d != h.dim()) {
        throw std::invalid_argument(std::string(what) + ": state dimension does not match Hamiltonian");
    }
}

// Up to this many qubits the N-fold channel is formed as a superoperator
// power. The defect S - I is kept separate from the identity so rounding
// grows like log N rather than N.
constexpr int kPowerQubitCap = 3;

Matrix defect_superoperator(const TermUnitaries &unitaries, const std::vector<double> &p)
{
    const Eigen::Index d = unitaries.dim();
    Matrix out = Matrix::Zero(d * d, d * d);
    Matrix basis = Matrix::Zero(d, d);
    Matrix term(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index i = 0; i < d; ++i) {
            basis(i, j) = 1.0;
            Matrix acc = Matrix::Zero(d, d);
            for (std::size_t k = 0; k < unitaries.size(); ++k) {
                unitaries.defect(k, basis, term);
                acc += p[k] * term;
            }
            out.col(i + j * d) = linalg::vectorize(acc);
            basis(i, j) = 0.0;
        }
    }
    return out;
}

Matrix iterate_channel(const HamiltonianDecomposition &h, const Matrix &rho0, double step_time, std::int64_t steps)
{
    const TermUnitaries unitaries(h, step_time);
    const auto &p = h.probabilities();
    if (h.qubits() <= kPowerQubitCap) {
        // (I + E)^N by binary powering, tracking only the defects.
        Matrix e = defect_superoperator(unitaries, p);
        Matrix f = Matrix::Zero(e.rows(), e.cols());
        for (std::int64_t n = steps;;) {
            if (n & 1) {
                f = (f + e + f * e).eval();
            }
            n >>= 1;
            if (n == 0) {
                break;
            }
            e = (2.0 * e + e * e).eval();
        }
        return rho0 + linalg::devectorize(f * linalg::vectorize(rho0), rho0.rows());
    }
    Matrix rho = rho0;
    Matrix next(rho.rows(), rho.cols());
    Matrix term(rho.rows(), rho.cols());
    for (std::int64_t n = 0; n < steps; ++n) {
        next.setZero();
        for (std::size_t j = 0; j < unitaries.size(); ++j) {
            unitaries.conjugate(j, rho, term);
            next += p[j] * term;
        }
        rho.swap(next);
    }
    return rho;
}

} // namespace

TermUnitaries::TermUnitaries(const HamiltonianDecomposition &h, double step_time, int qubit_cap)
    : dim_(h.dim())
{
    if (h.qubits() > qubit_cap) {
        throw DimensionError("TermUnitaries: qubit count exceeds cap");
    }
    const double lambda = h.lambda();
    terms_.reserve(h.size());
    for (const auto &t : h.terms()) {
        const double theta = lambda * step_time * t.sign;
        Rotation r{t.op.flip_mask(), std::cos(theta), std::sin(theta), {}};
        r.phase.resize(static_cast<std::size_t>(dim_));
        for (std::uint64_t x = 0; x < r.phase.size(); ++x) {
            r.phase[x] = t.op.phase(x);
        }
        terms_.push_back(std::move(r));
    }
}

void TermUnitaries::apply(std::size_t j, Vector &psi, Vector &scratch) const
{
    const Rotation &r = terms_[j];
    const Complex mis = -kI * r.sin_theta;
    for (Eigen::Index x = 0; x < dim_; ++x) {
        const auto src = static_cast<std::uint64_t>(x) ^ r.flip;
        scratch[x] = r.cos_theta * psi[x] + mis * r.phase[src] * psi[static_cast<Eigen::Index>(src)];
    }
    psi.swap(scratch);
}

void TermUnitaries::conjugate(std::size_t j, const Matrix &rho, Matrix &out) const
{
    // (c - isP) rho (c + isP) = c^2 rho + s^2 P rho P + ics (rho P - P rho)
    const Rotation &r = terms_[j];
    const double c2 = r.cos_theta * r.cos_theta;
    const double s2 = r.sin_theta * r.sin_theta;
    const Complex ics = kI * r.cos_theta * r.sin_theta;
    for (Eigen::Index col = 0; col < dim_; ++col) {
        const auto cf = static_cast<Eigen::Index>(static_cast<std::uint64_t>(col) ^ r.flip);
        const Complex pc = r.phase[static_cast<std::size_t>(col)];
        for (Eigen::Index row = 0; row < dim_; ++row) {
            const auto rf = static_cast<Eigen::Index>(static_cast<std::uint64_t>(row) ^ r.flip);
            const Complex pr = r.phase[static_cast<std::size_t>(rf)];
            const Complex p_rho = pr * rho(rf, col);
            const Complex rho_p = rho(row, cf) * pc;
            const Complex p_rho_p = pr * rho(rf, cf) * pc;
            out(row, col) = c2 * rho(row, col) + s2 * p_rho_p + ics * (rho_p - p_rho);
        }
    }
}

void TermUnitaries::defect(std::size_t j, const Matrix &rho, Matrix &out) const
{
    // U rho U^dag - rho = s^2 (P rho P - rho) + ics (rho P - P rho)
    const Rotation &r = terms_[j];
    const double s2 = r.sin_theta * r.sin_theta;
    const Complex ics = kI * r.cos_theta * r.sin_theta;
    for (Eigen::Index col = 0; col < dim_; ++col) {
        const auto cf = static_cast<Eigen::Index>(static_cast<std::uint64_t>(col) ^ r.flip);
        const Complex pc = r.phase[static_cast<std::size_t>(col)];
        for (Eigen::Index row = 0; row < dim_; ++row) {
            const auto rf = static_cast<Eigen::Index>(static_cast<std::uint64_t>(row) ^ r.flip);
            const Complex pr = r.phase[static_cast<std::size_t>(rf)];
            const Complex p_rho = pr * rho(rf, col);
            const Complex rho_p = rho(row, cf) * pc;
            const Complex p_rho_p = pr * rho(rf, cf) * pc;
            out(row, col) = s2 * (p_rho_p - rho(row, col)) + ics * (rho_p - p_rho);
        }
    }
}

Matrix TermUnitaries::dense(std::size_t j) const
{
    const Rotation &r = terms_[j];
    Matrix u = r.cos_theta * Matrix::Identity(dim_, dim_);
    for (std::uint64_t x = 0; x < static_cast<std::uint64_t>(dim_); ++x) {
        u(static_cast<Eigen::Index>(x ^ r.flip), static_cast<Eigen::Index>(x)) += -kI * r.sin_theta * r.phase[x];
    }
    return u;
}

InitialState::InitialState(Vector psi) : dim_(psi.size())
{
    if (psi.size() == 0 || std::abs(psi.norm() - 1.0) > linalg::kDensityTol) {
        throw std::invalid_argument("initial state must have unit norm");
    }
    branches_.push_back(std::move(psi));
    cdf_.push_back(1.0);
}

InitialState::InitialState(const DensityMatrix &rho) : dim_(rho.dim())
{
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
    double acc = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double w = es.eigenvalues()[k];
        if (w <= 0.0) {
            continue;
        }
        acc += w;
        branches_.push_back(es.eigenvectors().col(k));
        cdf_.push_back(acc);
    }
    for (auto &c : cdf_) {
        c /= acc;
    }
    cdf_.back() = 1.0;
}

DensityMatrix InitialState::density() const
{
    Matrix rho = Matrix::Zero(dim_, dim_);
    double prev = 0.0;
    for (std::size_t k = 0; k < branches_.size(); ++k) {
        rho += (cdf_[k] - prev) * branches_[k] * branches_[k].adjoint();
        prev = cdf_[k];
    }
    return DensityMatrix(std::move(rho));
}

const Vector &InitialState::draw(RandomStream &rng) const
{
    if (branches_.size() == 1) {
        return branches_.front();
    }
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return branches_[std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), branches_.size() - 1)];
}

ObservableMeasurer::ObservableMeasurer(const HermitianOperator &a, double merge_tol)
{
    const auto eig = linalg::hermitian_eig(a);
    vectors_ = eig.vectors;
    const Eigen::Index d = eig.values.size();
    Eigen::Index start = 0;
    while (start < d) {
        Eigen::Index end = start + 1;
        while (end < d && eig.values[end] - eig.values[end - 1] <= merge_tol) {
            ++end;
        }
        outcomes_.push_back(eig.values.segment(start, end - start).mean());
        block_start_.push_back(start);
        start = end;
    }
    block_start_.push_back(d);
    norm_ = std::max(std::abs(eig.values[0]), std::abs(eig.values[d - 1]));
}

std::vector<double> ObservableMeasurer::probabilities(const Vector &psi) const
{
    const Vector amp = vectors_.adjoint() * psi;
    std::vector<double> probs(outcomes_.size());
    for (std::size_t k = 0; k < outcomes_.size(); ++k) {
        probs[k] = amp.segment(block_start_[k], block_start_[k + 1] - block_start_[k]).squaredNorm();
    }
    return probs;
}

ShotResult ObservableMeasurer::measure(const Vector &psi, RandomStream &rng) const
{
    const auto probs = probabilities(psi);
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
        acc += probs[k];
        if (u < acc) {
            return {outcomes_[k]};
        }
    }
    return {outcomes_.back()};
}

DensityMatrix channel_apply_exact(const HamiltonianDecomposition &h, const DensityMatrix &rho, double t)
{
    check_dims(h, rho.dim(), "channel_apply_exact");
    return DensityMatrix(iterate_channel(h, rho.matrix(), t, 1));
}

DensityMatrix channel_iterate_exact(const HamiltonianDecomposition &h, const DensityMatrix &rho0, double total_time,
                                    std::int64_t steps)
{
    check_dims(h, rho0.dim(), "channel_iterate_exact");
    if (steps < 1) {
        throw std::invalid_argument("channel_iterate_exact: steps must be >= 1");
    }
    return DensityMatrix(iterate_channel(h, rho0.matrix(), total_time / static_cast<double>(steps), steps));
}

double expectation_exact(const HamiltonianDecomposition &h, const HermitianOperator &a, const DensityMatrix &rho0,
                         double total_time, std::int64_t steps)
{
    check_dims(h, rho0.dim(), "expectation_exact");
    if (steps < 1) {
        throw std::invalid_argument("expectation_exact: steps must be >= 1");
    }
    if (a.dim() != rho0.dim()) {
        throw std::invalid_argument("expectation_exact: observable dimension mismatch");
    }
    const Matrix rho = iterate_channel(h, rho0.matrix(), total_time / static_cast<double>(steps), steps);
    return real_trace_product(a, rho);
}

double expectation_exact_evolution(const HamiltonianDecomposition &h, const HermitianOperator &a,
                                   const DensityMatrix &rho0, double total_time)
{
    check_dims(h, rho0.dim(), "expectation_exact_evolution");
    const Matrix u = linalg::unitary_exp(dense(h), total_time);
    return real_trace_product(a, u * rho0.matrix() * u.adjoint());
}

Trajectory sample_trajectory(const HamiltonianDecomposition &h, std::int64_t steps, std::uint64_t seed)
{
    if (steps < 0) {
        throw std::invalid_argument("sample_trajectory: negative step count");
    }
    Trajectory traj{seed, {}};
    traj.indices.reserve(static_cast<std::size_t>(steps));
    RandomStream rng(seed);
    for (std::int64_t n = 0; n < steps; ++n) {
        traj.indices.push_back(static_cast<std::uint32_t>(sample_term(h, rng)));
    }
    return traj;
}

Vector evolve_pure_state(const Vector &psi0, const HamiltonianDecomposition &h, const Trajectory &traj,
                         double step_time)
{
    check_dims(h, psi0.size(), "evolve_pure_state");
    if (std::abs(psi0.norm() - 1.0) > linalg::kDensityTol) {
        throw std::invalid_argument("evolve_pure_state: input state is not normalized");
    }
    const TermUnitaries unitaries(h, step_time);
    Vector psi = psi0;
    Vector scratch(psi.size());
    for (const auto j : traj.indices) {
        unitaries.apply(j, psi, scratch);
    }
    return psi;
}

ShotResult measure_observable(const HermitianOperator &a, const Vector &psi, RandomStream &rng)
{
    return ObservableMeasurer(a).measure(psi, rng);
}

std::int64_t steps_for(double total_time, double t_step)
{
    if (!(t_step > 0.0)) {
        throw std::invalid_argument("time step must be positive");
    }
    const double ratio = total_time / t_step;
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(ratio * (1.0 - 1e-12))));
}

QdriftSampler::QdriftSampler(const HamiltonianDecomposition &h, InitialState initial,
                             const HermitianOperator &observable, double total_time, std::int64_t steps)
    : h_(h), initial_(std::move(initial)), measurer_(observable),
      config_{total_time, steps, h.lambda()}, unitaries_(h, total_time / static_cast<double>(steps))
{
    check_dims(h, initial_.dim(), "QdriftSampler");
    if (observable.dim() != h.dim()) {
        throw std::invalid_argument("QdriftSampler: observable dimension mismatch");
    }
    if (steps < 0) {
        throw std::invalid_argument("QdriftSampler: negative step count");
    }
}

ShotResult QdriftSampler::shot(std::uint64_t seed) const
{
    RandomStream rng(seed);
    Vector psi = initial_.draw(rng);
    Vector scratch(psi.size());
    for (std::int64_t n = 0; n < config_.steps; ++n) {
        unitaries_.apply(sample_term(h_, rng), psi, scratch);
    }
    return measurer_.measure(psi, rng);
}

std::vector<double> QdriftSampler::shots(std::uint64_t master, std::uint64_t prefix, std::size_t count,
                                         unsigned threads) const
{
    std::vector<double> out(count);
    parallel_for(count, threads, [&](std::size_t i) { out[i] = shot(derive_seed(master, {prefix, i})).value; });
    return out;
}

ShotResult qdrift_run(const HamiltonianDecomposition &h, const Vector &psi0, const HermitianOperator &a,
                      double total_time, double t_step, std::uint64_t seed)
{
    const std::int64_t steps = steps_for(total_time, t_step);
    return QdriftSampler(h, InitialState(psi0), a, total_time, steps).shot(seed);
}

SampleSummary summarize(std::span<const double> values)
{
    SampleSummary s;
    if (values.empty()) {
        return s;
    }
    const double n = static_cast<double>(values.size());
    s.mean = pairwise_sum(values) / n;
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        std::transform(values.begin(), values.end(), sq.begin(), [&](double v) { return (v - s.mean) * (v - s.mean); });
        s.standard_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
    }
    return s;
}

} // namespace qflo
