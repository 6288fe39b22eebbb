#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qflo/hamiltonian.hpp"
#include "qflo/linalg.hpp"
#include "qflo/random.hpp"

namespace qflo {

using linalg::DensityMatrix;
using linalg::HermitianOperator;

/// T, N and lambda for one qDRIFT run. The step time is always derived.
struct StepConfig {
    double total_time = 0.0;
    std::int64_t steps = 1;
    double lambda = 0.0;

    double step_time() const noexcept { return total_time / static_cast<double>(steps); }
    double inverse_steps() const noexcept { return 1.0 / static_cast<double>(steps); }
};

struct Trajectory {
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> indices;
};

struct ShotResult {
    double value = 0.0;
};

/// Per-term unitaries exp(-i lambda t H_j) for one (H, t), stored as Pauli
/// rotations cos(theta) I - i sin(theta) P_j. Applying one costs O(d) on a
/// state and O(d^2) on a density matrix.
class TermUnitaries {
  public:
    TermUnitaries(const HamiltonianDecomposition &h, double step_time, int qubit_cap = kDefaultQubitCap);

    std::size_t size() const noexcept { return terms_.size(); }
    Eigen::Index dim() const noexcept { return dim_; }

    /// psi <- U_j psi; scratch must have the state's size.
    void apply(std::size_t j, Vector &psi, Vector &scratch) const;

    /// rho <- U_j rho U_j^dag.
    void conjugate(std::size_t j, const Matrix &rho, Matrix &out) const;

    /// out <- U_j rho U_j^dag - rho, computed without forming the difference.
    void defect(std::size_t j, const Matrix &rho, Matrix &out) const;

    Matrix dense(std::size_t j) const;

  private:
    struct Rotation {
        std::uint64_t flip;
        double cos_theta;
        double sin_theta;
        std::vector<Complex> phase; // phase[x] = <x ^ flip|P|x>
    };
    std::vector<Rotation> terms_;
    Eigen::Index dim_;
};

/// Initial state for shot-mode sampling: a pure state, or a density matrix
/// that is sampled through its eigendecomposition.
class InitialState {
  public:
    explicit InitialState(Vector psi);
    explicit InitialState(const DensityMatrix &rho);

    Eigen::Index dim() const noexcept { return dim_; }
    DensityMatrix density() const;

    /// Pure state, or an eigenvector of rho drawn with probability equal to its eigenvalue.
    const Vector &draw(RandomStream &rng) const;

  private:
    std::vector<Vector> branches_;
    std::vector<double> cdf_;
    Eigen::Index dim_;
};

/// Projective measurement of A with degenerate eigenvalues merged.
class ObservableMeasurer {
  public:
    explicit ObservableMeasurer(const HermitianOperator &a, double merge_tol = 1e-9);

    const std::vector<double> &outcomes() const noexcept { return outcomes_; }
    /// ||A||, the largest |eigenvalue|.
    double norm() const noexcept { return norm_; }

    std::vector<double> probabilities(const Vector &psi) const;
    ShotResult measure(const Vector &psi, RandomStream &rng) const;

  private:
    Matrix vectors_;
    std::vector<double> outcomes_;
    std::vector<Eigen::Index> block_start_; // size outcomes_.size() + 1
    double norm_ = 0.0;
};

DensityMatrix channel_apply_exact(const HamiltonianDecomposition &h, const DensityMatrix &rho, double t);

DensityMatrix channel_iterate_exact(const HamiltonianDecomposition &h, const DensityMatrix &rho0, double total_time,
                                    std::int64_t steps);

/// f_A(1/N) = tr[A E^N(rho0)] with step time T/N.
double expectation_exact(const HamiltonianDecomposition &h, const HermitianOperator &a, const DensityMatrix &rho0,
                         double total_time, std::int64_t steps);

/// tr[A e^{-iHT} rho0 e^{iHT}], the s -> 0 limit.
double expectation_exact_evolution(const HamiltonianDecomposition &h, const HermitianOperator &a,
                                   const DensityMatrix &rho0, double total_time);

Trajectory sample_trajectory(const HamiltonianDecomposition &h, std::int64_t steps, std::uint64_t seed);

Vector evolve_pure_state(const Vector &psi0, const HamiltonianDecomposition &h, const Trajectory &traj,
                         double step_time);

ShotResult measure_observable(const HermitianOperator &a, const Vector &psi, RandomStream &rng);

/// N = ceil(T / t_step), tolerant of rounding in the ratio.
std::int64_t steps_for(double total_time, double t_step);

/// One qDRIFT run (sampled circuit of N steps followed by one measurement),
/// reusable across shots. Per-step angle is lambda T/N.
class QdriftSampler {
  public:
    QdriftSampler(const HamiltonianDecomposition &h, InitialState initial, const HermitianOperator &observable,
                  double total_time, std::int64_t steps);

    const StepConfig &config() const noexcept { return config_; }
    const ObservableMeasurer &measurer() const noexcept { return measurer_; }

    /// One shot using an exclusive stream seeded with `seed`.
    ShotResult shot(std::uint64_t seed) const;

    /// Shots for seeds derive_seed(master, {prefix..., i}), i in [0, count),
    /// stored by index.
    std::vector<double> shots(std::uint64_t master, std::uint64_t prefix, std::size_t count,
                              unsigned threads) const;

  private:
    HamiltonianDecomposition h_;
    InitialState initial_;
    ObservableMeasurer measurer_;
    StepConfig config_;
    TermUnitaries unitaries_;
};

ShotResult qdrift_run(const HamiltonianDecomposition &h, const Vector &psi0, const HermitianOperator &a,
                      double total_time, double t_step, std::uint64_t seed);

struct SampleSummary {
    double mean = 0.0;
    double standard_error = 0.0;
};

SampleSummary summarize(std::span<const double> values);

} // namespace qflo
