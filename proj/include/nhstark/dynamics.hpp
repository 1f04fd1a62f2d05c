#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nhstark/chain_model.hpp"

namespace nhstark {

/// Occupied orbitals of a Slater determinant, one per column. Columns need
/// not be orthonormal; only their span is physical.
struct OrbitalState {
  Eigen::MatrixXcd orbitals;
  double time = 0.0;

  int sites() const { return static_cast<int>(orbitals.rows()); }
  int particles() const { return static_cast<int>(orbitals.cols()); }
};

/// Half-filled charge-density wave: column m occupies site 2m (1-based).
OrbitalState build_cdw_orbitals(int sites);

/// exp(-i h dt) for the chain. Hermitian chains use the symmetric
/// eigendecomposition; nonreciprocal chains with a valid real gauge use
/// D exp(-i h~ dt) D^{-1} with the factor ratios taken in log space; anything
/// else falls back to scaling and squaring.
Eigen::MatrixXcd propagator(const ChainParams& params, double dt);

/// Generic scaling-and-squaring route for an arbitrary real one-body matrix.
Eigen::MatrixXcd dense_propagator(const Eigen::MatrixXd& h, double dt);

/// U <- prop U, optionally replaced by the Q factor of its thin QR.
/// Throws Error(RankCollapse) if |R_ii| < 1e-13 ||U|| for some i.
OrbitalState step(const OrbitalState& state, const Eigen::MatrixXcd& prop, double dt,
                  bool restabilize);

/// P = U (U^dagger U)^{-1} U^dagger, the orthogonal projector onto the
/// occupied subspace. The correlation matrix <c_i^dagger c_j> is P^T.
struct GaussianProjector {
  Eigen::MatrixXcd projector;

  Eigen::MatrixXcd correlation() const { return projector.transpose(); }
};

GaussianProjector normalized_projector(const OrbitalState& state);

/// det(U^dagger U), the norm of the unnormalized Slater determinant.
double gram_determinant(const OrbitalState& state);

/// Smallest singular value of U.
double smallest_singular_value(const OrbitalState& state);

/// Contiguous block of 0-based storage indices [first, first + count).
struct SiteRange {
  int first = 0;
  int count = 0;

  bool operator==(const SiteRange&) const = default;
};

inline constexpr double kEigenvalueClamp = 1e-12;

/// Von Neumann entropy (nats) of the restricted correlation matrix. Modes
/// within kEigenvalueClamp of 0 or 1 contribute exactly zero.
double subsystem_entropy(const GaussianProjector& proj, SiteRange subsystem);

struct ProjectorChecks {
  double idempotency = 0.0;   // max |P^2 - P|
  double hermiticity = 0.0;   // max |P - P^dagger|
  double trace_error = 0.0;   // |tr P - N_p|
};

ProjectorChecks check_projector(const GaussianProjector& proj, int particles);

struct DynamicsOptions {
  double t_max = 8.0;
  double dt = 0.02;
  int restabilize_every = 1;  // 0 disables QR entirely

  bool operator==(const DynamicsOptions&) const = default;
};

struct EntropyTrace {
  std::vector<double> times;
  std::vector<double> entropy;
  ChainParams params;
  SiteRange cut;
  ProjectorChecks worst;  // largest deviation seen over all samples
};

/// Steps the state and samples the half-chain entropy (sites 1..N/2) at t = 0
/// and after every step.
EntropyTrace entropy_trace(const ChainParams& params, const DynamicsOptions& options,
                           const OrbitalState& initial);

/// S_2(t) - (S_1(t) + S_3(t)) / 2 on a shared time grid.
std::vector<double> excess_entropy(const EntropyTrace& threshold, const EntropyTrace& below,
                                   const EntropyTrace& above);

}  // namespace nhstark
