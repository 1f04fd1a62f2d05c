#include "nhstark/dynamics.hpp"

#include <cmath>
#include <complex>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "nhstark/error.hpp"
#include "nhstark/gauge.hpp"
#include "nhstark/tridiagonal.hpp"

namespace nhstark {
namespace {

using cd = std::complex<double>;

void require_time_step(double dt) {
  if (!std::isfinite(dt) || dt < 0.0) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("time step must be finite and >= 0, got {}", dt));
  }
}

// V diag(exp(-i w dt)) V^T for real orthonormal V.
Eigen::MatrixXcd spectral_exponential(const TridiagonalEigen& eig, double dt) {
  const Eigen::Index n = eig.values.size();
  Eigen::VectorXcd phases(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    phases[k] = std::exp(cd(0.0, -eig.values[k] * dt));
  }
  const Eigen::MatrixXcd v = eig.vectors.cast<cd>();
  return v * phases.asDiagonal() * v.transpose();
}

}  // namespace

OrbitalState build_cdw_orbitals(int sites) {
  if (sites < 2 || sites % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("charge-density wave needs an even number of sites, got {}", sites));
  }
  OrbitalState state;
  state.orbitals = Eigen::MatrixXcd::Zero(sites, sites / 2);
  for (int m = 0; m < sites / 2; ++m) {
    state.orbitals(2 * m + 1, m) = 1.0;
  }
  return state;
}

Eigen::MatrixXcd dense_propagator(const Eigen::MatrixXd& h, double dt) {
  require_time_step(dt);
  if (!h.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "one-body matrix has non-finite entries");
  }
  const Eigen::MatrixXcd generator = cd(0.0, -dt) * h.cast<cd>();
  Eigen::MatrixXcd out = generator.exp();
  if (!out.allFinite()) {
    throw Error(ErrorCode::NumericalFailure, "matrix exponential overflowed");
  }
  return out;
}

Eigen::MatrixXcd propagator(const ChainParams& params, double dt) {
  validate(params);
  require_time_step(dt);
  const auto hop = build_hoppings(params);
  std::vector<double> diagonal(static_cast<std::size_t>(params.sites));
  for (int j = 1; j <= params.sites; ++j) {
    diagonal[j - 1] = params.stark_slope * j;
  }

  if (params.nonreciprocity == 0.0) {
    return spectral_exponential(solve_symmetric_tridiagonal(diagonal, hop.left), dt);
  }

  if (params.hopping_slope != 0.0 && detect_decoupling_bonds(params).empty()) {
    const SimilarityGauge gauge = gauge_product(params);
    const TransformedChain chain = transform_chain(params);
    Eigen::MatrixXcd out =
        spectral_exponential(solve_symmetric_tridiagonal(chain.diagonal, chain.coupling), dt);
    // exp(-i h dt) = D exp(-i h~ dt) D^{-1}, entry (i, k) scaled by d_i / d_k.
    const auto& logs = gauge.log_factor;
    for (Eigen::Index k = 0; k < out.cols(); ++k) {
      for (Eigen::Index i = 0; i < out.rows(); ++i) {
        out(i, k) *= std::exp(logs[i] - logs[k]);
      }
    }
    if (out.allFinite()) {
      return out;
    }
  }
  return dense_propagator(build_hamiltonian(params), dt);
}

OrbitalState step(const OrbitalState& state, const Eigen::MatrixXcd& prop, double dt,
                  bool restabilize) {
  require_time_step(dt);
  if (prop.rows() != state.sites() || prop.cols() != state.sites()) {
    throw Error(ErrorCode::InvalidArgument, "propagator size does not match the orbitals");
  }
  OrbitalState next;
  next.time = state.time + dt;
  next.orbitals = prop * state.orbitals;
  if (restabilize) {
    const double scale = next.orbitals.norm();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(next.orbitals);
    const auto& r = qr.matrixQR();
    for (Eigen::Index i = 0; i < next.orbitals.cols(); ++i) {
      if (std::abs(r(i, i)) < 1e-13 * scale) {
        throw Error(ErrorCode::RankCollapse,
                    fmt::format("orbital matrix lost rank at t = {} (|R_ii| = {} at i = {})",
                                next.time, std::abs(r(i, i)), i));
      }
    }
    next.orbitals = qr.householderQ() *
                    Eigen::MatrixXcd::Identity(next.orbitals.rows(), next.orbitals.cols());
  }
  return next;
}

GaussianProjector normalized_projector(const OrbitalState& state) {
  const Eigen::MatrixXcd& u = state.orbitals;
  if (u.cols() == 0) {
    return {Eigen::MatrixXcd::Zero(u.rows(), u.rows())};
  }
  const Eigen::MatrixXcd gram = u.adjoint() * u;
  Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() == Eigen::Success && llt.rcond() > 1e-10) {
    return {u * llt.solve(u.adjoint())};
  }
  // Poorly conditioned Gram matrix: the projector only depends on the span.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(u);
  const auto& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < u.cols(); ++i) {
    if (std::abs(r(i, i)) < 1e-13 * u.norm()) {
      throw Error(ErrorCode::RankCollapse, "orbital Gram matrix is singular");
    }
  }
  const Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return {q * q.adjoint()};
}

double gram_determinant(const OrbitalState& state) {
  return (state.orbitals.adjoint() * state.orbitals).determinant().real();
}

double smallest_singular_value(const OrbitalState& state) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(state.orbitals);
  return svd.singularValues().minCoeff();
}

double subsystem_entropy(const GaussianProjector& proj, SiteRange subsystem) {
  const auto n = static_cast<int>(proj.projector.rows());
  if (subsystem.count < 1 || subsystem.first < 0 || subsystem.first + subsystem.count > n) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("subsystem [{}, {}) outside {} sites", subsystem.first,
                            subsystem.first + subsystem.count, n));
  }
  const Eigen::MatrixXcd block =
      proj.projector.block(subsystem.first, subsystem.first, subsystem.count, subsystem.count)
          .transpose();
  const double asym = (block - block.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-8) {
    throw Error(ErrorCode::NumericalFailure,
                fmt::format("restricted correlation matrix is not Hermitian (deviation {})", asym));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(block, Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (Eigen::Index a = 0; a < eig.eigenvalues().size(); ++a) {
    const double lambda = eig.eigenvalues()[a];
    if (lambda <= kEigenvalueClamp || lambda >= 1.0 - kEigenvalueClamp) {
      continue;
    }
    entropy -= lambda * std::log(lambda) + (1.0 - lambda) * std::log1p(-lambda);
  }
  return entropy;
}

ProjectorChecks check_projector(const GaussianProjector& proj, int particles) {
  const Eigen::MatrixXcd& p = proj.projector;
  ProjectorChecks out;
  out.idempotency = (p * p - p).cwiseAbs().maxCoeff();
  out.hermiticity = (p - p.adjoint()).cwiseAbs().maxCoeff();
  out.trace_error = std::abs(p.trace() - cd(particles, 0.0));
  return out;
}

EntropyTrace entropy_trace(const ChainParams& params, const DynamicsOptions& options,
                           const OrbitalState& initial) {
  validate(params);
  if (!(options.t_max > 0.0) || !(options.dt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("need t_max > 0 and dt > 0 (got {}, {})", options.t_max, options.dt));
  }
  if (options.restabilize_every < 0) {
    throw Error(ErrorCode::InvalidArgument, "restabilization cadence must be >= 0");
  }
  if (initial.sites() != params.sites) {
    throw Error(ErrorCode::InvalidArgument, "initial orbitals do not match the chain length");
  }

  EntropyTrace trace;
  trace.params = params;
  trace.cut = {0, params.sites / 2};
  const auto steps = static_cast<int>(std::llround(options.t_max / options.dt));
  trace.times.reserve(static_cast<std::size_t>(steps) + 1);
  trace.entropy.reserve(static_cast<std::size_t>(steps) + 1);

  const Eigen::MatrixXcd prop = propagator(params, options.dt);
  OrbitalState state = initial;
  state.time = 0.0;

  auto sample = [&](int k) {
    const GaussianProjector proj = normalized_projector(state);
    const ProjectorChecks checks = check_projector(proj, state.particles());
    trace.worst.idempotency = std::max(trace.worst.idempotency, checks.idempotency);
    trace.worst.hermiticity = std::max(trace.worst.hermiticity, checks.hermiticity);
    trace.worst.trace_error = std::max(trace.worst.trace_error, checks.trace_error);
    trace.times.push_back(k * options.dt);
    trace.entropy.push_back(subsystem_entropy(proj, trace.cut));
  };

  int k = 0;
  try {
    sample(0);
    for (k = 1; k <= steps; ++k) {
      const bool restabilize = options.restabilize_every > 0 && k % options.restabilize_every == 0;
      state = step(state, prop, options.dt, restabilize);
      sample(k);
    }
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("at t = {}: {}", k * options.dt, e.what()));
  }
  return trace;
}

std::vector<double> excess_entropy(const EntropyTrace& threshold, const EntropyTrace& below,
                                   const EntropyTrace& above) {
  const auto& t = threshold.times;
  if (below.times != t || above.times != t || threshold.entropy.size() != t.size() ||
      below.entropy.size() != t.size() || above.entropy.size() != t.size()) {
    throw Error(ErrorCode::InvalidArgument, "excess entropy needs identical time grids");
  }
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    out[i] = threshold.entropy[i] - 0.5 * (below.entropy[i] + above.entropy[i]);
  }
  return out;
}

}  // namespace nhstark
