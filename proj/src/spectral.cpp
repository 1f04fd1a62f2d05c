#include "nhstark/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "nhstark/error.hpp"
#include "nhstark/tridiagonal.hpp"

namespace nhstark {

EigenSet eigensolve(const ChainParams& params) {
  validate(params);
  EigenSet out;
  out.gauge = gauge_product(params);
  const TransformedChain chain = transform_chain(params);
  TridiagonalEigen solved = solve_symmetric_tridiagonal(chain.diagonal, chain.coupling);

  const Eigen::Index n = params.sites;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot = 0;
    solved.vectors.col(k).cwiseAbs().maxCoeff(&pivot);
    if (solved.vectors(pivot, k) < 0.0) {
      solved.vectors.col(k) *= -1.0;
    }
  }
  out.energies = std::move(solved.values);
  out.transformed = std::move(solved.vectors);

  Eigen::VectorXd up(n);
  Eigen::VectorXd down(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    up[j] = std::exp(out.gauge.log_factor[j]);
    down[j] = std::exp(-out.gauge.log_factor[j]);
  }
  out.right = up.asDiagonal() * out.transformed;
  out.left = down.asDiagonal() * out.transformed;
  return out;
}

StateDiagnostics state_diagnostics(const Eigen::VectorXd& state) {
  const Eigen::Index n = state.size();
  if (n < 2) {
    throw Error(ErrorCode::InvalidArgument, "state diagnostics need at least 2 sites");
  }
  const double norm2 = state.squaredNorm();
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
    throw Error(ErrorCode::InvalidArgument, "state has zero or non-finite norm");
  }
  StateDiagnostics out;
  out.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double rho = state[j] * state[j] / norm2;
    out.weights[j] = rho;
    out.center += static_cast<double>(j) / static_cast<double>(n - 1) * rho;
    out.ipr += rho * rho;
  }
  out.polarization = 2.0 * out.center - 1.0;
  return out;
}

StateDiagnostics right_state_diagnostics(const EigenSet& eigs, int index) {
  const auto& logs = eigs.gauge.log_factor;
  const double top = *std::max_element(logs.begin(), logs.end());
  Eigen::VectorXd psi(eigs.size());
  for (int j = 0; j < eigs.size(); ++j) {
    psi[j] = std::exp(logs[j] - top) * eigs.transformed(j, index);
  }
  return state_diagnostics(psi);
}

double mean_edge_polarization(const EigenSet& eigs) {
  double sum = 0.0;
  for (int n = 0; n < eigs.size(); ++n) {
    sum += right_state_diagnostics(eigs, n).polarization;
  }
  return sum / eigs.size();
}

double ipr_top_fraction(const EigenSet& eigs, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("IPR fraction must lie in (0, 1], got {}", fraction));
  }
  const int n = eigs.size();
  std::vector<double> ipr(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    ipr[k] = right_state_diagnostics(eigs, k).ipr;
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (ipr[a] != ipr[b]) return ipr[a] > ipr[b];
    if (eigs.energies[a] != eigs.energies[b]) return eigs.energies[a] < eigs.energies[b];
    return a < b;
  });
  // Guard against fraction * n landing a hair above an integer.
  const int count = std::clamp(static_cast<int>(std::ceil(fraction * n - 1e-9)), 1, n);
  double sum = 0.0;
  for (int k = 0; k < count; ++k) {
    sum += ipr[order[k]];
  }
  return sum / count;
}

std::vector<double> linspace(double first, double last, int count) {
  if (count < 1) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("grid count must be >= 1, got {}", count));
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = first;
    return out;
  }
  const double step = (last - first) / (count - 1);
  for (int i = 0; i < count; ++i) {
    out[i] = first + i * step;
  }
  out.back() = last;
  return out;
}

std::vector<double> grid_with_extras(double first, double last, int count,
                                     std::span<const double> extras) {
  std::vector<double> out = linspace(first, last, count);
  out.insert(out.end(), extras.begin(), extras.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

MapCell evaluate_cell(ChainParams params, double fraction) {
  MapCell cell;
  try {
    const auto bonds = detect_decoupling_bonds(params);
    if (!bonds.empty()) {
      cell.reason = fmt::format("decoupling bond {}", bonds.front());
      return cell;
    }
    const EigenSet eigs = eigensolve(params);
    cell.mean_polarization = mean_edge_polarization(eigs);
    cell.ipr_top = ipr_top_fraction(eigs, fraction);
    cell.valid = true;
  } catch (const Error& e) {
    cell.reason = e.what();
  }
  return cell;
}

}  // namespace

LocalizationMap build_localization_map(const ChainParams& fixed, std::span<const double> gammas,
                                       std::span<const double> ratios, double fraction,
                                       int threads) {
  if (gammas.empty() || ratios.empty()) {
    throw Error(ErrorCode::InvalidArgument, "localization map grids must be nonempty");
  }
  validate(fixed);
  require_graded(fixed);
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "IPR fraction must lie in (0, 1]");
  }

  LocalizationMap map;
  map.gammas.assign(gammas.begin(), gammas.end());
  map.ratios.assign(ratios.begin(), ratios.end());
  map.fixed = fixed;
  map.fraction = fraction;
  const std::size_t total = gammas.size() * ratios.size();
  map.cells.resize(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      ChainParams p = fixed;
      p.nonreciprocity = map.gammas[idx / ratios.size()];
      p.stark_slope = map.ratios[idx % ratios.size()] * fixed.hopping_slope;
      map.cells[idx] = evaluate_cell(p, fraction);
    }
  };
  const int workers = std::clamp(threads, 1, static_cast<int>(std::min<std::size_t>(total, 256)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
  }
  return map;
}

}  // namespace nhstark
