#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhstark/chain_model.hpp"
#include "nhstark/gauge.hpp"

namespace nhstark {

/// Eigenpairs of the chain obtained through the symmetric transformed problem.
struct EigenSet {
  Eigen::VectorXd energies;    // ascending
  Eigen::MatrixXd transformed; // phi, orthonormal columns
  Eigen::MatrixXd right;       // D phi
  Eigen::MatrixXd left;        // D^{-1} phi
  SimilarityGauge gauge;

  int size() const { return static_cast<int>(energies.size()); }
};

/// Similarity-first eigensolve. Column signs are fixed so that the
/// largest-magnitude component of each phi is positive.
EigenSet eigensolve(const ChainParams& params);

struct StateDiagnostics {
  std::vector<double> weights;  // rho_j, sums to one
  double center = 0.0;          // X in [0, 1]
  double ipr = 0.0;
  double polarization = 0.0;    // 2X - 1
};

StateDiagnostics state_diagnostics(const Eigen::VectorXd& state);

/// Diagnostics of right state n, evaluated from phi and the log gauge so that
/// large factors never overflow.
StateDiagnostics right_state_diagnostics(const EigenSet& eigs, int index);

double mean_edge_polarization(const EigenSet& eigs);

/// Mean IPR of the ceil(fraction N) most localized right states.
double ipr_top_fraction(const EigenSet& eigs, double fraction);

struct MapCell {
  double mean_polarization = 0.0;
  double ipr_top = 0.0;
  bool valid = false;
  std::string reason;  // why an invalid cell was skipped
};

struct LocalizationMap {
  std::vector<double> gammas;
  std::vector<double> ratios;
  std::vector<MapCell> cells;  // row-major: gamma index, then ratio index
  ChainParams fixed;
  double fraction = 0.2;

  const MapCell& at(std::size_t gamma_index, std::size_t ratio_index) const {
    return cells[gamma_index * ratios.size() + ratio_index];
  }
};

inline constexpr std::array<double, 4> kDefaultCutGammas = {0.081, 0.219, 0.362, 0.481};

std::vector<double> linspace(double first, double last, int count);

/// Sorted union of an even grid and extra exact values.
std::vector<double> grid_with_extras(double first, double last, int count,
                                     std::span<const double> extras);

/// Fills every (gamma, F1/F2) cell with F1 = ratio * F2 from the template.
/// Cells that fail (decoupled bonds, solver errors) are flagged, never fatal.
/// Results are gathered by cell index, so the thread count never changes the
/// output.
LocalizationMap build_localization_map(const ChainParams& fixed, std::span<const double> gammas,
                                       std::span<const double> ratios, double fraction = 0.2,
                                       int threads = 1);

}  // namespace nhstark
