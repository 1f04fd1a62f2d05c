#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nhstark/chain_model.hpp"

namespace nhstark {

/// Diagonal similarity D = diag(d_1..d_N) with D^{-1} H D symmetric.
///
/// Only ln d_j is stored; d_1 = 1 fixes the free constant. Factors are
/// exponentiated on demand because eta ln N can exceed the double range for
/// aggressive parameter sweeps.
struct SimilarityGauge {
  std::vector<double> log_factor;
  double exponent = 0.0;  // eta = gamma / F2

  int sites() const { return static_cast<int>(log_factor.size()); }
  double factor(int index) const;  // 0-based storage index
  std::vector<double> factors() const;
};

/// Running product of the per-bond ratios sqrt(t^R / t^L).
SimilarityGauge gauge_product(const ChainParams& params);

/// Same factor through log-Gamma ratios. Throws Error(GammaPole) if any Gamma
/// argument used for the sampled sites is a nonpositive integer.
SimilarityGauge gauge_closed_form(const ChainParams& params);

double skin_exponent(const ChainParams& params);

/// ln(d_{j+1} / d_j) for a 1-based bond index.
double local_log_increment(const ChainParams& params, int bond);

/// The symmetric chain D^{-1} H D.
///
/// coupling[j] = sign(t_j^L) sqrt(t_j^L t_j^R). With a positive gauge the
/// similarity preserves the bond sign, so chains with negative offset keep
/// negative couplings on their short-distance bonds.
struct TransformedChain {
  std::vector<double> coupling;
  std::vector<double> diagonal;

  Eigen::MatrixXd dense() const;
};

TransformedChain transform_chain(const ChainParams& params);

enum class Side { Right, Left };

/// Right: psi_j = d_j phi_j. Left: psi_j = phi_j / d_j.
Eigen::VectorXcd map_eigenvector(const SimilarityGauge& gauge, const Eigen::VectorXcd& phi,
                                 Side side);
Eigen::VectorXd map_eigenvector(const SimilarityGauge& gauge, const Eigen::VectorXd& phi,
                                Side side);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Inclusive range of 1-based site (or bond) labels.
struct SiteWindow {
  int first = 1;
  int last = 1;

  int size() const { return last - first + 1; }
  bool operator==(const SiteWindow&) const = default;
};

struct PowerLawFit {
  double exponent = 0.0;
  double intercept = 0.0;  // ln C in value ~ C j^exponent
  double residual = 0.0;   // rms of the log-log fit
};

/// Least squares of ln(values[j-1]) against ln j over the window.
PowerLawFit fit_power_law(std::span<const double> values, SiteWindow window);

}  // namespace nhstark
