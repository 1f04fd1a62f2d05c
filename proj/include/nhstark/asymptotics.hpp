#pragma once

#include <complex>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "nhstark/chain_model.hpp"
#include "nhstark/gauge.hpp"

namespace nhstark {

/// | |F1/F2| - 2 | at or below this classifies as the double-root case.
inline constexpr double kCriticalTolerance = 1e-9;

enum class Branch { Oscillatory, Critical, Localized };

const char* to_string(Branch branch);

/// Roots of r^2 + (F1/F2) r + 1 = 0. `major` has the larger modulus; ties are
/// broken by larger real part, then larger imaginary part.
struct RootPair {
  std::complex<double> major;
  std::complex<double> minor;
};

RootPair characteristic_roots(double stark_slope, double hopping_slope);

struct BranchClassification {
  double ratio = 0.0;
  Branch kind = Branch::Oscillatory;
  std::optional<double> wavenumber;     // q in (0, pi), F1/F2 = -2 cos q
  std::optional<double> critical_root;  // r* = -F1 / (2 F2) = +-1
  std::optional<double> decay_rate;     // kappa = arcosh(|F1| / 2|F2|)
  RootPair roots;
};

BranchClassification classify_branch(double stark_slope, double hopping_slope,
                                     double tolerance = kCriticalTolerance);
BranchClassification classify_branch(const ChainParams& params,
                                     double tolerance = kCriticalTolerance);

/// Maps (phi_j, phi_{j-1}) to (phi_{j+1}, phi_j) for the constant-coefficient
/// recurrence.
Eigen::Matrix2d transfer_matrix(double stark_slope, double hopping_slope);

/// True when the 2x2 matrix has a repeated eigenvalue but T - r I is nonzero.
bool is_jordan_block(const Eigen::Matrix2d& t, double tolerance = 1e-12);

/// ln(x + sqrt(x^2 - 1)) with the radicand clamped at zero.
double stable_arcosh(double x);

/// Predicted ln|psi_j^R| up to an additive constant.
///
/// Oscillatory: eta ln j. Localized: eta ln j - kappa j. Critical:
/// eta ln j + ln|A + B j|, where A and B are free fit amplitudes.
struct Envelope {
  Branch kind = Branch::Oscillatory;
  double exponent = 0.0;
  double decay_rate = 0.0;
  double amplitude_a = 1.0;
  double amplitude_b = 0.0;

  double operator()(double site) const;
};

Envelope envelope_model(const BranchClassification& branch, double eta, double amplitude_a = 1.0,
                        double amplitude_b = 0.0);

double screening_scale(const ChainParams& params);
double competition_scale(const ChainParams& params);
double envelope_peak(double eta, double kappa);
double threshold_distance(const ChainParams& params);

struct ThresholdWidths {
  double size_only = 0.0;   // N^-2
  double with_gamma = 0.0;  // gamma^2 / (2 F2^2 N^2)
};

ThresholdWidths threshold_widths(const ChainParams& params);

struct FiniteSizeScales {
  double screening = 0.0;
  std::optional<double> competition;    // localized branch only
  std::optional<double> envelope_peak;  // localized branch only
  double threshold_distance = 0.0;
  ThresholdWidths widths;
};

FiniteSizeScales finite_size_scales(const ChainParams& params,
                                    double tolerance = kCriticalTolerance);

/// Sites entering a tail fit: the last five sites are dropped, and so are
/// sites below 2 ceil(j*) when an envelope peak j* > 0 exists.
SiteWindow tail_window(int sites, std::optional<double> peak);

/// Slope of ln|amplitude_j| against j over the tail window.
LineFit fit_tail_slope(std::span<const double> amplitude, SiteWindow window);

}  // namespace nhstark
