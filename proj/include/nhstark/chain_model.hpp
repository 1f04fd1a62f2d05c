#pragma once

#include <vector>

#include <Eigen/Dense>

namespace nhstark {

/// Dense storage is used up to this many sites unless a caller raises the cap.
inline constexpr int kDefaultMaxDenseSites = 2048;

/// The five numbers that define one open chain.
///
/// Sites are labelled 1..sites in every formula (the on-site energy of site j
/// is stark_slope * j). Storage is 0-based: site j lives at index j - 1, and
/// bond j (joining sites j and j + 1) lives at index j - 1.
struct ChainParams {
  int sites = 2;
  double offset = 1.0;          // uniform hopping offset J
  double nonreciprocity = 0.0;  // gamma
  double stark_slope = 0.0;     // F1, on-site energy per site
  double hopping_slope = 0.0;   // F2, hopping growth per bond

  /// F1 / F2; infinite when the hopping gradient vanishes.
  double slope_ratio() const;

  bool operator==(const ChainParams&) const = default;
};

/// Throws Error(InvalidArgument) on a malformed parameter set: fewer than two
/// sites, more than `max_sites`, or a non-finite number.
void validate(const ChainParams& params, int max_sites = kDefaultMaxDenseSites);

/// Throws unless the hopping gradient is nonzero; the gauge exponent and the
/// asymptotic classification are undefined otherwise.
void require_graded(const ChainParams& params);

struct HoppingAmplitudes {
  std::vector<double> left;   // t_j^L = J - gamma + j F2, couples j+1 -> j
  std::vector<double> right;  // t_j^R = J + gamma + j F2, couples j -> j+1
};

HoppingAmplitudes build_hoppings(const ChainParams& params);

/// One-body matrix: H(j, j) = F1 j, H(j, j+1) = t_j^L, H(j+1, j) = t_j^R.
/// The model is real, so the operator is stored as a real dense matrix.
Eigen::MatrixXd build_hamiltonian(const ChainParams& params);

/// Bonds (1-based) whose amplitude product t^L t^R is zero or negative. An
/// empty result certifies that a real positive similarity gauge exists.
std::vector<int> detect_decoupling_bonds(const ChainParams& params);

}  // namespace nhstark
