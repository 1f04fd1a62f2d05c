#include "nhstark/chain_model.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nhstark/error.hpp"

namespace nhstark {

double ChainParams::slope_ratio() const {
  if (hopping_slope == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return stark_slope / hopping_slope;
}

void validate(const ChainParams& params, int max_sites) {
  if (params.sites < 2) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("chain needs at least 2 sites, got {}", params.sites));
  }
  if (params.sites > max_sites) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} sites exceeds the dense-storage cap of {}", params.sites,
                            max_sites));
  }
  const double values[] = {params.offset, params.nonreciprocity, params.stark_slope,
                           params.hopping_slope};
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "chain parameters must be finite");
    }
  }
}

void require_graded(const ChainParams& params) {
  if (params.hopping_slope == 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "hopping gradient F2 is zero: the algebraic exponent gamma/F2 is undefined");
  }
}

HoppingAmplitudes build_hoppings(const ChainParams& params) {
  validate(params);
  HoppingAmplitudes hop;
  const auto bonds = static_cast<std::size_t>(params.sites - 1);
  hop.left.resize(bonds);
  hop.right.resize(bonds);
  for (std::size_t b = 0; b < bonds; ++b) {
    const double graded = params.offset + static_cast<double>(b + 1) * params.hopping_slope;
    hop.left[b] = graded - params.nonreciprocity;
    hop.right[b] = graded + params.nonreciprocity;
  }
  return hop;
}

Eigen::MatrixXd build_hamiltonian(const ChainParams& params) {
  const auto hop = build_hoppings(params);
  const int n = params.sites;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = params.stark_slope * static_cast<double>(i + 1);
  }
  for (int b = 0; b + 1 < n; ++b) {
    h(b, b + 1) = hop.left[b];
    h(b + 1, b) = hop.right[b];
  }
  return h;
}

std::vector<int> detect_decoupling_bonds(const ChainParams& params) {
  const auto hop = build_hoppings(params);
  std::vector<int> bonds;
  for (std::size_t b = 0; b < hop.left.size(); ++b) {
    if (hop.left[b] * hop.right[b] <= 0.0) {
      bonds.push_back(static_cast<int>(b) + 1);
    }
  }
  return bonds;
}

}  // namespace nhstark
