#include "nhstark/asymptotics.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "nhstark/error.hpp"

namespace nhstark {
namespace {

double checked_ratio(double stark_slope, double hopping_slope) {
  if (hopping_slope == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "hopping gradient F2 must be nonzero");
  }
  if (!std::isfinite(stark_slope) || !std::isfinite(hopping_slope)) {
    throw Error(ErrorCode::InvalidArgument, "slopes must be finite");
  }
  return stark_slope / hopping_slope;
}

bool precedes(std::complex<double> a, std::complex<double> b) {
  if (std::abs(a) != std::abs(b)) {
    return std::abs(a) > std::abs(b);
  }
  if (a.real() != b.real()) {
    return a.real() > b.real();
  }
  return a.imag() > b.imag();
}

}  // namespace

const char* to_string(Branch branch) {
  switch (branch) {
    case Branch::Oscillatory: return "oscillatory";
    case Branch::Critical: return "critical";
    case Branch::Localized: return "localized";
  }
  return "unknown";
}

RootPair characteristic_roots(double stark_slope, double hopping_slope) {
  const double ratio = checked_ratio(stark_slope, hopping_slope);
  const double disc = ratio * ratio - 4.0;
  std::complex<double> r1;
  std::complex<double> r2;
  if (disc > 0.0) {
    // Larger-magnitude root first, the other from the unit product.
    const double big = -0.5 * (ratio + std::copysign(std::sqrt(disc), ratio));
    r1 = big;
    r2 = 1.0 / big;
  } else if (disc == 0.0) {
    r1 = r2 = -0.5 * ratio;
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    r1 = {-0.5 * ratio, im};
    r2 = {-0.5 * ratio, -im};
  }
  if (precedes(r2, r1)) {
    std::swap(r1, r2);
  }
  return {r1, r2};
}

double stable_arcosh(double x) {
  const double excess = x - 1.0;
  return std::log1p(excess + std::sqrt(std::max(0.0, excess * (x + 1.0))));
}

BranchClassification classify_branch(double stark_slope, double hopping_slope,
                                     double tolerance) {
  BranchClassification out;
  out.ratio = checked_ratio(stark_slope, hopping_slope);
  out.roots = characteristic_roots(stark_slope, hopping_slope);
  const double magnitude = std::abs(out.ratio);
  if (std::abs(magnitude - 2.0) <= tolerance) {
    out.kind = Branch::Critical;
    out.critical_root = -std::copysign(1.0, out.ratio);
  } else if (magnitude < 2.0) {
    out.kind = Branch::Oscillatory;
    out.wavenumber = std::acos(-0.5 * out.ratio);
  } else {
    out.kind = Branch::Localized;
    out.decay_rate = stable_arcosh(0.5 * magnitude);
  }
  return out;
}

BranchClassification classify_branch(const ChainParams& params, double tolerance) {
  return classify_branch(params.stark_slope, params.hopping_slope, tolerance);
}

Eigen::Matrix2d transfer_matrix(double stark_slope, double hopping_slope) {
  const double ratio = checked_ratio(stark_slope, hopping_slope);
  Eigen::Matrix2d t;
  t << -ratio, -1.0, 1.0, 0.0;
  return t;
}

bool is_jordan_block(const Eigen::Matrix2d& t, double tolerance) {
  const double trace = t.trace();
  const double det = t.determinant();
  const double disc = trace * trace - 4.0 * det;
  if (std::abs(disc) > tolerance * std::max(1.0, trace * trace)) {
    return false;
  }
  const Eigen::Matrix2d shifted = t - 0.5 * trace * Eigen::Matrix2d::Identity();
  return shifted.cwiseAbs().maxCoeff() > tolerance;
}

double Envelope::operator()(double site) const {
  const double skin = exponent * std::log(site);
  switch (kind) {
    case Branch::Oscillatory: return skin;
    case Branch::Localized: return skin - decay_rate * site;
    case Branch::Critical: return skin + std::log(std::abs(amplitude_a + amplitude_b * site));
  }
  return skin;
}

Envelope envelope_model(const BranchClassification& branch, double eta, double amplitude_a,
                        double amplitude_b) {
  Envelope env;
  env.kind = branch.kind;
  env.exponent = eta;
  env.decay_rate = branch.decay_rate.value_or(0.0);
  env.amplitude_a = amplitude_a;
  env.amplitude_b = amplitude_b;
  return env;
}

double screening_scale(const ChainParams& params) {
  validate(params);
  require_graded(params);
  return params.nonreciprocity / params.hopping_slope * std::log(static_cast<double>(params.sites));
}

double competition_scale(const ChainParams& params) {
  validate(params);
  const auto branch = classify_branch(params);
  if (branch.kind != Branch::Localized) {
    throw Error(ErrorCode::BranchMismatch,
                fmt::format("competition scale needs |F1/F2| > 2; ratio is {} ({})",
                            branch.ratio, to_string(branch.kind)));
  }
  return std::abs(params.nonreciprocity) /
         (std::abs(params.hopping_slope) * *branch.decay_rate * params.sites);
}

double envelope_peak(double eta, double kappa) {
  if (!(kappa > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("envelope peak needs kappa > 0, got {}", kappa));
  }
  return std::abs(eta) / kappa;
}

double threshold_distance(const ChainParams& params) {
  require_graded(params);
  return std::abs(params.stark_slope) / (2.0 * std::abs(params.hopping_slope)) - 1.0;
}

ThresholdWidths threshold_widths(const ChainParams& params) {
  validate(params);
  require_graded(params);
  const double n2 = static_cast<double>(params.sites) * params.sites;
  const double g = params.nonreciprocity / params.hopping_slope;
  return {1.0 / n2, g * g / (2.0 * n2)};
}

FiniteSizeScales finite_size_scales(const ChainParams& params, double tolerance) {
  FiniteSizeScales out;
  out.screening = screening_scale(params);
  out.threshold_distance = threshold_distance(params);
  out.widths = threshold_widths(params);
  const auto branch = classify_branch(params, tolerance);
  if (branch.kind == Branch::Localized) {
    out.competition = competition_scale(params);
    out.envelope_peak = envelope_peak(skin_exponent(params), *branch.decay_rate);
  }
  return out;
}

SiteWindow tail_window(int sites, std::optional<double> peak) {
  SiteWindow w{1, sites - 5};
  if (peak && *peak > 0.0) {
    w.first = std::max(1, 2 * static_cast<int>(std::ceil(*peak)));
  }
  if (w.size() < 2) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("tail window [{}, {}] is empty for {} sites", w.first, w.last,
                            sites));
  }
  return w;
}

LineFit fit_tail_slope(std::span<const double> amplitude, SiteWindow window) {
  if (window.first < 1 || window.last > static_cast<int>(amplitude.size()) ||
      window.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "tail window outside the amplitude array");
  }
  std::vector<double> x;
  std::vector<double> y;
  for (int j = window.first; j <= window.last; ++j) {
    const double a = std::abs(amplitude[static_cast<std::size_t>(j - 1)]);
    if (a == 0.0) {
      throw Error(ErrorCode::NumericalFailure,
                  fmt::format("amplitude vanishes at site {}; log tail undefined", j));
    }
    x.push_back(j);
    y.push_back(std::log(a));
  }
  return fit_line(x, y);
}

}  // namespace nhstark
