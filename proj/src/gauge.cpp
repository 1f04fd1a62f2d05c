#include "nhstark/gauge.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nhstark/error.hpp"

namespace nhstark {
namespace {

void require_positive_gauge(const HoppingAmplitudes& hop) {
  for (std::size_t b = 0; b < hop.left.size(); ++b) {
    if (hop.left[b] * hop.right[b] <= 0.0) {
      throw Error(ErrorCode::DecoupledChain,
                  fmt::format("bond {} has t^L t^R = {} * {} <= 0; no real positive gauge",
                              b + 1, hop.left[b], hop.right[b]));
    }
  }
}

// glibc's std::lgamma writes the global signgam; the reentrant form is safe
// inside parallel sweeps.
double log_abs_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

bool is_gamma_pole(double x) {
  if (x > 0.0) {
    return false;
  }
  return std::abs(x - std::round(x)) <= 1e-12 * std::max(1.0, std::abs(x));
}

}  // namespace

double SimilarityGauge::factor(int index) const {
  return std::exp(log_factor.at(static_cast<std::size_t>(index)));
}

std::vector<double> SimilarityGauge::factors() const {
  std::vector<double> out(log_factor.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(log_factor[i]);
  }
  return out;
}

double skin_exponent(const ChainParams& params) {
  require_graded(params);
  return params.nonreciprocity / params.hopping_slope;
}

double local_log_increment(const ChainParams& params, int bond) {
  validate(params);
  if (bond < 1 || bond >= params.sites) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("bond {} outside 1..{}", bond, params.sites - 1));
  }
  const double graded = params.offset + bond * params.hopping_slope;
  const double left = graded - params.nonreciprocity;
  const double right = graded + params.nonreciprocity;
  if (left == 0.0 || right / left <= 0.0) {
    throw Error(ErrorCode::DecoupledChain,
                fmt::format("bond {} has nonpositive ratio t^R/t^L = {}/{}", bond, right, left));
  }
  // ln(t^R/t^L) = log1p(2 gamma / t^L), exact to rounding near gamma = 0.
  return 0.5 * std::log1p(2.0 * params.nonreciprocity / left);
}

SimilarityGauge gauge_product(const ChainParams& params) {
  const auto hop = build_hoppings(params);
  require_positive_gauge(hop);
  SimilarityGauge gauge;
  gauge.exponent = skin_exponent(params);
  gauge.log_factor.assign(static_cast<std::size_t>(params.sites), 0.0);
  for (int b = 1; b < params.sites; ++b) {
    gauge.log_factor[b] = gauge.log_factor[b - 1] + local_log_increment(params, b);
  }
  return gauge;
}

SimilarityGauge gauge_closed_form(const ChainParams& params) {
  const auto hop = build_hoppings(params);
  require_positive_gauge(hop);
  SimilarityGauge gauge;
  gauge.exponent = skin_exponent(params);

  const double a = (params.offset + params.nonreciprocity) / params.hopping_slope;
  const double b = (params.offset - params.nonreciprocity) / params.hopping_slope;
  for (double shift : {a, b}) {
    if (is_gamma_pole(1.0 + shift)) {
      throw Error(ErrorCode::GammaPole,
                  fmt::format("Gamma pole at argument {} (shift (J +- gamma)/F2 = {})",
                              1.0 + shift, shift));
    }
  }
  const double base = log_abs_gamma(1.0 + b) - log_abs_gamma(1.0 + a);
  gauge.log_factor.resize(static_cast<std::size_t>(params.sites));
  gauge.log_factor[0] = 0.0;
  for (int j = 2; j <= params.sites; ++j) {
    gauge.log_factor[j - 1] =
        0.5 * (log_abs_gamma(j + a) - log_abs_gamma(j + b) + base);
  }
  return gauge;
}

Eigen::MatrixXd TransformedChain::dense() const {
  const auto n = static_cast<Eigen::Index>(diagonal.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diagonal[i];
  }
  for (Eigen::Index b = 0; b + 1 < n; ++b) {
    m(b, b + 1) = coupling[b];
    m(b + 1, b) = coupling[b];
  }
  return m;
}

TransformedChain transform_chain(const ChainParams& params) {
  const auto hop = build_hoppings(params);
  require_positive_gauge(hop);
  TransformedChain chain;
  chain.coupling.resize(hop.left.size());
  for (std::size_t b = 0; b < hop.left.size(); ++b) {
    chain.coupling[b] = std::copysign(std::sqrt(hop.left[b] * hop.right[b]), hop.left[b]);
  }
  chain.diagonal.resize(static_cast<std::size_t>(params.sites));
  for (int j = 1; j <= params.sites; ++j) {
    chain.diagonal[j - 1] = params.stark_slope * j;
  }
  return chain;
}

namespace {

template <typename Vec>
Vec apply_gauge(const SimilarityGauge& gauge, const Vec& phi, Side side) {
  if (phi.size() != gauge.sites()) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("vector length {} does not match gauge length {}", phi.size(),
                            gauge.sites()));
  }
  const double sign = side == Side::Right ? 1.0 : -1.0;
  Vec out(phi.size());
  for (Eigen::Index j = 0; j < phi.size(); ++j) {
    out[j] = phi[j] * std::exp(sign * gauge.log_factor[j]);
  }
  return out;
}

}  // namespace

Eigen::VectorXcd map_eigenvector(const SimilarityGauge& gauge, const Eigen::VectorXcd& phi,
                                 Side side) {
  return apply_gauge(gauge, phi, side);
}

Eigen::VectorXd map_eigenvector(const SimilarityGauge& gauge, const Eigen::VectorXd& phi,
                                Side side) {
  return apply_gauge(gauge, phi, side);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::InvalidArgument, "fit_line: x and y differ in length");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "fit_line: need at least 2 points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    throw Error(ErrorCode::InvalidArgument, "fit_line: all abscissae coincide");
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

PowerLawFit fit_power_law(std::span<const double> values, SiteWindow window) {
  const int size = static_cast<int>(values.size());
  if (window.first < 1 || window.last > size || window.size() < 2) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("fit window [{}, {}] invalid for {} values (need >= 2 points)",
                            window.first, window.last, size));
  }
  std::vector<double> x;
  std::vector<double> y;
  for (int j = window.first; j <= window.last; ++j) {
    const double v = values[static_cast<std::size_t>(j - 1)];
    if (!(v > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("fit_power_law: value at j={} is not positive ({})", j, v));
    }
    x.push_back(std::log(static_cast<double>(j)));
    y.push_back(std::log(v));
  }
  const LineFit line = fit_line(x, y);
  return {line.slope, line.intercept, line.rms_residual};
}

}  // namespace nhstark
