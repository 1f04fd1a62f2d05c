#include <doctest.h>

#include <cmath>
#include <random>

#include "nhstark/error.hpp"
#include "nhstark/gauge.hpp"
#include "oracles.hpp"

using namespace nhstark;

namespace {

const ChainParams kSkin{100, 1.0, 0.5, 0.0, 1.0};

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::abs(b[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("product gauge") {
  const auto g = gauge_product(kSkin);
  REQUIRE(g.sites() == 100);
  CHECK(g.factor(0) == 1.0);
  CHECK(g.factor(1) == doctest::Approx(1.290994448735806).epsilon(1e-14));
  CHECK(g.exponent == 0.5);
  // frozen from a 40-digit product evaluation
  CHECK(g.log_factor.back() == doctest::Approx(2.102346309695483).epsilon(1e-13));

  const auto flat = gauge_product({50, 1.3, 0.0, 0.4, 0.2});
  for (double d : flat.factors()) CHECK(d == 1.0);
}

TEST_CASE("closed form agrees with the running product") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = oracle::random_chain(rng, 2, 300);
    const auto prod = gauge_product(p);
    const auto closed = gauge_closed_form(p);
    CHECK(max_rel(closed.factors(), prod.factors()) < 1e-10);
  }
  const ChainParams falling{40, 5.05, 0.3, 0.0, -0.1};
  CHECK(max_rel(gauge_closed_form(falling).factors(), gauge_product(falling).factors()) < 1e-10);

  const auto flat = gauge_closed_form({40, 2.0, 0.0, 0.0, 0.3});
  for (double d : flat.factors()) CHECK(d == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("closed form rejects Gamma poles") {
  // decreasing hoppings: 1 + (J + gamma) / F2 = -49
  try {
    gauge_closed_form({10, 5.0, 0.0, 0.0, -0.1});
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GammaPole);
  }
}

TEST_CASE("product gauge rejects a split chain") {
  try {
    gauge_product({20, 1.0, 2.0, 0.0, 0.1});
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DecoupledChain);
  }
}

TEST_CASE("log d minus eta log j settles to a constant") {
  const auto g = gauge_product({2000, 1.0, 0.5, 0.0, 1.0});
  auto offset = [&](int j) { return g.log_factor[j - 1] - 0.5 * std::log(j); };
  const double late = std::abs(offset(2000) - offset(1000));
  const double early = std::abs(offset(200) - offset(100));
  CHECK(late < 1e-3);
  CHECK(late < early);
}

TEST_CASE("skin exponent") {
  CHECK(skin_exponent(kSkin) == 0.5);
  CHECK(skin_exponent({10, 1.0, 0.0, 0.0, 0.2}) == 0.0);
  CHECK(skin_exponent({10, 1.0, 0.219, 0.0, 0.2}) == doctest::Approx(1.095).epsilon(1e-14));
  CHECK_THROWS_AS(skin_exponent({10, 1.0, 0.2, 0.0, 0.0}), Error);
}

TEST_CASE("local log increment") {
  CHECK(local_log_increment(kSkin, 10) == doctest::Approx(0.5 * std::log(11.5 / 10.5)).epsilon(1e-14));
  CHECK(local_log_increment(kSkin, 10) == doctest::Approx(0.0454859).epsilon(1e-6));
  CHECK(local_log_increment({10, 1.0, 0.0, 0.0, 1.0}, 3) == 0.0);
  CHECK_THROWS_AS(local_log_increment(kSkin, 100), Error);
  CHECK_THROWS_AS(local_log_increment(kSkin, 0), Error);
}

TEST_CASE("increment times j tends to eta") {
  const ChainParams p{2048, 1.0, 0.5, 0.0, 1.0};
  CHECK(local_log_increment(p, 2000) * 2000 == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("transformed couplings") {
  const auto t = transform_chain(kSkin);
  CHECK(t.coupling[0] == doctest::Approx(std::sqrt(1.5 * 2.5)).epsilon(1e-15));
  CHECK(t.coupling[0] == doctest::Approx(1.936492).epsilon(1e-6));
  // tau_j - (j F2 + J) = O(1/j)
  CHECK(std::abs(t.coupling[98] - 100.0) < 0.01);
  CHECK(std::abs(t.coupling[98] - 100.0) < std::abs(t.coupling[8] - 10.0));

  const auto sym = transform_chain({12, 0.7, 0.0, 0.0, 0.3});
  const auto hop = build_hoppings({12, 0.7, 0.0, 0.0, 0.3});
  for (std::size_t j = 0; j < sym.coupling.size(); ++j) {
    CHECK(sym.coupling[j] == doctest::Approx(hop.left[j]).epsilon(1e-15));
  }
}

TEST_CASE("negative offset keeps bond signs") {
  const ChainParams p{30, -1.0, 0.0, 0.16, 0.08};
  const auto t = transform_chain(p);
  const auto hop = build_hoppings(p);
  for (std::size_t j = 0; j < t.coupling.size(); ++j) {
    CHECK(t.coupling[j] == doctest::Approx(hop.left[j]).epsilon(1e-14));
  }
  CHECK(t.coupling[0] < 0.0);
  CHECK(t.coupling.back() > 0.0);
}

TEST_CASE("similarity makes the chain symmetric") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = oracle::random_chain(rng, 2, 30);
    const auto g = gauge_product(p);
    Eigen::VectorXd d(p.sites);
    for (int j = 0; j < p.sites; ++j) d[j] = g.factor(j);
    const Eigen::MatrixXd h = build_hamiltonian(p);
    const Eigen::MatrixXd s = d.cwiseInverse().asDiagonal() * h * d.asDiagonal();
    const Eigen::MatrixXd expected = transform_chain(p).dense();
    CHECK((s - expected).cwiseAbs().maxCoeff() < 1e-12 * h.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("eigenvector mapping") {
  const auto g = gauge_product({6, 1.0, 0.4, 0.0, 0.5});
  Eigen::VectorXd phi = Eigen::VectorXd::LinSpaced(6, 0.3, 1.1);
  const auto right = map_eigenvector(g, phi, Side::Right);
  const auto left = map_eigenvector(g, phi, Side::Left);
  for (int j = 0; j < 6; ++j) {
    CHECK(right[j] * left[j] == doctest::Approx(phi[j] * phi[j]).epsilon(1e-14));
  }

  Eigen::VectorXd unit = Eigen::VectorXd::Zero(6);
  unit[3] = 1.0;
  const auto mapped = map_eigenvector(g, unit, Side::Right);
  CHECK(mapped[3] == doctest::Approx(g.factor(3)));
  CHECK(mapped.cwiseAbs().sum() == doctest::Approx(g.factor(3)));

  const auto identity = gauge_product({6, 1.0, 0.0, 0.0, 0.5});
  Eigen::VectorXcd z = Eigen::VectorXcd::Random(6);
  CHECK(map_eigenvector(identity, z, Side::Right) == z);
  CHECK(map_eigenvector(identity, z, Side::Left) == z);

  CHECK_THROWS_AS(map_eigenvector(g, Eigen::VectorXd(Eigen::VectorXd::Ones(5)), Side::Right), Error);
}

TEST_CASE("power-law fits") {
  std::vector<double> exact(50);
  for (int j = 1; j <= 50; ++j) exact[j - 1] = std::sqrt(j);
  const auto f = fit_power_law(exact, {1, 50});
  CHECK(f.exponent == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(f.residual < 1e-13);

  std::vector<double> synthetic(80);
  for (int j = 1; j <= 80; ++j) synthetic[j - 1] = 3.7 * std::pow(j, 1.095);
  const auto s = fit_power_law(synthetic, {5, 80});
  CHECK(std::abs(s.exponent - 1.095) < 1e-6);
  CHECK(std::exp(s.intercept) == doctest::Approx(3.7).epsilon(1e-10));

  CHECK_THROWS_AS(fit_power_law(exact, {0, 10}), Error);
  CHECK_THROWS_AS(fit_power_law(exact, {10, 51}), Error);
  CHECK_THROWS_AS(fit_power_law(exact, {7, 7}), Error);
}

TEST_CASE("skin factor fits on the N=100 skin setup") {
  const auto g = gauge_product(kSkin);
  const auto f = fit_power_law(g.factors(), {10, 90});
  CHECK(f.exponent >= 0.48);
  CHECK(f.exponent <= 0.52);
  // frozen from an independent high-precision evaluation
  CHECK(f.exponent == doctest::Approx(0.49202400982826644).epsilon(1e-10));
  CHECK(f.intercept == doctest::Approx(-0.16578064943929774).epsilon(1e-9));

  std::vector<double> x, y;
  for (int b = 50; b <= 99; ++b) {
    x.push_back(1.0 / b);
    y.push_back(local_log_increment(kSkin, b));
  }
  const auto line = fit_line(x, y);
  CHECK(line.slope == doctest::Approx(0.48569236810921207).epsilon(1e-9));
  CHECK(line.slope >= 0.46);
  CHECK(line.slope <= 0.52);
}

TEST_CASE("line fit") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.rms_residual == doctest::Approx(0.0));
  CHECK_THROWS_AS(fit_line(std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 1.0}), Error);
  CHECK_THROWS_AS(fit_line(x, std::vector<double>{1.0}), Error);
}
