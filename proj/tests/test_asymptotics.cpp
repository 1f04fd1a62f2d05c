#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "nhstark/asymptotics.hpp"
#include "nhstark/error.hpp"
#include "nhstark/spectral.hpp"

using namespace nhstark;
using cplx = std::complex<double>;

TEST_CASE("characteristic roots") {
  const auto kinetic = characteristic_roots(0.0, 1.0);
  CHECK(std::abs(kinetic.major - cplx(0.0, 1.0)) < 1e-15);
  CHECK(std::abs(kinetic.minor - cplx(0.0, -1.0)) < 1e-15);

  const auto repeated = characteristic_roots(0.4, 0.2);
  CHECK(std::abs(repeated.major - cplx(-1.0, 0.0)) < 1e-15);
  CHECK(repeated.major == repeated.minor);

  const auto split = characteristic_roots(3.0, 1.0);
  CHECK(split.major.real() == doctest::Approx((-3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-15));
  CHECK(split.minor.real() == doctest::Approx((-3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
  CHECK(split.minor.real() == doctest::Approx(-0.381966).epsilon(1e-6));
  CHECK(split.major.real() == doctest::Approx(-2.618034).epsilon(1e-6));
  CHECK(std::abs(split.major * split.minor - 1.0) < 1e-15);

  CHECK_THROWS_AS(characteristic_roots(1.0, 0.0), Error);
}

TEST_CASE("Vieta relations hold on random ratios") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ratio(-6.0, 6.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double r = ratio(rng);
    const auto roots = characteristic_roots(r, 1.0);
    CHECK(std::abs(roots.major * roots.minor - 1.0) < 1e-12);
    CHECK(std::abs(roots.major + roots.minor + r) < 1e-12);
    CHECK(std::abs(roots.major) >= std::abs(roots.minor));
  }
}

TEST_CASE("branch classification") {
  const auto osc = classify_branch(1.0, 1.0);
  CHECK(osc.kind == Branch::Oscillatory);
  REQUIRE(osc.wavenumber);
  CHECK(*osc.wavenumber == doctest::Approx(2.0 * std::numbers::pi / 3.0).epsilon(1e-15));
  CHECK_FALSE(osc.decay_rate);

  const auto loc = classify_branch(0.6, 0.2);
  CHECK(loc.kind == Branch::Localized);
  REQUIRE(loc.decay_rate);
  CHECK(*loc.decay_rate == doctest::Approx(std::log(1.5 + std::sqrt(1.25))).epsilon(1e-14));
  CHECK(*loc.decay_rate == doctest::Approx(0.962424).epsilon(1e-6));

  const auto crit = classify_branch(2.0, 1.0);
  CHECK(crit.kind == Branch::Critical);
  REQUIRE(crit.critical_root);
  CHECK(*crit.critical_root == -1.0);
  CHECK(*classify_branch(-2.0, 1.0).critical_root == 1.0);

  CHECK(classify_branch(2.0 + 1e-10, 1.0).kind == Branch::Critical);
  CHECK(classify_branch(2.0 + 1e-6, 1.0).kind == Branch::Localized);
  CHECK(classify_branch(-2.5, 1.0).kind == Branch::Localized);
  CHECK(classify_branch(-1.9, 1.0).kind == Branch::Oscillatory);
}

TEST_CASE("wavenumber inverts the band relation") {
  for (double r = -1.95; r < 1.95; r += 0.1) {
    const auto b = classify_branch(r, 1.0);
    CHECK(-2.0 * std::cos(*b.wavenumber) == doctest::Approx(r).epsilon(1e-13));
  }
}

TEST_CASE("transfer matrix") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ratio(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double r = ratio(rng);
    const Eigen::Matrix2d t = transfer_matrix(r, 1.0);
    CHECK(t.determinant() == doctest::Approx(1.0).epsilon(1e-14));
    Eigen::EigenSolver<Eigen::Matrix2d> es(t, false);
    const auto roots = characteristic_roots(r, 1.0);
    const cplx e0 = es.eigenvalues()[0];
    const cplx e1 = es.eigenvalues()[1];
    const double direct = std::abs(e0 - roots.major) + std::abs(e1 - roots.minor);
    const double swapped = std::abs(e1 - roots.major) + std::abs(e0 - roots.minor);
    CHECK(std::min(direct, swapped) < 1e-10);
  }

  const Eigen::Matrix2d kinetic = transfer_matrix(0.0, 1.0);
  CHECK(kinetic.trace() == 0.0);

  const Eigen::Matrix2d crit = transfer_matrix(2.0, 1.0);
  CHECK(is_jordan_block(crit));
  Eigen::FullPivLU<Eigen::Matrix2d> lu(crit + Eigen::Matrix2d::Identity());
  CHECK(lu.rank() == 1);
  CHECK_FALSE(is_jordan_block(transfer_matrix(3.0, 1.0)));
  CHECK_FALSE(is_jordan_block(transfer_matrix(1.0, 1.0)));
  CHECK_FALSE(is_jordan_block(-Eigen::Matrix2d::Identity()));
}

TEST_CASE("arcosh near one") {
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    const double ratio = stable_arcosh(1.0 + delta) / std::sqrt(2.0 * delta);
    CHECK(ratio >= 0.99);
    CHECK(ratio <= 1.0);
  }
  CHECK(stable_arcosh(1.0) == 0.0);
  CHECK(stable_arcosh(1.5) == doctest::Approx(std::acosh(1.5)).epsilon(1e-15));
  CHECK(stable_arcosh(1.0 + 1e-14) == doctest::Approx(std::sqrt(2e-14)).epsilon(1e-3));
}

TEST_CASE("envelope model") {
  BranchClassification loc;
  loc.kind = Branch::Localized;
  loc.decay_rate = 0.5;
  const auto env = envelope_model(loc, 1.0);
  int best = 1;
  for (int j = 1; j <= 50; ++j) {
    if (env(j) > env(best)) best = j;
  }
  CHECK(best == 2);
  CHECK(envelope_peak(1.0, 0.5) == 2.0);

  const auto bare = envelope_model(loc, 0.0);
  CHECK(bare(11.0) - bare(10.0) == doctest::Approx(-0.5));

  BranchClassification osc;
  const auto skin = envelope_model(osc, 0.7);
  CHECK(skin(std::exp(2.0)) == doctest::Approx(1.4));

  BranchClassification crit;
  crit.kind = Branch::Critical;
  const auto linear = envelope_model(crit, 0.0, 0.0, 2.0);
  CHECK(linear(3.0) == doctest::Approx(std::log(6.0)));
}

TEST_CASE("finite-size scales") {
  CHECK(screening_scale({100, 1.0, 0.219, 0.0, 0.2}) ==
        doctest::Approx(1.095 * std::log(100.0)).epsilon(1e-14));
  CHECK(std::abs(screening_scale({100, 1.0, 0.219, 0.0, 0.2}) - 5.04) < 0.01);
  CHECK(screening_scale({100, 1.0, 0.0, 0.0, 0.2}) == 0.0);

  const ChainParams loc{100, 1.0, 0.5, 0.6, 0.2};
  const double kappa = std::acosh(1.5);
  CHECK(competition_scale(loc) == doctest::Approx(0.5 / (0.2 * kappa * 100)).epsilon(1e-13));
  CHECK(std::abs(competition_scale(loc) - 0.025976) < 1e-6);
  CHECK(competition_scale({100, 1.0, 0.0, 0.6, 0.2}) == 0.0);
  ChainParams doubled = loc;
  doubled.sites = 200;
  CHECK(competition_scale(doubled) == doctest::Approx(competition_scale(loc) / 2.0));
  CHECK_THROWS_AS(competition_scale({100, 1.0, 0.5, 0.2, 0.2}), Error);

  CHECK(envelope_peak(0.0, 1.0) == 0.0);
  CHECK(envelope_peak(2.5, 0.962424) == doctest::Approx(2.5976).epsilon(1e-4));
  CHECK_THROWS_AS(envelope_peak(1.0, 0.0), Error);

  CHECK(threshold_distance({10, 1.0, 0.0, 0.6, 0.2}) == doctest::Approx(0.5));
  const auto w = threshold_widths({100, 1.0, 0.2, 0.0, 0.2});
  CHECK(w.size_only == doctest::Approx(1e-4).epsilon(1e-14));
  CHECK(w.with_gamma == doctest::Approx(5e-5).epsilon(1e-14));
  CHECK(threshold_widths({100, 1.0, 0.0, 0.0, 0.2}).with_gamma == 0.0);

  const auto all = finite_size_scales(loc);
  REQUIRE(all.competition);
  REQUIRE(all.envelope_peak);
  CHECK(*all.envelope_peak == doctest::Approx(2.5 / kappa));
  CHECK_FALSE(finite_size_scales({100, 1.0, 0.5, 0.2, 0.2}).competition);
}

TEST_CASE("tail window") {
  CHECK(tail_window(100, std::nullopt) == SiteWindow{1, 95});
  CHECK(tail_window(100, 0.0) == SiteWindow{1, 95});
  CHECK(tail_window(100, 2.5976) == SiteWindow{6, 95});
  CHECK(tail_window(100, 0.52) == SiteWindow{2, 95});
  CHECK_THROWS_AS(tail_window(6, std::nullopt), Error);
}

TEST_CASE("tail slope of a pure exponential") {
  std::vector<double> a(60);
  for (int j = 1; j <= 60; ++j) a[j - 1] = (j % 2 ? -1.0 : 1.0) * std::exp(-0.7 * j);
  const auto fit = fit_tail_slope(a, {5, 55});
  CHECK(fit.slope == doctest::Approx(-0.7).epsilon(1e-12));
  a[9] = 0.0;
  CHECK_THROWS_AS(fit_tail_slope(a, {5, 55}), Error);
}

TEST_CASE("lowest localized state decays at the asymptotic rate") {
  // The bottom of the Stark ladder sits deep in the asymptotic regime, where
  // |E / j| stays small along the tail.
  const ChainParams p{100, 1.0, 0.5, 3.0, 1.0};
  const auto eigs = eigensolve(p);
  std::vector<double> phi(eigs.transformed.col(0).data(), eigs.transformed.col(0).data() + 100);
  const auto branch = classify_branch(p);
  const double kappa = *branch.decay_rate;
  const auto scales = finite_size_scales(p);
  // stop before the amplitude reaches the double-precision floor
  SiteWindow window = tail_window(p.sites, scales.envelope_peak);
  for (int j = window.first; j <= window.last; ++j) {
    if (std::abs(phi[j - 1]) < 1e-280) {
      window.last = j - 1;
      break;
    }
  }
  const auto fit = fit_tail_slope(phi, window);
  CHECK(std::abs(fit.slope + kappa) < 0.1 * kappa);
}
