#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "cifc/gaussian.hpp"
#include "cifc/parallel.hpp"

using namespace cifc;

namespace {

double hl(double x) { return 0.5 * std::log2(x); }

CovMatrix random_cov(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  Eigen::MatrixXd c = a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("G" + std::to_string(i));
  return CovMatrix(names, c);
}

}  // namespace

TEST_CASE("Gaussian mutual information") {
  LinearGaussianModel m;
  m.add_source("X", 3);
  m.add_source("N", 1);
  m.define("Y", {{"X", 1}, {"N", 1}});
  CovMatrix c = m.covariance({"X", "Y"});
  CHECK(gaussian_mi(c, {"X"}, {"Y"}) == doctest::Approx(hl(4)).epsilon(1e-14));
  CHECK(gaussian_mi(c, {"Y"}, {"X"}) == doctest::Approx(hl(4)).epsilon(1e-14));
  CHECK_THROWS_AS(gaussian_mi(c, {"X"}, {"W"}), validation_error);

  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    CovMatrix r = random_cov(rng, 4);
    double lhs = gaussian_mi(r, {"G0", "G1"}, {"G2"}, {"G3"});
    double rhs = gaussian_mi(r, {"G0"}, {"G2"}, {"G3"}) + gaussian_mi(r, {"G1"}, {"G2"}, {"G0", "G3"});
    CHECK(std::abs(lhs - rhs) < 1e-10);
    CHECK(gaussian_mi(r, {"G0"}, {"G1"}, {"G2"}) >= 0);
    CHECK(std::abs(gaussian_mi(r, {"G0"}, {"G1", "G2"}) - gaussian_mi(r, {"G1", "G2"}, {"G0"})) < 1e-12);
  }
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(CovMatrix({"A", "B"}, bad), validation_error);
}

TEST_CASE("closed forms equal the MI of the superposition/DPC construction") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 100; ++t) {
    GaussianMultiPrimary ch{{0.2 + 2 * u(rng), -1 + 2 * u(rng)}, 2 * u(rng), 0.1 + 5 * u(rng), 0.1 + 5 * u(rng)};
    double eta = u(rng), rho = -1 + 2 * u(rng), g = costa_gamma(ch.P2, eta);
    CovMatrix c = appendix_e_covariance(ch, eta, rho, g);
    double dpc = gaussian_mi(c, {"V"}, {"Z"}) - gaussian_mi(c, {"V"}, {"X1", "Xu"});
    if (eta > 1e-9) CHECK(std::abs(dpc - wi_r2(ch.P2, eta)) < 1e-9);
    for (std::size_t j = 0; j < ch.b.size(); ++j) {
      std::string y = "Y" + std::to_string(j + 1);
      CHECK(std::abs(gaussian_mi(c, {"X1", "Xu"}, {y}) - wi_r1(ch.b[j], ch.P1, ch.P2, eta, rho)) < 1e-9);
      CHECK(std::abs(gaussian_mi(c, {"X1", "X2"}, {y}) - split_sum(ch.b[j], ch.P1, ch.P2, eta, rho)) < 1e-9);
    }
    CovMatrix c0 = appendix_e_covariance(ch, 0, rho, 0);
    CHECK(std::abs(gaussian_mi(c0, {"X2"}, {"Z"}, {"X1"}) - vsi_r2(ch.P2, rho)) < 1e-9);
    CHECK(std::abs(gaussian_mi(c0, {"X1", "X2"}, {"Y1"}) - vsi_sum(ch.b[0], ch.P1, ch.P2, rho)) < 1e-9);
  }
  GaussianMultiPrimary ch{{1}, 0, 1, 1};
  CHECK_THROWS_AS(appendix_e_covariance(ch, 1.5, 0, 0), validation_error);
  CHECK_THROWS_AS(appendix_e_covariance(ch, 0.5, -2, 0), validation_error);
}

TEST_CASE("closed-form scalar values") {
  CHECK(vsi_r2(3, 0) == doctest::Approx(1.0));
  CHECK(vsi_r2(3, 1) == 0.0);
  CHECK(vsi_sum(1, 1, 1, 1) == doctest::Approx(hl(5)));
  CHECK(wi_r1(0, 3, 5, 0.3, 0.7) == doctest::Approx(1.0));
  CHECK(wi_r2(3, 1) == doctest::Approx(1.0));
  CHECK(log2_plus(0.5) == 0.0);
  CHECK(log2_plus(4) == 2.0);
}

TEST_CASE("regime classification") {
  CHECK(classify_gaussian(GaussianMultiPrimary{{1.5}, 3, 1, 1}) == GaussianRegime::vsi);
  CHECK(classify_gaussian(GaussianMultiPrimary{{2, 3}, 3.5, 1, 1}) == GaussianRegime::vsi);
  CHECK(classify_gaussian(GaussianMultiPrimary{{1.5, 2.5}, 4, 1, 1}) == GaussianRegime::vsi);
  CHECK(classify_gaussian(GaussianMultiPrimary{{0.5, -0.8}, 0.3, 2, 1}) == GaussianRegime::wi);
  // b_j >= 1 alone is not enough: the condition must hold for every rho.
  CHECK(classify_gaussian(GaussianMultiPrimary{{2}, 0, 1, 1}) == GaussianRegime::none);
  CHECK(classify_gaussian(GaussianMultiPrimary{{0.5, 2}, 3, 1, 1}, parse_partition("1|2")) ==
        GaussianRegime::mixed);
  CHECK(classify_gaussian(GaussianMultiPrimary{{0.5, 2}, 3, 1, 1}) == GaussianRegime::none);
  CHECK(classify_gaussian(GaussianMultiPrimary{{0.5, 2}, 0, 1, 1}, parse_partition("1|2")) ==
        GaussianRegime::none);
  CHECK(classify_gaussian(GaussianMultiSecondary{2, {3, 3}, 1, 1}) == GaussianRegime::vsi);
  CHECK(classify_gaussian(GaussianMultiSecondary{0.5, {0, 3}, 1, 1}) == GaussianRegime::wi);
  CHECK(classify_gaussian(GaussianMultiSecondary{2, {0}, 1, 1}) == GaussianRegime::none);

  CHECK_THROWS_AS((GaussianMultiPrimary{{}, 0, 1, 1}.validate()), validation_error);
  CHECK_THROWS_AS((GaussianMultiPrimary{{1}, 0, -1, 1}.validate()), validation_error);
  CHECK_THROWS_AS(region_mp_vsi(GaussianMultiPrimary{{0.5}, 0, 1, 1}), regime_error);
  CHECK_THROWS_AS(region_mp_wi(GaussianMultiPrimary{{1.5}, 3, 1, 1}), regime_error);
  CHECK_THROWS_AS(region_ms_vsi(GaussianMultiSecondary{0.5, {1}, 1, 1}), regime_error);
  CHECK(parse_gaussian_regime("VSI") == GaussianRegime::vsi);
  CHECK_THROWS_AS(parse_gaussian_regime("strong"), validation_error);
}

TEST_CASE("worst-case VSI expression against a dense rho scan") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3), p(0.1, 5);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> b{u(rng), u(rng), u(rng)};
    double a = u(rng), P1 = p(rng), P2 = p(rng);
    double scan = -1e300;
    for (double rho : linspace(-1, 1, 20001)) {
      double m = 1e300;
      for (double bj : b) m = std::min(m, (1 - a * a) * P1 + (bj * bj - 1) * P2 + 2 * rho * (bj - a) * std::sqrt(P1 * P2));
      scan = std::max(scan, m);
    }
    double exact = vsi_worst_case(b, a, P1, P2);
    CHECK(exact >= scan - 1e-9);
    CHECK(exact - scan < 1e-3 * (1 + std::abs(exact)));
  }
}

TEST_CASE("regions: corner points and grid refinement") {
  GaussianMultiPrimary vsi{{1.5, 2.5}, 4, 1, 1};
  Frontier2D f = region_mp_vsi(vsi);
  CHECK(f.r2_max() == doctest::Approx(hl(2)).epsilon(1e-12));
  double best = 0;
  for (double rho : linspace(-1, 1, 201)) best = std::max(best, std::min(vsi_sum(1.5, 1, 1, rho), vsi_sum(2.5, 1, 1, rho)));
  CHECK(f.r1_max() == doctest::Approx(best).epsilon(1e-12));

  GaussianMultiPrimary wi{{0.5, 0.8}, 0.3, 2, 1};
  GaussianGrid coarse{26, 26, false}, fine{101, 101, false};
  Frontier2D c = region_mp_wi(wi, coarse), d = region_mp_wi(wi, fine);
  // Nested grids: the finer union can only grow, and by O(step).
  CHECK(frontier_contains(d, c, 1e-12));
  double gap = frontier_gap(d, c);
  CHECK(gap > 0);
  CHECK(gap < 0.2);
  GaussianGrid finer{401, 401, false};
  CHECK(frontier_gap(region_mp_wi(wi, finer), d) < gap);

  GaussianGrid hull{101, 101, true};
  Frontier2D h = region_mp_wi(wi, hull);
  CHECK(frontier_contains(h, d, 1e-12));
  CHECK(region_equal(convex_hull(h), h, 1e-12));

  GaussianMultiSecondary ms{2, {3, 3}, 1, 1};
  Frontier2D m = region_ms_vsi(ms);
  CHECK(m.r2_max() == doctest::Approx(hl(2)).epsilon(1e-12));
  CHECK(m.r1_max() == doctest::Approx(hl(1 + 9)).epsilon(1e-12));
}

TEST_CASE("multicast region against the pairwise intersection") {
  GaussianGrid g{101, 101, false};
  auto v = coherent_intersection_check(GaussianMultiPrimary{{2, 3}, 3.5, 1, 1}, GaussianRegime::vsi, g);
  CHECK(v.equal);
  CHECK(v.max_gap <= intersection_tol);
  auto w = coherent_intersection_check(GaussianMultiPrimary{{0.3, 0.9}, 0.2, 2, 1.5}, GaussianRegime::wi, g);
  CHECK(w.equal);
  CHECK(frontier_contains(w.intersection, w.multicast, 1e-12));

  GaussianMultiPrimary mixed_sign{{0.5, -0.5}, 0, 1, 1};
  CHECK_THROWS_AS(coherent_intersection_check(mixed_sign, GaussianRegime::wi, g), validation_error);
  auto n = intersection_gap(mixed_sign, GaussianRegime::wi, g);
  CHECK(n.max_gap > 1e-4);
  CHECK_FALSE(n.equal);
  CHECK(frontier_contains(n.intersection, n.multicast, 1e-12));

  auto m = intersection_gap(GaussianMultiPrimary{{0.5, 2}, 3, 1, 1}, GaussianRegime::mixed, g, parse_partition("1|2"));
  CHECK(frontier_contains(m.intersection, m.multicast, 1e-12));
}
