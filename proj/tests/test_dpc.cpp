#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "cifc/dpc.hpp"
#include "cifc/gaussian.hpp"
#include "cifc/parallel.hpp"

using namespace cifc;

namespace {

double hl(double x) { return 0.5 * std::log2(x); }

DpcConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  DpcConfig c;
  c.P1 = 0.2 + 4 * u(rng);
  c.P2 = 0.2 + 4 * u(rng);
  c.a1 = -1 + 2 * u(rng);
  c.a2 = -1 + 2 * u(rng);
  c.b = u(rng);
  c.eta = u(rng);
  c.rho = -0.9 + 1.8 * u(rng);
  return c;
}

}  // namespace

TEST_CASE("equal gains reduce to single-user DPC") {
  DpcConfig c;
  c.a1 = c.a2 = 0.4;
  c.eta = 0.6;
  c.rho = 0.3;
  CHECK(cd_dpc_rate(c) == doctest::Approx(hl(1 + c.pv())).epsilon(1e-14));
  CHECK(alpha_opt_12(c) == doctest::Approx(0.4 * gamma_opt(c)).epsilon(1e-14));
  DpcOracle o = numeric_dpc_oracle(c);
  CHECK(o.rate == doctest::Approx(hl(1 + c.pv())).epsilon(1e-6));
  CHECK(std::abs(o.gamma - gamma_opt(c)) <= o.gamma_step);
  CHECK(std::abs(o.alpha - alpha_opt_12(c)) <= o.alpha_step);
}

TEST_CASE("no primary power reduces to single-user DPC") {
  DpcConfig c;
  c.P1 = 0;
  for (double eta : {0.0, 0.3, 1.0}) {
    c.eta = eta;
    CHECK(cd_dpc_rate(c) == doctest::Approx(hl(1 + c.pv())).epsilon(1e-14));
    CHECK(best_md(c).rate == doctest::Approx(hl(1 + c.pv())).epsilon(1e-12));
  }
}

TEST_CASE("closed form equals the MI objective at its optimizers") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    DpcConfig c = random_config(rng);
    double g = gamma_opt(c), al = alpha_opt_12(c);
    double direct = std::min(dpc_objective(c, g, al, 1), dpc_objective(c, g, al, 2));
    CHECK(std::abs(std::max(0.0, direct) - cd_dpc_rate(c)) < 1e-10);
  }
  CHECK_THROWS_AS(dpc_objective(DpcConfig{}, 0.5, 0, 3), validation_error);
}

TEST_CASE("grid oracle never falls below the closed form") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    DpcConfig c = random_config(rng);
    DpcOracle o = numeric_dpc_oracle(c, 101);
    CHECK(o.rate >= cd_dpc_rate(c) - 2e-3);
    CHECK(o.rate <= outer_r2(c) + 1e-12);
  }
  CHECK_THROWS_AS(numeric_dpc_oracle(DpcConfig{}, 50), validation_error);
}

TEST_CASE("modified DPC properties") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    DpcConfig c = random_config(rng);
    DpcConfig z = c;
    z.x = 0;
    CHECK(md_dpc_rate(z) == cd_dpc_rate(c));  // bitwise
    MdOptimum m = best_md(c);
    CHECK(m.rate >= cd_dpc_rate(c));
    CHECK(m.rate <= outer_r2(c) + 1e-12);
    CHECK(m.x >= 0);
    CHECK(m.x <= c.pv());
    // The scan optimum is within golden-section accuracy of a dense scan.
    double dense = 0;
    for (double x : linspace(0, c.pv() > 0 ? c.pv() : 1e-9, 4001)) {
      DpcConfig d = c;
      d.x = std::min(x, c.pv());
      dense = std::max(dense, md_dpc_rate(d));
    }
    CHECK(m.rate >= dense - 1e-9);
    // More primary power only adds interference.
    DpcConfig louder = c;
    louder.P1 *= 2;
    louder.x = m.x;
    DpcConfig at = c;
    at.x = m.x;
    CHECK(md_dpc_rate(louder) <= md_dpc_rate(at) + 1e-12);
  }
  DpcConfig full;
  full.eta = 1;
  full.x = full.pv();
  CHECK(md_dpc_rate(full) == doctest::Approx(0.25 * std::log2(1 + full.pv())).epsilon(1e-14));
  full.sqrt_penalty = false;
  CHECK(md_dpc_rate(full) == 0.0);
}

TEST_CASE("config validation") {
  DpcConfig c;
  c.x = c.pv() * 1.01;
  CHECK_THROWS_AS(c.validate(), validation_error);
  c = DpcConfig{};
  c.eta = 1.2;
  CHECK_THROWS_AS(c.validate(), validation_error);
  c = DpcConfig{};
  c.P1 = -1;
  CHECK_THROWS_AS(c.validate(), validation_error);
  c = DpcConfig{};
  c.b = 1.5;
  CHECK_THROWS_AS(weak_outer_bound(c), regime_error);
}

TEST_CASE("block expansion baseline") {
  DpcConfig eq;
  eq.a1 = eq.a2 = -0.3;
  CHECK(block_expansion_baseline(eq) == doctest::Approx(hl(1 + eq.pv())).epsilon(1e-12));
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    DpcConfig c = random_config(rng);
    double g = gamma_opt(c), blk = block_expansion_baseline(c);
    // Endpoints t = 0 and t = 1 are single slots.
    for (double a : {c.a1, c.a2}) {
      double one = std::max(0.0, std::min(dpc_objective(c, g, a * g, 1), dpc_objective(c, g, a * g, 2)));
      CHECK(blk >= one - 1e-12);
    }
    CHECK(blk <= outer_r2(c) + 1e-12);
  }
}

TEST_CASE("comparison sweep and its files") {
  DpcConfig base;
  base.P1 = 6;
  base.P2 = 1;
  SweepConfig s{21, 64, 101};
  auto rows = comparison_sweep(base, s);
  REQUIRE(rows.size() == 21);
  CHECK(rows.front().eta == 0);
  CHECK(rows.back().eta == 1);
  CHECK(rows.front().r2_cd == 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    CHECK(r.r2_cd <= r.r2_md);
    CHECK(r.r2_md <= r.r2_outer + 1e-12);
    CHECK(r.r2_block <= r.r2_outer + 1e-12);
    if (i) CHECK(r.r2_outer > rows[i - 1].r2_outer);
    if (i) CHECK(r.r1 <= rows[i - 1].r1 + 1e-12);
  }
  std::string csv = sweep_csv(rows);
  CHECK(csv.rfind("eta,R1,R2_cd,R2_md,x_star,R2_block,R2_outer\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);
  CHECK(sweep_csv(comparison_sweep(base, s)) == csv);

  auto side = nlohmann::json::parse(sweep_sidecar_json(base, s));
  CHECK(side["P1"] == 6.0);
  CHECK(side["eta_points"] == 21);

  auto dir = std::filesystem::temp_directory_path() / "cifc_test_dpc";
  std::filesystem::create_directories(dir);
  write_sweep(dir / "sweep.csv", base, s, rows);
  std::ifstream in(dir / "sweep.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == csv);
  CHECK(std::filesystem::exists(dir / "sweep.cfg.json"));
  std::filesystem::remove_all(dir);
}
