#include "cifc/dpc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "cifc/gaussian.hpp"
#include "cifc/parallel.hpp"

namespace cifc {

namespace {

double half_log2(double x) { return 0.5 * std::log2(x); }

// Shared by CD (x = 0) and MD so that x = 0 reproduces CD bit for bit.
double dpc_rate_core(const DpcConfig& c, double x) {
  double pv = c.pv(), pu = c.pu();
  double s = std::sqrt(c.var_z(1)) + std::sqrt(c.var_z(2));
  double d = c.a1 - c.a2;
  double root = std::sqrt(x + 1);
  double px = (pv - x) / root;
  double add = c.sqrt_penalty ? root : x + 1;
  double pen = c.P1 * (pv + (1 - c.rho * c.rho) * pu + 1) * d * d * px / ((pv + 1) * s * s) + add;
  return std::max(0.0, half_log2(pv + 1) - half_log2(pen));
}

// Covariance of (V, Z1, Z2, Xu, X1).
Eigen::MatrixXd dpc_covariance(const DpcConfig& c, double gamma, double alpha) {
  double pv = c.pv(), pu = c.pu(), p1 = c.P1;
  double cx = c.rho * std::sqrt(p1 * pu);  // E[Xu X1]
  std::array<double, 3> a{0.0, c.a1, c.a2};
  Eigen::MatrixXd m(5, 5);
  m(0, 0) = pv + gamma * gamma * pu + alpha * alpha * p1 + 2 * gamma * alpha * cx;
  for (int k = 1; k <= 2; ++k) {
    m(0, k) = pv + gamma * pu + gamma * a[k] * cx + alpha * cx + alpha * a[k] * p1;
    m(k, k) = c.var_z(k);
    m(k, 3) = pu + a[k] * cx;
    m(k, 4) = cx + a[k] * p1;
  }
  m(1, 2) = pv + pu + (c.a1 + c.a2) * cx + c.a1 * c.a2 * p1;
  m(0, 3) = gamma * pu + alpha * cx;
  m(0, 4) = gamma * cx + alpha * p1;
  m(3, 3) = pu;
  m(4, 4) = p1;
  m(3, 4) = cx;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < i; ++j) m(i, j) = m(j, i);
  return m;
}

double objective_on(const Eigen::MatrixXd& cov, int k) {
  // V == 0 (P_v = 0 with gamma = alpha = 0) carries nothing.
  if (cov(0, 0) <= 1e-15 * std::max(1.0, cov.diagonal().maxCoeff())) return 0.0;
  static constexpr int v[1] = {0};
  static constexpr int side[2] = {3, 4};
  const int z[1] = {k};
  return gaussian_mi(cov, v, z) - gaussian_mi(cov, v, side);
}

}  // namespace

void DpcConfig::validate() const {
  for (double p : {P1, P2})
    if (!std::isfinite(p) || p < 0) throw validation_error("powers must be finite and >= 0");
  for (double g : {a1, a2, b})
    if (!std::isfinite(g)) throw validation_error("gains must be finite");
  if (!(eta >= 0 && eta <= 1)) throw validation_error("eta must lie in [0, 1]");
  if (!(rho >= -1 && rho <= 1)) throw validation_error("rho must lie in [-1, 1]");
  if (!(x >= 0 && x <= eta * P2 * (1 + 1e-12))) throw validation_error("x must lie in [0, eta*P2]");
}

double DpcConfig::var_z(int k) const {
  double a = k == 1 ? a1 : a2;
  double v = P2 + a * a * P1 + 2 * a * rho * std::sqrt(P1 * pu()) + 1;
  if (!(v > 0)) throw numeric_error("nonpositive output variance");
  return v;
}

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::cd: return "cd";
    case BoundKind::md: return "md";
    case BoundKind::outer: return "outer";
    default: return "block_expansion";
  }
}

double r1_weak(const DpcConfig& c) {
  c.validate();
  double num = c.b * c.b * c.P2 + c.P1 + 2 * c.b * c.rho * std::sqrt(c.P1 * (1 - c.eta) * c.P2) + 1;
  return std::max(0.0, half_log2(num / (c.b * c.b * c.eta * c.P2 + 1)));
}

double cd_dpc_rate(const DpcConfig& c) {
  c.validate();
  return dpc_rate_core(c, 0.0);
}

double md_dpc_rate(const DpcConfig& c) {
  c.validate();
  return dpc_rate_core(c, std::min(c.x, c.pv()));
}

double gamma_opt(const DpcConfig& c) { return c.pv() / (c.pv() + 1); }

double alpha_opt_12(const DpcConfig& c) {
  double s1 = std::sqrt(c.var_z(1)), s2 = std::sqrt(c.var_z(2));
  return (c.a2 * s1 + c.a1 * s2) / (s1 + s2) * gamma_opt(c);
}

MdOptimum best_md(const DpcConfig& cfg, int scan) {
  cfg.validate();
  if (scan < 2) throw validation_error("the x scan needs at least two points");
  double pv = cfg.pv();
  auto f = [&](double x) { return dpc_rate_core(cfg, x); };
  MdOptimum best{0.0, f(0.0)};
  if (pv <= 0) return best;
  std::size_t bi = 0;
  for (int i = 1; i < scan; ++i) {
    double x = i == scan - 1 ? pv : pv * i / (scan - 1);
    double r = f(x);
    if (r > best.rate) best = {x, r}, bi = static_cast<std::size_t>(i);
  }
  double lo = pv * static_cast<double>(bi == 0 ? 0 : bi - 1) / (scan - 1);
  double hi = std::min(pv, pv * static_cast<double>(bi + 1) / (scan - 1));
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 100 && hi - lo > 1e-12 * std::max(1.0, pv); ++it) {
    if (fc >= fd) {
      hi = d, d = c, fd = fc;
      c = hi - g * (hi - lo), fc = f(c);
    } else {
      lo = c, c = d, fc = fd;
      d = lo + g * (hi - lo), fd = f(d);
    }
  }
  double xm = 0.5 * (lo + hi), rm = f(xm);
  if (rm > best.rate) best = {xm, rm};
  return best;
}

double outer_r1(const DpcConfig& c) {
  double num = c.b * c.b * c.P2 + c.P1 + 2 * std::abs(c.b) * std::sqrt((1 - c.eta) * c.P1 * c.P2) + 1;
  return half_log2(num / (c.b * c.b * c.eta * c.P2 + 1));
}

double outer_r2(const DpcConfig& c) { return half_log2(c.eta * c.P2 + 1); }

Frontier2D weak_outer_bound(const DpcConfig& cfg, int eta_points) {
  cfg.validate();
  if (std::abs(cfg.b) > 1) throw regime_error("the weak-interference outer bound needs |b| <= 1");
  std::vector<Frontier2D> parts;
  for (double eta : linspace(0, 1, eta_points)) {
    DpcConfig c = cfg;
    c.eta = eta;
    c.x = 0;
    parts.push_back(Frontier2D::box(outer_r1(c), outer_r2(c)));
  }
  return frontier_union(parts);
}

double dpc_objective(const DpcConfig& cfg, double gamma, double alpha, int k) {
  if (k != 1 && k != 2) throw validation_error("receiver index must be 1 or 2");
  return objective_on(dpc_covariance(cfg, gamma, alpha), k);
}

DpcOracle numeric_dpc_oracle(const DpcConfig& cfg, int points) {
  cfg.validate();
  if (points < 101) throw validation_error("the DPC oracle grid needs at least 101 points per axis");
  std::vector<double> gammas = linspace(0, 1, points);
  double lo = std::min({cfg.a1, cfg.a2, 0.0}), hi = std::max({cfg.a1, cfg.a2, 0.0});
  std::vector<double> alphas = linspace(lo, hi, points);
  auto rows = parallel_map(gammas.size(), [&](std::size_t i) {
    DpcOracle best{-std::numeric_limits<double>::infinity(), gammas[i], alphas[0], 0, 0};
    for (double al : alphas) {
      Eigen::MatrixXd cov = dpc_covariance(cfg, gammas[i], al);
      double r = std::min(objective_on(cov, 1), objective_on(cov, 2));
      if (r > best.rate) best.rate = r, best.alpha = al;
    }
    return best;
  });
  DpcOracle best = rows[0];
  for (const auto& r : rows)
    if (r.rate > best.rate) best = r;
  best.gamma_step = 1.0 / (points - 1);
  best.alpha_step = (hi - lo) / (points - 1);
  return best;
}

double block_expansion_baseline(const DpcConfig& cfg, int t_points) {
  cfg.validate();
  double g = gamma_opt(cfg);
  // r[k][s]: rate at receiver k in the slot tuned to receiver s.
  double r[2][2];
  for (int s = 0; s < 2; ++s) {
    double alpha = (s == 0 ? cfg.a1 : cfg.a2) * g;
    Eigen::MatrixXd cov = dpc_covariance(cfg, g, alpha);
    for (int k = 0; k < 2; ++k) r[k][s] = std::max(0.0, objective_on(cov, k + 1));
  }
  double best = 0;
  for (double t : linspace(0, 1, t_points))
    best = std::max(best, std::min(t * r[0][0] + (1 - t) * r[0][1], t * r[1][0] + (1 - t) * r[1][1]));
  return best;
}

std::vector<SweepRow> comparison_sweep(const DpcConfig& base, const SweepConfig& sweep) {
  base.validate();
  std::vector<double> etas = linspace(0, 1, sweep.eta_points);
  return parallel_map(etas.size(), [&](std::size_t i) {
    DpcConfig c = base;
    c.eta = etas[i];
    c.x = 0;
    MdOptimum md = best_md(c, sweep.x_scan);
    return SweepRow{c.eta, r1_weak(c), cd_dpc_rate(c), md.rate, md.x, block_expansion_baseline(c, sweep.t_points),
                    outer_r2(c)};
  });
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "eta,R1,R2_cd,R2_md,x_star,R2_block,R2_outer\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.eta, r.r1, r.r2_cd,
                  r.r2_md, r.x_star, r.r2_block, r.r2_outer);
    out += buf;
  }
  return out;
}

std::string sweep_sidecar_json(const DpcConfig& base, const SweepConfig& sweep) {
  nlohmann::ordered_json j;
  j["P1"] = base.P1;
  j["P2"] = base.P2;
  j["a1"] = base.a1;
  j["a2"] = base.a2;
  j["b"] = base.b;
  j["rho"] = base.rho;
  j["sqrt_penalty"] = base.sqrt_penalty;
  j["eta_points"] = sweep.eta_points;
  j["x_scan"] = sweep.x_scan;
  j["t_points"] = sweep.t_points;
  return j.dump(2) + "\n";
}

void write_sweep(const std::filesystem::path& csv, const DpcConfig& base, const SweepConfig& sweep,
                 const std::vector<SweepRow>& rows) {
  auto put = [](const std::filesystem::path& p, const std::string& s) {
    std::ofstream os(p, std::ios::binary);
    os << s;
    if (!os) throw validation_error("cannot write " + p.string());
  };
  put(csv, sweep_csv(rows));
  std::filesystem::path side = csv;
  side.replace_extension(".cfg.json");
  put(side, sweep_sidecar_json(base, sweep));
}

}  // namespace cifc
