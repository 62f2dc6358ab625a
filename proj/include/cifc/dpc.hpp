#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cifc/frontier.hpp"

namespace cifc {

// Two-secondary Gaussian channel Y = X1 + b X2 + N, Z_k = X2 + a_k X1 + N_k,
// at one power split (P_v = eta P2, P_u = (1-eta) P2) and X1-Xu correlation rho.
struct DpcConfig {
  double P1 = 3, P2 = 1;
  double a1 = 0.75, a2 = -0.5, b = 0.1;
  double eta = 0.5;
  double rho = 0;
  double x = 0;  // private-description power, 0 <= x <= eta P2
  bool sqrt_penalty = true;  // false: the (x+1) variant of the MD additive term
  void validate() const;
  double pv() const { return eta * P2; }
  double pu() const { return (1 - eta) * P2; }
  double var_z(int k) const;  // Var(Z_k), k = 1 or 2
};

enum class BoundKind { cd, md, outer, block_expansion };
std::string to_string(BoundKind k);

struct DpcBoundPoint {
  double r1 = 0, r2 = 0;
  BoundKind kind = BoundKind::cd;
};

double r1_weak(const DpcConfig& cfg);
double cd_dpc_rate(const DpcConfig& cfg);
double md_dpc_rate(const DpcConfig& cfg);
double alpha_opt_12(const DpcConfig& cfg);
double gamma_opt(const DpcConfig& cfg);

struct MdOptimum {
  double x = 0;
  double rate = 0;
};
// 64-point scan of [0, P_v], then golden section around the best scan cell.
MdOptimum best_md(const DpcConfig& cfg, int scan = 64);

// Union over eta of {R1 <= outer R1(eta), R2 <= 1/2 log2(1 + eta P2)}; needs |b| <= 1.
Frontier2D weak_outer_bound(const DpcConfig& cfg, int eta_points = 201);
double outer_r1(const DpcConfig& cfg);
double outer_r2(const DpcConfig& cfg);

// Grid maximum of min_k [I(V;Z_k) - I(V;Xu X1)] over V = Xv + gamma Xu + alpha X1,
// gamma in [0, 1], alpha in [min(a1,a2,0), max(a1,a2,0)].
struct DpcOracle {
  double rate = 0;
  double gamma = 0;
  double alpha = 0;
  double gamma_step = 0;
  double alpha_step = 0;
};
DpcOracle numeric_dpc_oracle(const DpcConfig& cfg, int points = 201);
// I(V;Z_k) - I(V;Xu X1) for one (gamma, alpha), k = 1 or 2.
double dpc_objective(const DpcConfig& cfg, double gamma, double alpha, int k);

// Time sharing between two CD-DPC slots, slot s tuned to receiver s.
double block_expansion_baseline(const DpcConfig& cfg, int t_points = 101);

struct SweepConfig {
  int eta_points = 101;
  int x_scan = 64;
  int t_points = 101;
};

struct SweepRow {
  double eta, r1, r2_cd, r2_md, x_star, r2_block, r2_outer;
};

std::vector<SweepRow> comparison_sweep(const DpcConfig& base, const SweepConfig& sweep);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_sidecar_json(const DpcConfig& base, const SweepConfig& sweep);
// Writes the CSV and, next to it, <stem>.cfg.json.
void write_sweep(const std::filesystem::path& csv, const DpcConfig& base, const SweepConfig& sweep,
                 const std::vector<SweepRow>& rows);

}  // namespace cifc
