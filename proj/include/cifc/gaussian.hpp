#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cifc/dmc_regions.hpp"
#include "cifc/frontier.hpp"

namespace cifc {

// Covariance over named jointly Gaussian variables.
class CovMatrix {
 public:
  CovMatrix() = default;
  CovMatrix(std::vector<std::string> names, Eigen::MatrixXd m);

  const std::vector<std::string>& names() const { return names_; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  int index(const std::string& name) const;

 private:
  std::vector<std::string> names_;
  Eigen::MatrixXd m_;
};

// Variables as linear combinations of independent zero-mean sources.
class LinearGaussianModel {
 public:
  void add_source(const std::string& name, double variance);
  // name = sum of coeff * (source or previously defined variable)
  void define(const std::string& name, const std::vector<std::pair<std::string, double>>& terms);
  CovMatrix covariance(const std::vector<std::string>& names) const;

 private:
  std::vector<std::string> sources_;
  std::vector<double> var_;
  std::vector<std::pair<std::string, Eigen::VectorXd>> vars_;  // loadings on the sources
  Eigen::VectorXd loading(const std::string& name) const;
};

// I(left; right | given) in bits.
double gaussian_mi(const CovMatrix& cov, const VarSet& left, const VarSet& right,
                   const VarSet& given = {});
// Same on raw indices, without name lookup or matrix validation.
double gaussian_mi(const Eigen::MatrixXd& cov, std::span<const int> left, std::span<const int> right,
                   std::span<const int> given = {});

struct GaussianMultiPrimary {
  std::vector<double> b;
  double a = 0;
  double P1 = 1, P2 = 1;
  void validate() const;
};

struct GaussianMultiSecondary {
  double b = 0;
  std::vector<double> a;
  double P1 = 1, P2 = 1;
  void validate() const;
};

enum class GaussianRegime { vsi, wi, mixed, none };
std::string to_string(GaussianRegime r);
GaussianRegime parse_gaussian_regime(const std::string& s);

// max over rho in [-1, 1] of min_j f_j(rho), f_j the affine VSI expression
// (1-a^2)P1 + (b_j^2-1)P2 + 2 rho (b_j-a) sqrt(P1 P2). Exact: the min of affine
// functions is concave, so the max sits at an endpoint or a pairwise crossing.
double vsi_worst_case(const std::vector<double>& b, double a, double P1, double P2);

// VSI, then WI, then mixed when a partition is supplied, else none.
GaussianRegime classify_gaussian(const GaussianMultiPrimary& chan,
                                 const std::optional<Partition>& partition = std::nullopt);
GaussianRegime classify_gaussian(const GaussianMultiSecondary& chan);
bool gaussian_regime_holds(const GaussianMultiPrimary& chan, GaussianRegime r,
                           const std::optional<Partition>& partition = std::nullopt);

double log2_plus(double x);

// Single-receiver closed forms, rates in bits.
double vsi_r2(double P2, double rho);
double vsi_sum(double b, double P1, double P2, double rho);
double wi_r1(double b, double P1, double P2, double eta, double rho);
double wi_r2(double P2, double eta);
double split_sum(double b, double P1, double P2, double eta, double rho);

struct GaussianGrid {
  int eta = 201;  // points on [0, 1]
  int rho = 201;  // points on [-1, 1]
  bool hull = false;  // convex hull (time sharing) instead of the plain union
};
std::vector<double> linspace(double lo, double hi, int n);

// Capacity regions: union over the grid of the per-parameter regions.
Frontier2D region_mp_vsi(const GaussianMultiPrimary& chan, const GaussianGrid& grid = {});
Frontier2D region_mp_wi(const GaussianMultiPrimary& chan, const GaussianGrid& grid = {});
Frontier2D region_mp_mixed(const GaussianMultiPrimary& chan, const Partition& partition,
                           const GaussianGrid& grid = {});
Frontier2D region_ms_vsi(const GaussianMultiSecondary& chan, const GaussianGrid& grid = {});

// Region of the (Z, Y_j) pair under the same formula, no regime check.
Frontier2D pair_region(const GaussianMultiPrimary& chan, std::size_t j, GaussianRegime r,
                       const std::optional<Partition>& partition, const GaussianGrid& grid);

struct IntersectionReport {
  bool equal = false;
  double max_gap = 0;
  Frontier2D multicast;
  Frontier2D intersection;
};
inline constexpr double intersection_tol = 1e-6;

// Multicast region against the intersection of the pairwise regions.
// coherent_intersection_check rejects gains of mixed sign.
IntersectionReport coherent_intersection_check(const GaussianMultiPrimary& chan, GaussianRegime r,
                                               const GaussianGrid& grid = {},
                                               const std::optional<Partition>& partition = std::nullopt);
IntersectionReport intersection_gap(const GaussianMultiPrimary& chan, GaussianRegime r,
                                    const GaussianGrid& grid = {},
                                    const std::optional<Partition>& partition = std::nullopt);
bool coherent(const std::vector<double>& b);

// Superposition/DPC construction for one (eta, rho): X2 = Xu + Xv, U = Xu,
// Xv ~ N(0, eta P2), corr(X1, Xu) = rho, V = Xv + gamma (Xu + a X1).
// Variables: X1, Xu, Xv, X2, V, Z, Y1..YN.
CovMatrix appendix_e_covariance(const GaussianMultiPrimary& chan, double eta, double rho, double gamma);
inline double costa_gamma(double P2, double eta) { return eta * P2 / (eta * P2 + 1); }

}  // namespace cifc
