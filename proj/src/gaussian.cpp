#include "cifc/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cifc/parallel.hpp"

namespace cifc {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double half_log2(double x) { return 0.5 * std::log2(x); }

template <class M>
double logdet_as(const Eigen::MatrixXd& cov, const std::vector<int>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  M sub(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) sub(i, j) = cov(idx[i], idx[j]);
  Eigen::LLT<M> llt(sub);
  if (llt.info() != Eigen::Success) {
    double scale = std::max(1.0, sub.diagonal().maxCoeff());
    sub += 1e-12 * scale * M::Identity(n, n);
    llt.compute(sub);
    if (llt.info() != Eigen::Success) throw numeric_error("singular covariance in mutual information");
  }
  const M& l = llt.matrixLLT();
  double s = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(l(i, i) > 0)) throw numeric_error("singular covariance in mutual information");
    s += std::log(l(i, i));
  }
  return 2 * s;
}

double logdet(const Eigen::MatrixXd& cov, const std::vector<int>& idx) {
  if (idx.empty()) return 0.0;
  // Small blocks live on the stack; the DPC oracle calls this millions of times.
  if (idx.size() <= 8) return logdet_as<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>>(cov, idx);
  return logdet_as<Eigen::MatrixXd>(cov, idx);
}

std::vector<int> join(std::span<const int> a, std::span<const int> b) {
  std::vector<int> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void check_power(double p, const char* what) {
  if (!std::isfinite(p) || p < 0) throw validation_error(std::string(what) + " must be finite and >= 0");
}

void check_gain(double g) {
  if (!std::isfinite(g)) throw validation_error("channel gains must be finite");
}

double vsi_tol(const std::vector<double>& b, double a, double P1, double P2) {
  double bmax = 1;
  for (double x : b) bmax = std::max(bmax, x * x);
  return 1e-12 * (1 + P1 * (1 + a * a) + P2 * bmax);
}

bool all_abs_at_most_one(const std::vector<double>& b) {
  return std::all_of(b.begin(), b.end(), [](double x) { return std::abs(x) <= 1; });
}
bool all_abs_at_least_one(const std::vector<double>& b) {
  return std::all_of(b.begin(), b.end(), [](double x) { return std::abs(x) >= 1; });
}

std::vector<double> pick(const std::vector<double>& b, const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  for (auto i : idx) out.push_back(b.at(i));
  return out;
}

Frontier2D merge(const std::vector<Frontier2D>& parts, bool hull) {
  Frontier2D u = frontier_union(parts);
  return hull ? convex_hull(u) : u;
}

Frontier2D vsi_formula(const std::vector<double>& b, double P1, double P2, const GaussianGrid& g) {
  std::vector<double> rhos = linspace(-1, 1, g.rho);
  std::vector<Frontier2D> parts;
  for (double rho : rhos) {
    double sum = inf;
    for (double bj : b) sum = std::min(sum, vsi_sum(bj, P1, P2, rho));
    parts.push_back(Frontier2D::pentagon(sum, vsi_r2(P2, rho), sum));
  }
  return merge(parts, g.hull);
}

// W and S given as gain lists; an empty list drops its constraint.
Frontier2D split_formula(const std::vector<double>& weak, const std::vector<double>& strong, double P1,
                         double P2, const GaussianGrid& g) {
  std::vector<double> etas = linspace(0, 1, g.eta), rhos = linspace(-1, 1, g.rho);
  auto rows = parallel_map(etas.size(), [&](std::size_t i) {
    double eta = etas[i];
    double r2 = wi_r2(P2, eta);
    std::vector<Frontier2D> parts;
    for (double rho : rhos) {
      double r1 = inf, sum = inf;
      for (double bj : weak) r1 = std::min(r1, wi_r1(bj, P1, P2, eta, rho));
      for (double bj : strong) sum = std::min(sum, split_sum(bj, P1, P2, eta, rho));
      if (!std::isfinite(r1)) r1 = sum;
      parts.push_back(Frontier2D::pentagon(r1, r2, sum));
    }
    return merge(parts, g.hull);
  });
  return merge(rows, g.hull);
}

void require(const GaussianMultiPrimary& chan, GaussianRegime r, const std::optional<Partition>& p) {
  if (!gaussian_regime_holds(chan, r, p))
    throw regime_error("channel is not in the " + to_string(r) + " regime");
}

}  // namespace

CovMatrix::CovMatrix(std::vector<std::string> names, Eigen::MatrixXd m)
    : names_(std::move(names)), m_(std::move(m)) {
  if (m_.rows() != m_.cols() || static_cast<std::size_t>(m_.rows()) != names_.size())
    throw validation_error("covariance shape does not match its variable names");
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = i + 1; j < names_.size(); ++j)
      if (names_[i] == names_[j]) throw validation_error("duplicate variable " + names_[i]);
  if (!m_.allFinite()) throw validation_error("covariance entries must be finite");
  double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw validation_error("covariance must be symmetric");
  if (m_.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
      throw validation_error("covariance must be positive semidefinite");
  }
}

int CovMatrix::index(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw validation_error("unknown Gaussian variable " + name);
  return static_cast<int>(it - names_.begin());
}

void LinearGaussianModel::add_source(const std::string& name, double variance) {
  check_power(variance, "source variance");
  for (const auto& s : sources_)
    if (s == name) throw validation_error("duplicate source " + name);
  sources_.push_back(name);
  var_.push_back(variance);
  for (auto& v : vars_) v.second.conservativeResize(static_cast<Eigen::Index>(sources_.size())), v.second(v.second.size() - 1) = 0;
}

Eigen::VectorXd LinearGaussianModel::loading(const std::string& name) const {
  for (const auto& v : vars_)
    if (v.first == name) return v.second;
  auto n = static_cast<Eigen::Index>(sources_.size());
  for (Eigen::Index i = 0; i < n; ++i)
    if (sources_[static_cast<std::size_t>(i)] == name) return Eigen::VectorXd::Unit(n, i);
  throw validation_error("unknown Gaussian variable " + name);
}

void LinearGaussianModel::define(const std::string& name,
                                 const std::vector<std::pair<std::string, double>>& terms) {
  Eigen::VectorXd l = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sources_.size()));
  for (const auto& [t, c] : terms) l += c * loading(t);
  for (auto& v : vars_)
    if (v.first == name) {
      v.second = l;
      return;
    }
  vars_.emplace_back(name, l);
}

CovMatrix LinearGaussianModel::covariance(const std::vector<std::string>& names) const {
  auto n = static_cast<Eigen::Index>(names.size());
  Eigen::MatrixXd L(n, static_cast<Eigen::Index>(sources_.size()));
  for (Eigen::Index i = 0; i < n; ++i) L.row(i) = loading(names[static_cast<std::size_t>(i)]).transpose();
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(var_.data(), static_cast<Eigen::Index>(var_.size()));
  Eigen::MatrixXd m = L * d.asDiagonal() * L.transpose();
  m = 0.5 * (m + m.transpose());
  return CovMatrix(names, std::move(m));
}

double gaussian_mi(const Eigen::MatrixXd& cov, std::span<const int> left, std::span<const int> right,
                   std::span<const int> given) {
  std::vector<int> lg = join(left, given), rg = join(right, given), g(given.begin(), given.end());
  std::vector<int> all = join(left, rg);
  double nats = 0.5 * (logdet(cov, lg) + logdet(cov, rg) - logdet(cov, all) - logdet(cov, g));
  double bits = nats / std::log(2.0);
  if (bits < 0) {
    if (bits < -1e-9) throw numeric_error("negative Gaussian mutual information");
    bits = 0;
  }
  return bits;
}

double gaussian_mi(const CovMatrix& cov, const VarSet& left, const VarSet& right, const VarSet& given) {
  if (left.empty() || right.empty()) throw validation_error("mutual information needs nonempty sides");
  auto ids = [&](const VarSet& s) {
    std::vector<int> out;
    for (const auto& n : s) out.push_back(cov.index(n));
    return out;
  };
  std::vector<int> l = ids(left), r = ids(right), g = ids(given);
  return gaussian_mi(cov.matrix(), l, r, g);
}

void GaussianMultiPrimary::validate() const {
  if (b.empty()) throw validation_error("multi-primary channel needs at least one gain b_j");
  for (double x : b) check_gain(x);
  check_gain(a);
  check_power(P1, "P1");
  check_power(P2, "P2");
}

void GaussianMultiSecondary::validate() const {
  if (a.empty()) throw validation_error("multi-secondary channel needs at least one gain a_k");
  for (double x : a) check_gain(x);
  check_gain(b);
  check_power(P1, "P1");
  check_power(P2, "P2");
}

std::string to_string(GaussianRegime r) {
  switch (r) {
    case GaussianRegime::vsi: return "VSI";
    case GaussianRegime::wi: return "WI";
    case GaussianRegime::mixed: return "mixed";
    default: return "none";
  }
}

GaussianRegime parse_gaussian_regime(const std::string& s) {
  std::string l;
  for (char c : s) l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "vsi" || l == "si") return GaussianRegime::vsi;
  if (l == "wi") return GaussianRegime::wi;
  if (l == "mixed") return GaussianRegime::mixed;
  throw validation_error("unknown Gaussian regime " + s);
}

double vsi_worst_case(const std::vector<double>& b, double a, double P1, double P2) {
  if (b.empty()) throw validation_error("no gains");
  double c = 2 * std::sqrt(P1 * P2);
  auto f = [&](double bj, double rho) { return (1 - a * a) * P1 + (bj * bj - 1) * P2 + rho * (bj - a) * c; };
  auto env = [&](double rho) {
    double m = inf;
    for (double bj : b) m = std::min(m, f(bj, rho));
    return m;
  };
  std::vector<double> cand{-1.0, 1.0};
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      double si = (b[i] - a) * c, sj = (b[j] - a) * c;
      if (si == sj) continue;
      double ci = f(b[i], 0), cj = f(b[j], 0);
      double rho = (cj - ci) / (si - sj);
      if (rho > -1 && rho < 1) cand.push_back(rho);
    }
  double best = -inf;
  for (double r : cand) best = std::max(best, env(r));
  return best;
}

bool gaussian_regime_holds(const GaussianMultiPrimary& chan, GaussianRegime r,
                           const std::optional<Partition>& partition) {
  chan.validate();
  switch (r) {
    case GaussianRegime::vsi:
      return all_abs_at_least_one(chan.b) &&
             vsi_worst_case(chan.b, chan.a, chan.P1, chan.P2) <= vsi_tol(chan.b, chan.a, chan.P1, chan.P2);
    case GaussianRegime::wi:
      return all_abs_at_most_one(chan.b);
    case GaussianRegime::mixed: {
      if (!partition) throw validation_error("the mixed regime needs a partition");
      validate_partition(*partition, chan.b.size());
      std::vector<double> w = pick(chan.b, partition->weak), s = pick(chan.b, partition->strong);
      if (!all_abs_at_most_one(w) || !all_abs_at_least_one(s)) return false;
      // An empty S leaves the weak conditions only.
      return s.empty() || vsi_worst_case(s, chan.a, chan.P1, chan.P2) <= vsi_tol(s, chan.a, chan.P1, chan.P2);
    }
    default:
      return false;
  }
}

GaussianRegime classify_gaussian(const GaussianMultiPrimary& chan, const std::optional<Partition>& partition) {
  if (gaussian_regime_holds(chan, GaussianRegime::vsi)) return GaussianRegime::vsi;
  if (gaussian_regime_holds(chan, GaussianRegime::wi)) return GaussianRegime::wi;
  if (partition && gaussian_regime_holds(chan, GaussianRegime::mixed, partition)) return GaussianRegime::mixed;
  return GaussianRegime::none;
}

GaussianRegime classify_gaussian(const GaussianMultiSecondary& chan) {
  chan.validate();
  if (std::abs(chan.b) > 1) {
    // Every k separately, and the expression is affine in rho.
    bool ok = true;
    for (double ak : chan.a) ok = ok && vsi_worst_case({chan.b}, ak, chan.P1, chan.P2) <=
                                            vsi_tol({chan.b}, ak, chan.P1, chan.P2);
    if (ok) return GaussianRegime::vsi;
  }
  if (std::abs(chan.b) <= 1) return GaussianRegime::wi;
  return GaussianRegime::none;
}

double log2_plus(double x) { return x <= 1 ? 0.0 : std::log2(x); }

double vsi_r2(double P2, double rho) { return half_log2(1 + (1 - rho * rho) * P2); }

double vsi_sum(double b, double P1, double P2, double rho) {
  return half_log2(1 + b * b * P2 + P1 + 2 * b * rho * std::sqrt(P1 * P2));
}

double wi_r1(double b, double P1, double P2, double eta, double rho) {
  double num = 1 + b * b * P2 + P1 + 2 * b * rho * std::sqrt((1 - eta) * P1 * P2);
  return std::max(0.0, half_log2(num / (1 + b * b * eta * P2)));
}

double wi_r2(double P2, double eta) { return half_log2(1 + eta * P2); }

double split_sum(double b, double P1, double P2, double eta, double rho) {
  return half_log2(1 + b * b * P2 + P1 + 2 * b * rho * std::sqrt((1 - eta) * P1 * P2));
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw validation_error("grids need at least two points");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

Frontier2D region_mp_vsi(const GaussianMultiPrimary& chan, const GaussianGrid& grid) {
  require(chan, GaussianRegime::vsi, std::nullopt);
  return vsi_formula(chan.b, chan.P1, chan.P2, grid);
}

Frontier2D region_mp_wi(const GaussianMultiPrimary& chan, const GaussianGrid& grid) {
  require(chan, GaussianRegime::wi, std::nullopt);
  return split_formula(chan.b, {}, chan.P1, chan.P2, grid);
}

Frontier2D region_mp_mixed(const GaussianMultiPrimary& chan, const Partition& partition,
                           const GaussianGrid& grid) {
  require(chan, GaussianRegime::mixed, partition);
  return split_formula(pick(chan.b, partition.weak), pick(chan.b, partition.strong), chan.P1, chan.P2, grid);
}

Frontier2D region_ms_vsi(const GaussianMultiSecondary& chan, const GaussianGrid& grid) {
  if (classify_gaussian(chan) != GaussianRegime::vsi)
    throw regime_error("channel is not in the VSI regime");
  std::vector<Frontier2D> parts;
  double c = std::abs(chan.b);
  for (double eta : linspace(0, 1, grid.eta)) {
    double sum = split_sum(c, chan.P1, chan.P2, eta, 1.0);
    parts.push_back(Frontier2D::pentagon(sum, wi_r2(chan.P2, eta), sum));
  }
  return merge(parts, grid.hull);
}

Frontier2D pair_region(const GaussianMultiPrimary& chan, std::size_t j, GaussianRegime r,
                       const std::optional<Partition>& partition, const GaussianGrid& grid) {
  double bj = chan.b.at(j);
  switch (r) {
    case GaussianRegime::vsi: return vsi_formula({bj}, chan.P1, chan.P2, grid);
    case GaussianRegime::wi: return split_formula({bj}, {}, chan.P1, chan.P2, grid);
    case GaussianRegime::mixed: {
      if (!partition) throw validation_error("the mixed regime needs a partition");
      bool weak = std::find(partition->weak.begin(), partition->weak.end(), j) != partition->weak.end();
      return weak ? split_formula({bj}, {}, chan.P1, chan.P2, grid)
                  : split_formula({}, {bj}, chan.P1, chan.P2, grid);
    }
    default: throw validation_error("no region for regime none");
  }
}

bool coherent(const std::vector<double>& b) {
  return std::all_of(b.begin(), b.end(), [](double x) { return x >= 0; }) ||
         std::all_of(b.begin(), b.end(), [](double x) { return x <= 0; });
}

IntersectionReport intersection_gap(const GaussianMultiPrimary& chan, GaussianRegime r,
                                    const GaussianGrid& grid, const std::optional<Partition>& partition) {
  IntersectionReport rep;
  switch (r) {
    case GaussianRegime::vsi: rep.multicast = region_mp_vsi(chan, grid); break;
    case GaussianRegime::wi: rep.multicast = region_mp_wi(chan, grid); break;
    case GaussianRegime::mixed:
      if (!partition) throw validation_error("the mixed regime needs a partition");
      rep.multicast = region_mp_mixed(chan, *partition, grid);
      break;
    default: throw validation_error("no region for regime none");
  }
  rep.intersection = pair_region(chan, 0, r, partition, grid);
  for (std::size_t j = 1; j < chan.b.size(); ++j)
    rep.intersection = frontier_intersect(rep.intersection, pair_region(chan, j, r, partition, grid));
  rep.max_gap = frontier_gap(rep.multicast, rep.intersection);
  rep.equal = rep.max_gap <= intersection_tol;
  return rep;
}

IntersectionReport coherent_intersection_check(const GaussianMultiPrimary& chan, GaussianRegime r,
                                               const GaussianGrid& grid,
                                               const std::optional<Partition>& partition) {
  chan.validate();
  if (!coherent(chan.b)) throw validation_error("gains b_j of mixed sign are not coherent");
  return intersection_gap(chan, r, grid, partition);
}

CovMatrix appendix_e_covariance(const GaussianMultiPrimary& chan, double eta, double rho, double gamma) {
  chan.validate();
  if (!(eta >= 0 && eta <= 1)) throw validation_error("eta must lie in [0, 1]");
  if (!(rho >= -1 && rho <= 1)) throw validation_error("rho must lie in [-1, 1]");
  double pu = (1 - eta) * chan.P2;
  LinearGaussianModel m;
  m.add_source("X1", chan.P1);
  m.add_source("W", chan.P1 > 0 ? (1 - rho * rho) * pu : pu);
  m.add_source("Xv", eta * chan.P2);
  m.add_source("Nz", 1);
  for (std::size_t j = 0; j < chan.b.size(); ++j) m.add_source("N" + std::to_string(j + 1), 1);
  double lift = chan.P1 > 0 ? rho * std::sqrt(pu / chan.P1) : 0.0;
  m.define("Xu", {{"X1", lift}, {"W", 1}});
  m.define("X2", {{"Xu", 1}, {"Xv", 1}});
  m.define("V", {{"Xv", 1}, {"Xu", gamma}, {"X1", gamma * chan.a}});
  m.define("Z", {{"X2", 1}, {"X1", chan.a}, {"Nz", 1}});
  std::vector<std::string> names{"X1", "Xu", "Xv", "X2", "V", "Z"};
  for (std::size_t j = 0; j < chan.b.size(); ++j) {
    std::string y = "Y" + std::to_string(j + 1);
    m.define(y, {{"X2", chan.b[j]}, {"X1", 1}, {"N" + std::to_string(j + 1), 1}});
    names.push_back(y);
  }
  return m.covariance(names);
}

}  // namespace cifc
