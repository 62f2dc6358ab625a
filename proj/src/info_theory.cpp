#include "cifc/info_theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cifc/parallel.hpp"

namespace cifc {

namespace {

void check_axes(const std::vector<Axis>& axes) {
  std::set<std::string> seen;
  for (const auto& a : axes) {
    if (a.name.empty()) throw validation_error("axis name must be nonempty");
    if (a.size < 1) throw validation_error("axis " + a.name + " must have positive size");
    if (!seen.insert(a.name).second) throw validation_error("duplicate axis name " + a.name);
  }
  alphabet_product(axes);
}

double plogp_sum(const std::vector<double>& p) {
  double h = 0;
  for (double v : p)
    if (v > 0) h -= v * std::log2(v);
  return h;
}

}  // namespace

std::size_t alphabet_product(const std::vector<Axis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) {
    n *= static_cast<std::size_t>(a.size);
    if (n > max_alphabet_product)
      throw validation_error("product alphabet exceeds " + std::to_string(max_alphabet_product) +
                             " entries");
  }
  return n;
}

void for_each_index(const std::vector<Axis>& axes,
                    const std::function<void(std::size_t, std::span<const int>)>& f) {
  std::size_t n = alphabet_product(axes);
  std::vector<int> idx(axes.size(), 0);
  for (std::size_t flat = 0; flat < n; ++flat) {
    f(flat, idx);
    for (std::size_t k = axes.size(); k-- > 0;) {
      if (++idx[k] < axes[k].size) break;
      idx[k] = 0;
    }
  }
}

JointDist::JointDist(std::vector<Axis> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
  check_axes(axes_);
  if (probs_.size() != alphabet_product(axes_))
    throw validation_error("probability vector length does not match the axes");
  double s = 0;
  for (double p : probs_) {
    if (!(p >= 0) || !std::isfinite(p)) throw validation_error("probabilities must be finite and >= 0");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-12) throw validation_error("probabilities must sum to 1");
}

JointDist JointDist::normalized(std::vector<Axis> axes, std::vector<double> weights) {
  double s = 0;
  for (double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw validation_error("weights must be finite and >= 0");
    s += w;
  }
  if (!(s > 0)) throw validation_error("weights sum to zero");
  for (double& w : weights) w /= s;
  return JointDist(std::move(axes), std::move(weights));
}

JointDist JointDist::from_function(std::vector<Axis> axes,
                                   const std::function<double(std::span<const int>)>& f) {
  std::vector<double> w(alphabet_product(axes));
  for_each_index(axes, [&](std::size_t flat, std::span<const int> idx) { w[flat] = f(idx); });
  return normalized(std::move(axes), std::move(w));
}

bool JointDist::has_axis(const std::string& name) const {
  return std::any_of(axes_.begin(), axes_.end(), [&](const Axis& a) { return a.name == name; });
}

std::size_t JointDist::axis_index(const std::string& name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name == name) return i;
  throw validation_error("unknown variable " + name);
}

std::vector<std::size_t> JointDist::strides() const {
  std::vector<std::size_t> s(axes_.size(), 1);
  for (std::size_t k = axes_.size(); k-- > 1;) s[k - 1] = s[k] * axes_[k].size;
  return s;
}

JointDist marginalize(const JointDist& dist, const VarSet& keep) {
  std::vector<bool> kept(dist.axes().size(), false);
  for (const auto& name : keep) kept[dist.axis_index(name)] = true;
  std::vector<Axis> out_axes;
  for (std::size_t k = 0; k < kept.size(); ++k)
    if (kept[k]) out_axes.push_back(dist.axes()[k]);

  // mult[k] is the target stride of source axis k (0 when summed out).
  std::vector<std::size_t> mult(kept.size(), 0);
  std::size_t s = 1;
  for (std::size_t k = kept.size(); k-- > 0;)
    if (kept[k]) {
      mult[k] = s;
      s *= dist.axes()[k].size;
    }
  std::vector<double> out(s, 0.0);
  const auto& axes = dist.axes();
  std::vector<int> idx(axes.size(), 0);
  std::size_t target = 0;
  for (std::size_t flat = 0; flat < dist.size(); ++flat) {
    out[target] += dist[flat];
    for (std::size_t k = axes.size(); k-- > 0;) {
      if (++idx[k] < axes[k].size) {
        target += mult[k];
        break;
      }
      target -= mult[k] * (axes[k].size - 1);
      idx[k] = 0;
    }
  }
  return JointDist::normalized(std::move(out_axes), std::move(out));
}

double entropy(const JointDist& dist, const VarSet& vars) {
  if (vars.empty()) return 0.0;
  return plogp_sum(marginalize(dist, vars).probs());
}

double mutual_information(const JointDist& dist, const VarSet& left, const VarSet& right,
                          const VarSet& given) {
  std::set<std::string> seen;
  for (const VarSet* s : {&left, &right, &given})
    for (const auto& v : *s) {
      dist.axis_index(v);
      if (!seen.insert(v).second) throw validation_error("variable sets overlap at " + v);
    }
  if (left.empty() || right.empty()) return 0.0;
  VarSet lg = left, rg = right, all = left;
  lg.insert(lg.end(), given.begin(), given.end());
  rg.insert(rg.end(), given.begin(), given.end());
  all.insert(all.end(), right.begin(), right.end());
  all.insert(all.end(), given.begin(), given.end());
  double v = entropy(dist, lg) + entropy(dist, rg) - entropy(dist, all) - entropy(dist, given);
  if (v < 0) {
    if (v < -mi_clamp_tol) throw numeric_error("mutual information evaluated negative");
    v = 0.0;
  }
  return v;
}

DmcChannel::DmcChannel(int x1_size, int x2_size, std::vector<Axis> outputs,
                       std::vector<double> probs)
    : x1_(x1_size), x2_(x2_size), outputs_(std::move(outputs)), probs_(std::move(probs)) {
  if (x1_ < 1 || x2_ < 1) throw validation_error("input alphabets must be nonempty");
  std::vector<Axis> all{{"X1", x1_}, {"X2", x2_}};
  all.insert(all.end(), outputs_.begin(), outputs_.end());
  check_axes(all);
  out_size_ = alphabet_product(outputs_);
  std::size_t n_primary = 0, n_secondary = 0;
  for (const auto& o : outputs_) {
    if (o.name[0] == 'Y')
      ++n_primary;
    else if (o.name[0] == 'Z')
      ++n_secondary;
    else
      throw validation_error("output names must start with Y or Z: " + o.name);
  }
  if (n_primary < 1 || n_secondary < 1)
    throw validation_error("a channel needs at least one Y and one Z output");
  if (probs_.size() != static_cast<std::size_t>(x1_) * x2_ * out_size_)
    throw validation_error("transition vector length does not match the axes");
  for (std::size_t row = 0; row < static_cast<std::size_t>(x1_) * x2_; ++row) {
    double s = 0;
    for (std::size_t o = 0; o < out_size_; ++o) {
      double p = probs_[row * out_size_ + o];
      if (!(p >= 0) || !std::isfinite(p)) throw validation_error("transition probabilities must be >= 0");
      s += p;
    }
    if (std::abs(s - 1.0) > 1e-12) throw validation_error("each transition slice must sum to 1");
  }
}

DmcChannel DmcChannel::from_marginals(int x1_size, int x2_size, std::vector<Axis> outputs,
                                      const std::vector<std::vector<double>>& marginals) {
  if (marginals.size() != outputs.size()) throw validation_error("one marginal per output required");
  std::size_t rows = static_cast<std::size_t>(x1_size) * x2_size;
  for (std::size_t o = 0; o < outputs.size(); ++o)
    if (marginals[o].size() != rows * outputs[o].size)
      throw validation_error("marginal size mismatch for " + outputs[o].name);
  std::size_t out_size = alphabet_product(outputs);
  std::vector<double> probs(rows * out_size);
  for (std::size_t row = 0; row < rows; ++row) {
    for_each_index(outputs, [&](std::size_t flat, std::span<const int> idx) {
      double p = 1;
      for (std::size_t o = 0; o < outputs.size(); ++o)
        p *= marginals[o][row * outputs[o].size + idx[o]];
      probs[row * out_size + flat] = p;
    });
    // Absorb product rounding so each slice sums to one.
    double s = 0;
    for (std::size_t f = 0; f < out_size; ++f) s += probs[row * out_size + f];
    for (std::size_t f = 0; f < out_size; ++f) probs[row * out_size + f] /= s;
  }
  return DmcChannel(x1_size, x2_size, std::move(outputs), std::move(probs));
}

VarSet DmcChannel::primary_names() const {
  VarSet v;
  for (const auto& o : outputs_)
    if (o.name[0] == 'Y') v.push_back(o.name);
  return v;
}

VarSet DmcChannel::secondary_names() const {
  VarSet v;
  for (const auto& o : outputs_)
    if (o.name[0] == 'Z') v.push_back(o.name);
  return v;
}

JointDist compose_with_channel(const JointDist& inputs, const DmcChannel& chan) {
  std::size_t i1 = inputs.axis_index("X1"), i2 = inputs.axis_index("X2");
  if (inputs.axes()[i1].size != chan.x1_size() || inputs.axes()[i2].size != chan.x2_size())
    throw validation_error("input alphabets do not match the channel");
  for (const auto& o : chan.outputs())
    if (inputs.has_axis(o.name)) throw validation_error("input already has axis " + o.name);
  std::vector<Axis> axes = inputs.axes();
  axes.insert(axes.end(), chan.outputs().begin(), chan.outputs().end());
  std::size_t out_n = chan.output_count();
  if (inputs.size() * out_n > max_alphabet_product)
    throw validation_error("product alphabet exceeds " + std::to_string(max_alphabet_product) +
                           " entries");
  std::vector<double> probs(inputs.size() * out_n);
  for_each_index(inputs.axes(), [&](std::size_t flat, std::span<const int> idx) {
    double p = inputs[flat];
    for (std::size_t o = 0; o < out_n; ++o) probs[flat * out_n + o] = p * chan.prob(idx[i1], idx[i2], o);
  });
  return JointDist::normalized(std::move(axes), std::move(probs));
}

std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n, double concentration) {
  std::vector<double> w(n);
  double s = 0;
  for (auto& x : w) {
    do {
      if (concentration == 1.0) {
        x = -std::log1p(-unit_uniform(rng));
      } else {
        std::gamma_distribution<double> g(concentration, 1.0);
        x = g(rng);
      }
    } while (!(x > 0));
    s += x;
  }
  for (auto& x : w) x /= s;
  return w;
}

JointDist sample_input_dist(const std::vector<Axis>& axes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto w = dirichlet(rng, alphabet_product(axes));
  return JointDist::normalized(axes, std::move(w));
}

double binary_entropy(double p) {
  if (p <= 0 || p >= 1) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

}  // namespace cifc
