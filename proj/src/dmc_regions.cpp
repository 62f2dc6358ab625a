#include "cifc/dmc_regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "cifc/parallel.hpp"

namespace cifc {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

template <class F>
double min_over(const VarSet& names, F f) {
  double m = inf;
  for (const auto& n : names) m = std::min(m, f(n));
  return m;
}

VarSet pick(const VarSet& names, const std::vector<std::size_t>& idx) {
  VarSet out;
  for (auto i : idx) out.push_back(names.at(i));
  return out;
}

void require_single(const DmcChannel& chan, ChannelClass cls) {
  if (cls == ChannelClass::multi_primary && chan.secondary_names().size() != 1)
    throw validation_error("a multi-primary channel has exactly one Z output");
  if (cls == ChannelClass::multi_secondary && chan.primary_names().size() != 1)
    throw validation_error("a multi-secondary channel has exactly one Y output");
}

std::size_t group_size(const DmcChannel& chan, ChannelClass cls) {
  return cls == ChannelClass::multi_primary ? chan.primary_names().size()
                                            : chan.secondary_names().size();
}

const Partition& require_partition(const RegimeQuery& q, const DmcChannel& chan) {
  if (!q.partition) throw validation_error("the mixed regime needs a partition");
  validate_partition(*q.partition, group_size(chan, q.cls));
  return *q.partition;
}

}  // namespace

AuxAssignment::AuxAssignment(JointDist j) : joint(std::move(j)) {
  if (joint.axes().size() != aux_axis_names.size())
    throw validation_error("auxiliary joint must have axes Q1, Q, U, V, X1, X2");
  for (std::size_t i = 0; i < aux_axis_names.size(); ++i)
    if (joint.axes()[i].name != aux_axis_names[i])
      throw validation_error("auxiliary joint must have axes Q1, Q, U, V, X1, X2 in order");
}

AuxAssignment sample_aux(const std::array<int, 6>& sizes, std::uint64_t seed) {
  std::vector<Axis> axes;
  for (std::size_t i = 0; i < 6; ++i) axes.push_back({aux_axis_names[i], sizes[i]});
  return AuxAssignment(sample_input_dist(axes, seed));
}

Theorem1Terms theorem1_terms(const AuxAssignment& aux, const DmcChannel& chan) {
  JointDist p = compose_with_channel(aux.joint, chan);
  auto mi = [&](const VarSet& l, const VarSet& r, const VarSet& g) {
    return mutual_information(p, l, r, g);
  };
  VarSet ys = chan.primary_names(), zs = chan.secondary_names();
  Theorem1Terms t{};
  t.a = min_over(ys, [&](const std::string& y) { return mi({"Q1", "X1", "Q", "U"}, {y}, {}); });
  t.b = min_over(zs, [&](const std::string& z) { return mi({"Q", "V"}, {z}, {"Q1"}); });
  t.c0 = mi({"Q", "V"}, {"X1"}, {"Q1"});
  t.c = min_over(ys, [&](const std::string& y) { return mi({"X1", "U"}, {y}, {"Q1", "Q"}); });
  t.d0 = mi({"V"}, {"X1", "U"}, {"Q1", "Q"});
  t.d = min_over(ys, [&](const std::string& y) { return mi({"X1", "Q", "U"}, {y}, {"Q1"}); });
  t.e = min_over(zs, [&](const std::string& z) { return mi({"V"}, {z}, {"Q1", "Q"}); });
  t.e0 = mi({"Q"}, {"X1"}, {"Q1"});
  t.f = min_over(zs, [&](const std::string& z) { return mi({"Q1", "Q", "V"}, {z}, {}); });
  return t;
}

namespace {

template <class T>
std::array<T, 11> bounds_of(const T& a, const T& b, const T& c0, const T& c, const T& d0,
                            const T& d, const T& e, const T& e0, const T& f) {
  return {a,
          b - c0,
          c + b - d0,
          d + e - d0,
          d + b - d0 - e0,
          c + f - d0,
          a + e - d0,
          a + b - d0 - e0,
          d + f - d0 - e0,
          d + f + e - d0 - e0,
          a + b + e - d0 - e0};
}

}  // namespace

std::array<double, 11> theorem1_bounds(const Theorem1Terms& t) {
  return bounds_of(t.a, t.b, t.c0, t.c, t.d0, t.d, t.e, t.e0, t.f);
}

IneqSystem theorem1_system(const Theorem1Terms& t) {
  auto q = rationalize;
  auto rhs = bounds_of<Rational>(q(t.a), q(t.b), q(t.c0), q(t.c), q(t.d0), q(t.d), q(t.e),
                                 q(t.e0), q(t.f));
  IneqSystem sys({"R1", "R2"});
  for (std::size_t i = 0; i < 11; ++i)
    sys.add({{"R1", Rational(theorem1_weights[i][0])}, {"R2", Rational(theorem1_weights[i][1])}},
            rhs[i]);
  return sys;
}

Frontier2D theorem1_region(const AuxAssignment& aux, const DmcChannel& chan) {
  Frontier2D f = project_to_frontier(theorem1_system(theorem1_terms(aux, chan)), "R1", "R2");
  // A PD whose constraints admit no nonnegative pair still allows silence.
  return f.empty() ? Frontier2D({{0.0, 0.0}}) : f;
}

IneqSystem appendix_b_system(const AuxAssignment& aux, const DmcChannel& chan) {
  VarSet ys = chan.primary_names(), zs = chan.secondary_names();
  if (ys.size() != 1 || zs.size() != 1)
    throw validation_error("the binning system is written for one Y and one Z output");
  const std::string& y = ys[0];
  const std::string& z = zs[0];
  JointDist p = compose_with_channel(aux.joint, chan);
  auto mi = [&](const VarSet& l, const VarSet& r, const VarSet& g) {
    return rationalize(mutual_information(p, l, r, g));
  };
  Rational enc_q = mi({"X1"}, {"Q"}, {"Q1"});
  Rational enc_u = mi({"U"}, {"X1"}, {"Q1", "Q"});
  Rational enc_v = mi({"V"}, {"X1"}, {"Q1", "Q"});
  Rational enc_uv = mi({"U"}, {"V"}, {"Q1", "Q"}) + mi({"U", "V"}, {"X1"}, {"Q1", "Q"});
  Rational dz1 = mi({"V"}, {z}, {"Q", "Q1"});
  Rational dz2 = mi({"Q", "V"}, {z}, {"Q1"});
  Rational dz3 = mi({"Q1", "Q", "V"}, {z}, {});
  Rational side = mi({"Q", "U"}, {"X1"}, {"Q1"});
  Rational dy1 = mi({"X1", "U"}, {y}, {"Q1", "Q"}) + side;
  Rational dy2 = mi({"X1", "Q", "U"}, {y}, {"Q1"}) + side;
  Rational dy3 = mi({"Q1", "X1", "Q", "U"}, {y}, {}) + side;

  IneqSystem s({"R1", "R2", "R01", "R11", "R02", "R22", "T02", "T11", "T22"});
  Rational one(1), m1(-1);
  s.add({{"T02", m1}, {"R02", one}}, -enc_q);
  s.add({{"T11", m1}, {"R11", one}}, -enc_u);
  s.add({{"T22", m1}, {"R22", one}}, -enc_v);
  s.add({{"T11", m1}, {"R11", one}, {"T22", m1}, {"R22", one}}, -enc_uv);
  s.add({{"T22", one}}, dz1);
  s.add({{"T02", one}, {"T22", one}}, dz2);
  s.add({{"R01", one}, {"T02", one}, {"T22", one}}, dz3);
  s.add({{"T11", one}}, dy1);
  s.add({{"T02", one}, {"T11", one}}, dy2);
  s.add({{"R01", one}, {"T02", one}, {"T11", one}}, dy3);
  s.add({{"R1", one}, {"R01", m1}, {"R11", m1}}, Rational(0));
  s.add({{"R1", m1}, {"R01", one}, {"R11", one}}, Rational(0));
  s.add({{"R2", one}, {"R02", m1}, {"R22", m1}}, Rational(0));
  s.add({{"R2", m1}, {"R02", one}, {"R22", one}}, Rational(0));
  for (const char* v : {"R01", "R11", "R02", "R22", "T02", "T11", "T22"}) s.add({{v, m1}}, Rational(0));
  return s;
}

FmeInstance sample_fme_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double kappa = 0.4 * unit_uniform(rng);
  using Rows = std::vector<std::vector<double>>;
  auto rows = [&](int n, double conc) {
    Rows r(static_cast<std::size_t>(n));
    for (auto& x : r) x = dirichlet(rng, 2, conc);
    return r;
  };
  auto mix = [&](std::vector<double> base) {
    auto d = dirichlet(rng, 2);
    for (int i = 0; i < 2; ++i) base[i] = (1 - kappa) * base[i] + kappa * d[i];
    return base;
  };
  auto pq1 = dirichlet(rng, 2);
  Rows px1 = rows(2, 1.0);
  Rows q_base = rows(2, 1.0), u_base = rows(4, 1.0), v_base = rows(4, 1.0);
  Rows pq(4), pu(8), pv(16);
  for (int i = 0; i < 4; ++i) pq[i] = mix(q_base[i >> 1]);        // (q1, x1)
  for (int i = 0; i < 8; ++i) pu[i] = mix(u_base[i >> 1]);        // (q1, q, x1)
  for (int i = 0; i < 16; ++i) pv[i] = mix(v_base[i >> 2]);       // (q1, q, u, x1)
  Rows px2 = rows(32, 0.3);                                       // (q1, q, u, v, x1)
  std::vector<Axis> axes;
  for (const auto& n : aux_axis_names) axes.push_back({n, 2});
  JointDist joint = JointDist::from_function(axes, [&](std::span<const int> ix) {
    int q1 = ix[0], q = ix[1], u = ix[2], v = ix[3], x1 = ix[4], x2 = ix[5];
    int a = q1 * 2 + q;
    return pq1[q1] * px1[q1][x1] * pq[q1 * 2 + x1][q] * pu[a * 2 + x1][u] *
           pv[(a * 2 + u) * 2 + x1][v] * px2[(((a * 2 + u) * 2 + v) * 2) + x1][x2];
  });
  std::vector<std::vector<double>> marg;
  for (int o = 0; o < 2; ++o) {
    std::vector<double> m;
    for (int r = 0; r < 4; ++r) {
      auto d = dirichlet(rng, 2, 0.3);
      m.insert(m.end(), d.begin(), d.end());
    }
    marg.push_back(std::move(m));
  }
  return {AuxAssignment(std::move(joint)),
          DmcChannel::from_marginals(2, 2, {{"Y", 2}, {"Z", 2}}, marg)};
}

Frontier2D appendix_b_projection(const AuxAssignment& aux, const DmcChannel& chan) {
  IneqSystem s = fme_eliminate_all(appendix_b_system(aux, chan), appendix_b_eliminated);
  return project_to_frontier(s, "R1", "R2");
}

bool verify_fme_against(const AuxAssignment& aux, const DmcChannel& chan,
                        const IneqSystem& reference) {
  Frontier2D projected = appendix_b_projection(aux, chan);
  Frontier2D direct = project_to_frontier(reference, "R1", "R2");
  return region_equal(projected, direct, 1e-9, 512);
}

bool verify_fme_appendix_b(const AuxAssignment& aux, const DmcChannel& chan) {
  return verify_fme_against(aux, chan, theorem1_system(theorem1_terms(aux, chan)));
}

std::string to_string(ChannelClass c) {
  return c == ChannelClass::multi_primary ? "multi_primary" : "multi_secondary";
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::vsi: return "VSI";
    case Regime::vwi: return "VWI";
    case Regime::mixed: return "mixed";
    default: return "none";
  }
}

ChannelClass parse_channel_class(const std::string& s) {
  if (s == "multi_primary") return ChannelClass::multi_primary;
  if (s == "multi_secondary") return ChannelClass::multi_secondary;
  throw validation_error("unknown channel class " + s);
}

Regime parse_regime(const std::string& s) {
  std::string l;
  for (char c : s) l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (l == "vsi") return Regime::vsi;
  if (l == "vwi") return Regime::vwi;
  if (l == "mixed") return Regime::mixed;
  throw validation_error("unknown regime " + s);
}

Partition parse_partition(const std::string& s) {
  auto bar = s.find('|');
  if (bar == std::string::npos || s.find('|', bar + 1) != std::string::npos)
    throw validation_error("partition must look like \"W|S\", e.g. \"1|2,3\"");
  auto parse_list = [](const std::string& part) {
    std::vector<std::size_t> out;
    std::stringstream ss(part);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
      if (tok.empty()) continue;
      std::size_t pos = 0;
      long v = 0;
      try {
        v = std::stol(tok, &pos);
      } catch (const std::exception&) {
        throw validation_error("bad receiver index " + tok);
      }
      if (pos != tok.size() || v < 1) throw validation_error("bad receiver index " + tok);
      out.push_back(static_cast<std::size_t>(v - 1));
    }
    return out;
  };
  return {parse_list(s.substr(0, bar)), parse_list(s.substr(bar + 1))};
}

std::string format_partition(const Partition& p) {
  auto list = [](const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i] + 1);
    return s;
  };
  return list(p.weak) + "|" + list(p.strong);
}

void validate_partition(const Partition& p, std::size_t receivers) {
  std::vector<int> seen(receivers, 0);
  for (const auto* part : {&p.weak, &p.strong})
    for (auto i : *part) {
      if (i >= receivers) throw validation_error("partition index out of range");
      if (seen[i]++) throw validation_error("partition sets overlap");
    }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw validation_error("partition must cover every receiver");
}

int effective_aux_card(const DmcChannel& chan, int aux_card) {
  if (aux_card < 0) throw validation_error("aux_card must be >= 1");
  return aux_card == 0 ? chan.x1_size() * chan.x2_size() + 1 : aux_card;
}

bool regime_needs_u(Regime r) { return r == Regime::vwi || r == Regime::mixed; }

std::vector<std::vector<int>> simplex_grid(int n, int den) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  auto rec = [&](auto&& self, int k, int left) -> void {
    if (k == n - 1) {
      cur[k] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[k] = v;
      self(self, k + 1, left - v);
    }
  };
  if (n > 0) rec(rec, 0, den);
  return out;
}

CandidateStream::CandidateStream(const DmcChannel& chan, bool with_u, const SamplingConfig& cfg)
    : x1_(chan.x1_size()),
      x2_(chan.x2_size()),
      u_(with_u ? effective_aux_card(chan, cfg.aux_card) : 1),
      with_u_(with_u),
      samples_(cfg.samples),
      seed_(cfg.seed) {
  if (cfg.grid && x1_ * x2_ <= 6) grid_ = simplex_grid(x1_ * x2_, 8);
}

JointDist CandidateStream::operator()(std::size_t i) const {
  std::vector<Axis> axes;
  if (with_u_) axes.push_back({"U", u_});
  axes.push_back({"X1", x1_});
  axes.push_back({"X2", x2_});
  if (i < grid_.size()) {
    const auto& g = grid_[i];
    std::vector<double> w(static_cast<std::size_t>(u_) * x1_ * x2_, 0.0);
    for (int c = 0; c < x1_ * x2_; ++c) {
      int u = with_u_ ? c % u_ : 0;
      w[static_cast<std::size_t>(u) * x1_ * x2_ + c] = g[c] / 8.0;
    }
    return JointDist::normalized(axes, std::move(w));
  }
  return sample_input_dist(axes, seed_ + (i - grid_.size()));
}

std::vector<ConditionSlack> regime_slacks(const DmcChannel& chan, const RegimeQuery& q,
                                          const JointDist& input) {
  require_single(chan, q.cls);
  bool with_u = input.has_axis("U");
  if (regime_needs_u(q.regime) && !with_u)
    throw validation_error("this regime quantifies over P_{U X1 X2}; the input needs a U axis");
  JointDist p = compose_with_channel(input, chan);
  auto mi = [&](const VarSet& l, const VarSet& r, const VarSet& g) {
    return mutual_information(p, l, r, g);
  };
  std::vector<ConditionSlack> out;
  auto add = [&](const char* name, std::size_t k, double lhs, double rhs) {
    out.push_back({name, k, rhs - lhs});
  };
  VarSet ys = chan.primary_names(), zs = chan.secondary_names();

  if (q.cls == ChannelClass::multi_primary) {
    const std::string& z = zs[0];
    std::vector<std::size_t> weak, strong;
    if (q.regime == Regime::vsi) {
      for (std::size_t j = 0; j < ys.size(); ++j) strong.push_back(j);
    } else if (q.regime == Regime::vwi) {
      for (std::size_t j = 0; j < ys.size(); ++j) weak.push_back(j);
    } else if (q.regime == Regime::mixed) {
      const Partition& part = require_partition(q, chan);
      weak = part.weak;
      strong = part.strong;
    } else {
      throw validation_error("no conditions for regime none");
    }
    if (!strong.empty()) {
      double z_x2 = mi({"X2"}, {z}, {"X1"});
      for (auto j : strong) add("strong_interference", j, z_x2, mi({"X2"}, {ys[j]}, {"X1"}));
    }
    if (!weak.empty()) {
      double z_u = mi({"U"}, {z}, {"X1"});
      for (auto j : weak) add("weak_interference", j, mi({"U"}, {ys[j]}, {"X1"}), z_u);
    }
    auto min_group = [&](const std::vector<std::size_t>& group, const VarSet& l,
                         std::size_t& arg) {
      double m = inf;
      for (auto j : group) {
        double v = mi(l, {ys[j]}, {});
        if (v < m) {
          m = v;
          arg = j;
        }
      }
      return m;
    };
    std::size_t arg = 0;
    if (q.regime == Regime::vsi) {
      double lhs = min_group(strong, {"X1", "X2"}, arg);
      add("very_strong_interference", arg, lhs, mi({"X1", "X2"}, {z}, {}));
    } else if (q.regime == Regime::vwi) {
      double z_ux1 = mi({"U", "X1"}, {z}, {});
      for (auto j : weak) add("very_weak_interference", j, mi({"U", "X1"}, {ys[j]}, {}), z_ux1);
    } else {
      std::size_t arg_w = 0;
      double s_slack = mi({"X1", "X2"}, {z}, {}) - min_group(strong, {"X1", "X2"}, arg);
      double w_slack = mi({"U", "X1"}, {z}, {}) - min_group(weak, {"U", "X1"}, arg_w);
      out.push_back({"mixed_sum_rate", s_slack >= w_slack ? arg : arg_w, std::max(s_slack, w_slack)});
    }
    return out;
  }

  const std::string& y = ys[0];
  std::vector<std::size_t> weak, strong;
  if (q.regime == Regime::vsi) {
    for (std::size_t k = 0; k < zs.size(); ++k) strong.push_back(k);
  } else if (q.regime == Regime::vwi) {
    for (std::size_t k = 0; k < zs.size(); ++k) weak.push_back(k);
  } else if (q.regime == Regime::mixed) {
    const Partition& part = require_partition(q, chan);
    weak = part.weak;
    strong = part.strong;
  } else {
    throw validation_error("no conditions for regime none");
  }
  if (!weak.empty()) {
    double y_u = mi({"U"}, {y}, {"X1"});
    double y_ux1 = mi({"U", "X1"}, {y}, {});
    for (auto k : weak) add("weak_interference", k, y_u, mi({"U"}, {zs[k]}, {"X1"}));
    for (auto k : weak) add("very_weak_interference", k, y_ux1, mi({"U", "X1"}, {zs[k]}, {}));
  }
  if (!strong.empty()) {
    double y_x2 = mi({"X2"}, {y}, {"X1"});
    double y_all = mi({"X1", "X2"}, {y}, {});
    for (auto k : strong) add("strong_interference", k, mi({"X2"}, {zs[k]}, {"X1"}), y_x2);
    for (auto k : strong) add("very_strong_interference", k, y_all, mi({"X1", "X2"}, {zs[k]}, {}));
  }
  return out;
}

RegimeReport check_regime(const DmcChannel& chan, const RegimeQuery& q, const SamplingConfig& cfg) {
  if (cfg.samples < 1) throw validation_error("samples must be >= 1");
  if (q.regime == Regime::none) throw validation_error("pick a regime to check");
  require_single(chan, q.cls);
  if (q.regime == Regime::mixed) require_partition(q, chan);
  effective_aux_card(chan, cfg.aux_card);
  CandidateStream stream(chan, regime_needs_u(q.regime), cfg);
  RegimeReport rep;
  rep.query = q;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    JointDist in = stream(i);
    for (const auto& s : regime_slacks(chan, q, in)) {
      if (-s.slack > regime_violation_tol) {
        rep.samples_checked = i + 1;
        rep.witness = RegimeWitness{std::move(in), s.receiver, -s.slack, s.condition, i};
        rep.label = Regime::none;
        return rep;
      }
    }
  }
  rep.samples_checked = stream.size();
  rep.label = q.regime;
  return rep;
}

Frontier2D regime_region(const DmcChannel& chan, const RegimeQuery& q, const JointDist& input) {
  require_single(chan, q.cls);
  JointDist p = compose_with_channel(input, chan);
  auto mi = [&](const VarSet& l, const VarSet& r, const VarSet& g) {
    return mutual_information(p, l, r, g);
  };
  VarSet ys = chan.primary_names(), zs = chan.secondary_names();
  if (regime_needs_u(q.regime) && !input.has_axis("U") &&
      !(q.cls == ChannelClass::multi_secondary && q.regime == Regime::mixed))
    throw validation_error("this regime's region needs a U axis");

  if (q.cls == ChannelClass::multi_primary) {
    const std::string& z = zs[0];
    switch (q.regime) {
      case Regime::vsi: {
        double sum = min_over(ys, [&](const std::string& y) { return mi({"X1", "X2"}, {y}, {}); });
        return Frontier2D::pentagon(sum, mi({"X2"}, {z}, {"X1"}), sum);
      }
      case Regime::vwi: {
        double r1 = min_over(ys, [&](const std::string& y) { return mi({"X1", "U"}, {y}, {}); });
        return Frontier2D::box(r1, mi({"X2"}, {z}, {"X1", "U"}));
      }
      case Regime::mixed: {
        const Partition& part = require_partition(q, chan);
        double r1 = min_over(pick(ys, part.weak), [&](const std::string& y) { return mi({"U", "X1"}, {y}, {}); });
        double sum = min_over(pick(ys, part.strong), [&](const std::string& y) { return mi({"X1", "X2"}, {y}, {}); });
        double r2 = mi({"X2"}, {z}, {"U", "X1"});
        return Frontier2D::pentagon(std::min(r1, sum), std::min(r2, sum), std::min(sum, r1 + r2));
      }
      default: break;
    }
  } else {
    const std::string& y = ys[0];
    switch (q.regime) {
      case Regime::vsi: {
        double r2 = min_over(zs, [&](const std::string& z) { return mi({"X2"}, {z}, {"X1"}); });
        double sum = mi({"X1", "X2"}, {y}, {});
        return Frontier2D::pentagon(sum, r2, sum);
      }
      case Regime::vwi: {
        double r2 = min_over(zs, [&](const std::string& z) { return mi({"X2"}, {z}, {"U", "X1"}); });
        return Frontier2D::box(mi({"U", "X1"}, {y}, {}), r2);
      }
      case Regime::mixed: {
        const Partition& part = require_partition(q, chan);
        double r2 = min_over(pick(zs, part.strong), [&](const std::string& z) { return mi({"X2"}, {z}, {"X1"}); });
        double sum = mi({"X1", "X2"}, {y}, {});
        return Frontier2D::pentagon(sum, std::min(r2, sum), sum);
      }
      default: break;
    }
  }
  throw validation_error("no capacity region for regime none");
}

IneqSystem vsi_five_system(const DmcChannel& chan, const JointDist& input) {
  VarSet ys = chan.primary_names(), zs = chan.secondary_names();
  if (zs.size() != 1) throw validation_error("the VSI system is written for one Z output");
  JointDist p = compose_with_channel(input, chan);
  double sum_y = std::numeric_limits<double>::infinity(), r2_y = sum_y;
  for (const auto& y : ys) {
    sum_y = std::min(sum_y, mutual_information(p, {"X1", "X2"}, {y}));
    r2_y = std::min(r2_y, mutual_information(p, {"X2"}, {y}, {"X1"}));
  }
  double r2_z = mutual_information(p, {"X2"}, {zs[0]}, {"X1"});
  double sum_z = mutual_information(p, {"X1", "X2"}, {zs[0]});
  IneqSystem s({"R1", "R2"});
  Rational one(1);
  s.add({{"R1", one}}, rationalize(sum_y));
  s.add({{"R2", one}}, rationalize(r2_z));
  s.add({{"R2", one}}, rationalize(r2_y));
  s.add({{"R1", one}, {"R2", one}}, rationalize(sum_z));
  s.add({{"R1", one}, {"R2", one}}, rationalize(sum_y));
  return s;
}

IneqSystem drop_rows(const IneqSystem& sys, const std::vector<std::size_t>& rows) {
  IneqSystem out(sys.variables());
  const auto& q = sys.inequalities();
  for (std::size_t i = 0; i < q.size(); ++i)
    if (std::find(rows.begin(), rows.end(), i) == rows.end()) out.add(q[i]);
  return out;
}

Frontier2D dmc_capacity_region(const DmcChannel& chan, const RegimeReport& report,
                               const RegionSearch& search) {
  if (!report.passed() || report.label == Regime::none)
    throw regime_error("regime check has not passed for this channel");
  const RegimeQuery& q = report.query;
  bool with_u = regime_needs_u(q.regime);
  int x1 = chan.x1_size(), x2 = chan.x2_size();
  int card = with_u ? effective_aux_card(chan, search.aux_card) : 1;
  std::vector<Axis> axes;
  if (with_u) axes.push_back({"U", card});
  axes.push_back({"X1", x1});
  axes.push_back({"X2", x2});
  std::size_t cells = static_cast<std::size_t>(x1) * x2;

  std::vector<JointDist> inputs;
  if (search.grid > 0) {
    for (const auto& g : simplex_grid(static_cast<int>(cells), search.grid)) {
      // U constant, then U = index of (x1, x2) folded into the U alphabet.
      for (int mode = 0; mode < (with_u ? 2 : 1); ++mode) {
        std::vector<double> w(card * cells, 0.0);
        for (std::size_t c = 0; c < cells; ++c) {
          std::size_t u = mode == 0 ? 0 : c % card;
          w[u * cells + c] = static_cast<double>(g[c]);
        }
        inputs.push_back(JointDist::normalized(axes, std::move(w)));
      }
    }
  }
  for (std::size_t i = 0; i < search.samples; ++i) inputs.push_back(sample_input_dist(axes, search.seed + i));
  if (inputs.empty()) throw validation_error("region search budget is empty");

  auto parts = parallel_map(inputs.size(), [&](std::size_t i) { return regime_region(chan, q, inputs[i]); });
  return convex_hull(frontier_union(parts));
}

DmcChannel random_counterexample_channel(const CounterexampleSearch& s, std::size_t index) {
  std::mt19937_64 rng(s.seed + index);
  std::vector<Axis> outs{{"Y1", s.y}, {"Y2", s.y}, {"Z", s.z}};
  std::vector<std::vector<double>> marg;
  std::size_t rows = static_cast<std::size_t>(s.x1) * s.x2;
  for (const auto& o : outs) {
    std::vector<double> m;
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> row(o.size, 0.0);
      if (unit_uniform(rng) < s.deterministic_rows) {
        row[static_cast<std::size_t>(unit_uniform(rng) * o.size)] = 1.0;
      } else {
        row = dirichlet(rng, o.size);
      }
      m.insert(m.end(), row.begin(), row.end());
    }
    marg.push_back(std::move(m));
  }
  return DmcChannel::from_marginals(s.x1, s.x2, outs, marg);
}

double weak_condition_margin(const DmcChannel& chan, const JointDist& input, std::size_t j) {
  JointDist p = compose_with_channel(input, chan);
  VarSet ys = chan.primary_names(), zs = chan.secondary_names();
  return mutual_information(p, {"U"}, {ys.at(j)}, {"X1"}) - mutual_information(p, {"U"}, {zs.at(0)}, {"X1"});
}

namespace {

std::optional<CounterexampleWitness> examine_channel(const CounterexampleSearch& s, std::size_t i) {
  DmcChannel chan = random_counterexample_channel(s, i);
  SamplingConfig vsi{s.regime_samples, s.aux_card, s.seed + i, true};
  RegimeQuery q{ChannelClass::multi_primary, Regime::vsi, std::nullopt};
  if (!check_regime(chan, q, vsi).passed()) return std::nullopt;

  std::vector<JointDist> cands;
  // U = X2 under uniform inputs, then Dirichlet draws over (U, X1, X2).
  cands.push_back(JointDist::from_function({{"U", s.x2}, {"X1", s.x1}, {"X2", s.x2}},
                                           [](std::span<const int> ix) { return ix[0] == ix[2] ? 1.0 : 0.0; }));
  std::vector<Axis> axes{{"U", effective_aux_card(chan, s.aux_card)}, {"X1", s.x1}, {"X2", s.x2}};
  for (std::size_t t = 0; t < s.witness_samples; ++t)
    cands.push_back(sample_input_dist(axes, (s.seed + i) * 1000003ULL + t));
  for (auto& in : cands)
    for (std::size_t j = 0; j < 2; ++j) {
      double m = weak_condition_margin(chan, in, j);
      if (m > 1e-6) return CounterexampleWitness{chan, std::move(in), j, m, i, vsi};
    }
  return std::nullopt;
}

}  // namespace

std::optional<CounterexampleWitness> vaezi_counterexample_search(const CounterexampleSearch& s) {
  if (s.x1 < 1 || s.x2 < 1 || s.y < 1 || s.z < 1) throw validation_error("alphabet sizes must be >= 1");
  const std::size_t batch = 64;
  for (std::size_t lo = 0; lo < s.budget; lo += batch) {
    std::size_t n = std::min(batch, s.budget - lo);
    auto found = parallel_map(n, [&](std::size_t k) { return examine_channel(s, lo + k); });
    for (auto& f : found)
      if (f) return f;
  }
  return std::nullopt;
}

bool verify_counterexample(const CounterexampleWitness& w, double min_margin) {
  RegimeQuery q{ChannelClass::multi_primary, Regime::vsi, std::nullopt};
  if (w.channel.primary_names().size() < 2) return false;
  if (!check_regime(w.channel, q, w.vsi_check).passed()) return false;
  return weak_condition_margin(w.channel, w.input, w.receiver) > min_margin;
}

}  // namespace cifc
