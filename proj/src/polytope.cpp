#include "cifc/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cifc/parallel.hpp"

namespace cifc {

namespace {

const Rational zero_q(0);

// Scale so the first coefficient has magnitude one; the direction is the key
// used for duplicate detection.
LinIneq scaled(const LinIneq& in) {
  if (in.coeffs.empty()) return in;
  Rational s = abs(in.coeffs.begin()->second);
  LinIneq out;
  for (const auto& [v, c] : in.coeffs) out.coeffs.emplace(v, c / s);
  out.bound = in.bound / s;
  return out;
}

// Is `target` a nonnegative combination lambda*a + mu*b with a tighter bound?
bool implied_by_pair(const LinIneq& target, const LinIneq& a, const LinIneq& b) {
  std::set<std::string> names;
  for (const auto* q : {&target, &a, &b})
    for (const auto& kv : q->coeffs) names.insert(kv.first);
  struct Row {
    Rational ca, cb, ct;
  };
  std::vector<Row> rows;
  for (const auto& n : names) rows.push_back({a.coeff(n), b.coeff(n), target.coeff(n)});
  for (std::size_t p = 0; p < rows.size(); ++p)
    for (std::size_t q = p + 1; q < rows.size(); ++q) {
      Rational det = rows[p].ca * rows[q].cb - rows[p].cb * rows[q].ca;
      if (det == 0) continue;
      Rational lambda = (rows[p].ct * rows[q].cb - rows[p].cb * rows[q].ct) / det;
      Rational mu = (rows[p].ca * rows[q].ct - rows[p].ct * rows[q].ca) / det;
      if (lambda < 0 || mu < 0) return false;
      for (const auto& r : rows)
        if (lambda * r.ca + mu * r.cb != r.ct) return false;
      return lambda * a.bound + mu * b.bound <= target.bound;
    }
  return false;
}

struct Line {
  Rational a1, a2, b;  // a1*r1 + a2*r2 <= b
};

}  // namespace

Rational rationalize(double v) {
  if (!std::isfinite(v)) throw validation_error("cannot rationalize a non-finite value");
  if (std::abs(v) >= 1e6) return Rational(v);
  Rational q(mpz_class(static_cast<long>(std::llround(v * 1e12))), mpz_class(1000000000000L));
  q.canonicalize();
  return q;
}

LinIneq::LinIneq(std::map<std::string, Rational> c, Rational b) : bound(std::move(b)) {
  for (auto& [v, x] : c)
    if (x != 0) coeffs.emplace(v, std::move(x));
}

const Rational& LinIneq::coeff(const std::string& v) const {
  auto it = coeffs.find(v);
  return it == coeffs.end() ? zero_q : it->second;
}

std::string LinIneq::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : coeffs) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    Rational m = abs(c);
    if (m != 1) os << m << "*";
    os << v;
  }
  if (first) os << "0";
  os << " <= " << bound;
  return os.str();
}

IneqSystem::IneqSystem(std::vector<std::string> variables) : vars_(std::move(variables)) {
  std::set<std::string> s(vars_.begin(), vars_.end());
  if (s.size() != vars_.size()) throw validation_error("duplicate variable names");
}

void IneqSystem::add(LinIneq ineq) {
  for (const auto& kv : ineq.coeffs)
    if (!has_variable(kv.first)) throw validation_error("unknown variable " + kv.first);
  ineqs_.push_back(std::move(ineq));
}

bool IneqSystem::has_variable(const std::string& v) const {
  return std::find(vars_.begin(), vars_.end(), v) != vars_.end();
}

bool IneqSystem::infeasible() const {
  return std::any_of(ineqs_.begin(), ineqs_.end(),
                     [](const LinIneq& q) { return q.is_constant() && q.bound < 0; });
}

bool IneqSystem::contains(const std::map<std::string, Rational>& point) const {
  for (const auto& q : ineqs_) {
    Rational s = 0;
    for (const auto& [v, c] : q.coeffs) {
      auto it = point.find(v);
      if (it == point.end()) throw validation_error("point lacks variable " + v);
      s += c * it->second;
    }
    if (s > q.bound) return false;
  }
  return true;
}

std::string IneqSystem::str() const {
  std::string out;
  for (const auto& q : ineqs_) out += q.str() + "\n";
  return out;
}

void remove_redundant(std::vector<LinIneq>& ineqs) {
  std::map<std::map<std::string, Rational>, Rational> best;
  std::vector<std::map<std::string, Rational>> order;
  bool contradiction = false;
  for (const auto& q : ineqs) {
    if (q.is_constant()) {
      if (q.bound < 0) contradiction = true;
      continue;
    }
    LinIneq s = scaled(q);
    auto it = best.find(s.coeffs);
    if (it == best.end()) {
      order.push_back(s.coeffs);
      best.emplace(s.coeffs, s.bound);
    } else if (s.bound < it->second) {
      it->second = s.bound;
    }
  }
  if (contradiction) {
    ineqs = {LinIneq({}, Rational(-1))};
    return;
  }
  std::vector<LinIneq> kept;
  for (const auto& c : order) kept.emplace_back(c, best[c]);

  for (std::size_t i = 0; i < kept.size();) {
    bool drop = false;
    for (std::size_t j = 0; j < kept.size() && !drop; ++j) {
      if (j == i) continue;
      for (std::size_t k = j + 1; k < kept.size() && !drop; ++k) {
        if (k == i) continue;
        drop = implied_by_pair(kept[i], kept[j], kept[k]);
      }
    }
    if (drop)
      kept.erase(kept.begin() + static_cast<long>(i));
    else
      ++i;
  }
  ineqs = std::move(kept);
}

IneqSystem fme_eliminate(const IneqSystem& sys, const std::string& var) {
  if (!sys.has_variable(var)) throw validation_error("cannot eliminate unknown variable " + var);
  std::vector<std::string> vars;
  for (const auto& v : sys.variables())
    if (v != var) vars.push_back(v);
  std::vector<const LinIneq*> pos, neg;
  std::vector<LinIneq> out;
  for (const auto& q : sys.inequalities()) {
    const Rational& c = q.coeff(var);
    if (c > 0)
      pos.push_back(&q);
    else if (c < 0)
      neg.push_back(&q);
    else
      out.push_back(q);
  }
  for (const LinIneq* p : pos)
    for (const LinIneq* n : neg) {
      Rational sp = 1 / p->coeff(var), sn = -1 / n->coeff(var);
      std::map<std::string, Rational> c;
      for (const auto& [v, x] : p->coeffs)
        if (v != var) c[v] += x * sp;
      for (const auto& [v, x] : n->coeffs)
        if (v != var) c[v] += x * sn;
      out.emplace_back(std::move(c), p->bound * sp + n->bound * sn);
    }
  remove_redundant(out);
  IneqSystem res(vars);
  for (auto& q : out) res.add(std::move(q));
  return res;
}

IneqSystem fme_eliminate_all(IneqSystem sys, const std::vector<std::string>& vars) {
  for (const auto& v : vars) sys = fme_eliminate(sys, v);
  return sys;
}

Frontier2D project_to_frontier(const IneqSystem& sys, const std::string& r1, const std::string& r2) {
  std::vector<Line> lines;
  for (const auto& q : sys.inequalities()) {
    for (const auto& kv : q.coeffs)
      if (kv.first != r1 && kv.first != r2)
        throw validation_error("variable " + kv.first + " must be eliminated before projection");
    if (q.is_constant()) {
      if (q.bound < 0) return {};
      continue;
    }
    lines.push_back({q.coeff(r1), q.coeff(r2), q.bound});
  }
  lines.push_back({Rational(-1), Rational(0), Rational(0)});
  lines.push_back({Rational(0), Rational(-1), Rational(0)});

  auto feasible = [&](const Rational& x1, const Rational& x2) {
    for (const auto& l : lines)
      if (l.a1 * x1 + l.a2 * x2 > l.b) return false;
    return true;
  };

  std::vector<std::pair<Rational, Rational>> verts;  // (r2, r1)
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Line &p = lines[i], &q = lines[j];
      Rational det = p.a1 * q.a2 - p.a2 * q.a1;
      if (det == 0) continue;
      Rational x1 = (p.b * q.a2 - p.a2 * q.b) / det;
      Rational x2 = (p.a1 * q.b - p.b * q.a1) / det;
      if (feasible(x1, x2)) verts.emplace_back(x2, x1);
    }
  if (verts.empty()) return {};

  // Bounded iff no recession direction inside the quadrant.
  std::vector<std::pair<Rational, Rational>> rays{{Rational(1), Rational(0)}, {Rational(0), Rational(1)}};
  for (const auto& l : lines) {
    rays.emplace_back(-l.a2, l.a1);
    rays.emplace_back(l.a2, -l.a1);
  }
  for (const auto& [d1, d2] : rays) {
    if (d1 < 0 || d2 < 0 || (d1 == 0 && d2 == 0)) continue;
    bool recedes = std::all_of(lines.begin(), lines.end(),
                               [&](const Line& l) { return l.a1 * d1 + l.a2 * d2 <= 0; });
    if (recedes) throw numeric_error("rate region is unbounded");
  }

  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  auto peak = verts.begin();
  for (auto it = verts.begin(); it != verts.end(); ++it)
    if (it->second > peak->second || (it->second == peak->second && it->first > peak->first)) peak = it;

  std::vector<std::pair<Rational, Rational>> hull;
  for (auto it = peak; it != verts.end(); ++it) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      Rational cross = (b.first - a.first) * (it->second - a.second) -
                       (b.second - a.second) * (it->first - a.first);
      if (cross >= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(*it);
  }
  std::vector<RatePoint> pts;
  for (const auto& [x2, x1] : hull) pts.push_back({x2.get_d(), x1.get_d()});
  return Frontier2D(std::move(pts));
}

}  // namespace cifc
