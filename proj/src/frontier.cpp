#include "cifc/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "cifc/parallel.hpp"

namespace cifc {

namespace {

constexpr double coord_slack = 1e-12;

bool collinear(const RatePoint& a, const RatePoint& b, const RatePoint& c) {
  if (a.r2 == b.r2 && b.r2 == c.r2) return true;
  if (a.r2 == b.r2 || b.r2 == c.r2) return false;
  double t = (b.r2 - a.r2) / (c.r2 - a.r2);
  double interp = a.r1 + t * (c.r1 - a.r1);
  double scale = std::max({1.0, std::abs(a.r1), std::abs(c.r1)});
  return std::abs(interp - b.r1) <= 1e-14 * scale;
}

std::vector<double> breakpoints(const Frontier2D& a, const Frontier2D& b, double lo, double hi,
                                int grid) {
  std::vector<double> xs;
  for (const auto* f : {&a, &b})
    for (const auto& p : f->points())
      if (p.r2 >= lo && p.r2 <= hi) xs.push_back(p.r2);
  xs.push_back(lo);
  xs.push_back(hi);
  for (int i = 0; grid > 1 && i < grid; ++i) xs.push_back(lo + (hi - lo) * i / (grid - 1));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

template <class Op>
Frontier2D combine(const Frontier2D& a, const Frontier2D& b, double end, Op op) {
  std::vector<double> xs = breakpoints(a, b, 0.0, end, 0);
  std::vector<double> cross;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    double d0 = a.right_limit(xs[i]) - b.right_limit(xs[i]);
    double d1 = a.at(xs[i + 1]) - b.at(xs[i + 1]);
    if (!std::isfinite(d0) || !std::isfinite(d1)) continue;
    if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) {
      double t = d0 / (d0 - d1);
      double x = xs[i] + t * (xs[i + 1] - xs[i]);
      if (x > xs[i] && x < xs[i + 1]) cross.push_back(x);
    }
  }
  xs.insert(xs.end(), cross.begin(), cross.end());
  std::sort(xs.begin(), xs.end());
  std::vector<RatePoint> pts;
  for (double x : xs) {
    double v = op(a.at(x), b.at(x));
    pts.push_back({x, v});
    if (x < end) {
      double r = op(a.right_limit(x), b.right_limit(x));
      if (r < v) pts.push_back({x, r});
    }
  }
  return Frontier2D(std::move(pts));
}

double zero_if_outside(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

Frontier2D::Frontier2D(std::vector<RatePoint> points) {
  if (points.empty()) return;
  for (auto& p : points) {
    if (!std::isfinite(p.r1) || !std::isfinite(p.r2))
      throw validation_error("frontier coordinates must be finite");
    if (p.r1 < -coord_slack || p.r2 < -coord_slack)
      throw validation_error("frontier coordinates must be >= 0");
    p.r1 = std::max(p.r1, 0.0);
    p.r2 = std::max(p.r2, 0.0);
  }
  std::stable_sort(points.begin(), points.end(), [](const RatePoint& x, const RatePoint& y) {
    return x.r2 < y.r2 || (x.r2 == y.r2 && x.r1 > y.r1);
  });
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].r1 > points[i - 1].r1) {
      if (points[i].r1 > points[i - 1].r1 + coord_slack)
        throw validation_error("frontier r1 must be nonincreasing in r2");
      points[i].r1 = points[i - 1].r1;
    }
  }
  if (points.front().r2 > 0) points.insert(points.begin(), RatePoint{0.0, points.front().r1});
  for (const auto& p : points) {
    if (!pts_.empty() && pts_.back() == p) continue;
    while (pts_.size() >= 2 && collinear(pts_[pts_.size() - 2], pts_.back(), p)) pts_.pop_back();
    pts_.push_back(p);
  }
}

Frontier2D Frontier2D::box(double r1_max, double r2_max) {
  return Frontier2D({{0.0, r1_max}, {r2_max, r1_max}});
}

Frontier2D Frontier2D::pentagon(double r1_max, double r2_max, double sum_max) {
  if (r1_max < 0 || r2_max < 0 || sum_max < 0) throw validation_error("negative rate bound");
  double r1 = std::min(r1_max, sum_max);
  double r2 = std::min(r2_max, sum_max);
  std::vector<RatePoint> pts{{0.0, r1}};
  double knee = sum_max - r1;  // r2 where the sum bound starts to bind
  if (knee < r2) {
    pts.push_back({knee, r1});
    pts.push_back({r2, sum_max - r2});
  } else {
    pts.push_back({r2, r1});
  }
  return Frontier2D(std::move(pts));
}

double Frontier2D::at(double r2) const {
  if (pts_.empty() || r2 < 0 || r2 > pts_.back().r2) return neg_inf;
  auto it = std::lower_bound(pts_.begin(), pts_.end(), r2,
                             [](const RatePoint& p, double x) { return p.r2 < x; });
  if (it->r2 == r2) return it->r1;
  const RatePoint& hi = *it;
  const RatePoint& lo = *(it - 1);
  double t = (r2 - lo.r2) / (hi.r2 - lo.r2);
  return lo.r1 + t * (hi.r1 - lo.r1);
}

double Frontier2D::right_limit(double r2) const {
  if (pts_.empty() || r2 >= pts_.back().r2) return neg_inf;
  if (r2 < 0) return pts_.front().r1;
  auto it = std::upper_bound(pts_.begin(), pts_.end(), r2,
                             [](double x, const RatePoint& p) { return x < p.r2; });
  const RatePoint& hi = *it;
  const RatePoint& lo = *(it - 1);
  double t = (r2 - lo.r2) / (hi.r2 - lo.r2);
  return lo.r1 + t * (hi.r1 - lo.r1);
}

bool Frontier2D::contains(double r1, double r2, double tol) const {
  if (pts_.empty()) return false;
  if (r1 < -tol || r2 < -tol) return false;
  if (r2 > r2_max() + tol) return false;
  return r1 <= at(std::clamp(r2, 0.0, r2_max())) + tol;
}

Frontier2D frontier_intersect(const Frontier2D& a, const Frontier2D& b) {
  if (a.empty() || b.empty()) return {};
  return combine(a, b, std::min(a.r2_max(), b.r2_max()),
                 [](double x, double y) { return std::min(x, y); });
}

Frontier2D frontier_union(const Frontier2D& a, const Frontier2D& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  return combine(a, b, std::max(a.r2_max(), b.r2_max()),
                 [](double x, double y) { return std::max(x, y); });
}

Frontier2D frontier_union(const std::vector<Frontier2D>& parts) {
  // Pairwise tree reduction keeps the breakpoint count of each merge small.
  std::vector<Frontier2D> level = parts;
  while (level.size() > 1) {
    std::vector<Frontier2D> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(frontier_union(level[i], level[i + 1]));
    if (level.size() % 2) next.push_back(level.back());
    level.swap(next);
  }
  return level.empty() ? Frontier2D{} : level.front();
}

Frontier2D convex_hull(const Frontier2D& f) {
  std::vector<RatePoint> hull;
  for (const auto& p : f.points()) {
    while (hull.size() >= 2) {
      const RatePoint& a = hull[hull.size() - 2];
      const RatePoint& b = hull.back();
      double cross = (b.r2 - a.r2) * (p.r1 - a.r1) - (b.r1 - a.r1) * (p.r2 - a.r2);
      if (cross >= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  return Frontier2D(std::move(hull));
}

bool frontier_contains(const Frontier2D& outer, const Frontier2D& inner, double tol, int grid) {
  if (inner.empty()) return true;
  if (outer.empty()) return false;
  double end = inner.r2_max();
  if (end > outer.r2_max() + tol) return false;
  double oend = outer.r2_max();
  for (double x : breakpoints(outer, inner, 0.0, end, grid)) {
    double xo = std::min(x, oend);
    if (inner.at(x) > outer.at(xo) + tol) return false;
    if (x < end) {
      double o = x < oend ? outer.right_limit(x) : outer.at(oend);
      if (inner.right_limit(x) > o + tol) return false;
    }
  }
  return true;
}

double frontier_gap(const Frontier2D& a, const Frontier2D& b, int grid) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  double gap = std::abs(a.r2_max() - b.r2_max());
  for (double x : breakpoints(a, b, 0.0, std::max(a.r2_max(), b.r2_max()), grid)) {
    gap = std::max(gap, std::abs(zero_if_outside(a.at(x)) - zero_if_outside(b.at(x))));
    gap = std::max(gap, std::abs(zero_if_outside(a.right_limit(x)) - zero_if_outside(b.right_limit(x))));
  }
  return gap;
}

bool region_equal(const Frontier2D& a, const Frontier2D& b, double tol, int grid) {
  return frontier_contains(a, b, tol, grid) && frontier_contains(b, a, tol, grid);
}

std::string to_csv(const Frontier2D& f) {
  std::string out = "R2,R1\n";
  char buf[64];
  for (const auto& p : f.points()) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", p.r2 + 0.0, p.r1 + 0.0);
    out += buf;
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const Frontier2D& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw validation_error("cannot write " + path.string());
  os << to_csv(f);
  if (!os) throw validation_error("cannot write " + path.string());
}

}  // namespace cifc
