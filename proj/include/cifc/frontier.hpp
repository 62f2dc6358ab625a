#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace cifc {

struct RatePoint {
  double r2 = 0;
  double r1 = 0;
  bool operator==(const RatePoint&) const = default;
};

// Downward-closed region {r2 <= r2_max, r1 <= f(r2)}, f piecewise linear and
// nonincreasing through the stored points. Two consecutive points may share r2:
// f then drops vertically there and f(r2) is the upper one. No points means the
// region is empty.
class Frontier2D {
 public:
  Frontier2D() = default;
  explicit Frontier2D(std::vector<RatePoint> points);

  static Frontier2D box(double r1_max, double r2_max);
  // {r1 <= r1_max, r2 <= r2_max, r1 + r2 <= sum_max}
  static Frontier2D pentagon(double r1_max, double r2_max, double sum_max);

  bool empty() const { return pts_.empty(); }
  const std::vector<RatePoint>& points() const { return pts_; }
  double r2_max() const { return pts_.empty() ? -1.0 : pts_.back().r2; }
  double r1_max() const { return pts_.empty() ? -1.0 : pts_.front().r1; }

  // Max r1 at r2; -inf outside [0, r2_max].
  double at(double r2) const;
  // lim f(s) as s -> r2 from above; -inf at or beyond r2_max.
  double right_limit(double r2) const;
  bool contains(double r1, double r2, double tol = 0) const;

  bool operator==(const Frontier2D&) const = default;

 private:
  std::vector<RatePoint> pts_;
};

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

Frontier2D frontier_intersect(const Frontier2D& a, const Frontier2D& b);
Frontier2D frontier_union(const Frontier2D& a, const Frontier2D& b);
Frontier2D frontier_union(const std::vector<Frontier2D>& parts);
// Upper concave envelope (time sharing).
Frontier2D convex_hull(const Frontier2D& f);

bool frontier_contains(const Frontier2D& outer, const Frontier2D& inner, double tol,
                       int grid = 512);
// Largest pointwise distance between the two boundary functions (outside a
// region's r2 range its f counts as 0), together with the r2_max mismatch.
double frontier_gap(const Frontier2D& a, const Frontier2D& b, int grid = 512);
bool region_equal(const Frontier2D& a, const Frontier2D& b, double tol = 1e-9, int grid = 512);

std::string to_csv(const Frontier2D& f);
void write_csv(const std::filesystem::path& path, const Frontier2D& f);

}  // namespace cifc
