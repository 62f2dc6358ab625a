#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "cifc/frontier.hpp"

namespace cifc {

using Rational = mpq_class;

// Nearest multiple of 1e-12.
Rational rationalize(double v);

// sum coeffs[v] * v <= bound
struct LinIneq {
  std::map<std::string, Rational> coeffs;
  Rational bound;

  LinIneq() = default;
  LinIneq(std::map<std::string, Rational> c, Rational b);

  bool is_constant() const { return coeffs.empty(); }
  const Rational& coeff(const std::string& v) const;
  std::string str() const;
};

class IneqSystem {
 public:
  IneqSystem() = default;
  explicit IneqSystem(std::vector<std::string> variables);

  void add(LinIneq ineq);
  void add(std::map<std::string, Rational> coeffs, Rational bound) {
    add(LinIneq(std::move(coeffs), std::move(bound)));
  }

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<LinIneq>& inequalities() const { return ineqs_; }
  std::vector<LinIneq>& inequalities() { return ineqs_; }
  bool has_variable(const std::string& v) const;
  // A constant inequality 0 <= b with b < 0 is present.
  bool infeasible() const;
  bool contains(const std::map<std::string, Rational>& point) const;
  std::string str() const;

 private:
  std::vector<std::string> vars_;
  std::vector<LinIneq> ineqs_;
};

IneqSystem fme_eliminate(const IneqSystem& sys, const std::string& var);
IneqSystem fme_eliminate_all(IneqSystem sys, const std::vector<std::string>& vars);

// Drops duplicates (keeping the tightest bound) and inequalities implied by a
// nonnegative combination of at most two others.
void remove_redundant(std::vector<LinIneq>& ineqs);

Frontier2D project_to_frontier(const IneqSystem& sys, const std::string& r1, const std::string& r2);

}  // namespace cifc
