#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cifc/frontier.hpp"
#include "cifc/info_theory.hpp"
#include "cifc/polytope.hpp"

namespace cifc {

// Joint PD over (Q1, Q, U, V, X1, X2).
struct AuxAssignment {
  JointDist joint;
  AuxAssignment() = default;
  explicit AuxAssignment(JointDist j);
};

inline const std::array<std::string, 6> aux_axis_names{"Q1", "Q", "U", "V", "X1", "X2"};

// Dirichlet(1) over the full product alphabet.
AuxAssignment sample_aux(const std::array<int, 6>& sizes, std::uint64_t seed);

// Mutual-information terms of the inner bound, receiver minima already taken.
struct Theorem1Terms {
  double a;   // min_j I(Q1 X1 Q U; Y_j)
  double b;   // min_k I(Q V; Z_k | Q1)
  double c0;  // I(Q V; X1 | Q1)
  double c;   // min_j I(X1 U; Y_j | Q1 Q)
  double d0;  // I(V; X1 U | Q1 Q)
  double d;   // min_j I(X1 Q U; Y_j | Q1)
  double e;   // min_k I(V; Z_k | Q1 Q)
  double e0;  // I(Q; X1 | Q1)
  double f;   // min_k I(Q1 Q V; Z_k)
};

Theorem1Terms theorem1_terms(const AuxAssignment& aux, const DmcChannel& chan);
// Right-hand sides of the eleven inequalities in order; the R1/R2 weights are
// theorem1_weights.
std::array<double, 11> theorem1_bounds(const Theorem1Terms& t);
inline constexpr std::array<std::array<int, 2>, 11> theorem1_weights{{
    {1, 0}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 1}, {1, 2}, {1, 2}}};
// System over R1, R2; every MI term is rationalized on its own before summing.
IneqSystem theorem1_system(const Theorem1Terms& t);
Frontier2D theorem1_region(const AuxAssignment& aux, const DmcChannel& chan);

// Encoding, decoding, rate-split and nonnegativity constraints of the
// superposition/binning scheme for one Y and one Z.
IneqSystem appendix_b_system(const AuxAssignment& aux, const DmcChannel& chan);
inline const std::vector<std::string> appendix_b_eliminated{"T02", "T11", "T22", "R01",
                                                             "R02", "R11", "R22"};
Frontier2D appendix_b_projection(const AuxAssignment& aux, const DmcChannel& chan);
// Seeded binary instance for the FME check. The aux PD is built by the chain
// rule Q1, X1, Q, U, V, X2 with each conditional a random mix of a base row and
// a Dirichlet draw, so the auxiliaries stay weakly dependent on X1 and the
// inner bound is usually nonempty. Y and Z are independent given (X1, X2).
struct FmeInstance {
  AuxAssignment aux;
  DmcChannel channel;
};
FmeInstance sample_fme_instance(std::uint64_t seed);

bool verify_fme_appendix_b(const AuxAssignment& aux, const DmcChannel& chan);
// Same check against a caller-supplied R1/R2 system.
bool verify_fme_against(const AuxAssignment& aux, const DmcChannel& chan,
                        const IneqSystem& reference);

enum class ChannelClass { multi_primary, multi_secondary };
enum class Regime { vsi, vwi, mixed, none };

std::string to_string(ChannelClass c);
std::string to_string(Regime r);
ChannelClass parse_channel_class(const std::string& s);
Regime parse_regime(const std::string& s);

// Indices (0-based) into the receiver group that carries the multicast
// (Y outputs for multi-primary, Z outputs for multi-secondary).
struct Partition {
  std::vector<std::size_t> weak;
  std::vector<std::size_t> strong;
};
// "W|S" with 1-based comma-separated indices, e.g. "1|2,3".
Partition parse_partition(const std::string& s);
std::string format_partition(const Partition& p);
void validate_partition(const Partition& p, std::size_t receivers);

struct RegimeQuery {
  ChannelClass cls = ChannelClass::multi_primary;
  Regime regime = Regime::vsi;
  std::optional<Partition> partition;
};

struct SamplingConfig {
  std::size_t samples = 1000;
  int aux_card = 0;  // 0: |X1||X2| + 1
  std::uint64_t seed = 0;
  bool grid = true;  // step-1/8 grid over P_{X1X2} ahead of the random draws
};

int effective_aux_card(const DmcChannel& chan, int aux_card);
bool regime_needs_u(Regime r);

// Candidate inputs examined by check_regime, in order: the grid (when enabled
// and |X1||X2| <= 6) then `samples` Dirichlet draws, draw i seeded with seed + i.
// With U the grid points pair with U = (x1*|X2| + x2) mod |U|.
class CandidateStream {
 public:
  CandidateStream(const DmcChannel& chan, bool with_u, const SamplingConfig& cfg);
  std::size_t size() const { return grid_.size() + samples_; }
  std::size_t grid_size() const { return grid_.size(); }
  JointDist operator()(std::size_t i) const;

 private:
  int x1_, x2_, u_;
  bool with_u_;
  std::size_t samples_;
  std::uint64_t seed_;
  std::vector<std::vector<int>> grid_;  // compositions of 8
};

struct ConditionSlack {
  std::string condition;
  std::size_t receiver;  // index in its receiver group
  double slack;          // rhs - lhs; negative means violated
};

// Slacks of every condition of the regime at one input PD (over X1, X2 and,
// for VWI/mixed, U).
std::vector<ConditionSlack> regime_slacks(const DmcChannel& chan, const RegimeQuery& q,
                                          const JointDist& input);

struct RegimeWitness {
  JointDist input;
  std::size_t receiver = 0;
  double margin = 0;  // lhs - rhs > 0
  std::string condition;
  std::size_t sample_index = 0;
};

struct RegimeReport {
  RegimeQuery query;
  Regime label = Regime::none;  // query.regime when no violation found
  std::size_t samples_checked = 0;
  std::optional<RegimeWitness> witness;
  bool passed() const { return !witness.has_value(); }
};

inline constexpr double regime_violation_tol = 1e-10;

RegimeReport check_regime(const DmcChannel& chan, const RegimeQuery& q, const SamplingConfig& cfg);

// Rate region of the regime's capacity theorem at one input PD.
Frontier2D regime_region(const DmcChannel& chan, const RegimeQuery& q, const JointDist& input);

// Multi-primary VSI achievable set at one P_{X1X2}, in this order:
// R1 <= min_j I(X1X2;Y_j), R2 <= I(X2;Z|X1), R2 <= min_j I(X2;Y_j|X1),
// R1+R2 <= I(X1X2;Z), R1+R2 <= min_j I(X1X2;Y_j). Needs M = 1.
IneqSystem vsi_five_system(const DmcChannel& chan, const JointDist& input);
// Indices of the three rows the VSI conditions make redundant.
inline constexpr std::array<std::size_t, 3> vsi_redundant_rows{0, 2, 3};
IneqSystem drop_rows(const IneqSystem& sys, const std::vector<std::size_t>& rows);

struct RegionSearch {
  int aux_card = 0;
  std::size_t samples = 256;
  int grid = 8;  // simplex step 1/grid over P_{X1X2}; 0 disables
  std::uint64_t seed = 0;
};

Frontier2D dmc_capacity_region(const DmcChannel& chan, const RegimeReport& report,
                               const RegionSearch& search);

// Points of the simplex over n cells with coordinates in multiples of 1/den.
std::vector<std::vector<int>> simplex_grid(int n, int den);

struct CounterexampleSearch {
  int x1 = 2, x2 = 2, y = 3, z = 3;
  std::size_t budget = 100000;  // channels examined
  std::uint64_t seed = 0;
  double deterministic_rows = 0.8;  // chance a transition row is a point mass
  std::size_t regime_samples = 256;
  std::size_t witness_samples = 256;
  int aux_card = 0;
};

struct CounterexampleWitness {
  DmcChannel channel;
  JointDist input;  // over (U, X1, X2)
  std::size_t receiver = 0;
  double margin = 0;  // I(U;Y_j|X1) - I(U;Z|X1)
  std::size_t channel_index = 0;
  SamplingConfig vsi_check;
};

DmcChannel random_counterexample_channel(const CounterexampleSearch& s, std::size_t index);
double weak_condition_margin(const DmcChannel& chan, const JointDist& input, std::size_t j);
std::optional<CounterexampleWitness> vaezi_counterexample_search(const CounterexampleSearch& s);
// Re-runs the VSI check and the margin evaluation.
bool verify_counterexample(const CounterexampleWitness& w, double min_margin = 1e-6);

}  // namespace cifc
