#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace cifc {

constexpr std::size_t max_alphabet_product = 4096;
constexpr double mi_clamp_tol = 1e-10;

struct Axis {
  std::string name;
  int size = 0;
  bool operator==(const Axis&) const = default;
};

using VarSet = std::vector<std::string>;

// Probability tensor over named finite alphabets, row-major (last axis fastest).
class JointDist {
 public:
  JointDist() = default;
  JointDist(std::vector<Axis> axes, std::vector<double> probs);

  // Rescales nonnegative weights to sum to one.
  static JointDist normalized(std::vector<Axis> axes, std::vector<double> weights);
  // Weights from f(index tuple), then normalized.
  static JointDist from_function(std::vector<Axis> axes,
                                 const std::function<double(std::span<const int>)>& f);

  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  bool has_axis(const std::string& name) const;
  std::size_t axis_index(const std::string& name) const;
  const Axis& axis(const std::string& name) const { return axes_[axis_index(name)]; }
  std::vector<std::size_t> strides() const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> probs_;
};

std::size_t alphabet_product(const std::vector<Axis>& axes);

// Walks every index tuple of `axes` in row-major order.
void for_each_index(const std::vector<Axis>& axes,
                    const std::function<void(std::size_t, std::span<const int>)>& f);

JointDist marginalize(const JointDist& dist, const VarSet& keep);
double entropy(const JointDist& dist, const VarSet& vars);
double mutual_information(const JointDist& dist, const VarSet& left, const VarSet& right,
                          const VarSet& given = {});

// P(outputs | x1, x2). Output axes named Y... are primary receivers, Z... secondary.
class DmcChannel {
 public:
  DmcChannel() = default;
  // probs row-major over (X1, X2, outputs...).
  DmcChannel(int x1_size, int x2_size, std::vector<Axis> outputs, std::vector<double> probs);

  // Outputs conditionally independent given (x1, x2); marginals[o] is row-major
  // over (X1, X2, output o).
  static DmcChannel from_marginals(int x1_size, int x2_size, std::vector<Axis> outputs,
                                   const std::vector<std::vector<double>>& marginals);

  int x1_size() const { return x1_; }
  int x2_size() const { return x2_; }
  const std::vector<Axis>& outputs() const { return outputs_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t output_count() const { return out_size_; }
  double prob(int x1, int x2, std::size_t out_flat) const {
    return probs_[(static_cast<std::size_t>(x1) * x2_ + x2) * out_size_ + out_flat];
  }
  VarSet primary_names() const;
  VarSet secondary_names() const;

 private:
  int x1_ = 0, x2_ = 0;
  std::vector<Axis> outputs_;
  std::size_t out_size_ = 0;
  std::vector<double> probs_;
};

JointDist compose_with_channel(const JointDist& inputs, const DmcChannel& chan);

// Uniform double in [0,1) from the top 53 bits.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Symmetric Dirichlet(1) draw of length n.
std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n, double concentration = 1.0);

JointDist sample_input_dist(const std::vector<Axis>& axes, std::uint64_t seed);

double binary_entropy(double p);

}  // namespace cifc
