#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "potts/coupling.hpp"

namespace potts {

/// Colors are 0-based in memory (0 .. q-1); files and the CLI use 1 .. q.
using Configuration = std::vector<int>;

/// External field B_1 .. B_{q-1}; the last color carries B_q = 0.
using ExternalField = std::vector<double>;

struct PottsParams {
  double beta = 0.0;
  ExternalField field;
  int q = 2;

  /// B extended with the trailing zero (length q).
  std::vector<double> full_field() const;
  double field_sup_norm() const;
  void validate() const;
};

void validate_configuration(const Configuration& x, int q, int n);

/// m_{i,r}(x) = sum_j a_ij 1[x_j = r], stored row-major (N x q).
class LocalFieldTable {
 public:
  LocalFieldTable() = default;
  LocalFieldTable(int n, int q) : n_(n), q_(q), values_(static_cast<std::size_t>(n) * q, 0.0) {}

  int sites() const { return n_; }
  int colors() const { return q_; }

  double operator()(int i, int r) const { return values_[index(i, r)]; }
  double& operator()(int i, int r) { return values_[index(i, r)]; }

  std::span<const double> row(int i) const { return {values_.data() + index(i, 0), static_cast<std::size_t>(q_)}; }
  std::span<const double> values() const { return values_; }

  /// Site i changes color from -> to: column `from` loses a_ij and column
  /// `to` gains a_ij in every neighbour row j.
  void recolor(const CouplingMatrix& a, int i, int from, int to);

 private:
  std::size_t index(int i, int r) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(q_) + static_cast<std::size_t>(r);
  }

  int n_ = 0;
  int q_ = 0;
  std::vector<double> values_;
};

/// Row-parallel gather (OpenMP when built with it).
LocalFieldTable local_fields(const CouplingMatrix& a, const Configuration& x, int q);

/// theta_{i,r}(x), row-major N x q.
struct ConditionalProbTable {
  int n = 0;
  int q = 0;
  std::vector<double> probs;

  double operator()(int i, int r) const {
    return probs[static_cast<std::size_t>(i) * static_cast<std::size_t>(q) + static_cast<std::size_t>(r)];
  }
};

/// out_r = softmax(beta * m_r + B_r), max-shifted. Returns log of the
/// normalizer (log-sum-exp).
double softmax_row(double beta, std::span<const double> m, std::span<const double> full_field, std::span<double> out);

ConditionalProbTable conditional_probs(const LocalFieldTable& m, const PottsParams& params);
ConditionalProbTable conditional_probs(const CouplingMatrix& a, const Configuration& x, const PottsParams& params);

/// Lower bound q^{-1} exp(-|beta| gamma - 2 ||B||_inf) on every conditional
/// probability, given gamma >= max row sum.
double conditional_prob_floor(const PottsParams& params, double gamma);

/// (beta/2) sum_ij a_ij 1[x_i = x_j] + sum_i B_{x_i}.
double log_unnormalized_density(const CouplingMatrix& a, const Configuration& x, const PottsParams& params);

struct ExactDistribution {
  int n = 0;
  int q = 0;
  std::vector<double> probs;  // indexed by state_index()
  double log_partition = 0.0;
};

/// Mixed-radix index with site 0 as the least significant digit.
std::size_t state_index(const Configuration& x, int q);
Configuration state_from_index(std::size_t index, int n, int q);

/// Exhaustive enumeration of [q]^N. Throws if q^N exceeds max_states.
ExactDistribution exact_distribution(const CouplingMatrix& a, const PottsParams& params,
                                     std::uint64_t max_states = 10'000'000);

}  // namespace potts
