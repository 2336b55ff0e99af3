#pragma once

#include <optional>

#include <Eigen/Dense>

#include "potts/coupling.hpp"
#include "potts/model.hpp"

namespace potts {

enum class Want { value, gradient, hessian };

/// Log pseudo-likelihood at (beta, B). Parameter order everywhere is
/// (beta, B_1, ..., B_{q-1}).
struct PseudoLikEval {
  double value = 0.0;
  Eigen::VectorXd gradient;  // empty unless requested
  Eigen::MatrixXd hessian;   // empty unless requested
};

/// Sites are processed in fixed blocks of kEvalBlock; blocks run in parallel
/// and their partial sums are combined in block order, so the result does
/// not depend on the thread count.
inline constexpr int kEvalBlock = 256;

PseudoLikEval evaluate(const LocalFieldTable& m, const Configuration& x, const PottsParams& params,
                       Want want = Want::hessian);
PseudoLikEval evaluate(const CouplingMatrix& a, const Configuration& x, const PottsParams& params,
                       Want want = Want::hessian);

/// sum_{r<s} [ (1/N) sum_i (m_ir - m_is)^2 - (mbar_r - mbar_s)^2 ].
double t_stat(const LocalFieldTable& m);
/// (q/N) sum_i sum_r (m_ir - mbar_r - (R_i - Rbar)/q)^2 with R_i the row sums of the coupling.
double t_stat_alt(const LocalFieldTable& m, const CouplingMatrix& a);
/// (1/N) sum_{r<s} sum_i (m_ir - m_is)^2.
double u_stat(const LocalFieldTable& m);

struct OmegaWitness {
  int r = 0, s = 0;  // colors, r < s
  int i = 0, j = 0;  // low pair: x_i = r, x_j = s
  int k = 0, l = 0;  // high pair: x_k = r, x_l = s
};

struct ExistenceReport {
  bool in_lambda = false;  // every color appears
  bool in_omega = false;   // strictly separated opposite-color pairs exist
  std::optional<OmegaWitness> witness;
  bool in_a2 = false;  // own-color field is minimal at every site
  bool in_a3 = false;  // own-color field is maximal at every site
  bool in_a4 = false;  // some color is absent
  double t_stat = 0.0;
  double u_stat = 0.0;
  bool joint_exists = false;
  bool partial_beta_exists = false;
  bool partial_b_exists = false;
};

inline constexpr double kUStatFloor = 1e-14;

/// Omega test for one color pair, O(N): the smallest achievable max over a
/// low (r-site, s-site) pair is max(min_r, min_s) and the largest achievable
/// min over a high pair is min(max_r, max_s). Strict separation forces the
/// four sites to be distinct, so no index bookkeeping is needed.
std::optional<OmegaWitness> omega_witness(const LocalFieldTable& m, const Configuration& x, int r, int s);

ExistenceReport existence_report(const LocalFieldTable& m, const Configuration& x, const CouplingMatrix& a);
ExistenceReport existence_report(const CouplingMatrix& a, const Configuration& x, int q);

}  // namespace potts
