#pragma once

#include <cstdint>
#include <vector>

#include "potts/model.hpp"

namespace potts {

/// Point of the probability simplex on q colors.
using SimplexPoint = std::vector<double>;

void validate_simplex_point(const SimplexPoint& t, int q);

/// H(t) = (beta/2) sum t_r^2 + sum B_r t_r - sum t_r log t_r, with 0 log 0 = 0.
double h_value(const PottsParams& params, const SimplexPoint& t);

struct MeanFieldOptions {
  int n_starts = 20;  // Dirichlet(1, ..., 1) starts, in addition to uniform and q vertex-biased starts
  std::uint64_t seed = 0;
  double damping = 0.5;
  int max_iters = 10000;
  double tol = 1e-12;          // sup-norm change between iterates
  double cluster_tol = 1e-6;   // sup-norm distance for distinct optima
  double value_tol = 1e-9;     // H ties
};

struct FixedPointRun {
  SimplexPoint start;
  SimplexPoint point;
  double value = 0.0;
  int iters = 0;
  bool converged = false;
};

struct MeanFieldSolution {
  SimplexPoint maximizer;
  double value = 0.0;
  std::vector<SimplexPoint> all_optima;  // distinct points attaining the max value
  bool unique = false;
  bool tangent_hessian_negdef = false;
  std::vector<FixedPointRun> runs;
};

/// Iterates t <- (1 - s) t + s softmax(beta t + B) from every start, clusters
/// the end points and reports the best cluster(s).
MeanFieldSolution maximize_h(const PottsParams& params, const MeanFieldOptions& opts = {});

/// One damped fixed-point run from `start`.
FixedPointRun fixed_point_iterate(const PottsParams& params, const SimplexPoint& start, const MeanFieldOptions& opts);

/// Largest eigenvalue of diag(beta - 1/m_r) restricted to the sum-zero
/// subspace; requires m strictly inside the simplex.
double tangent_hessian_max_eigenvalue(double beta, const SimplexPoint& m);
bool tangent_hessian_negdef(const PottsParams& params, const SimplexPoint& m);

/// q if q <= 2, otherwise 2 (q - 1) / (q - 2) log(q - 1).
double beta_critical(int q);

/// Field on the line of parameters sharing mean-field maximizer m:
/// B_r = log(m_r / m_q) + beta (m_q - m_r).
ExternalField inestimability_line(const SimplexPoint& m, double beta);

}  // namespace potts
