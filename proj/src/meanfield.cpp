#include "potts/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "potts/errors.hpp"
#include "potts/rng.hpp"

namespace potts {

void validate_simplex_point(const SimplexPoint& t, int q) {
  require(static_cast<int>(t.size()) == q, "simplex point must have q = " + std::to_string(q) + " entries");
  double total = 0.0;
  for (double v : t) {
    require(std::isfinite(v) && v >= 0.0, "simplex point has a negative or non-finite entry");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-9, "simplex point does not sum to 1");
}

double h_value(const PottsParams& params, const SimplexPoint& t) {
  params.validate();
  validate_simplex_point(t, params.q);
  const auto b = params.full_field();
  double h = 0.0;
  for (std::size_t r = 0; r < t.size(); ++r) {
    h += 0.5 * params.beta * t[r] * t[r] + b[r] * t[r];
    if (t[r] > 0.0) h -= t[r] * std::log(t[r]);
  }
  return h;
}

FixedPointRun fixed_point_iterate(const PottsParams& params, const SimplexPoint& start, const MeanFieldOptions& opts) {
  const auto b = params.full_field();
  FixedPointRun run;
  run.start = start;
  SimplexPoint t = start;
  SimplexPoint target(t.size());
  for (run.iters = 0; run.iters < opts.max_iters; ++run.iters) {
    softmax_row(params.beta, t, b, target);
    double change = 0.0;
    double total = 0.0;
    for (std::size_t r = 0; r < t.size(); ++r) {
      const double next = (1.0 - opts.damping) * t[r] + opts.damping * target[r];
      change = std::max(change, std::abs(next - t[r]));
      t[r] = next;
      total += next;
    }
    for (double& v : t) v /= total;
    if (change < opts.tol) {
      run.converged = true;
      ++run.iters;
      break;
    }
  }
  run.point = t;
  run.value = h_value(params, t);
  return run;
}

MeanFieldSolution maximize_h(const PottsParams& params, const MeanFieldOptions& opts) {
  params.validate();
  require(params.beta >= 0.0, "maximize_h: beta must be non-negative");
  require(opts.n_starts >= 0, "maximize_h: n_starts must be non-negative");
  require(opts.damping > 0.0 && opts.damping <= 1.0, "maximize_h: damping must lie in (0, 1]");
  const int q = params.q;
  const auto uq = static_cast<std::size_t>(q);

  std::vector<SimplexPoint> starts;
  starts.emplace_back(uq, 1.0 / q);
  for (int r = 0; r < q; ++r) {
    SimplexPoint v(uq, 0.1 / (q - 1));
    v[static_cast<std::size_t>(r)] = 0.9;
    starts.push_back(v);
  }
  Rng rng(opts.seed);
  for (int k = 0; k < opts.n_starts; ++k) {
    SimplexPoint v(uq);
    double total = 0.0;
    for (double& e : v) total += (e = rng.exponential());
    for (double& e : v) e /= total;
    starts.push_back(v);
  }

  MeanFieldSolution sol;
  for (const auto& s : starts) sol.runs.push_back(fixed_point_iterate(params, s, opts));

  double best = -INFINITY;
  for (const auto& run : sol.runs) best = std::max(best, run.value);
  for (const auto& run : sol.runs) {
    if (run.value < best - opts.value_tol) continue;
    const bool seen = std::any_of(sol.all_optima.begin(), sol.all_optima.end(), [&](const SimplexPoint& p) {
      double d = 0.0;
      for (std::size_t r = 0; r < uq; ++r) d = std::max(d, std::abs(p[r] - run.point[r]));
      return d <= opts.cluster_tol;
    });
    if (!seen) sol.all_optima.push_back(run.point);
  }
  for (const auto& run : sol.runs) {
    if (run.value == best) {
      sol.maximizer = run.point;
      break;
    }
  }
  sol.value = best;
  sol.unique = sol.all_optima.size() == 1;
  const bool interior = std::all_of(sol.maximizer.begin(), sol.maximizer.end(), [](double v) { return v > 0.0; });
  sol.tangent_hessian_negdef = interior && tangent_hessian_negdef(params, sol.maximizer);
  return sol;
}

double tangent_hessian_max_eigenvalue(double beta, const SimplexPoint& m) {
  const int q = static_cast<int>(m.size());
  require(q >= 2, "tangent_hessian: need at least 2 colors");
  for (double v : m) require(v > 0.0, "tangent_hessian: point must be strictly inside the simplex");

  // Helmert basis of {u : sum u = 0}: column k is (1, ..., 1, -k, 0, ...)/norm.
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(q, q - 1);
  for (int k = 1; k < q; ++k) {
    const double norm = std::sqrt(static_cast<double>(k) * (k + 1));
    for (int r = 0; r < k; ++r) basis(r, k - 1) = 1.0 / norm;
    basis(k, k - 1) = -static_cast<double>(k) / norm;
  }
  Eigen::VectorXd diag(q);
  for (int r = 0; r < q; ++r) diag(r) = beta - 1.0 / m[static_cast<std::size_t>(r)];
  const Eigen::MatrixXd restricted = basis.transpose() * diag.asDiagonal() * basis;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(restricted).eigenvalues().maxCoeff();
}

bool tangent_hessian_negdef(const PottsParams& params, const SimplexPoint& m) {
  validate_simplex_point(m, params.q);
  return tangent_hessian_max_eigenvalue(params.beta, m) < -1e-10;
}

double beta_critical(int q) {
  require(q >= 2, "beta_critical: q must be at least 2");
  if (q <= 2) return static_cast<double>(q);
  return 2.0 * (q - 1) / (q - 2) * std::log(static_cast<double>(q - 1));
}

ExternalField inestimability_line(const SimplexPoint& m, double beta) {
  const int q = static_cast<int>(m.size());
  require(q >= 2, "inestimability_line: need at least 2 colors");
  validate_simplex_point(m, q);
  for (double v : m) require(v > 0.0, "inestimability_line: m must be strictly inside the simplex");
  require(beta >= 0.0 && std::isfinite(beta), "inestimability_line: beta must be non-negative");
  ExternalField b(static_cast<std::size_t>(q - 1));
  const double mq = m.back();
  for (int r = 0; r < q - 1; ++r) {
    const double mr = m[static_cast<std::size_t>(r)];
    b[static_cast<std::size_t>(r)] = std::log(mr / mq) + beta * (mq - mr);
  }
  return b;
}

}  // namespace potts
