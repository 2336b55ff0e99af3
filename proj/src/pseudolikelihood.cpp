#include "potts/pseudolikelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "potts/errors.hpp"

namespace potts {

namespace {

void check_inputs(const LocalFieldTable& m, const Configuration& x, const PottsParams& params) {
  params.validate();
  require(m.colors() == params.q, "evaluate: local-field table has a different number of colors");
  validate_configuration(x, params.q, m.sites());
}

// Per-block accumulator: value, gradient (q), dense Hessian (q x q).
struct Partial {
  double value = 0.0;
  std::vector<double> grad;
  std::vector<double> hess;
};

void accumulate_block(const LocalFieldTable& m, const Configuration& x, double beta, const std::vector<double>& b,
                      int begin, int end, Want want, Partial& out) {
  const int q = m.colors();
  const auto uq = static_cast<std::size_t>(q);
  std::vector<double> theta(uq);
  for (int i = begin; i < end; ++i) {
    const auto row = m.row(i);
    const double log_norm = softmax_row(beta, row, b, theta);
    const auto xi = static_cast<std::size_t>(x[static_cast<std::size_t>(i)]);
    out.value += beta * row[xi] + b[xi] - log_norm;
    if (want == Want::value) continue;

    double mean_field = 0.0;
    for (std::size_t r = 0; r < uq; ++r) mean_field += theta[r] * row[r];
    out.grad[0] += row[xi] - mean_field;
    for (std::size_t s = 0; s + 1 < uq; ++s) out.grad[s + 1] += (xi == s ? 1.0 : 0.0) - theta[s];
    if (want != Want::hessian) continue;

    // Covariance of (m_{i,X}, 1[X = s]) under theta_i; equal to the pairwise
    // sums over colors but without the O(q^2) loop for the beta entry.
    double var_field = 0.0;
    for (std::size_t r = 0; r < uq; ++r) {
      const double d = row[r] - mean_field;
      var_field += theta[r] * d * d;
    }
    out.hess[0] -= var_field;
    for (std::size_t s = 0; s + 1 < uq; ++s) {
      const double cross = theta[s] * (row[s] - mean_field);
      out.hess[(s + 1)] -= cross;
      out.hess[(s + 1) * uq] -= cross;
      for (std::size_t r = 0; r + 1 < uq; ++r) {
        const double cov = r == s ? theta[s] * (1.0 - theta[s]) : -theta[r] * theta[s];
        out.hess[(r + 1) * uq + (s + 1)] -= cov;
      }
    }
  }
}

}  // namespace

PseudoLikEval evaluate(const LocalFieldTable& m, const Configuration& x, const PottsParams& params, Want want) {
  check_inputs(m, x, params);
  const int n = m.sites();
  const int q = params.q;
  const auto uq = static_cast<std::size_t>(q);
  const auto b = params.full_field();
  const int blocks = (n + kEvalBlock - 1) / kEvalBlock;

  std::vector<Partial> partials(static_cast<std::size_t>(blocks));
  for (auto& p : partials) {
    p.grad.assign(uq, 0.0);
    p.hess.assign(uq * uq, 0.0);
  }
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (int k = 0; k < blocks; ++k) {
    accumulate_block(m, x, params.beta, b, k * kEvalBlock, std::min(n, (k + 1) * kEvalBlock), want,
                     partials[static_cast<std::size_t>(k)]);
  }

  PseudoLikEval out;
  if (want != Want::value) out.gradient = Eigen::VectorXd::Zero(q);
  if (want == Want::hessian) out.hessian = Eigen::MatrixXd::Zero(q, q);
  for (const Partial& p : partials) {
    out.value += p.value;
    if (want == Want::value) continue;
    for (int r = 0; r < q; ++r) out.gradient(r) += p.grad[static_cast<std::size_t>(r)];
    if (want != Want::hessian) continue;
    for (int r = 0; r < q; ++r)
      for (int s = 0; s < q; ++s) out.hessian(r, s) += p.hess[static_cast<std::size_t>(r) * uq + static_cast<std::size_t>(s)];
  }
  return out;
}

PseudoLikEval evaluate(const CouplingMatrix& a, const Configuration& x, const PottsParams& params, Want want) {
  params.validate();
  return evaluate(local_fields(a, x, params.q), x, params, want);
}

namespace {

std::vector<double> column_means(const LocalFieldTable& m) {
  std::vector<double> mean(static_cast<std::size_t>(m.colors()), 0.0);
  for (int i = 0; i < m.sites(); ++i)
    for (int r = 0; r < m.colors(); ++r) mean[static_cast<std::size_t>(r)] += m(i, r);
  for (double& v : mean) v /= m.sites();
  return mean;
}

}  // namespace

double t_stat(const LocalFieldTable& m) {
  const int n = m.sites();
  const int q = m.colors();
  const auto mean = column_means(m);
  double total = 0.0;
  for (int r = 0; r < q; ++r) {
    for (int s = r + 1; s < q; ++s) {
      double sq = 0.0;
      for (int i = 0; i < n; ++i) {
        const double d = m(i, r) - m(i, s);
        sq += d * d;
      }
      const double dm = mean[static_cast<std::size_t>(r)] - mean[static_cast<std::size_t>(s)];
      total += sq / n - dm * dm;
    }
  }
  return total;
}

double t_stat_alt(const LocalFieldTable& m, const CouplingMatrix& a) {
  require(a.size() == m.sites(), "t_stat_alt: dimension mismatch");
  const int n = m.sites();
  const int q = m.colors();
  const auto mean = column_means(m);
  double r_bar = 0.0;
  for (int i = 0; i < n; ++i) r_bar += a.row_sum(i);
  r_bar /= n;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double shift = (a.row_sum(i) - r_bar) / q;
    for (int r = 0; r < q; ++r) {
      const double d = m(i, r) - mean[static_cast<std::size_t>(r)] - shift;
      total += d * d;
    }
  }
  return static_cast<double>(q) / n * total;
}

double u_stat(const LocalFieldTable& m) {
  const int n = m.sites();
  const int q = m.colors();
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < q; ++r)
      for (int s = r + 1; s < q; ++s) {
        const double d = m(i, r) - m(i, s);
        total += d * d;
      }
  return total / n;
}

std::optional<OmegaWitness> omega_witness(const LocalFieldTable& m, const Configuration& x, int r, int s) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double min_r = inf, max_r = -inf, min_s = inf, max_s = -inf;
  int argmin_r = -1, argmax_r = -1, argmin_s = -1, argmax_s = -1;
  for (int u = 0; u < m.sites(); ++u) {
    const int c = x[static_cast<std::size_t>(u)];
    if (c != r && c != s) continue;
    const double diff = m(u, r) - m(u, s);
    if (c == r) {
      if (diff < min_r) { min_r = diff; argmin_r = u; }
      if (diff > max_r) { max_r = diff; argmax_r = u; }
    } else {
      if (diff < min_s) { min_s = diff; argmin_s = u; }
      if (diff > max_s) { max_s = diff; argmax_s = u; }
    }
  }
  if (argmin_r < 0 || argmin_s < 0) return std::nullopt;
  if (!(std::max(min_r, min_s) < std::min(max_r, max_s))) return std::nullopt;
  return OmegaWitness{r, s, argmin_r, argmin_s, argmax_r, argmax_s};
}

ExistenceReport existence_report(const LocalFieldTable& m, const Configuration& x, const CouplingMatrix& a) {
  const int n = m.sites();
  const int q = m.colors();
  validate_configuration(x, q, n);
  require(a.size() == n, "existence_report: dimension mismatch");

  ExistenceReport rep;
  std::vector<int> counts(static_cast<std::size_t>(q), 0);
  for (int c : x) ++counts[static_cast<std::size_t>(c)];
  rep.in_lambda = std::all_of(counts.begin(), counts.end(), [](int c) { return c > 0; });
  rep.in_a4 = !rep.in_lambda;

  for (int r = 0; r < q && !rep.witness; ++r)
    for (int s = r + 1; s < q && !rep.witness; ++s) rep.witness = omega_witness(m, x, r, s);
  rep.in_omega = rep.witness.has_value();

  // Local fields are sums of the same coupling entries in different orders;
  // compare extremes with a tolerance scaled to the row sum.
  rep.in_a2 = true;
  rep.in_a3 = true;
  for (int i = 0; i < n; ++i) {
    const auto row = m.row(i);
    const double own = row[static_cast<std::size_t>(x[static_cast<std::size_t>(i)])];
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    const double tol = 1e-12 * std::max(1.0, a.row_sum(i));
    if (own > *lo + tol) rep.in_a2 = false;
    if (own < *hi - tol) rep.in_a3 = false;
  }

  rep.t_stat = t_stat(m);
  rep.u_stat = u_stat(m);
  rep.joint_exists = rep.in_lambda && rep.in_omega;
  rep.partial_beta_exists = !rep.in_a2 && !rep.in_a3 && rep.u_stat > kUStatFloor;
  rep.partial_b_exists = !rep.in_a4;
  return rep;
}

ExistenceReport existence_report(const CouplingMatrix& a, const Configuration& x, int q) {
  return existence_report(local_fields(a, x, q), x, a);
}

}  // namespace potts
