#include "potts/mple.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "potts/errors.hpp"

namespace potts {

std::string_view to_string(FitStatus s) {
  switch (s) {
    case FitStatus::converged: return "converged";
    case FitStatus::diverged: return "diverged";
    case FitStatus::max_iters: return "max_iters";
    case FitStatus::not_exists: return "not_exists";
  }
  return "unknown";
}

ExternalField closed_form_field(const Configuration& x, int q) {
  std::vector<double> counts(static_cast<std::size_t>(q), 0.0);
  for (int c : x) counts[static_cast<std::size_t>(c)] += 1.0;
  ExternalField b(static_cast<std::size_t>(q - 1), 0.0);
  if (std::any_of(counts.begin(), counts.end(), [](double c) { return c == 0.0; })) return b;
  for (int s = 0; s < q - 1; ++s)
    b[static_cast<std::size_t>(s)] = std::log(counts[static_cast<std::size_t>(s)] / counts.back());
  return b;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

PottsParams params_from(const Eigen::VectorXd& theta, int q) {
  PottsParams p;
  p.q = q;
  p.beta = theta(0);
  p.field.assign(theta.data() + 1, theta.data() + q);
  return p;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

struct NewtonResult {
  Eigen::VectorXd theta;
  FitStatus status = FitStatus::max_iters;
  double grad_norm = 0.0;
  double value = 0.0;
  int iters = 0;
  std::vector<TracePoint> trace;
};

// Ascent over the coordinates [first_free, q) of theta = (beta, B); the rest
// stay fixed.
NewtonResult damped_newton(const LocalFieldTable& m, const Configuration& x, int q, Eigen::VectorXd theta,
                           int first_free, const FitOptions& opts) {
  const int k = q - first_free;
  const double tol = opts.tol_grad_per_site * m.sites();
  NewtonResult res;

  auto evaluate_full = [&](const Eigen::VectorXd& t, Eigen::VectorXd& g, Eigen::MatrixXd& h) {
    PseudoLikEval e = evaluate(m, x, params_from(t, q), Want::hessian);
    g = e.gradient.tail(k);
    h = e.hessian.bottomRightCorner(k, k);
    return e.value;
  };

  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  double value = evaluate_full(theta, g, h);
  if (opts.record_trace) res.trace.push_back({to_std(theta), value});

  for (int it = 0; it < opts.max_iters; ++it) {
    res.grad_norm = g.norm();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-h);
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double lmax = lambda.maxCoeff();
    const double lmin = lambda.minCoeff();
    Eigen::VectorXd d;
    if (lmax > 0.0 && lmin > opts.singular_ratio * lmax) {
      d = eig.eigenvectors() * (eig.eigenvectors().transpose() * g).cwiseQuotient(lambda);
    } else {
      d = lmax > 0.0 ? Eigen::VectorXd(g / lmax) : g;
    }

    const double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
    if (res.grad_norm <= tol && d.cwiseAbs().maxCoeff() <= opts.step_tol * scale) {
      res.status = FitStatus::converged;
      Eigen::VectorXd polished = theta;
      polished.tail(k) += d;
      Eigen::VectorXd pg;
      Eigen::MatrixXd ph;
      const double v = evaluate_full(polished, pg, ph);
      const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(value));
      if (pg.norm() < res.grad_norm && v >= value - rounding) {
        theta = polished;
        value = v;
        res.grad_norm = pg.norm();
        if (opts.record_trace) res.trace.push_back({to_std(theta), value});
      }
      break;
    }

    const double slope = g.dot(d);
    bool accepted = false;
    double step = 1.0;
    Eigen::VectorXd trial = theta;
    for (int halving = 0; halving <= opts.max_halvings; ++halving, step *= 0.5) {
      trial.tail(k) = theta.tail(k) + step * d;
      const double v = evaluate(m, x, params_from(trial, q), Want::value).value;
      if (v >= value + opts.armijo * step * slope && v >= value) {
        accepted = true;
        break;
      }
    }
    ++res.iters;
    if (!accepted) {
      // No measurable increase left: a rounding-level plateau if the
      // gradient is already within tolerance.
      res.status = res.grad_norm <= tol ? FitStatus::converged : FitStatus::max_iters;
      break;
    }
    theta = trial;
    value = evaluate_full(theta, g, h);
    if (opts.record_trace) res.trace.push_back({to_std(theta), value});
    if (theta.cwiseAbs().maxCoeff() > opts.divergence_bound) {
      res.status = FitStatus::diverged;
      res.grad_norm = g.norm();
      break;
    }
    res.grad_norm = g.norm();
  }
  res.theta = theta;
  res.value = value;
  return res;
}

void check(const CouplingMatrix& a, const Configuration& x, int q) {
  require(q >= 2, "fit: q must be at least 2");
  validate_configuration(x, q, a.size());
}

}  // namespace

MplFit fit_joint(const CouplingMatrix& a, const Configuration& x, int q, const FitOptions& opts) {
  check(a, x, q);
  const LocalFieldTable m = local_fields(a, x, q);
  MplFit fit;
  fit.existence = existence_report(m, x, a);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(q);
  const auto start = closed_form_field(x, q);
  for (int s = 0; s < q - 1; ++s) theta(s + 1) = start[static_cast<std::size_t>(s)];

  NewtonResult r = damped_newton(m, x, q, theta, 0, opts);
  fit.beta_hat = r.theta(0);
  fit.field_hat.assign(r.theta.data() + 1, r.theta.data() + q);
  fit.status = r.status;
  fit.grad_norm = r.grad_norm;
  fit.value = r.value;
  fit.iters = r.iters;
  fit.trace = std::move(r.trace);
  if (!fit.existence.in_lambda || (fit.status == FitStatus::diverged && !fit.existence.joint_exists)) {
    fit.status = FitStatus::not_exists;
  }
  fit.beta_nonpositive = fit.beta_hat <= 0.0;
  return fit;
}

MplFit fit_field(const CouplingMatrix& a, const Configuration& x, int q, double beta_known, const FitOptions& opts) {
  check(a, x, q);
  require(std::isfinite(beta_known), "fit_field: beta must be finite");
  const LocalFieldTable m = local_fields(a, x, q);
  MplFit fit;
  fit.existence = existence_report(m, x, a);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(q);
  theta(0) = beta_known;
  const auto start = closed_form_field(x, q);
  for (int s = 0; s < q - 1; ++s) theta(s + 1) = start[static_cast<std::size_t>(s)];

  NewtonResult r = damped_newton(m, x, q, theta, 1, opts);
  fit.beta_hat = beta_known;
  fit.field_hat.assign(r.theta.data() + 1, r.theta.data() + q);
  fit.status = r.status;
  fit.grad_norm = r.grad_norm;
  fit.value = r.value;
  fit.iters = r.iters;
  fit.trace = std::move(r.trace);
  if (!fit.existence.partial_b_exists) fit.status = FitStatus::not_exists;
  fit.beta_nonpositive = fit.beta_hat <= 0.0;
  return fit;
}

MplFit fit_beta(const CouplingMatrix& a, const Configuration& x, int q, const ExternalField& field_known,
                const FitOptions& opts) {
  check(a, x, q);
  PottsParams params{0.0, field_known, q};
  params.validate();
  const LocalFieldTable m = local_fields(a, x, q);
  MplFit fit;
  fit.existence = existence_report(m, x, a);
  fit.field_hat = field_known;

  if (!fit.existence.partial_beta_exists) {
    fit.status = FitStatus::not_exists;
    fit.beta_hat = kNaN;
    fit.value = kNaN;
    fit.grad_norm = kNaN;
    return fit;
  }

  const double tol = opts.tol_grad_per_site * m.sites();
  auto score = [&](double beta, double* curvature, double* value) {
    params.beta = beta;
    PseudoLikEval e = evaluate(m, x, params, Want::hessian);
    if (curvature) *curvature = e.hessian(0, 0);
    if (value) *value = e.value;
    return e.gradient(0);
  };

  double lo = -opts.divergence_bound;
  double hi = opts.divergence_bound;
  if (score(hi, nullptr, nullptr) > 0.0 || score(lo, nullptr, nullptr) < 0.0) {
    const bool above = score(hi, nullptr, nullptr) > 0.0;
    fit.status = FitStatus::diverged;
    fit.beta_hat = above ? hi : lo;
    fit.grad_norm = std::abs(score(fit.beta_hat, nullptr, &fit.value));
    fit.beta_nonpositive = fit.beta_hat <= 0.0;
    return fit;
  }

  double beta = 0.0;
  fit.status = FitStatus::max_iters;
  for (int it = 0; it < opts.max_iters; ++it) {
    double curv = 0.0, value = 0.0;
    const double g = score(beta, &curv, &value);
    fit.grad_norm = std::abs(g);
    fit.value = value;
    if (opts.record_trace) fit.trace.push_back({{beta}, value});
    if (g > 0.0) lo = beta; else hi = beta;
    const double newton = curv < 0.0 ? beta - g / curv : std::numeric_limits<double>::infinity();
    const double scale = std::max(1.0, std::abs(beta));
    if (fit.grad_norm <= tol && std::abs(newton - beta) <= 1e-12 * scale) {
      fit.status = FitStatus::converged;
      break;
    }
    if (g == 0.0 || hi - lo <= 1e-15 * scale) {
      fit.status = fit.grad_norm <= tol ? FitStatus::converged : FitStatus::max_iters;
      break;
    }
    ++fit.iters;
    beta = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
  }
  fit.beta_hat = beta;
  fit.beta_nonpositive = beta <= 0.0;
  return fit;
}

}  // namespace potts
