#pragma once

#include <string_view>
#include <vector>

#include "potts/coupling.hpp"
#include "potts/model.hpp"
#include "potts/pseudolikelihood.hpp"

namespace potts {

enum class FitStatus { converged, diverged, max_iters, not_exists };

std::string_view to_string(FitStatus s);

struct FitOptions {
  double tol_grad_per_site = 1e-8;  // converged needs ||grad||_2 <= tol * N
  double step_tol = 1e-6;           // ... and a Newton step below step_tol * max(1, ||iterate||_inf)
  int max_iters = 200;
  double divergence_bound = 50.0;   // ||(beta, B)||_inf beyond this means divergence
  double armijo = 1e-4;
  int max_halvings = 60;
  double singular_ratio = 1e-10;    // lambda_min / lambda_max below this: gradient step
  bool record_trace = false;
};

struct TracePoint {
  std::vector<double> iterate;  // (beta, B_1, ..., B_{q-1})
  double value = 0.0;
};

struct MplFit {
  double beta_hat = 0.0;
  ExternalField field_hat;
  FitStatus status = FitStatus::max_iters;
  double grad_norm = 0.0;
  double value = 0.0;
  int iters = 0;
  bool beta_nonpositive = false;
  ExistenceReport existence;
  std::vector<TracePoint> trace;
};

/// B_s = log(n_s / n_q): the maximizer of the pseudo-likelihood at beta = 0.
/// Returns zeros if any color is absent.
ExternalField closed_form_field(const Configuration& x, int q);

/// Damped Newton ascent on the joint objective, starting at beta = 0 and the
/// closed-form field. A missing color is a certificate of non-existence and
/// yields not_exists; otherwise divergence of the iterates is reported as
/// not_exists when the Omega/Lambda condition fails and diverged when it holds.
MplFit fit_joint(const CouplingMatrix& a, const Configuration& x, int q, const FitOptions& opts = {});

/// Partial estimator of beta with the field known: safeguarded Newton on the
/// scalar score, bisection fallback, bracket [-bound, bound].
MplFit fit_beta(const CouplingMatrix& a, const Configuration& x, int q, const ExternalField& field_known,
                const FitOptions& opts = {});

/// Partial estimator of the field with beta known: damped Newton on the
/// B-block.
MplFit fit_field(const CouplingMatrix& a, const Configuration& x, int q, double beta_known, const FitOptions& opts = {});

}  // namespace potts
