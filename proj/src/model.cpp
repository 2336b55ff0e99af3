#include "potts/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "potts/errors.hpp"

namespace potts {

std::vector<double> PottsParams::full_field() const {
  std::vector<double> b(field);
  b.resize(static_cast<std::size_t>(q), 0.0);
  b[static_cast<std::size_t>(q - 1)] = 0.0;
  return b;
}

double PottsParams::field_sup_norm() const {
  double s = 0.0;
  for (double b : field) s = std::max(s, std::abs(b));
  return s;
}

void PottsParams::validate() const {
  require(q >= 2, "params: q must be at least 2");
  require(std::isfinite(beta), "params: beta must be finite");
  require(field.size() == static_cast<std::size_t>(q - 1),
          "params: field must have q-1 = " + std::to_string(q - 1) + " entries, got " + std::to_string(field.size()));
  for (double b : field) require(std::isfinite(b), "params: field entries must be finite");
}

void validate_configuration(const Configuration& x, int q, int n) {
  require(static_cast<int>(x.size()) == n,
          "configuration has " + std::to_string(x.size()) + " sites, coupling has " + std::to_string(n));
  for (int c : x) require(c >= 0 && c < q, "configuration color out of range for q = " + std::to_string(q));
}

void LocalFieldTable::recolor(const CouplingMatrix& a, int i, int from, int to) {
  if (from == to) return;
  a.for_each_in_row(i, [&](int j, double v) {
    values_[index(j, from)] -= v;
    values_[index(j, to)] += v;
  });
}

LocalFieldTable local_fields(const CouplingMatrix& a, const Configuration& x, int q) {
  const int n = a.size();
  validate_configuration(x, q, n);
  LocalFieldTable m(n, q);
#pragma omp parallel for schedule(static) if (n >= 512)
  for (int i = 0; i < n; ++i) {
    a.for_each_in_row(i, [&](int j, double v) { m(i, x[static_cast<std::size_t>(j)]) += v; });
  }
  return m;
}

double softmax_row(double beta, std::span<const double> m, std::span<const double> full_field, std::span<double> out) {
  const std::size_t q = m.size();
  double top = -INFINITY;
  for (std::size_t r = 0; r < q; ++r) {
    out[r] = beta * m[r] + full_field[r];
    top = std::max(top, out[r]);
  }
  double total = 0.0;
  for (std::size_t r = 0; r < q; ++r) {
    out[r] = std::exp(out[r] - top);
    total += out[r];
  }
  for (std::size_t r = 0; r < q; ++r) out[r] /= total;
  return top + std::log(total);
}

ConditionalProbTable conditional_probs(const LocalFieldTable& m, const PottsParams& params) {
  params.validate();
  require(m.colors() == params.q, "conditional_probs: table has a different number of colors");
  const auto b = params.full_field();
  ConditionalProbTable t{m.sites(), m.colors(), std::vector<double>(m.values().size())};
  const auto q = static_cast<std::size_t>(t.q);
  for (int i = 0; i < t.n; ++i) {
    softmax_row(params.beta, m.row(i), b, std::span<double>(t.probs.data() + static_cast<std::size_t>(i) * q, q));
  }
  return t;
}

ConditionalProbTable conditional_probs(const CouplingMatrix& a, const Configuration& x, const PottsParams& params) {
  params.validate();
  return conditional_probs(local_fields(a, x, params.q), params);
}

double conditional_prob_floor(const PottsParams& params, double gamma) {
  return std::exp(-std::abs(params.beta) * gamma - 2.0 * params.field_sup_norm()) / params.q;
}

double log_unnormalized_density(const CouplingMatrix& a, const Configuration& x, const PottsParams& params) {
  params.validate();
  validate_configuration(x, params.q, a.size());
  const auto b = params.full_field();
  double same = 0.0;
  double field_term = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const int xi = x[static_cast<std::size_t>(i)];
    a.for_each_in_row(i, [&](int j, double v) {
      if (x[static_cast<std::size_t>(j)] == xi) same += v;
    });
    field_term += b[static_cast<std::size_t>(xi)];
  }
  return 0.5 * params.beta * same + field_term;
}

std::size_t state_index(const Configuration& x, int q) {
  std::size_t idx = 0;
  for (std::size_t k = x.size(); k-- > 0;) idx = idx * static_cast<std::size_t>(q) + static_cast<std::size_t>(x[k]);
  return idx;
}

Configuration state_from_index(std::size_t index, int n, int q) {
  Configuration x(static_cast<std::size_t>(n));
  for (auto& c : x) {
    c = static_cast<int>(index % static_cast<std::size_t>(q));
    index /= static_cast<std::size_t>(q);
  }
  return x;
}

ExactDistribution exact_distribution(const CouplingMatrix& a, const PottsParams& params, std::uint64_t max_states) {
  params.validate();
  const int n = a.size();
  std::uint64_t states = 1;
  for (int i = 0; i < n; ++i) {
    states *= static_cast<std::uint64_t>(params.q);
    require(states <= max_states, "exact_distribution: state space q^N exceeds the limit of " + std::to_string(max_states));
  }

  ExactDistribution d;
  d.n = n;
  d.q = params.q;
  d.probs.resize(static_cast<std::size_t>(states));
  double top = -INFINITY;
  Configuration x(static_cast<std::size_t>(n), 0);
  for (std::size_t s = 0; s < d.probs.size(); ++s) {
    d.probs[s] = log_unnormalized_density(a, x, params);
    top = std::max(top, d.probs[s]);
    // odometer increment, site 0 fastest
    for (auto& c : x) {
      if (++c < params.q) break;
      c = 0;
    }
  }
  double total = 0.0;
  for (double& p : d.probs) {
    p = std::exp(p - top);
    total += p;
  }
  for (double& p : d.probs) p /= total;
  d.log_partition = top + std::log(total);
  return d;
}

}  // namespace potts
