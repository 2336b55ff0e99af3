// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls the library's kernels; inputs are plain dense matrices.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "potts/coupling.hpp"
#include "potts/rng.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

inline Dense dense(const potts::CouplingMatrix& a) {
  const int n = a.size();
  Dense d(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d[i][j] = a.at(i, j);
  return d;
}

inline Dense local_fields(const Dense& a, const std::vector<int>& x, int q) {
  const std::size_t n = a.size();
  Dense m(n, Vec(static_cast<std::size_t>(q), 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][x[j]] += a[i][j];
  return m;
}

// theta = (beta, B_1 .. B_{q-1}).
inline double pseudo_loglik(const Dense& m, const std::vector<int>& x, const Vec& theta) {
  const std::size_t q = m.empty() ? 0 : m[0].size();
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double z = 0.0;
    for (std::size_t r = 0; r < q; ++r) z += std::exp(theta[0] * m[i][r] + (r + 1 < q ? theta[r + 1] : 0.0));
    const auto xi = static_cast<std::size_t>(x[i]);
    total += theta[0] * m[i][xi] + (xi + 1 < q ? theta[xi + 1] : 0.0) - std::log(z);
  }
  return total;
}

inline Vec central_gradient(const std::function<double(const Vec&)>& f, Vec theta, double h) {
  Vec g(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double t = theta[k];
    theta[k] = t + h;
    const double up = f(theta);
    theta[k] = t - h;
    const double down = f(theta);
    theta[k] = t;
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

// Central differences of a vector-valued gradient.
inline Dense central_jacobian(const std::function<Vec(const Vec&)>& g, Vec theta, double h) {
  Dense jac(theta.size(), Vec(theta.size()));
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double t = theta[k];
    theta[k] = t + h;
    const Vec up = g(theta);
    theta[k] = t - h;
    const Vec down = g(theta);
    theta[k] = t;
    for (std::size_t r = 0; r < theta.size(); ++r) jac[r][k] = (up[r] - down[r]) / (2.0 * h);
  }
  return jac;
}

inline double t_stat(const Dense& m) {
  const std::size_t n = m.size(), q = m[0].size();
  Vec mean(q, 0.0);
  for (const auto& row : m)
    for (std::size_t r = 0; r < q; ++r) mean[r] += row[r] / static_cast<double>(n);
  double t = 0.0;
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t s = r + 1; s < q; ++s) {
      double sq = 0.0;
      for (const auto& row : m) sq += (row[r] - row[s]) * (row[r] - row[s]);
      t += sq / static_cast<double>(n) - (mean[r] - mean[s]) * (mean[r] - mean[s]);
    }
  return t;
}

inline double t_stat_alt(const Dense& m) {
  const std::size_t n = m.size(), q = m[0].size();
  Vec mean(q, 0.0);
  Vec rsum(n, 0.0);
  double rbar = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < q; ++r) {
      mean[r] += m[i][r] / static_cast<double>(n);
      rsum[i] += m[i][r];
    }
  for (double v : rsum) rbar += v / static_cast<double>(n);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < q; ++r) {
      const double d = m[i][r] - mean[r] - (rsum[i] - rbar) / static_cast<double>(q);
      t += d * d;
    }
  return static_cast<double>(q) * t / static_cast<double>(n);
}

inline double u_stat(const Dense& m) {
  const std::size_t q = m[0].size();
  double u = 0.0;
  for (const auto& row : m)
    for (std::size_t r = 0; r < q; ++r)
      for (std::size_t s = r + 1; s < q; ++s) u += (row[r] - row[s]) * (row[r] - row[s]);
  return u / static_cast<double>(m.size());
}

// Exhaustive scan over colour pairs and distinct index quadruples.
inline bool omega_brute_force(const Dense& m, const std::vector<int>& x, int q) {
  const std::size_t n = x.size();
  for (int r = 0; r < q; ++r)
    for (int s = r + 1; s < q; ++s) {
      auto diff = [&](std::size_t u) { return m[u][r] - m[u][s]; };
      auto pair_ok = [&](std::size_t u, std::size_t v) {
        return (x[u] == r && x[v] == s) || (x[u] == s && x[v] == r);
      };
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || !pair_ok(i, j)) continue;
          for (std::size_t k = 0; k < n; ++k) {
            if (k == i || k == j) continue;
            for (std::size_t l = 0; l < n; ++l) {
              if (l == i || l == j || l == k || !pair_ok(k, l)) continue;
              if (std::max(diff(i), diff(j)) < std::min(diff(k), diff(l))) return true;
            }
          }
        }
    }
  return false;
}

// Enumerated pmf of exp((beta/2) sum a_ij 1[x_i = x_j] + sum B_{x_i}); state
// index has site 0 least significant.
inline Vec exact_pmf(const Dense& a, int q, double beta, const Vec& field) {
  const std::size_t n = a.size();
  std::size_t states = 1;
  for (std::size_t i = 0; i < n; ++i) states *= static_cast<std::size_t>(q);
  Vec logw(states);
  std::vector<int> x(n);
  for (std::size_t idx = 0; idx < states; ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<int>(rest % static_cast<std::size_t>(q));
      rest /= static_cast<std::size_t>(q);
    }
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        if (x[i] == x[j]) e += 0.5 * beta * a[i][j];
      if (x[i] + 1 < q) e += field[static_cast<std::size_t>(x[i])];
    }
    logw[idx] = e;
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (double& w : logw) z += (w = std::exp(w - top));
  for (double& w : logw) w /= z;
  return logw;
}

inline double total_variation(const Vec& p, const Vec& q) {
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) d += std::abs(p[k] - q[k]);
  return 0.5 * d;
}

// Coarse-to-fine box search for the maximizer of a concave function: each
// stage scans a (2 * half + 1)^d lattice centred on the previous best point.
// Points outside [lo, hi]^d are skipped.
inline Vec grid_argmax(const std::function<double(const Vec&)>& f, std::size_t dim, double lo, double hi,
                       const std::vector<double>& steps) {
  Vec centre(dim, 0.5 * (lo + hi));
  for (std::size_t stage = 0; stage < steps.size(); ++stage) {
    const double h = steps[stage];
    const long half = stage == 0 ? std::lround(0.5 * (hi - lo) / h) : 20;
    Vec best = centre;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<long> idx(dim, -half);
    Vec point(dim);
    while (true) {
      bool inside = true;
      for (std::size_t k = 0; k < dim; ++k) {
        point[k] = centre[k] + static_cast<double>(idx[k]) * h;
        inside = inside && point[k] >= lo - 1e-12 && point[k] <= hi + 1e-12;
      }
      if (inside) {
        const double v = f(point);
        if (v > best_value) {
          best_value = v;
          best = point;
        }
      }
      std::size_t k = 0;
      while (k < dim && ++idx[k] > half) idx[k++] = -half;
      if (k == dim) break;
    }
    bool on_edge = false;
    for (std::size_t k = 0; k < dim; ++k)
      on_edge = on_edge || std::abs(best[k] - centre[k]) > (static_cast<double>(half) - 0.5) * h;
    centre = best;
    // The window moved to its edge: scan again at the same resolution.
    if (stage > 0 && on_edge) --stage;
  }
  return centre;
}

inline double uniform(potts::Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Random symmetric non-negative coupling with max row sum at most gamma_max.
// Weights are drawn from a small discrete set half of the time so that ties
// in the local fields are common.
inline potts::CouplingMatrix random_coupling(int n, potts::Rng& rng, double gamma_max) {
  const double density = uniform(rng, 0.2, 1.0);
  const bool discrete = rng.bernoulli(0.5);
  std::vector<potts::Triplet> t;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!rng.bernoulli(density)) continue;
      const double w = discrete ? static_cast<double>(1 + rng.uniform_int(2)) : uniform(rng, 0.05, 1.0);
      t.push_back({i, j, w});
    }
  if (t.empty()) t.push_back({0, 1, 1.0});
  std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
  for (const auto& e : t) {
    rows[static_cast<std::size_t>(e.i)] += e.value;
    rows[static_cast<std::size_t>(e.j)] += e.value;
  }
  const double scale = uniform(rng, 0.3, 1.0) * gamma_max / *std::max_element(rows.begin(), rows.end());
  for (auto& e : t) e.value *= scale;
  return potts::CouplingMatrix::from_upper_triplets(n, t);
}

inline std::vector<int> random_configuration(int n, int q, potts::Rng& rng) {
  std::vector<int> x(static_cast<std::size_t>(n));
  for (int& c : x) c = static_cast<int>(rng.uniform_int(q));
  return x;
}

inline Vec random_field(int q, potts::Rng& rng, double bound) {
  Vec b(static_cast<std::size_t>(q - 1));
  for (double& v : b) v = uniform(rng, -bound, bound);
  return b;
}

inline double binomial(int n, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

}  // namespace oracle
