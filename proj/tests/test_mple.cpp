#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracles.hpp"
#include "potts/mple.hpp"

using namespace potts;

namespace {

Configuration draw_exact(const oracle::Vec& pmf, int n, int q, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t s = 0;
  for (; s + 1 < pmf.size(); ++s) {
    acc += pmf[s];
    if (u < acc) break;
  }
  return state_from_index(s, n, q);
}

bool fitted(const MplFit& f) { return f.status == FitStatus::converged; }

}  // namespace

TEST_CASE("joint fit agrees with a grid search at N = 6") {
  const CouplingMatrix a = erdos_renyi(6, 0.6, 12);
  const auto pmf = oracle::exact_pmf(oracle::dense(a), 2, 0.8, {0.3});
  const oracle::Dense dense = oracle::dense(a);
  Rng rng(40);
  int checked = 0;
  for (int draw = 0; draw < 400 && checked < 8; ++draw) {
    const Configuration x = draw_exact(pmf, 6, 2, rng);
    const MplFit f = fit_joint(a, x, 2);
    if (!f.existence.joint_exists) continue;
    REQUIRE(fitted(f));
    if (std::abs(f.beta_hat) > 4.5 || std::abs(f.field_hat[0]) > 4.5) continue;
    ++checked;
    CHECK(f.grad_norm <= 1e-8 * 6);
    const oracle::Dense m = oracle::local_fields(dense, x, 2);
    const oracle::Vec best = oracle::grid_argmax([&](const oracle::Vec& t) { return oracle::pseudo_loglik(m, x, t); }, 2,
                                                 -5.0, 5.0, {0.1, 0.01, 1e-3});
    CHECK(std::abs(best[0] - f.beta_hat) < 2e-3);
    CHECK(std::abs(best[1] - f.field_hat[0]) < 2e-3);
  }
  CHECK(checked >= 3);
}

TEST_CASE("monochromatic data has no maximizer") {
  const MplFit f = fit_joint(cycle_graph(8), Configuration(8, 1), 2);
  CHECK((f.status == FitStatus::not_exists || f.status == FitStatus::diverged));
  CHECK_FALSE(f.existence.joint_exists);
}

TEST_CASE("Lambda-violating draws never report convergence") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const int q = 3 + rng.uniform_int(2);
    const int n = 6 + rng.uniform_int(30);
    const CouplingMatrix a = oracle::random_coupling(n, rng, 2.0);
    const int missing = rng.uniform_int(q);
    Configuration x(static_cast<std::size_t>(n));
    for (int& c : x) {
      c = rng.uniform_int(q - 1);
      if (c >= missing) ++c;
    }
    const MplFit f = fit_joint(a, x, q);
    CHECK((f.status == FitStatus::not_exists || f.status == FitStatus::diverged));
  }
}

TEST_CASE("independent colors: beta near zero, field near the count ratios") {
  const int n = 3000;
  const CouplingMatrix a = cycle_graph(n);
  Rng rng(42);
  const std::vector<double> w{std::exp(0.3), std::exp(-0.2), 1.0};
  Configuration x(n);
  std::vector<double> counts(3, 0.0);
  for (int& c : x) {
    const double u = rng.uniform() * (w[0] + w[1] + w[2]);
    c = u < w[0] ? 0 : (u < w[0] + w[1] ? 1 : 2);
    counts[static_cast<std::size_t>(c)] += 1.0;
  }
  const MplFit f = fit_joint(a, x, 3);
  REQUIRE(fitted(f));
  CHECK(std::abs(f.beta_hat) < 0.3);
  const MplFit at_zero = fit_field(a, x, 3, 0.0);
  REQUIRE(fitted(at_zero));
  for (int s = 0; s < 2; ++s) {
    CHECK(std::abs(f.field_hat[s] - std::log(counts[s] / counts[2])) < 0.1);
    CHECK(at_zero.field_hat[s] == doctest::Approx(std::log(counts[s] / counts[2])).epsilon(1e-10));
  }
}

TEST_CASE("field fit at beta = 0 is the closed form") {
  const Configuration x{0, 1, 2, 2, 0, 2, 1, 2, 2};
  const MplFit f = fit_field(cycle_graph(9), x, 3, 0.0);
  REQUIRE(fitted(f));
  CHECK(f.field_hat[0] == doctest::Approx(std::log(2.0 / 5.0)).epsilon(1e-10));
  CHECK(f.field_hat[1] == doctest::Approx(std::log(2.0 / 5.0)).epsilon(1e-10));
  const ExternalField closed = closed_form_field(x, 3);
  CHECK(closed[0] == doctest::Approx(std::log(2.0 / 5.0)));

  const MplFit absent = fit_field(cycle_graph(9), {0, 1, 0, 1, 0, 1, 0, 1, 0}, 3, 0.4);
  CHECK(absent.status == FitStatus::not_exists);
  CHECK(absent.existence.in_a4);
}

TEST_CASE("field fit at the joint beta reproduces the joint field") {
  Rng rng(43);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 30 + rng.uniform_int(60);
    const int q = 2 + rng.uniform_int(3);
    const CouplingMatrix a = oracle::random_coupling(n, rng, 2.0);
    const Configuration x = oracle::random_configuration(n, q, rng);
    const MplFit joint = fit_joint(a, x, q);
    if (!fitted(joint)) continue;
    ++checked;
    const MplFit part = fit_field(a, x, q, joint.beta_hat);
    REQUIRE(fitted(part));
    for (int s = 0; s + 1 < q; ++s) CHECK(std::abs(part.field_hat[s] - joint.field_hat[s]) < 1e-8);
  }
  CHECK(checked > 10);
}

TEST_CASE("beta fit existence") {
  const CouplingMatrix zero = CouplingMatrix::from_upper_triplets(4, std::vector<Triplet>{});
  CHECK(fit_beta(zero, {0, 1, 0, 1}, 2, {0.0}).status == FitStatus::not_exists);

  // Both sites see the opposite color only, so the score is negative for all beta.
  const CouplingMatrix two = CouplingMatrix::from_upper_triplets(2, std::vector<Triplet>{{0, 1, 0.5}});
  const MplFit f = fit_beta(two, {0, 1}, 2, {0.0});
  CHECK(f.existence.in_a2);
  CHECK(f.status == FitStatus::not_exists);
}

TEST_CASE("beta fit matches a bisection root of the score") {
  const std::vector<Edge> path{{0, 1}, {1, 2}};
  const CouplingMatrix a = scaled_adjacency(path, 3);
  const Configuration x{0, 0, 1};
  const oracle::Dense m = oracle::local_fields(oracle::dense(a), x, 2);
  const auto score = [&](double beta) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double e0 = std::exp(beta * m[i][0]), e1 = std::exp(beta * m[i][1]);
      s += m[i][static_cast<std::size_t>(x[i])] - (m[i][0] * e0 + m[i][1] * e1) / (e0 + e1);
    }
    return s;
  };
  double lo = -50.0, hi = 50.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (score(mid) > 0 ? lo : hi) = mid;
  }
  const MplFit f = fit_beta(a, x, 2, {0.0});
  REQUIRE(fitted(f));
  CHECK(f.beta_hat == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
}

TEST_CASE("beta fit agrees with a 1-D grid search at N = 6") {
  const CouplingMatrix a = erdos_renyi(6, 0.7, 14);
  const oracle::Vec field{0.2, -0.4};
  const auto pmf = oracle::exact_pmf(oracle::dense(a), 3, 0.9, field);
  Rng rng(44);
  int checked = 0;
  for (int draw = 0; draw < 200 && checked < 10; ++draw) {
    const Configuration x = draw_exact(pmf, 6, 3, rng);
    const MplFit f = fit_beta(a, x, 3, field);
    if (!f.existence.partial_beta_exists) continue;
    REQUIRE(fitted(f));
    if (std::abs(f.beta_hat) > 4.5) continue;
    ++checked;
    const oracle::Dense m = oracle::local_fields(oracle::dense(a), x, 3);
    const oracle::Vec best = oracle::grid_argmax(
        [&](const oracle::Vec& t) { return oracle::pseudo_loglik(m, x, {t[0], field[0], field[1]}); }, 1, -5.0, 5.0,
        {0.1, 0.01, 1e-3, 1e-4});
    CHECK(std::abs(best[0] - f.beta_hat) < 1e-3);
  }
  CHECK(checked >= 5);
}

TEST_CASE("accepted iterates never decrease the objective") {
  Rng rng(45);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 10 + rng.uniform_int(40);
    const int q = 2 + rng.uniform_int(2);
    const CouplingMatrix a = oracle::random_coupling(n, rng, 2.0);
    const Configuration x = oracle::random_configuration(n, q, rng);
    FitOptions o;
    o.record_trace = true;
    const MplFit f = fit_joint(a, x, q, o);
    for (std::size_t k = 1; k < f.trace.size(); ++k) {
      const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f.trace[k - 1].value));
      CHECK(f.trace[k].value >= f.trace[k - 1].value - rounding);
    }
  }
}

TEST_CASE("relabeling colors leaves beta-hat unchanged") {
  Rng rng(46);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 40;
    const CouplingMatrix a = oracle::random_coupling(n, rng, 2.0);
    const Configuration x = oracle::random_configuration(n, 3, rng);
    const MplFit f = fit_joint(a, x, 3);
    if (!fitted(f)) continue;
    ++checked;
    for (const std::vector<int>& perm : {std::vector<int>{1, 0, 2}, std::vector<int>{2, 0, 1}}) {
      Configuration y = x;
      for (int& c : y) c = perm[static_cast<std::size_t>(c)];
      const MplFit g = fit_joint(a, y, 3);
      REQUIRE(fitted(g));
      CHECK(g.beta_hat == doctest::Approx(f.beta_hat).epsilon(1e-8));
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("status names") {
  CHECK(to_string(FitStatus::converged) == "converged");
  CHECK(to_string(FitStatus::diverged) == "diverged");
  CHECK(to_string(FitStatus::max_iters) == "max_iters");
  CHECK(to_string(FitStatus::not_exists) == "not_exists");
}
