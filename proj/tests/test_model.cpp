#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "potts/errors.hpp"
#include "potts/model.hpp"
#include "potts/serial_reference.hpp"

using namespace potts;

TEST_CASE("local fields of curie_weiss(4) at x = (1,1,2,2)") {
  const LocalFieldTable m = local_fields(curie_weiss(4), {0, 0, 1, 1}, 2);
  CHECK(m(0, 0) == 0.25);
  CHECK(m(0, 1) == 0.5);
  CHECK(m(2, 0) == 0.5);
  CHECK(m(2, 1) == 0.25);
}

TEST_CASE("zero coupling gives zero fields") {
  const CouplingMatrix a = CouplingMatrix::from_upper_triplets(5, std::vector<Triplet>{});
  const LocalFieldTable m = local_fields(a, {0, 1, 2, 0, 1}, 3);
  for (double v : m.values()) CHECK(v == 0.0);
}

TEST_CASE("local fields agree with the dense oracle and the serial reference") {
  Rng rng(1);
  for (int k = 0; k < 30; ++k) {
    const int n = 2 + rng.uniform_int(60);
    const int q = 2 + rng.uniform_int(4);
    const CouplingMatrix a = oracle::random_coupling(n, rng, 3.0);
    const auto x = oracle::random_configuration(n, q, rng);
    const LocalFieldTable m = local_fields(a, x, q);
    const LocalFieldTable s = serial::local_fields(a, x, q);
    const auto d = oracle::local_fields(oracle::dense(a), x, q);
    const double gamma = stats(a).gamma;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int r = 0; r < q; ++r) {
        CHECK(m(i, r) == doctest::Approx(d[i][r]).epsilon(1e-12));
        CHECK(m(i, r) == doctest::Approx(s(i, r)).epsilon(1e-12));
        CHECK(m(i, r) >= 0.0);
        CHECK(m(i, r) <= gamma + 1e-12);
        row += m(i, r);
      }
      CHECK(row == doctest::Approx(a.row_sum(i)).epsilon(1e-10));
    }
  }
}

TEST_CASE("parallel gather handles large sparse and dense inputs") {
  Rng rng(2);
  for (const CouplingMatrix& a : {erdos_renyi(1500, 0.01, 3), curie_weiss(700)}) {
    const auto x = oracle::random_configuration(a.size(), 3, rng);
    const LocalFieldTable m = local_fields(a, x, 3);
    const LocalFieldTable s = serial::local_fields(a, x, 3);
    double worst = 0.0;
    for (int i = 0; i < a.size(); ++i)
      for (int r = 0; r < 3; ++r) worst = std::max(worst, std::abs(m(i, r) - s(i, r)));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("incremental recolor equals full recomputation") {
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const int n = 3 + rng.uniform_int(30);
    const int q = 2 + rng.uniform_int(3);
    const CouplingMatrix a = oracle::random_coupling(n, rng, 2.0);
    auto x = oracle::random_configuration(n, q, rng);
    LocalFieldTable m = local_fields(a, x, q);
    for (int step = 0; step < 50; ++step) {
      const int i = rng.uniform_int(n);
      const int to = rng.uniform_int(q);
      m.recolor(a, i, x[static_cast<std::size_t>(i)], to);
      x[static_cast<std::size_t>(i)] = to;
    }
    const LocalFieldTable fresh = local_fields(a, x, q);
    for (int i = 0; i < n; ++i)
      for (int r = 0; r < q; ++r) CHECK(m(i, r) == doctest::Approx(fresh(i, r)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("conditional probabilities: closed forms and the alpha floor") {
  const CouplingMatrix a = curie_weiss(5);
  const Configuration x{0, 1, 2, 0, 1};
  const ConditionalProbTable u = conditional_probs(a, x, {0.0, {0.0, 0.0}, 3});
  for (double p : u.probs) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const ConditionalProbTable t = conditional_probs(a, x, {0.0, {std::log(2.0 / 3.0), std::log(5.0 / 3.0)}, 3});
  for (int i = 0; i < 5; ++i) {
    CHECK(t(i, 0) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(t(i, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t(i, 2) == doctest::Approx(0.3).epsilon(1e-14));
  }

  Rng rng(4);
  for (int k = 0; k < 50; ++k) {
    const int n = 3 + rng.uniform_int(30);
    const int q = 2 + rng.uniform_int(4);
    const CouplingMatrix b = oracle::random_coupling(n, rng, 3.0);
    const auto y = oracle::random_configuration(n, q, rng);
    const PottsParams p{oracle::uniform(rng, -1.0, 3.0), oracle::random_field(q, rng, 2.0), q};
    const ConditionalProbTable c = conditional_probs(b, y, p);
    const double floor = conditional_prob_floor(p, stats(b).gamma);
    CHECK(floor == doctest::Approx(std::exp(-std::abs(p.beta) * stats(b).gamma - 2.0 * p.field_sup_norm()) / q));
    const auto d = oracle::local_fields(oracle::dense(b), y, q);
    for (int i = 0; i < n; ++i) {
      double row = 0.0, z = 0.0;
      for (int r = 0; r < q; ++r) z += std::exp(p.beta * d[i][r] + (r + 1 < q ? p.field[r] : 0.0));
      for (int r = 0; r < q; ++r) {
        row += c(i, r);
        CHECK(c(i, r) >= floor * (1 - 1e-12));
        CHECK(c(i, r) == doctest::Approx(std::exp(p.beta * d[i][r] + (r + 1 < q ? p.field[r] : 0.0)) / z).epsilon(1e-12));
      }
      CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("softmax is stable for large arguments") {
  std::vector<double> out(3);
  const std::vector<double> m{1000.0, 1001.0, 0.0}, b{0.0, 0.0, 0.0};
  const double lse = softmax_row(1.0, m, b, out);
  CHECK(std::isfinite(lse));
  CHECK(out[1] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK(out[2] == doctest::Approx(0.0));
}

TEST_CASE("log unnormalized density examples") {
  const CouplingMatrix zero = CouplingMatrix::from_upper_triplets(3, std::vector<Triplet>{});
  CHECK(log_unnormalized_density(zero, {0, 1, 2}, {2.5, {0.0, 0.0}, 3}) == 0.0);

  const double b = 0.7;
  CHECK(log_unnormalized_density(curie_weiss(2), {0, 0}, {1.0, {b}, 2}) == doctest::Approx(0.5 + 2 * b));

  const CouplingMatrix a = erdos_renyi(8, 0.5, 3);
  const Configuration x{0, 1, 2, 0, 1, 2, 2, 0};
  Configuration relabeled = x;
  for (int& c : relabeled) c = (c + 1) % 3;
  const PottsParams p{1.3, {0.0, 0.0}, 3};
  CHECK(log_unnormalized_density(a, x, p) == doctest::Approx(log_unnormalized_density(a, relabeled, p)));
}

TEST_CASE("exact distribution examples") {
  const ExactDistribution u = exact_distribution(curie_weiss(4), {0.0, {0.0, 0.0}, 3});
  REQUIRE(u.probs.size() == 81);
  for (double p : u.probs) CHECK(p == doctest::Approx(1.0 / 81.0).epsilon(1e-13));
  CHECK(u.log_partition == doctest::Approx(4 * std::log(3.0)));

  const double a = 0.8, beta = 1.3, b = -0.4;
  const CouplingMatrix two = CouplingMatrix::from_upper_triplets(2, std::vector<Triplet>{{0, 1, a}});
  const ExactDistribution e = exact_distribution(two, {beta, {b}, 2});
  // Agreement on either color carries the coupling term.
  const double w11 = std::exp(beta * a + 2 * b), w12 = std::exp(b), w22 = std::exp(beta * a);
  const double z = w11 + 2 * w12 + w22;
  CHECK(e.probs[state_index({0, 0}, 2)] == doctest::Approx(w11 / z).epsilon(1e-14));
  CHECK(e.probs[state_index({0, 1}, 2)] == doctest::Approx(w12 / z).epsilon(1e-14));
  CHECK(e.probs[state_index({1, 0}, 2)] == doctest::Approx(w12 / z).epsilon(1e-14));
  CHECK(e.probs[state_index({1, 1}, 2)] == doctest::Approx(w22 / z).epsilon(1e-14));
  CHECK(e.log_partition == doctest::Approx(std::log(z)).epsilon(1e-14));

  CHECK_THROWS_AS(exact_distribution(curie_weiss(16), {1.0, {0.0, 0.0}, 3}, 1'000'000), ValidationError);
}

TEST_CASE("exact distribution matches the oracle and its conditionals") {
  Rng rng(6);
  for (int k = 0; k < 10; ++k) {
    const int n = 2 + rng.uniform_int(5);
    const int q = 2 + rng.uniform_int(2);
    const CouplingMatrix a = oracle::random_coupling(n, rng, 2.0);
    const PottsParams p{oracle::uniform(rng, 0.0, 2.0), oracle::random_field(q, rng, 1.0), q};
    const ExactDistribution e = exact_distribution(a, p);
    const auto ref = oracle::exact_pmf(oracle::dense(a), q, p.beta, p.field);
    double total = 0.0;
    for (std::size_t s = 0; s < ref.size(); ++s) {
      CHECK(e.probs[s] == doctest::Approx(ref[s]).epsilon(1e-12));
      total += e.probs[s];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

    // P(X_i = r | rest) from the table equals theta_{i,r}.
    const auto x = oracle::random_configuration(n, q, rng);
    const ConditionalProbTable c = conditional_probs(a, x, p);
    for (int i = 0; i < n; ++i) {
      std::vector<double> w(static_cast<std::size_t>(q));
      Configuration y = x;
      double z = 0.0;
      for (int r = 0; r < q; ++r) {
        y[static_cast<std::size_t>(i)] = r;
        z += (w[static_cast<std::size_t>(r)] = e.probs[state_index(y, q)]);
      }
      for (int r = 0; r < q; ++r) CHECK(w[static_cast<std::size_t>(r)] / z == doctest::Approx(c(i, r)).epsilon(1e-10));
    }
  }
}

TEST_CASE("state index round trip") {
  for (std::size_t s = 0; s < 243; ++s) CHECK(state_index(state_from_index(s, 5, 3), 3) == s);
  CHECK(state_index({1, 0, 0}, 3) == 1);
  CHECK(state_index({0, 1, 0}, 3) == 3);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(local_fields(curie_weiss(3), {0, 1}, 2), ValidationError);
  CHECK_THROWS_AS(local_fields(curie_weiss(3), {0, 1, 2}, 2), ValidationError);
  CHECK_THROWS_AS(local_fields(curie_weiss(3), {0, -1, 1}, 2), ValidationError);
  CHECK_THROWS_AS((PottsParams{1.0, {0.0}, 3}.validate()), ValidationError);
  CHECK_THROWS_AS((PottsParams{NAN, {0.0}, 2}.validate()), ValidationError);
  CHECK_THROWS_AS((PottsParams{1.0, {INFINITY}, 2}.validate()), ValidationError);
  CHECK_THROWS_AS((PottsParams{1.0, {}, 1}.validate()), ValidationError);
}
