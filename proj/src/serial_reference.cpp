#include "potts/serial_reference.hpp"

#include <cmath>
#include <vector>

namespace potts::serial {

LocalFieldTable local_fields(const CouplingMatrix& a, const Configuration& x, int q) {
  const int n = a.size();
  validate_configuration(x, q, n);
  LocalFieldTable m(n, q);
  for (int j = 0; j < n; ++j) {
    const int color = x[static_cast<std::size_t>(j)];
    a.for_each_in_row(j, [&](int i, double v) { m(i, color) += v; });
  }
  return m;
}

PseudoLikEval evaluate(const CouplingMatrix& a, const Configuration& x, const PottsParams& params) {
  params.validate();
  const int q = params.q;
  const int n = a.size();
  const LocalFieldTable m = serial::local_fields(a, x, q);
  const auto b = params.full_field();

  PseudoLikEval out;
  out.gradient = Eigen::VectorXd::Zero(q);
  out.hessian = Eigen::MatrixXd::Zero(q, q);
  std::vector<double> theta(static_cast<std::size_t>(q));
  for (int i = 0; i < n; ++i) {
    double denom = 0.0;
    for (int r = 0; r < q; ++r) denom += std::exp(params.beta * m(i, r) + b[static_cast<std::size_t>(r)]);
    for (int r = 0; r < q; ++r)
      theta[static_cast<std::size_t>(r)] = std::exp(params.beta * m(i, r) + b[static_cast<std::size_t>(r)]) / denom;
    auto th = [&](int r) { return theta[static_cast<std::size_t>(r)]; };
    const int xi = x[static_cast<std::size_t>(i)];

    out.value += std::log(th(xi));

    double expected = 0.0;
    for (int r = 0; r < q; ++r) expected += m(i, r) * th(r);
    out.gradient(0) += m(i, xi) - expected;
    for (int s = 0; s < q - 1; ++s) out.gradient(s + 1) += (xi == s ? 1.0 : 0.0) - th(s);

    for (int a1 = 0; a1 < q; ++a1)
      for (int b1 = a1 + 1; b1 < q; ++b1) {
        const double d = m(i, a1) - m(i, b1);
        out.hessian(0, 0) -= d * d * th(a1) * th(b1);
      }
    for (int s = 0; s < q - 1; ++s) {
      double cross = 0.0;
      for (int a1 = 0; a1 < q; ++a1) cross += (m(i, s) - m(i, a1)) * th(a1) * th(s);
      out.hessian(0, s + 1) -= cross;
      out.hessian(s + 1, 0) -= cross;
      double diag = 0.0;
      for (int a1 = 0; a1 < q; ++a1)
        if (a1 != s) diag += th(s) * th(a1);
      out.hessian(s + 1, s + 1) -= diag;
      for (int r = 0; r < q - 1; ++r)
        if (r != s) out.hessian(r + 1, s + 1) += th(r) * th(s);
    }
  }
  return out;
}

}  // namespace potts::serial
