#include "potts/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "potts/errors.hpp"

namespace potts {

using nlohmann::json;

void write_configurations(std::ostream& out, const std::vector<Configuration>& xs) {
  for (const auto& x : xs) {
    for (std::size_t i = 0; i < x.size(); ++i) out << (i ? " " : "") << x[i] + 1;
    out << '\n';
  }
}

std::vector<Configuration> read_configurations(std::istream& in, int q) {
  require(q >= 2, "read_configurations: q must be at least 2");
  std::vector<Configuration> xs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    Configuration x;
    std::string tok;
    while (fields >> tok) {
      int c = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), c);
      require(ec == std::errc() && ptr == tok.data() + tok.size(),
              "configuration line " + std::to_string(lineno) + ": '" + tok + "' is not an integer");
      require(c >= 1 && c <= q, "configuration line " + std::to_string(lineno) + ": color " + tok + " outside 1.." +
                                    std::to_string(q));
      x.push_back(c - 1);
    }
    require(xs.empty() || x.size() == xs.front().size(),
            "configuration line " + std::to_string(lineno) + ": length differs from the first line");
    xs.push_back(std::move(x));
  }
  return xs;
}

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double e : v) a.push_back(num(e));
  return a;
}

}  // namespace

json to_json(const ExistenceReport& r) {
  json j{{"in_lambda", r.in_lambda},
         {"in_omega", r.in_omega},
         {"in_a2", r.in_a2},
         {"in_a3", r.in_a3},
         {"in_a4", r.in_a4},
         {"t_stat", num(r.t_stat)},
         {"u_stat", num(r.u_stat)},
         {"joint_exists", r.joint_exists},
         {"partial_beta_exists", r.partial_beta_exists},
         {"partial_b_exists", r.partial_b_exists}};
  if (r.witness) {
    const auto& w = *r.witness;
    // 1-based colors and sites, as in files.
    j["witness"] = {{"r", w.r + 1}, {"s", w.s + 1}, {"i", w.i + 1}, {"j", w.j + 1}, {"k", w.k + 1}, {"l", w.l + 1}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

json to_json(const MplFit& fit) {
  json j{{"beta_hat", num(fit.beta_hat)},
         {"field_hat", nums(fit.field_hat)},
         {"status", std::string(to_string(fit.status))},
         {"grad_norm", num(fit.grad_norm)},
         {"value", num(fit.value)},
         {"iters", fit.iters},
         {"beta_nonpositive", fit.beta_nonpositive},
         {"joint_exists", fit.existence.joint_exists},
         {"existence", to_json(fit.existence)}};
  if (!fit.trace.empty()) {
    json t = json::array();
    for (const auto& p : fit.trace) t.push_back({{"iterate", nums(p.iterate)}, {"value", num(p.value)}});
    j["trace"] = std::move(t);
  }
  return j;
}

json to_json(const MeanFieldSolution& sol, bool include_runs) {
  json optima = json::array();
  for (const auto& p : sol.all_optima) optima.push_back(nums(p));
  json j{{"maximizer", nums(sol.maximizer)},
         {"value", num(sol.value)},
         {"all_optima", std::move(optima)},
         {"unique", sol.unique},
         {"tangent_hessian_negdef", sol.tangent_hessian_negdef}};
  if (include_runs) {
    json runs = json::array();
    for (const auto& r : sol.runs)
      runs.push_back({{"start", nums(r.start)},
                      {"point", nums(r.point)},
                      {"value", num(r.value)},
                      {"iters", r.iters},
                      {"converged", r.converged}});
    j["runs"] = std::move(runs);
  }
  return j;
}

json to_json(const CouplingStats& s) {
  return {{"gamma", num(s.gamma)},
          {"mean_interaction", num(s.mean_interaction)},
          {"non_mean_field", num(s.non_mean_field)},
          {"irregularity", num(s.irregularity)},
          {"r_bar", num(s.r_bar)}};
}

}  // namespace potts
