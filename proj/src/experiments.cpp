#include "potts/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "potts/errors.hpp"
#include "potts/format.hpp"

namespace potts {

using nlohmann::json;

std::vector<double> BetaGrid::values() const {
  const auto count = static_cast<long long>(std::llround((hi - lo) / step));
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(count + 1));
  for (long long k = 0; k <= count; ++k) v.push_back(lo + static_cast<double>(k) * step);
  return v;
}

void ExperimentConfig::validate() const {
  require(!n_values.empty(), "config key 'n_values': must be a non-empty list");
  for (int n : n_values) require(n >= 2, "config key 'n_values': every N must be at least 2");
  require(q >= 2, "config key 'q': must be at least 2");
  require(replicates >= 1, "config key 'replicates': must be at least 1");
  require(threads >= 0, "config key 'threads': must be non-negative");
  if (sampler.burn_in) require(*sampler.burn_in >= 1, "config key 'sampler.burn_in': must be at least 1");
  require(sampler.method == "gibbs" || sampler.method == "cw_augmented",
          "config key 'sampler.method': must be 'gibbs' or 'cw_augmented'");
  if (kind == ExperimentKind::figure1) {
    require(!p_values.empty(), "config key 'p_values': must be a non-empty list for figure1");
    for (double p : p_values) require(p > 0.0 && p <= 1.0, "config key 'p_values': entries must lie in (0, 1]");
    require(beta_grid.step > 0.0 && beta_grid.hi >= beta_grid.lo && beta_grid.lo >= 0.0,
            "config key 'beta_grid': need 0 <= lo <= hi and step > 0");
    require(static_cast<int>(m_target.size()) == q, "config key 'm_target': must have q entries");
    validate_simplex_point(m_target, q);
    for (double v : m_target) require(v > 0.0, "config key 'm_target': entries must be positive");
    require(sampler.method == "gibbs", "config key 'sampler.method': figure1 uses Gibbs sampling");
  } else {
    require(field.size() == static_cast<std::size_t>(q - 1), "config key 'field': must have q-1 entries");
    require(std::isfinite(beta), "config key 'beta': must be finite");
    if (sampler.method == "cw_augmented") {
      require(family.name == "curie_weiss", "config key 'sampler.method': cw_augmented requires family 'curie_weiss'");
    }
    static const std::set<std::string> families{"erdos_renyi", "curie_weiss", "cycle", "circulant",
                                                "disjoint_cliques", "complete_bipartite", "sbm"};
    require(families.count(family.name) == 1, "config key 'family.name': unknown family '" + family.name + "'");
    if (family.name == "erdos_renyi") require(!p_values.empty(), "config key 'p_values': erdos_renyi needs p values");
  }
}

const std::vector<std::string>& experiment_config_keys() {
  static const std::vector<std::string> keys{
      "kind",           "n_values",         "p_values",       "q",
      "beta_grid.lo",   "beta_grid.hi",     "beta_grid.step", "m_target",
      "replicates",     "sampler.method",   "sampler.burn_in", "sampler.scan",
      "seed",           "out_path",         "family.name",    "family.offsets",
      "family.fraction", "family.p1",       "family.p2",      "family.q_between",
      "beta",           "field",            "beta_critical_multiple", "threads"};
  return keys;
}

namespace {

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; });
    require(ok, "config key '" + prefix + item.key() + "': unknown key");
  }
}

template <class T>
T get_as(const json& obj, const char* key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config key '" + path + "': wrong type");
  }
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& doc) {
  require(doc.is_object(), "config: top level must be a JSON object");
  reject_unknown(doc, "",
                 {"kind", "n_values", "p_values", "q", "beta_grid", "m_target", "replicates", "sampler", "seed",
                  "out_path", "family", "beta", "field", "beta_critical_multiple", "threads"});
  ExperimentConfig c;
  require(doc.contains("kind"), "config key 'kind': missing");
  const auto kind = get_as<std::string>(doc, "kind", "kind");
  if (kind == "figure1") c.kind = ExperimentKind::figure1;
  else if (kind == "rate") c.kind = ExperimentKind::rate;
  else if (kind == "concentration") c.kind = ExperimentKind::concentration;
  else if (kind == "partial") c.kind = ExperimentKind::partial;
  else throw ValidationError("config key 'kind': must be figure1, rate, concentration or partial");

  require(doc.contains("n_values"), "config key 'n_values': missing");
  c.n_values = get_as<std::vector<int>>(doc, "n_values", "n_values");
  if (doc.contains("p_values")) c.p_values = get_as<std::vector<double>>(doc, "p_values", "p_values");
  if (doc.contains("q")) c.q = get_as<int>(doc, "q", "q");
  if (doc.contains("beta_grid")) {
    const json& g = doc.at("beta_grid");
    require(g.is_object(), "config key 'beta_grid': must be an object");
    reject_unknown(g, "beta_grid.", {"lo", "hi", "step"});
    if (g.contains("lo")) c.beta_grid.lo = get_as<double>(g, "lo", "beta_grid.lo");
    if (g.contains("hi")) c.beta_grid.hi = get_as<double>(g, "hi", "beta_grid.hi");
    if (g.contains("step")) c.beta_grid.step = get_as<double>(g, "step", "beta_grid.step");
  }
  if (doc.contains("m_target")) c.m_target = get_as<std::vector<double>>(doc, "m_target", "m_target");
  if (doc.contains("replicates")) c.replicates = get_as<int>(doc, "replicates", "replicates");
  if (doc.contains("sampler")) {
    const json& s = doc.at("sampler");
    require(s.is_object(), "config key 'sampler': must be an object");
    reject_unknown(s, "sampler.", {"method", "burn_in", "scan"});
    if (s.contains("method")) c.sampler.method = get_as<std::string>(s, "method", "sampler.method");
    if (s.contains("burn_in")) c.sampler.burn_in = get_as<int>(s, "burn_in", "sampler.burn_in");
    if (s.contains("scan")) {
      const auto scan = get_as<std::string>(s, "scan", "sampler.scan");
      require(scan == "systematic" || scan == "random", "config key 'sampler.scan': must be systematic or random");
      c.sampler.scan = scan == "random" ? ScanOrder::random : ScanOrder::systematic;
    }
  }
  if (doc.contains("seed")) c.seed = get_as<std::uint64_t>(doc, "seed", "seed");
  if (doc.contains("out_path")) c.out_path = get_as<std::string>(doc, "out_path", "out_path");
  if (doc.contains("family")) {
    const json& f = doc.at("family");
    require(f.is_object(), "config key 'family': must be an object");
    reject_unknown(f, "family.", {"name", "offsets", "fraction", "p1", "p2", "q_between"});
    if (f.contains("name")) c.family.name = get_as<std::string>(f, "name", "family.name");
    if (f.contains("offsets")) c.family.offsets = get_as<std::vector<int>>(f, "offsets", "family.offsets");
    if (f.contains("fraction")) c.family.fraction = get_as<double>(f, "fraction", "family.fraction");
    if (f.contains("p1")) c.family.p1 = get_as<double>(f, "p1", "family.p1");
    if (f.contains("p2")) c.family.p2 = get_as<double>(f, "p2", "family.p2");
    if (f.contains("q_between")) c.family.q_between = get_as<double>(f, "q_between", "family.q_between");
  }
  if (doc.contains("beta")) c.beta = get_as<double>(doc, "beta", "beta");
  c.field.assign(static_cast<std::size_t>(std::max(c.q - 1, 0)), 0.0);
  if (doc.contains("field")) c.field = get_as<std::vector<double>>(doc, "field", "field");
  if (doc.contains("beta_critical_multiple"))
    c.beta_critical_multiple = get_as<double>(doc, "beta_critical_multiple", "beta_critical_multiple");
  if (doc.contains("threads")) c.threads = get_as<int>(doc, "threads", "threads");
  c.validate();
  return c;
}

std::uint64_t task_seed(std::uint64_t master, int n, double p, double beta, int replicate) {
  return derive_seed(master, {static_cast<std::uint64_t>(n), std::bit_cast<std::uint64_t>(p),
                              std::bit_cast<std::uint64_t>(beta), static_cast<std::uint64_t>(replicate)});
}

CouplingMatrix build_family(const CouplingFamily& family, int n, double p, std::uint64_t seed) {
  const auto split = [&] {
    const int m = static_cast<int>(std::lround(family.fraction * n));
    return std::pair{m, n - m};
  };
  if (family.name == "erdos_renyi") return erdos_renyi(n, p, seed);
  if (family.name == "curie_weiss") return curie_weiss(n);
  if (family.name == "cycle") return cycle_graph(n);
  if (family.name == "circulant") return circulant(n, family.offsets);
  if (family.name == "disjoint_cliques") {
    auto [m, rest] = split();
    return disjoint_cliques(m, rest);
  }
  if (family.name == "complete_bipartite") {
    auto [m, rest] = split();
    return complete_bipartite(m, rest);
  }
  if (family.name == "sbm") return sbm(n, family.fraction, family.p1, family.p2, family.q_between, seed);
  throw ValidationError("unknown coupling family '" + family.name + "'");
}

std::vector<std::string> extra_columns(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::figure1:
    case ExperimentKind::rate: return {"error_l2"};
    case ExperimentKind::concentration: return {"conc_stat", "error_l2"};
    case ExperimentKind::partial: return {"field_status", "beta_error", "field_error"};
  }
  return {};
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Task {
  int grid_index = 0;
  int replicate = 0;
  int n = 0;
  double p = kNaN;
  double beta = 0.0;  // grid value (figure1) or configured beta
};

Configuration draw_configuration(const CouplingMatrix& a, const PottsParams& params, const SamplerConfig& sampler,
                                 std::uint64_t seed) {
  const int n = a.size();
  const int burn_in = sampler.burn_in.value_or(10 * n);
  if (sampler.method == "cw_augmented") {
    CwAugmentedOptions opts;
    opts.iters = 1;
    opts.burn_in = burn_in - 1;
    opts.seed = seed;
    return cw_augmented_sample(params, n, opts).back();
  }
  GibbsChain chain(a, params, seed, sampler.scan);
  for (int s = 0; s < burn_in; ++s) chain.sweep();
  return chain.state();
}

double l2_error(double beta_hat, const ExternalField& field_hat, double beta, const ExternalField& field) {
  double e = (beta_hat - beta) * (beta_hat - beta);
  for (std::size_t r = 0; r < field.size(); ++r) e += (field_hat[r] - field[r]) * (field_hat[r] - field[r]);
  return std::sqrt(e);
}

template <class Fn>
std::vector<ExperimentRow> run_tasks(const ExperimentConfig& config, const std::vector<Task>& tasks, Fn&& fn) {
  std::vector<ExperimentRow> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const auto count = static_cast<long long>(tasks.size());
#ifdef _OPENMP
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
  for (long long k = 0; k < count; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    try {
      rows[idx] = fn(tasks[idx]);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  (void)config;
  return rows;
}

ExperimentRow base_row(const Task& t, std::uint64_t seed, const PottsParams& truth, const MplFit& fit) {
  ExperimentRow row;
  row.grid_index = t.grid_index;
  row.replicate = t.replicate;
  row.n = t.n;
  row.p = t.p;
  row.seed = seed;
  row.beta_true = truth.beta;
  row.field_true = truth.field;
  row.beta_hat = fit.beta_hat;
  row.field_hat = fit.field_hat;
  row.status = fit.status;
  row.t_stat = fit.existence.t_stat;
  row.u_stat = fit.existence.u_stat;
  row.grad_norm = fit.grad_norm;
  row.joint_exists = fit.existence.joint_exists;
  return row;
}

// Grid of (n, family parameter) pairs with replicates, for the non-figure runs.
std::vector<Task> family_tasks(const ExperimentConfig& c) {
  std::vector<double> ps = c.family.name == "erdos_renyi" ? c.p_values : std::vector<double>{kNaN};
  std::vector<Task> tasks;
  int grid = 0;
  for (int n : c.n_values) {
    for (double p : ps) {
      for (int rep = 0; rep < c.replicates; ++rep) tasks.push_back({grid, rep, n, p, c.beta});
      ++grid;
    }
  }
  return tasks;
}

PottsParams truth_for(const ExperimentConfig& c, const CouplingMatrix& a) {
  PottsParams truth{c.beta, c.field, c.q};
  if (c.beta_critical_multiple) truth.beta = *c.beta_critical_multiple * beta_critical(c.q) / stats(a).mean_interaction;
  return truth;
}

}  // namespace

std::vector<ExperimentRow> run_figure1(const ExperimentConfig& config) {
  config.validate();
  require(config.kind == ExperimentKind::figure1, "run_figure1: config kind must be figure1");
  std::vector<Task> tasks;
  int grid = 0;
  const auto betas = config.beta_grid.values();
  for (int n : config.n_values)
    for (double p : config.p_values)
      for (double beta : betas) {
        for (int rep = 0; rep < config.replicates; ++rep) tasks.push_back({grid, rep, n, p, beta});
        ++grid;
      }

  return run_tasks(config, tasks, [&](const Task& t) {
    const std::uint64_t seed = task_seed(config.seed, t.n, t.p, t.beta, t.replicate);
    const CouplingMatrix a = erdos_renyi(t.n, t.p, derive_seed(seed, {0}));
    const PottsParams truth{t.beta, inestimability_line(config.m_target, t.beta), config.q};
    const Configuration x = draw_configuration(a, truth, config.sampler, derive_seed(seed, {1}));
    const MplFit fit = fit_joint(a, x, config.q);
    ExperimentRow row = base_row(t, seed, truth, fit);
    row.extras = {format_double(l2_error(fit.beta_hat, fit.field_hat, truth.beta, truth.field))};
    return row;
  });
}

std::vector<ExperimentRow> run_rate(const ExperimentConfig& config) {
  config.validate();
  require(config.kind == ExperimentKind::rate, "run_rate: config kind must be rate");
  return run_tasks(config, family_tasks(config), [&](const Task& t) {
    const std::uint64_t seed = task_seed(config.seed, t.n, t.p, t.beta, t.replicate);
    const CouplingMatrix a = build_family(config.family, t.n, t.p, derive_seed(seed, {0}));
    const PottsParams truth = truth_for(config, a);
    const Configuration x = draw_configuration(a, truth, config.sampler, derive_seed(seed, {1}));
    const MplFit fit = fit_joint(a, x, config.q);
    ExperimentRow row = base_row(t, seed, truth, fit);
    row.extras = {format_double(l2_error(fit.beta_hat, fit.field_hat, truth.beta, truth.field))};
    return row;
  });
}

std::vector<ExperimentRow> run_concentration(const ExperimentConfig& config) {
  config.validate();
  require(config.kind == ExperimentKind::concentration, "run_concentration: config kind must be concentration");
  return run_tasks(config, family_tasks(config), [&](const Task& t) {
    const std::uint64_t seed = task_seed(config.seed, t.n, t.p, t.beta, t.replicate);
    const CouplingMatrix a = build_family(config.family, t.n, t.p, derive_seed(seed, {0}));
    const PottsParams truth = truth_for(config, a);
    const Configuration x = draw_configuration(a, truth, config.sampler, derive_seed(seed, {1}));

    const ConditionalProbTable theta = conditional_probs(a, x, truth);
    double worst = 0.0;
    for (int r = 0; r < config.q; ++r) {
      double s = 0.0;
      for (int i = 0; i < t.n; ++i) s += (x[static_cast<std::size_t>(i)] == r ? 1.0 : 0.0) - theta(i, r);
      worst = std::max(worst, std::abs(s));
    }
    const MplFit fit = fit_joint(a, x, config.q);
    ExperimentRow row = base_row(t, seed, truth, fit);
    row.extras = {format_double(worst / std::sqrt(static_cast<double>(t.n))),
                  format_double(l2_error(fit.beta_hat, fit.field_hat, truth.beta, truth.field))};
    return row;
  });
}

std::vector<ExperimentRow> run_partial(const ExperimentConfig& config) {
  config.validate();
  require(config.kind == ExperimentKind::partial, "run_partial: config kind must be partial");
  return run_tasks(config, family_tasks(config), [&](const Task& t) {
    const std::uint64_t seed = task_seed(config.seed, t.n, t.p, t.beta, t.replicate);
    const CouplingMatrix a = build_family(config.family, t.n, t.p, derive_seed(seed, {0}));
    const PottsParams truth = truth_for(config, a);
    const Configuration x = draw_configuration(a, truth, config.sampler, derive_seed(seed, {1}));
    const MplFit beta_fit = fit_beta(a, x, config.q, truth.field);
    const MplFit field_fit = fit_field(a, x, config.q, truth.beta);

    MplFit combined = beta_fit;
    combined.field_hat = field_fit.field_hat;
    ExperimentRow row = base_row(t, seed, truth, combined);
    row.extras = {std::string(to_string(field_fit.status)), format_double(std::abs(beta_fit.beta_hat - truth.beta)),
                  format_double(l2_error(truth.beta, field_fit.field_hat, truth.beta, truth.field))};
    return row;
  });
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::figure1: return run_figure1(config);
    case ExperimentKind::rate: return run_rate(config);
    case ExperimentKind::concentration: return run_concentration(config);
    case ExperimentKind::partial: return run_partial(config);
  }
  return {};
}

void write_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<ExperimentRow>& rows) {
  const int k = config.q - 1;
  out << "n,p,seed,replicate,beta_true";
  for (int r = 1; r <= k; ++r) out << ",B" << r;
  out << ",beta_hat";
  for (int r = 1; r <= k; ++r) out << ",B" << r << "_hat";
  out << ",status,t_stat,u_stat,grad_norm,joint_exists";
  for (const auto& name : extra_columns(config.kind)) out << ',' << name;
  out << '\n';

  std::vector<const ExperimentRow*> order;
  for (const auto& r : rows) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const ExperimentRow* a, const ExperimentRow* b) {
    return a->grid_index != b->grid_index ? a->grid_index < b->grid_index : a->replicate < b->replicate;
  });
  for (const ExperimentRow* r : order) {
    out << r->n << ',' << format_double(r->p) << ',' << r->seed << ',' << r->replicate << ','
        << format_double(r->beta_true);
    for (double b : r->field_true) out << ',' << format_double(b);
    out << ',' << format_double(r->beta_hat);
    for (double b : r->field_hat) out << ',' << format_double(b);
    out << ',' << to_string(r->status) << ',' << format_double(r->t_stat) << ',' << format_double(r->u_stat) << ','
        << format_double(r->grad_norm) << ',' << (r->joint_exists ? "true" : "false");
    for (const auto& e : r->extras) out << ',' << e;
    out << '\n';
  }
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::vector<RateSummary> summarize_rate(const ExperimentConfig& config, const std::vector<ExperimentRow>& rows) {
  std::vector<RateSummary> out;
  for (int n : config.n_values) {
    std::vector<double> errors;
    for (const auto& r : rows) {
      if (r.n != n) continue;
      double e = 0.0;
      if (config.kind == ExperimentKind::partial) {
        const double be = std::stod(r.extras.at(1));
        const double fe = std::stod(r.extras.at(2));
        e = std::hypot(be, fe);
      } else {
        const auto cols = extra_columns(config.kind);
        const auto it = std::find(cols.begin(), cols.end(), "error_l2");
        e = std::stod(r.extras.at(static_cast<std::size_t>(it - cols.begin())));
      }
      errors.push_back(e);
    }
    RateSummary s;
    s.n = n;
    s.rows = static_cast<int>(errors.size());
    s.median_error = median(errors);
    s.median_scaled_error = s.median_error * std::sqrt(static_cast<double>(n));
    out.push_back(s);
  }
  return out;
}

void write_rate_summary(std::ostream& out, const std::vector<RateSummary>& summary) {
  out << "n,rows,median_error,median_sqrt_n_error\n";
  for (const auto& s : summary)
    out << s.n << ',' << s.rows << ',' << format_double(s.median_error) << ',' << format_double(s.median_scaled_error)
        << '\n';
}

std::vector<ExperimentRow> run_and_write(const ExperimentConfig& config) {
  require(!config.out_path.empty(), "config key 'out_path': missing");
  auto rows = run_experiment(config);
  std::ofstream out(config.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + config.out_path + "'");
  write_csv(out, config, rows);
  if (config.kind == ExperimentKind::rate) {
    std::ofstream summary(config.out_path + ".summary.csv", std::ios::binary);
    if (!summary) throw std::runtime_error("cannot open output file '" + config.out_path + ".summary.csv'");
    write_rate_summary(summary, summarize_rate(config, rows));
  }
  return rows;
}

}  // namespace potts
