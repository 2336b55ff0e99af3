#include "potts/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "potts/coupling.hpp"
#include "potts/errors.hpp"
#include "potts/experiments.hpp"
#include "potts/format.hpp"
#include "potts/io.hpp"
#include "potts/meanfield.hpp"
#include "potts/mple.hpp"
#include "potts/sampler.hpp"

namespace potts::cli {

namespace {

using nlohmann::json;

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> v;
  if (text.empty()) return v;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    require(!tok.empty() && ec == std::errc() && ptr == tok.data() + tok.size(),
            flag + ": '" + tok + "' is not a number");
    v.push_back(d);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return v;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  for (double d : parse_list(text, flag)) {
    require(d == static_cast<int>(d), flag + ": entries must be integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

// Writes to `path`, or to `out` when path is empty or "-".
template <class Fn>
void emit(const std::string& path, std::ostream& out, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
  fn(file);
  if (!file) throw std::runtime_error("write to '" + path + "' failed");
}

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int env_threads() {
  const char* v = std::getenv("POTTS_INFER_THREADS");
  if (!v || !*v) return 0;
  int n = 0;
  const std::string s(v);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  require(ec == std::errc() && ptr == s.data() + s.size() && n >= 0,
          "POTTS_INFER_THREADS: must be a non-negative integer");
  return n;
}

std::string config_keys_footer() {
  std::string s = "Config keys:\n";
  for (const auto& k : experiment_config_keys()) s += "  " + k + "\n";
  return s;
}

struct CouplingArgs {
  std::string family, edges, out, offsets = "1,2";
  int n = 0;
  double p = 0.1, fraction = 0.7, p1 = 0.5, p2 = 0.5, q_between = 0.1;
  std::uint64_t seed = 0;
  bool stats = false;
};

struct SampleArgs {
  std::string coupling, field, out, method = "gibbs", scan = "systematic";
  int q = 2, n = 0, count = 1, thin = 1;
  std::optional<int> burn_in;
  double beta = 0.0;
  std::uint64_t seed = 0;
};

struct FitArgs {
  std::string coupling, configs, mode = "joint", field;
  int q = 2, index = 1, max_iters = 200;
  std::optional<double> beta;
  double tol = 1e-8;
  bool trace = false;
};

struct MeanFieldArgs {
  std::string field, m;
  int q = 2, starts = 20;
  std::optional<double> beta;
  std::uint64_t seed = 0;
  bool critical = false, line = false, runs = false;
};

struct ExperimentArgs {
  std::string config, out;
};

void run_coupling(const CouplingArgs& c, std::ostream& out) {
  CouplingMatrix a;
  if (!c.edges.empty()) {
    require(c.family.empty(), "--edges: cannot be combined with --family");
    std::ifstream in = open_in(c.edges);
    std::vector<Edge> edges;
    long long u = 0, v = 0;
    int n = c.n;
    while (in >> u >> v) {
      require(u >= 1 && v >= 1, "--edges: vertices are 1-based");
      edges.push_back({static_cast<int>(u - 1), static_cast<int>(v - 1)});
      if (c.n == 0) n = std::max<int>(n, static_cast<int>(std::max(u, v)));
    }
    require(in.eof(), "--edges: malformed edge list");
    a = scaled_adjacency(edges, n);
  } else {
    require(!c.family.empty(), "--family: required unless --edges is given");
    require(c.n >= 1, "--n: required");
    CouplingFamily fam;
    fam.name = c.family == "complete" ? "curie_weiss" : c.family;
    fam.offsets = parse_int_list(c.offsets, "--offsets");
    fam.fraction = c.fraction;
    fam.p1 = c.p1;
    fam.p2 = c.p2;
    fam.q_between = c.q_between;
    a = c.family == "complete" ? complete_graph(c.n) : build_family(fam, c.n, c.p, c.seed);
  }
  if (c.stats) out << to_json(stats(a)).dump(2) << '\n';
  if (!c.out.empty() || !c.stats) emit(c.out, out, [&](std::ostream& o) { write_coupling(o, a); });
}

void run_sample(const SampleArgs& s, std::ostream& out) {
  PottsParams params{s.beta, parse_list(s.field, "--B"), s.q};
  if (params.field.empty()) params.field.assign(static_cast<std::size_t>(std::max(s.q - 1, 0)), 0.0);
  params.validate();
  require(s.count >= 1, "--count: must be at least 1");
  require(s.thin >= 1, "--thin: must be at least 1");
  std::vector<Configuration> xs;
  if (s.method == "cw_augmented") {
    require(s.n >= 1, "--n: required for cw_augmented");
    CwAugmentedOptions opts;
    opts.iters = s.count * s.thin;
    opts.thin = s.thin;
    opts.burn_in = s.burn_in.value_or(10 * s.n);
    opts.seed = s.seed;
    xs = cw_augmented_sample(params, s.n, opts);
  } else {
    require(!s.coupling.empty(), "--coupling: required for gibbs");
    std::ifstream in = open_in(s.coupling);
    const CouplingMatrix a = read_coupling(in);
    GibbsOptions opts;
    opts.sweeps = s.count * s.thin;
    opts.thin = s.thin;
    opts.burn_in = s.burn_in.value_or(10 * a.size());
    opts.seed = s.seed;
    opts.scan = s.scan == "random" ? ScanOrder::random : ScanOrder::systematic;
    xs = gibbs_sample(a, params, opts);
  }
  emit(s.out, out, [&](std::ostream& o) { write_configurations(o, xs); });
}

void run_fit(const FitArgs& f, std::ostream& out) {
  std::ifstream cin_ = open_in(f.coupling);
  const CouplingMatrix a = read_coupling(cin_);
  std::ifstream xin = open_in(f.configs);
  const auto xs = read_configurations(xin, f.q);
  require(f.index >= 1 && static_cast<std::size_t>(f.index) <= xs.size(),
          "--index: configuration file has " + std::to_string(xs.size()) + " lines");
  const Configuration& x = xs[static_cast<std::size_t>(f.index - 1)];
  FitOptions opts;
  opts.tol_grad_per_site = f.tol;
  opts.max_iters = f.max_iters;
  opts.record_trace = f.trace;
  MplFit fit;
  if (f.mode == "joint") {
    fit = fit_joint(a, x, f.q, opts);
  } else if (f.mode == "beta") {
    ExternalField b = parse_list(f.field, "--B");
    if (b.empty()) b.assign(static_cast<std::size_t>(f.q - 1), 0.0);
    fit = fit_beta(a, x, f.q, b, opts);
  } else {
    require(f.beta.has_value(), "--beta: required for --mode field");
    fit = fit_field(a, x, f.q, *f.beta, opts);
  }
  out << to_json(fit).dump(2) << '\n';
}

void run_meanfield(const MeanFieldArgs& m, std::ostream& out) {
  if (m.critical) {
    out << format_double(beta_critical(m.q)) << '\n';
    return;
  }
  require(m.beta.has_value(), "--beta: required");
  if (m.line) {
    const SimplexPoint point = parse_list(m.m, "--m");
    require(!point.empty(), "--m: required with --line");
    json j{{"m", point}, {"beta", *m.beta}, {"field", inestimability_line(point, *m.beta)}};
    out << j.dump(2) << '\n';
    return;
  }
  PottsParams params{*m.beta, parse_list(m.field, "--B"), m.q};
  if (params.field.empty()) params.field.assign(static_cast<std::size_t>(std::max(m.q - 1, 0)), 0.0);
  MeanFieldOptions opts;
  opts.n_starts = m.starts;
  opts.seed = m.seed;
  out << to_json(maximize_h(params, opts), m.runs).dump(2) << '\n';
}

void run_experiment_cmd(const ExperimentArgs& e, int cli_threads, std::ostream& err, int verbosity) {
  std::ifstream in = open_in(e.config);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ValidationError("config: malformed JSON (" + std::string(ex.what()) + ")");
  }
  ExperimentConfig config = parse_experiment_config(doc);
  if (!e.out.empty()) config.out_path = e.out;
  if (cli_threads > 0) config.threads = cli_threads;
  else if (config.threads == 0) config.threads = env_threads();
  apply_threads(config.threads);
  const auto rows = run_and_write(config);
  if (verbosity > 0) err << "wrote " << rows.size() << " rows to " << config.out_path << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Potts model sampling, pseudo-likelihood inference and mean-field analysis", "potts_infer"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "1.0.0");
  int threads = 0;
  int verbosity = 0;
  app.add_option("--threads", threads, "Worker threads (default: POTTS_INFER_THREADS, else all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("-v,--verbose", verbosity, "Print progress to stderr");

  CouplingArgs ca;
  auto* coupling = app.add_subcommand("coupling", "Build a coupling matrix and write it");
  coupling
      ->add_option("--family", ca.family, "Builder")
      ->check(CLI::IsMember({"erdos_renyi", "curie_weiss", "complete", "cycle", "circulant", "disjoint_cliques",
                             "complete_bipartite", "sbm"}));
  coupling->add_option("--edges", ca.edges, "Edge list file (1-based 'u v' pairs), scaled adjacency")
      ->check(CLI::ExistingFile);
  coupling->add_option("--n", ca.n, "Number of sites");
  coupling->add_option("--p", ca.p, "Edge probability (erdos_renyi)")->capture_default_str();
  coupling->add_option("--offsets", ca.offsets, "Comma-separated offsets (circulant)")->capture_default_str();
  coupling->add_option("--fraction", ca.fraction, "Block share (disjoint_cliques, complete_bipartite, sbm)")->capture_default_str();
  coupling->add_option("--p1", ca.p1, "Within-block probability, block 1 (sbm)")->capture_default_str();
  coupling->add_option("--p2", ca.p2, "Within-block probability, block 2 (sbm)")->capture_default_str();
  coupling->add_option("--q-between", ca.q_between, "Between-block probability (sbm)")->capture_default_str();
  coupling->add_option("--seed", ca.seed, "Seed for random families")->capture_default_str();
  coupling->add_option("--out", ca.out, "Output file (default stdout)");
  coupling->add_flag("--stats", ca.stats, "Print gamma, mean interaction, irregularity as JSON");

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw configurations");
  sample->add_option("--coupling", sa.coupling, "Coupling matrix file (gibbs)")->check(CLI::ExistingFile);
  sample->add_option("--q", sa.q, "Number of colors")->capture_default_str();
  sample->add_option("--beta", sa.beta, "Inverse temperature")->capture_default_str();
  sample->add_option("--B", sa.field, "Comma-separated field B_1..B_{q-1} (default zeros)");
  sample->add_option("--method", sa.method, "Sampler")->capture_default_str()->check(CLI::IsMember({"gibbs", "cw_augmented"}));
  sample->add_option("--n", sa.n, "Number of sites (cw_augmented)");
  sample->add_option("--count", sa.count, "Configurations to keep")->capture_default_str();
  sample->add_option("--burn-in", sa.burn_in, "Discarded sweeps (default 10 N)");
  sample->add_option("--thin", sa.thin, "Sweeps between kept configurations")->capture_default_str();
  sample->add_option("--scan", sa.scan, "Gibbs site order")->capture_default_str()->check(CLI::IsMember({"systematic", "random"}));
  sample->add_option("--seed", sa.seed, "Seed")->capture_default_str();
  sample->add_option("--out", sa.out, "Output file (default stdout)");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Maximum pseudo-likelihood fit of one configuration");
  fit->add_option("--coupling", fa.coupling, "Coupling matrix file")->required()->check(CLI::ExistingFile);
  fit->add_option("--configs", fa.configs, "Configuration file")->required()->check(CLI::ExistingFile);
  fit->add_option("--q", fa.q, "Number of colors")->capture_default_str();
  fit->add_option("--index", fa.index, "1-based line of the configuration file")->capture_default_str();
  fit->add_option("--mode", fa.mode, "joint, beta (field known) or field (beta known)")->capture_default_str()
      ->check(CLI::IsMember({"joint", "beta", "field"}));
  fit->add_option("--beta", fa.beta, "Known beta (--mode field)");
  fit->add_option("--B", fa.field, "Known field (--mode beta), comma-separated");
  fit->add_option("--tol", fa.tol, "Gradient tolerance per site")->capture_default_str();
  fit->add_option("--max-iters", fa.max_iters, "Newton iteration cap")->capture_default_str();
  fit->add_flag("--trace", fa.trace, "Include the iterate trace");

  MeanFieldArgs ma;
  auto* meanfield = app.add_subcommand("meanfield", "Mean-field maximizer, critical beta and inestimability line");
  meanfield->add_option("--q", ma.q, "Number of colors")->capture_default_str();
  meanfield->add_option("--beta", ma.beta, "Inverse temperature");
  meanfield->add_option("--B", ma.field, "Comma-separated field B_1..B_{q-1} (default zeros)");
  meanfield->add_flag("--beta-critical", ma.critical, "Print the critical beta for --q");
  meanfield->add_flag("--line", ma.line, "Print the field on the inestimability line through --m at --beta");
  meanfield->add_option("--m", ma.m, "Comma-separated simplex point (--line)");
  meanfield->add_option("--starts", ma.starts, "Random multistarts")->capture_default_str();
  meanfield->add_option("--seed", ma.seed, "Seed for the multistarts")->capture_default_str();
  meanfield->add_flag("--runs", ma.runs, "Include every fixed-point run");

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "Run an experiment config and write its CSV");
  experiment->add_option("--config", ea.config, "JSON config file")->required()->check(CLI::ExistingFile);
  experiment->add_option("--out", ea.out, "Override out_path");
  experiment->footer(config_keys_footer());

  std::vector<std::string> args;
  for (int k = argc - 1; k >= 1; --k) args.emplace_back(argv[k]);
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    apply_threads(threads > 0 ? threads : env_threads());
    if (*coupling) run_coupling(ca, out);
    else if (*sample) run_sample(sa, out);
    else if (*fit) run_fit(fa, out);
    else if (*meanfield) run_meanfield(ma, out);
    else if (*experiment) run_experiment_cmd(ea, threads, err, verbosity);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace potts::cli
