#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "potts/coupling.hpp"
#include "potts/meanfield.hpp"
#include "potts/mple.hpp"
#include "potts/sampler.hpp"

namespace potts {

enum class ExperimentKind { figure1, rate, concentration, partial };

struct BetaGrid {
  double lo = 0.0;
  double hi = 2.0;
  double step = 0.01;
  /// lo + k * step for k = 0 .. round((hi - lo) / step).
  std::vector<double> values() const;
};

/// Interaction structure for the rate/concentration/partial runs. figure1
/// always uses Erdos-Renyi graphs over p_values.
struct CouplingFamily {
  std::string name = "erdos_renyi";  // erdos_renyi | curie_weiss | cycle | circulant | disjoint_cliques | complete_bipartite | sbm
  std::vector<int> offsets{1, 2};    // circulant
  double fraction = 0.7;             // disjoint_cliques, complete_bipartite, sbm block share
  double p1 = 0.5, p2 = 0.5, q_between = 0.1;  // sbm
};

struct SamplerConfig {
  std::string method = "gibbs";  // gibbs | cw_augmented
  std::optional<int> burn_in;    // default 10 N
  ScanOrder scan = ScanOrder::systematic;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::figure1;
  std::vector<int> n_values;
  std::vector<double> p_values;
  int q = 3;
  BetaGrid beta_grid;
  SimplexPoint m_target{0.2, 0.5, 0.3};
  int replicates = 1;
  SamplerConfig sampler;
  std::uint64_t seed = 0;
  std::string out_path;
  CouplingFamily family;
  double beta = 0.8;
  ExternalField field;
  std::optional<double> beta_critical_multiple;  // beta = c * beta_c(q) / mean interaction
  int threads = 0;                               // 0: OpenMP default

  void validate() const;
};

/// Every key accepted in an experiment config file, in documentation order.
const std::vector<std::string>& experiment_config_keys();

/// Strict parse: unknown keys and wrong types raise ValidationError naming the key.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);

struct ExperimentRow {
  int grid_index = 0;
  int replicate = 0;
  int n = 0;
  double p = 0.0;
  std::uint64_t seed = 0;
  double beta_true = 0.0;
  ExternalField field_true;
  double beta_hat = 0.0;
  ExternalField field_hat;
  FitStatus status = FitStatus::max_iters;
  double t_stat = 0.0;
  double u_stat = 0.0;
  double grad_norm = 0.0;
  bool joint_exists = false;
  std::vector<std::string> extras;  // kind-specific trailing columns
};

/// Names of the kind-specific trailing columns.
std::vector<std::string> extra_columns(ExperimentKind kind);

std::vector<ExperimentRow> run_figure1(const ExperimentConfig& config);
std::vector<ExperimentRow> run_rate(const ExperimentConfig& config);
std::vector<ExperimentRow> run_concentration(const ExperimentConfig& config);
std::vector<ExperimentRow> run_partial(const ExperimentConfig& config);
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config);

void write_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<ExperimentRow>& rows);

struct RateSummary {
  int n = 0;
  int rows = 0;
  double median_error = 0.0;
  double median_scaled_error = 0.0;  // median of sqrt(N) * error
};

/// Per-N medians of the error_l2 column (figure1/rate) or of the combined
/// partial-fit error (partial).
std::vector<RateSummary> summarize_rate(const ExperimentConfig& config, const std::vector<ExperimentRow>& rows);
void write_rate_summary(std::ostream& out, const std::vector<RateSummary>& summary);

/// Runs the configured experiment and writes config.out_path (plus
/// "<out_path>.summary.csv" for rate runs).
std::vector<ExperimentRow> run_and_write(const ExperimentConfig& config);

/// Coupling of the configured family at size n (p is used by Erdos-Renyi).
CouplingMatrix build_family(const CouplingFamily& family, int n, double p, std::uint64_t seed);

/// Seed of one (grid point, replicate) task. Depends on the grid point's
/// values rather than its position.
std::uint64_t task_seed(std::uint64_t master, int n, double p, double beta, int replicate);

}  // namespace potts
