#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "potts/coupling.hpp"
#include "potts/model.hpp"
#include "potts/rng.hpp"

namespace potts {

enum class ScanOrder { systematic, random };

struct GibbsOptions {
  int sweeps = 1;   // sweeps after burn-in
  int burn_in = 0;  // sweeps discarded first
  int thin = 1;     // keep every thin-th post-burn-in sweep
  std::uint64_t seed = 0;
  ScanOrder scan = ScanOrder::systematic;
  std::optional<Configuration> init;  // default: i.i.d. uniform colors
  int refresh_interval = 64;          // sweeps between full local-field recomputes
};

/// Single heat-bath chain. Draw order per run: N uniforms for the initial
/// configuration (unless given), then per site update one uniform for the
/// color (random scan draws one extra uniform for the site first).
class GibbsChain {
 public:
  GibbsChain(const CouplingMatrix& a, PottsParams params, std::uint64_t seed, ScanOrder scan = ScanOrder::systematic,
             std::optional<Configuration> init = std::nullopt, int refresh_interval = 64);

  void sweep();
  void update_site(int i);

  const Configuration& state() const { return x_; }
  const LocalFieldTable& fields() const { return m_; }
  long long sweeps_done() const { return sweeps_; }

 private:
  const CouplingMatrix* a_;
  PottsParams params_;
  std::vector<double> full_field_;
  Rng rng_;
  ScanOrder scan_;
  int refresh_interval_;
  Configuration x_;
  LocalFieldTable m_;
  std::vector<double> probs_;
  long long sweeps_ = 0;
};

std::vector<Configuration> gibbs_sample(const CouplingMatrix& a, const PottsParams& params, const GibbsOptions& opts);

struct CwAugmentedOptions {
  int iters = 1;
  int burn_in = 0;
  int thin = 1;
  std::uint64_t seed = 0;
};

/// P(X_i = r | Z) = softmax(beta Z + B)_r for the Curie-Weiss model.
std::vector<double> cw_site_probs(const PottsParams& params, const std::vector<double>& z);

/// Data-augmentation sampler for the Curie-Weiss coupling a_ij = 1/n.
/// Each iteration draws Z_r ~ N(mean of 1[X_i = r], 1/(beta n)) for r = 1..q
/// (two uniforms each), then redraws every X_i independently from
/// cw_site_probs (one uniform per site). Starts from i.i.d. uniform colors.
std::vector<Configuration> cw_augmented_sample(const PottsParams& params, int n, const CwAugmentedOptions& opts);

}  // namespace potts
