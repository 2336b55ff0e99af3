#include "potts/sampler.hpp"

#include <cmath>
#include <utility>

#include "potts/errors.hpp"

namespace potts {

namespace {

int draw_color(std::span<const double> probs, double u) {
  const int q = static_cast<int>(probs.size());
  double acc = 0.0;
  for (int r = 0; r < q - 1; ++r) {
    acc += probs[static_cast<std::size_t>(r)];
    if (u < acc) return r;
  }
  return q - 1;
}

}  // namespace

GibbsChain::GibbsChain(const CouplingMatrix& a, PottsParams params, std::uint64_t seed, ScanOrder scan,
                       std::optional<Configuration> init, int refresh_interval)
    : a_(&a),
      params_(std::move(params)),
      rng_(seed),
      scan_(scan),
      refresh_interval_(refresh_interval),
      probs_(static_cast<std::size_t>(params_.q)) {
  params_.validate();
  full_field_ = params_.full_field();
  const int n = a.size();
  if (init) {
    validate_configuration(*init, params_.q, n);
    x_ = std::move(*init);
  } else {
    x_.resize(static_cast<std::size_t>(n));
    for (auto& c : x_) c = rng_.uniform_int(params_.q);
  }
  m_ = local_fields(a, x_, params_.q);
}

void GibbsChain::update_site(int i) {
  softmax_row(params_.beta, m_.row(i), full_field_, probs_);
  const int next = draw_color(probs_, rng_.uniform());
  int& current = x_[static_cast<std::size_t>(i)];
  if (next != current) {
    m_.recolor(*a_, i, current, next);
    current = next;
  }
}

void GibbsChain::sweep() {
  const int n = a_->size();
  if (scan_ == ScanOrder::systematic) {
    for (int i = 0; i < n; ++i) update_site(i);
  } else {
    for (int k = 0; k < n; ++k) update_site(rng_.uniform_int(n));
  }
  ++sweeps_;
  if (refresh_interval_ > 0 && sweeps_ % refresh_interval_ == 0) m_ = local_fields(*a_, x_, params_.q);
}

std::vector<Configuration> gibbs_sample(const CouplingMatrix& a, const PottsParams& params, const GibbsOptions& opts) {
  require(opts.sweeps >= 0 && opts.burn_in >= 0, "gibbs_sample: sweeps and burn_in must be non-negative");
  require(opts.thin >= 1, "gibbs_sample: thin must be at least 1");
  GibbsChain chain(a, params, opts.seed, opts.scan, opts.init, opts.refresh_interval);
  for (int s = 0; s < opts.burn_in; ++s) chain.sweep();
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(opts.sweeps / opts.thin));
  for (int s = 1; s <= opts.sweeps; ++s) {
    chain.sweep();
    if (s % opts.thin == 0) out.push_back(chain.state());
  }
  return out;
}

std::vector<double> cw_site_probs(const PottsParams& params, const std::vector<double>& z) {
  require(z.size() == static_cast<std::size_t>(params.q), "cw_site_probs: z must have q entries");
  std::vector<double> out(z.size());
  softmax_row(params.beta, z, params.full_field(), out);
  return out;
}

std::vector<Configuration> cw_augmented_sample(const PottsParams& params, int n, const CwAugmentedOptions& opts) {
  params.validate();
  require(n >= 2, "cw_augmented_sample: n must be at least 2");
  require(params.beta > 0.0, "cw_augmented_sample: beta must be positive");
  require(opts.iters >= 0 && opts.burn_in >= 0 && opts.thin >= 1, "cw_augmented_sample: invalid schedule");

  const int q = params.q;
  const auto full_field = params.full_field();
  const double sd = 1.0 / std::sqrt(params.beta * n);
  Rng rng(opts.seed);
  Configuration x(static_cast<std::size_t>(n));
  for (auto& c : x) c = rng.uniform_int(q);

  std::vector<double> counts(static_cast<std::size_t>(q));
  std::vector<double> z(static_cast<std::size_t>(q));
  std::vector<double> probs(static_cast<std::size_t>(q));
  auto step = [&] {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (int c : x) counts[static_cast<std::size_t>(c)] += 1.0;
    for (int r = 0; r < q; ++r) z[static_cast<std::size_t>(r)] = counts[static_cast<std::size_t>(r)] / n + sd * rng.normal();
    softmax_row(params.beta, z, full_field, probs);
    for (auto& c : x) c = draw_color(probs, rng.uniform());
  };

  for (int s = 0; s < opts.burn_in; ++s) step();
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(opts.iters / opts.thin));
  for (int s = 1; s <= opts.iters; ++s) {
    step();
    if (s % opts.thin == 0) out.push_back(x);
  }
  return out;
}

}  // namespace potts
