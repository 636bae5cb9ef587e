#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigfilter/parallel.hpp"

namespace sigfilter {

// One published comparison on the log-ms scale. se and sd/n are redundant by
// construction; validate() enforces agreement to 1%.
struct StudySummary {
  std::string study_id;
  double effect = 0.0;   // log ms
  double se = 0.0;       // log ms
  double sd = 0.0;       // log ms
  int n = 0;
  double t_stat = 0.0;
  double p_value = 1.0;

  void validate() const;
};

enum class PriorFamily {
  cauchy,            // Cauchy(0, scale) on locations, half-Cauchy on tau
  normal_test_mode,  // Normal/half-Normal priors, for conjugate validation
};

struct MetaModelSpec {
  double prior_scale_mu = 2.5;
  double prior_scale_tau = 2.5;
  PriorFamily prior_family = PriorFamily::cauchy;
  // The model assigns the per-study means both their Normal(mu, tau^2)
  // likelihood term and a location prior of their own. The flag drops that
  // second factor for sensitivity analysis.
  bool include_study_level_prior = true;
  // Point-mass prior on tau (skips tau updates); used by the conjugate
  // validation path.
  std::optional<double> fixed_tau;

  void validate() const;
};

struct McmcConfig {
  int chains = 4;
  int iterations = 4000;  // per chain, including warmup
  int warmup = 2000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Retained (post-warmup) draws of one chain. study[i] holds the draws of the
// i-th study mean; accept_rate is indexed by update block.
struct ChainDraws {
  std::vector<double> mu;
  std::vector<double> tau;
  std::vector<std::vector<double>> study;
  std::vector<double> accept_rate;
};

struct PosteriorDraws {
  int n_studies = 0;
  int warmup = 0;
  int iterations = 0;
  std::vector<ChainDraws> chains;

  std::vector<double> flat_mu() const;
  std::vector<double> flat_tau() const;
  std::vector<double> flat_study(int index) const;
};

// Log of the unnormalized posterior density of the random-effects model at
// (mu, study_means, tau). Returns -inf for tau <= 0 rather than
// throwing, so samplers can treat boundary proposals as rejections.
double log_posterior(double mu, std::span<const double> study_means, double tau,
                     std::span<const StudySummary> studies, const MetaModelSpec& spec);

// Adaptive Metropolis-within-Gibbs fit: blocks are (mu), (each study mean),
// (log tau with Jacobian), plus a joint translation of all locations and a
// joint rescaling of (deviations, tau) that decouple the location/scale
// funnel. Proposal scales adapt toward acceptance in [0.2, 0.5] during warmup
// and freeze after. Chains run independently (optionally in parallel) with
// streams derived from (seed, chain); results do not depend on worker count.
PosteriorDraws fit_meta(std::span<const StudySummary> studies, const MetaModelSpec& spec,
                        const McmcConfig& mcmc, ExecPolicy policy = ExecPolicy::parallel);

struct ParamSelector {
  enum class Kind { mu, tau, study };
  Kind kind = Kind::mu;
  int index = 0;

  static ParamSelector Mu() { return {Kind::mu, 0}; }
  static ParamSelector Tau() { return {Kind::tau, 0}; }
  static ParamSelector Study(int i) { return {Kind::study, i}; }
};

// Split-chain potential-scale-reduction statistic. Requires at least two
// chains with at least four retained draws each.
double rhat(const PosteriorDraws& draws, const ParamSelector& param);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  int bins = 0;
  std::vector<std::int64_t> counts;

  double bin_width() const { return (hi - lo) / bins; }
};

Histogram make_histogram(std::span<const double> xs, double lo, double hi, int bins);

// Quantile by linear interpolation of order statistics: with sorted x of
// length m, q(p) interpolates between x[floor(h)] and x[floor(h)+1] at
// h = (m-1)p.
double quantile_linear(std::span<const double> sorted_xs, double p);

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double mcse = 0.0;  // batch-means Monte Carlo standard error of the mean
  double q2_5 = 0.0;
  double q50 = 0.0;
  double q97_5 = 0.0;
  Histogram hist;  // 40 equal bins spanning the draw range
};

// Pooled posterior summaries for mu, tau, and each study mean.
std::vector<ParamSummary> summarize(const PosteriorDraws& draws);
ParamSummary summarize_series(std::string name, std::span<const double> xs);

}  // namespace sigfilter
