#include "sigfilter/power_dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sigfilter/power.hpp"
#include "sigfilter/rng.hpp"

namespace sigfilter {

namespace {

constexpr std::int64_t kBlockSize = 4096;

PowerDistribution finish_distribution(int n, const TestSpec& spec,
                                      std::vector<double> samples) {
  PowerDistribution pd;
  pd.sample_size = n;
  pd.alpha = spec.alpha;
  pd.power_samples = std::move(samples);
  double sum = 0.0;
  for (double p : pd.power_samples) sum += p;
  pd.mean_power = sum / static_cast<double>(pd.power_samples.size());
  std::vector<double> sorted = pd.power_samples;
  std::sort(sorted.begin(), sorted.end());
  pd.q2_5 = quantile_linear(sorted, 0.025);
  pd.q50 = quantile_linear(sorted, 0.5);
  pd.q97_5 = quantile_linear(sorted, 0.975);
  pd.hist = make_histogram(pd.power_samples, 0.0, 1.0, 50);
  return pd;
}

template <class EffectDraw, class PrecisionDraw>
PowerDistribution run_power_mc(EffectDraw&& draw_effect, PrecisionDraw&& draw_precision, int n,
                               std::int64_t draws, const TestSpec& spec, std::uint64_t seed,
                               ExecPolicy policy) {
  spec.validate();
  if (spec.family == TestFamily::z)
    throw std::domain_error("sample_power_distribution: requires a t family");
  if (n < 2) throw std::domain_error("sample_power_distribution: n must be >= 2");
  if (draws < 1) throw std::domain_error("sample_power_distribution: draws must be >= 1");

  std::vector<double> samples(draws);
  for_each_block(draws, kBlockSize, policy,
                 [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
                   RngStream rng = RngStream::derive(seed, "power-mc", b);
                   for (std::int64_t k = begin; k < end; ++k) {
                     const double effect = draw_effect(rng);
                     const double precision = draw_precision(rng);
                     const double sd = 1.0 / std::sqrt(precision);
                     EffectScenario sc{spec.mu0 + std::fabs(effect), sd, n};
                     samples[k] = exact_t_power(sc, spec);
                   }
                 });
  return finish_distribution(n, spec, std::move(samples));
}

}  // namespace

double GammaSpec::sd() const { return std::sqrt(variance()); }

GammaSpec gamma_from_moments(double mean, double sd) {
  if (!(mean > 0.0) || !(sd > 0.0))
    throw std::domain_error("gamma_from_moments: mean and sd must be positive");
  const double rate = mean / (sd * sd);
  return GammaSpec{mean * rate, rate};
}

PowerDistribution sample_power_distribution(double effect_mean, double effect_sd,
                                            const GammaSpec& precision_model, int n,
                                            std::int64_t draws, const TestSpec& spec,
                                            std::uint64_t seed, ExecPolicy policy,
                                            std::optional<double> fixed_precision) {
  if (!std::isfinite(effect_mean) || !(effect_sd >= 0.0))
    throw std::domain_error("sample_power_distribution: bad effect summary");
  if (!fixed_precision && (!(precision_model.shape > 0.0) || !(precision_model.rate > 0.0)))
    throw std::domain_error("sample_power_distribution: bad gamma spec");
  if (fixed_precision && !(*fixed_precision > 0.0))
    throw std::domain_error("sample_power_distribution: fixed precision must be positive");

  auto draw_effect = [=](RngStream& rng) { return effect_mean + effect_sd * rng.normal(); };
  auto draw_precision = [=, &precision_model](RngStream& rng) {
    return fixed_precision ? *fixed_precision
                           : rng.gamma(precision_model.shape, precision_model.rate);
  };
  return run_power_mc(draw_effect, draw_precision, n, draws, spec, seed, policy);
}

PowerDistribution sample_power_distribution_from_pool(std::span<const double> effect_pool,
                                                      const GammaSpec& precision_model, int n,
                                                      std::int64_t draws, const TestSpec& spec,
                                                      std::uint64_t seed, ExecPolicy policy) {
  if (effect_pool.empty())
    throw std::domain_error("sample_power_distribution_from_pool: empty pool");
  if (!(precision_model.shape > 0.0) || !(precision_model.rate > 0.0))
    throw std::domain_error("sample_power_distribution_from_pool: bad gamma spec");

  auto draw_effect = [effect_pool](RngStream& rng) {
    return effect_pool[static_cast<std::size_t>(rng.next_u64() % effect_pool.size())];
  };
  auto draw_precision = [&precision_model](RngStream& rng) {
    return rng.gamma(precision_model.shape, precision_model.rate);
  };
  return run_power_mc(draw_effect, draw_precision, n, draws, spec, seed, policy);
}

PiiDistribution pii_distribution(double study_power, const PowerDistribution& power_dist,
                                 std::string study_id) {
  if (!(study_power > 0.0 && study_power <= 1.0))
    throw std::domain_error("pii_distribution: study_power must be in (0,1]");
  if (power_dist.power_samples.empty())
    throw std::domain_error("pii_distribution: empty power distribution");

  PiiDistribution pii;
  pii.study_id = std::move(study_id);
  pii.sample_size = power_dist.sample_size;
  pii.study_power = study_power;
  pii.ratio_samples.reserve(power_dist.power_samples.size());
  for (double p : power_dist.power_samples) {
    if (p <= 1e-12) {
      ++pii.n_excluded;
      continue;
    }
    pii.ratio_samples.push_back(study_power / p);
  }
  if (pii.ratio_samples.empty())
    throw std::domain_error("pii_distribution: all power samples excluded");
  std::vector<double> sorted = pii.ratio_samples;
  std::sort(sorted.begin(), sorted.end());
  pii.ci_2_5 = quantile_linear(sorted, 0.025);
  pii.ci_97_5 = quantile_linear(sorted, 0.975);
  return pii;
}

double study_power_estimate(const StudySummary& study, const TestSpec& spec) {
  study.validate();
  EffectScenario sc{spec.mu0 + std::fabs(study.effect), study.sd, study.n};
  return exact_t_power(sc, spec);
}

}  // namespace sigfilter
