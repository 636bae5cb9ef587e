#include "sigfilter/meta_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sigfilter/rng.hpp"

namespace sigfilter {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2 pi)
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -kLogSqrt2Pi - std::log(sd) - 0.5 * z * z;
}

double log_cauchy_pdf(double x, double scale) {
  const double r = x / scale;
  return -std::log(M_PI * scale * (1.0 + r * r));
}

double log_half_cauchy_pdf(double x, double scale) {
  return M_LN2 + log_cauchy_pdf(x, scale);
}

double log_half_normal_pdf(double x, double sd) {
  return M_LN2 + log_normal_pdf(x, 0.0, sd);
}

double location_prior(double x, const MetaModelSpec& spec) {
  return spec.prior_family == PriorFamily::cauchy ? log_cauchy_pdf(x, spec.prior_scale_mu)
                                                  : log_normal_pdf(x, 0.0, spec.prior_scale_mu);
}

double tau_prior(double tau, const MetaModelSpec& spec) {
  if (spec.fixed_tau) return 0.0;  // point mass: constant factor
  return spec.prior_family == PriorFamily::cauchy
             ? log_half_cauchy_pdf(tau, spec.prior_scale_tau)
             : log_half_normal_pdf(tau, spec.prior_scale_tau);
}

struct SamplerState {
  double mu = 0.0;
  std::vector<double> study;
  double log_tau = 0.0;

  double tau() const { return std::exp(log_tau); }
};

// Full log posterior with the tau Jacobian excluded; block updates below use
// targeted differences instead of re-evaluating this, but it anchors the
// running value.
double full_log_post(const SamplerState& s, std::span<const StudySummary> studies,
                     const MetaModelSpec& spec) {
  return log_posterior(s.mu, s.study, s.tau(), studies, spec);
}

}  // namespace

void StudySummary::validate() const {
  if (study_id.empty()) throw std::domain_error("StudySummary: empty study_id");
  if (!(se > 0.0) || !std::isfinite(se))
    throw std::domain_error("StudySummary '" + study_id + "': se must be positive");
  if (!(sd > 0.0) || !std::isfinite(sd))
    throw std::domain_error("StudySummary '" + study_id + "': sd must be positive");
  if (n < 1) throw std::domain_error("StudySummary '" + study_id + "': n must be positive");
  if (!std::isfinite(effect))
    throw std::domain_error("StudySummary '" + study_id + "': effect must be finite");
  if (!(p_value >= 0.0 && p_value <= 1.0))
    throw std::domain_error("StudySummary '" + study_id + "': p_value must be in [0,1]");
  const double se_implied = sd / std::sqrt(static_cast<double>(n));
  if (std::fabs(se - se_implied) > 0.01 * se_implied)
    throw std::domain_error("StudySummary '" + study_id + "': se inconsistent with sd/sqrt(n)");
  if (t_stat != 0.0) {
    const double t_implied = effect / se;
    if (std::fabs(t_stat - t_implied) > 0.01 * std::fabs(t_implied))
      throw std::domain_error("StudySummary '" + study_id + "': t inconsistent with effect/se");
  }
}

void MetaModelSpec::validate() const {
  if (!(prior_scale_mu > 0.0) || !(prior_scale_tau > 0.0))
    throw std::domain_error("MetaModelSpec: prior scales must be positive");
  if (fixed_tau && !(*fixed_tau > 0.0))
    throw std::domain_error("MetaModelSpec: fixed_tau must be positive");
}

void McmcConfig::validate() const {
  if (chains < 1) throw std::domain_error("McmcConfig: chains must be >= 1");
  if (iterations < 1) throw std::domain_error("McmcConfig: iterations must be >= 1");
  if (warmup < 0 || warmup >= iterations)
    throw std::domain_error("McmcConfig: warmup must be in [0, iterations)");
}

double log_posterior(double mu, std::span<const double> study_means, double tau,
                     std::span<const StudySummary> studies, const MetaModelSpec& spec) {
  spec.validate();
  if (study_means.size() != studies.size())
    throw std::domain_error("log_posterior: study_means/studies length mismatch");
  if (!(tau > 0.0) || !std::isfinite(tau)) return kNegInf;

  double lp = location_prior(mu, spec) + tau_prior(tau, spec);
  for (std::size_t i = 0; i < studies.size(); ++i) {
    lp += log_normal_pdf(studies[i].effect, study_means[i], studies[i].se);
    lp += log_normal_pdf(study_means[i], mu, tau);
    if (spec.include_study_level_prior) lp += location_prior(study_means[i], spec);
  }
  return lp;
}

std::vector<double> PosteriorDraws::flat_mu() const {
  std::vector<double> out;
  for (const ChainDraws& c : chains) out.insert(out.end(), c.mu.begin(), c.mu.end());
  return out;
}

std::vector<double> PosteriorDraws::flat_tau() const {
  std::vector<double> out;
  for (const ChainDraws& c : chains) out.insert(out.end(), c.tau.begin(), c.tau.end());
  return out;
}

std::vector<double> PosteriorDraws::flat_study(int index) const {
  std::vector<double> out;
  for (const ChainDraws& c : chains)
    out.insert(out.end(), c.study[index].begin(), c.study[index].end());
  return out;
}

PosteriorDraws fit_meta(std::span<const StudySummary> studies, const MetaModelSpec& spec,
                        const McmcConfig& mcmc, ExecPolicy policy) {
  spec.validate();
  mcmc.validate();
  if (studies.size() < 2) throw std::domain_error("fit_meta: need at least 2 studies");
  for (const StudySummary& s : studies) {
    if (!(s.se > 0.0)) throw std::domain_error("fit_meta: non-positive se");
  }

  const int n_studies = static_cast<int>(studies.size());
  const bool sample_tau = !spec.fixed_tau.has_value();
  // Blocks: 0 = mu, 1..n = study means, n+1 = log tau, n+2 = translation,
  // n+3 = group scale. The last three are skipped under a fixed tau except
  // the translation.
  const int n_blocks = n_studies + 4;
  constexpr int kAdaptBatch = 25;
  // tau and the group scale mix slowest; visiting them more often per sweep
  // shortens their autocorrelation time.
  constexpr int kTauVisits = 2;
  const int retained = mcmc.iterations - mcmc.warmup;

  // Precision-weighted start; per-chain jitter overdisperses the starts.
  double pooled_num = 0.0, pooled_den = 0.0;
  for (const StudySummary& s : studies) {
    const double w = 1.0 / (s.se * s.se);
    pooled_num += w * s.effect;
    pooled_den += w;
  }
  const double pooled_mean = pooled_num / pooled_den;

  PosteriorDraws draws;
  draws.n_studies = n_studies;
  draws.warmup = mcmc.warmup;
  draws.iterations = mcmc.iterations;
  draws.chains.resize(mcmc.chains);

  for_each_block(mcmc.chains, 1, policy, [&](std::int64_t chain, std::int64_t, std::int64_t) {
    RngStream rng = RngStream::derive(mcmc.seed, "meta-chain", static_cast<std::uint64_t>(chain));

    SamplerState st;
    st.mu = pooled_mean + 0.02 * rng.normal();
    st.study.resize(n_studies);
    for (int i = 0; i < n_studies; ++i) st.study[i] = studies[i].effect + 0.01 * rng.normal();
    st.log_tau = spec.fixed_tau ? std::log(*spec.fixed_tau) : std::log(0.01) + 1.0 * rng.normal();

    std::vector<double> scale(n_blocks);
    scale[0] = 0.02;
    for (int i = 0; i < n_studies; ++i) scale[1 + i] = 0.03;
    scale[n_studies + 1] = 0.8;
    scale[n_studies + 2] = 0.02;
    scale[n_studies + 3] = 0.8;

    std::vector<std::int64_t> batch_acc(n_blocks, 0);
    std::vector<std::int64_t> batch_try(n_blocks, 0);
    std::vector<std::int64_t> kept_acc(n_blocks, 0);
    std::vector<std::int64_t> kept_try(n_blocks, 0);

    ChainDraws& out = draws.chains[static_cast<std::size_t>(chain)];
    out.mu.reserve(retained);
    out.tau.reserve(retained);
    out.study.assign(n_studies, {});
    for (auto& v : out.study) v.reserve(retained);

    double cur = full_log_post(st, studies, spec);

    auto accept = [&](double log_ratio) { return std::log(rng.uniform01()) < log_ratio; };

    for (int it = 0; it < mcmc.iterations; ++it) {
      const bool adapting = it < mcmc.warmup;
      auto tally = [&](int block, bool accepted) {
        ++batch_try[block];
        if (accepted) ++batch_acc[block];
        if (!adapting) {
          ++kept_try[block];
          if (accepted) ++kept_acc[block];
        }
      };

      {  // mu block
        const double old_mu = st.mu;
        st.mu = old_mu + scale[0] * rng.normal();
        const double lp = full_log_post(st, studies, spec);
        const bool ok = accept(lp - cur);
        if (ok)
          cur = lp;
        else
          st.mu = old_mu;
        tally(0, ok);
      }

      for (int i = 0; i < n_studies; ++i) {  // per-study blocks
        const double old_v = st.study[i];
        st.study[i] = old_v + scale[1 + i] * rng.normal();
        const double lp = full_log_post(st, studies, spec);
        const bool ok = accept(lp - cur);
        if (ok)
          cur = lp;
        else
          st.study[i] = old_v;
        tally(1 + i, ok);
      }

      for (int rep = 0; rep < kTauVisits; ++rep) {
        if (sample_tau) {  // log-tau block with Jacobian exp(log_tau)
          const double old_lt = st.log_tau;
          st.log_tau = old_lt + scale[n_studies + 1] * rng.normal();
          const double lp = full_log_post(st, studies, spec);
          const bool ok = accept((lp + st.log_tau) - (cur + old_lt));
          if (ok)
            cur = lp;
          else
            st.log_tau = old_lt;
          tally(n_studies + 1, ok);
        }

        if (rep == 0) {  // joint translation of (mu, all study means)
          const double eps = scale[n_studies + 2] * rng.normal();
          SamplerState prop = st;
          prop.mu += eps;
          for (double& v : prop.study) v += eps;
          const double lp = full_log_post(prop, studies, spec);
          const bool ok = accept(lp - cur);
          if (ok) {
            st = std::move(prop);
            cur = lp;
          }
          tally(n_studies + 2, ok);
        }

        if (sample_tau) {  // group scale: tau *= c, deviations *= c
          const double log_c = scale[n_studies + 3] * rng.normal();
          const double c = std::exp(log_c);
          SamplerState prop = st;
          prop.log_tau += log_c;
          for (double& v : prop.study) v = st.mu + (v - st.mu) * c;
          const double lp = full_log_post(prop, studies, spec);
          // Jacobian: c per study mean plus c for tau itself.
          const bool ok = accept(lp - cur + (n_studies + 1) * log_c);
          if (ok) {
            st = std::move(prop);
            cur = lp;
          }
          tally(n_studies + 3, ok);
        }
      }

      if (adapting && (it + 1) % kAdaptBatch == 0) {
        for (int b = 0; b < n_blocks; ++b) {
          if (batch_try[b] == 0) continue;
          const double rate = static_cast<double>(batch_acc[b]) / batch_try[b];
          if (rate < 0.2)
            scale[b] /= 1.25;
          else if (rate > 0.5)
            scale[b] *= 1.25;
          batch_acc[b] = 0;
          batch_try[b] = 0;
        }
      }

      if (it >= mcmc.warmup) {
        out.mu.push_back(st.mu);
        out.tau.push_back(st.tau());
        for (int i = 0; i < n_studies; ++i) out.study[i].push_back(st.study[i]);
      }
    }

    out.accept_rate.resize(n_blocks);
    for (int b = 0; b < n_blocks; ++b)
      out.accept_rate[b] =
          kept_try[b] > 0 ? static_cast<double>(kept_acc[b]) / kept_try[b] : 0.0;
  });

  return draws;
}

double rhat(const PosteriorDraws& draws, const ParamSelector& param) {
  if (draws.chains.size() < 2) throw std::domain_error("rhat: need at least 2 chains");

  std::vector<std::vector<double>> halves;
  for (const ChainDraws& c : draws.chains) {
    const std::vector<double>* series = nullptr;
    switch (param.kind) {
      case ParamSelector::Kind::mu:
        series = &c.mu;
        break;
      case ParamSelector::Kind::tau:
        series = &c.tau;
        break;
      case ParamSelector::Kind::study:
        if (param.index < 0 || param.index >= draws.n_studies)
          throw std::domain_error("rhat: study index out of range");
        series = &c.study[param.index];
        break;
    }
    const std::size_t half = series->size() / 2;
    if (half < 2) throw std::domain_error("rhat: need at least 4 retained draws per chain");
    halves.emplace_back(series->begin(), series->begin() + half);
    halves.emplace_back(series->begin() + half, series->begin() + 2 * half);
  }

  const double m = static_cast<double>(halves.size());
  const double n = static_cast<double>(halves.front().size());
  std::vector<double> means;
  double w = 0.0;
  for (const auto& h : halves) {
    const double mean = std::accumulate(h.begin(), h.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : h) ss += (x - mean) * (x - mean);
    w += ss / (n - 1.0);
    means.push_back(mean);
  }
  w /= m;
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
  double b = 0.0;
  for (double mean : means) b += (mean - grand) * (mean - grand);
  b *= n / (m - 1.0);

  if (w <= 0.0) return 1.0;  // all draws identical
  const double var_plus = (n - 1.0) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

Histogram make_histogram(std::span<const double> xs, double lo, double hi, int bins) {
  if (!(hi > lo) || bins < 1) throw std::domain_error("make_histogram: bad range or bin count");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.bins = bins;
  h.counts.assign(bins, 0);
  const double width = (hi - lo) / bins;
  for (double x : xs) {
    if (x < lo || x > hi) continue;
    int idx = static_cast<int>((x - lo) / width);
    if (idx >= bins) idx = bins - 1;  // right edge closed
    ++h.counts[idx];
  }
  return h;
}

double quantile_linear(std::span<const double> sorted_xs, double p) {
  if (sorted_xs.empty()) throw std::domain_error("quantile_linear: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("quantile_linear: p must be in [0,1]");
  const std::size_t m = sorted_xs.size();
  if (m == 1) return sorted_xs[0];
  const double h = (m - 1) * p;
  const std::size_t k = static_cast<std::size_t>(h);
  if (k + 1 >= m) return sorted_xs[m - 1];
  const double frac = h - k;
  return sorted_xs[k] + frac * (sorted_xs[k + 1] - sorted_xs[k]);
}

ParamSummary summarize_series(std::string name, std::span<const double> xs) {
  if (xs.empty()) throw std::domain_error("summarize_series: empty sample");
  ParamSummary s;
  s.name = std::move(name);
  const double n = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.sd = (xs.size() > 1) ? std::sqrt(ss / (n - 1.0)) : 0.0;

  // Batch-means MCSE of the mean: sqrt(batch) batches of size sqrt(n).
  const std::size_t batch = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(n)));
  const std::size_t n_batches = xs.size() / batch;
  if (n_batches >= 2) {
    std::vector<double> bm;
    bm.reserve(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
      double acc = 0.0;
      for (std::size_t k = 0; k < batch; ++k) acc += xs[b * batch + k];
      bm.push_back(acc / batch);
    }
    const double bmean = std::accumulate(bm.begin(), bm.end(), 0.0) / n_batches;
    double bss = 0.0;
    for (double x : bm) bss += (x - bmean) * (x - bmean);
    s.mcse = std::sqrt(bss / (n_batches - 1.0) / n_batches);
  }

  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  s.q2_5 = quantile_linear(sorted, 0.025);
  s.q50 = quantile_linear(sorted, 0.5);
  s.q97_5 = quantile_linear(sorted, 0.975);

  double lo = sorted.front(), hi = sorted.back();
  if (!(hi > lo)) hi = lo + 1.0;  // constant series: one occupied bin
  s.hist = make_histogram(xs, lo, hi, 40);
  return s;
}

std::vector<ParamSummary> summarize(const PosteriorDraws& draws) {
  if (draws.chains.empty() || draws.chains.front().mu.empty())
    throw std::domain_error("summarize: no retained draws");
  std::vector<ParamSummary> out;
  out.push_back(summarize_series("mu", draws.flat_mu()));
  out.push_back(summarize_series("tau", draws.flat_tau()));
  for (int i = 0; i < draws.n_studies; ++i)
    out.push_back(summarize_series("mu_" + std::to_string(i + 1), draws.flat_study(i)));
  return out;
}

}  // namespace sigfilter
