// Command-line front end: ingests study tables, dispatches the simulation and
// inference subcommands, and emits machine-readable reports with a manifest.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sigfilter/filter_sim.hpp"
#include "sigfilter/meta_analysis.hpp"
#include "sigfilter/normal.hpp"
#include "sigfilter/parallel.hpp"
#include "sigfilter/power.hpp"
#include "sigfilter/power_dist.hpp"
#include "sigfilter/pvalue.hpp"
#include "sigfilter/report.hpp"
#include "sigfilter/rng.hpp"
#include "sigfilter/study_table.hpp"
#include "sigfilter/ttest.hpp"

namespace sf = sigfilter;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out = ".";
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--seed", opts.seed, "Master seed (all streams derive from it)");
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_option("--threads", opts.threads, "Worker threads (0 = library default)");
}

sf::Sidedness parse_sided(const std::string& s) {
  if (s == "two") return sf::Sidedness::two_sided;
  if (s == "one" || s == "gt") return sf::Sidedness::one_sided_gt;
  if (s == "lt") return sf::Sidedness::one_sided_lt;
  throw CLI::ValidationError("--sided", "expected one of: two, one, gt, lt");
}

fs::path prepare_out(const CommonOpts& opts) {
  fs::path dir(opts.out);
  fs::create_directories(dir);
  sf::set_workers(opts.threads);
  return dir;
}

sf::StudyTable load_studies(const std::string& path) {
  if (path.empty()) return sf::reconstructed_table1();
  return sf::parse_studies_csv(path);
}

std::vector<double> read_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<double> vals;
  double v;
  while (in >> v) vals.push_back(v);
  if (!in.eof()) throw std::runtime_error("'" + path + "': non-numeric content");
  return vals;
}

json filter_report_json(const sf::FilterReport& r) {
  json j{{"true_power", r.true_power},
         {"publication_rate", r.publication_rate},
         {"mc_se_publication_rate", r.mc_se_publication_rate},
         {"n_sims", r.n_sims},
         {"n_published", r.n_published}};
  auto put = [&](const char* key, const std::optional<double>& v) {
    j[key] = v ? json(*v) : json(nullptr);
  };
  put("mean_published_abs_effect", r.mean_published_abs_effect);
  put("exaggeration_ratio", r.exaggeration_ratio);
  put("sign_error_rate", r.sign_error_rate);
  put("mean_estimated_power_published", r.mean_estimated_power_published);
  put("min_estimated_power_published", r.min_estimated_power_published);
  put("pii_vs_true", r.pii_vs_true);
  return j;
}

// --- subcommand bodies -----------------------------------------------------

int cmd_ttest(const CommonOpts& opts, const std::string& data_path, double mu0, double alpha,
              const std::string& sided) {
  const fs::path dir = prepare_out(opts);
  const std::vector<double> diffs = read_values(data_path);
  sf::TestSpec spec{sf::TestFamily::paired_t, parse_sided(sided), alpha, mu0};
  const sf::TestResult r = sf::paired_t_test(diffs, spec);

  json j{{"t", r.t_stat},   {"df", r.df}, {"effect", r.effect}, {"se", r.se},
         {"sd", r.sd},      {"n", r.n},   {"p_value", r.p_value}};
  sf::write_json_file(dir / "ttest.json", j);
  sf::RunManifest m;
  m.subcommand = "ttest";
  m.seed = opts.seed;
  m.config = {{"data", data_path}, {"mu0", mu0}, {"alpha", alpha}, {"sided", sided}};
  sf::write_manifest(std::move(m), dir, {"ttest.json"});
  std::printf("t = %.6g, df = %d, effect = %.6g, p = %.6g\n", r.t_stat, r.df, r.effect,
              r.p_value);
  return 0;
}

int cmd_power(const CommonOpts& opts, double effect, double sd, int n, double alpha,
              const std::string& sided) {
  const fs::path dir = prepare_out(opts);
  sf::TestSpec spec{sf::TestFamily::one_sample_t, parse_sided(sided), alpha, 0.0};
  const double power = sf::exact_t_power({effect, sd, n}, spec);

  sf::write_json_file(dir / "power.json", json{{"effect", effect},
                                               {"sd", sd},
                                               {"n", n},
                                               {"alpha", alpha},
                                               {"sided", sided},
                                               {"power", power}});
  sf::RunManifest m;
  m.subcommand = "power";
  m.seed = opts.seed;
  m.config = {{"effect", effect}, {"sd", sd}, {"n", n}, {"alpha", alpha}, {"sided", sided}};
  sf::write_manifest(std::move(m), dir, {"power.json"});
  std::printf("%.17g\n", power);
  return 0;
}

int cmd_power_curve(const CommonOpts& opts, double alpha, double z_min, double z_max,
                    double z_step) {
  const fs::path dir = prepare_out(opts);
  std::vector<double> grid;
  const auto steps = static_cast<std::int64_t>(std::floor((z_max - z_min) / z_step + 1e-9));
  for (std::int64_t i = 0; i <= steps; ++i) grid.push_back(z_min + i * z_step);
  const double z_alpha = sf::std_normal_quantile(1.0 - alpha);
  if (z_alpha >= z_min && z_alpha <= z_max)
    grid.insert(std::upper_bound(grid.begin(), grid.end(), z_alpha), z_alpha);

  std::string csv = "z,power\n";
  for (const auto& [z, pw] : sf::power_curve(alpha, grid))
    csv += sf::format_double(z) + ',' + sf::format_double(pw) + '\n';
  sf::write_text_file(dir / "power_curve.csv", csv);

  sf::RunManifest m;
  m.subcommand = "power-curve";
  m.seed = opts.seed;
  m.config = {{"alpha", alpha}, {"z_min", z_min}, {"z_max", z_max}, {"z_step", z_step}};
  sf::write_manifest(std::move(m), dir, {"power_curve.csv"});
  std::printf("wrote %s (%zu rows)\n", (dir / "power_curve.csv").c_str(), grid.size());
  return 0;
}

int cmd_simulate_filter(const CommonOpts& opts, double effect, double sd, int n,
                        std::int64_t sims, double alpha, const std::string& sided,
                        const std::string& family) {
  const fs::path dir = prepare_out(opts);
  sf::TestFamily fam;
  if (family == "t") {
    fam = sf::TestFamily::paired_t;
  } else if (family == "z") {
    fam = sf::TestFamily::z;
  } else {
    throw CLI::ValidationError("--family", "expected 't' or 'z'");
  }
  sf::FilterSimConfig cfg;
  cfg.scenario = {effect, sd, n};
  cfg.spec = {fam, parse_sided(sided), alpha, 0.0};
  cfg.n_sims = sims;
  cfg.seed = opts.seed;
  const sf::FilterReport r = sf::simulate_filter(cfg);

  sf::write_json_file(dir / "filter_report.json", filter_report_json(r));
  sf::RunManifest m;
  m.subcommand = "simulate-filter";
  m.seed = opts.seed;
  m.config = {{"effect", effect}, {"sd", sd},       {"n", n},          {"sims", sims},
              {"alpha", alpha},   {"sided", sided}, {"family", family}};
  sf::write_manifest(std::move(m), dir, {"filter_report.json"});

  std::printf("true_power = %.6g\n", r.true_power);
  std::printf("publication_rate = %.6g (mc se %.2g)\n", r.publication_rate,
              r.mc_se_publication_rate);
  if (r.mean_estimated_power_published)
    std::printf("mean_estimated_power_published = %.6g\n", *r.mean_estimated_power_published);
  if (r.exaggeration_ratio) std::printf("exaggeration_ratio = %.6g\n", *r.exaggeration_ratio);
  if (r.pii_vs_true) std::printf("pii_vs_true = %.6g\n", *r.pii_vs_true);
  return 0;
}

int cmd_meta(const CommonOpts& opts, const std::string& studies_path, int chains, int iters,
             bool drop_study_prior, bool emit_draws) {
  const fs::path dir = prepare_out(opts);
  const sf::StudyTable table = load_studies(studies_path);
  sf::MetaModelSpec spec;
  spec.include_study_level_prior = !drop_study_prior;
  sf::McmcConfig mcmc;
  mcmc.chains = chains;
  mcmc.iterations = iters;
  mcmc.warmup = iters / 2;
  mcmc.seed = sf::derive_seed(opts.seed, "meta", 0);
  const sf::PosteriorDraws draws = sf::fit_meta(table.rows, spec, mcmc);
  const auto summaries = sf::summarize(draws);
  const double rhat_mu = sf::rhat(draws, sf::ParamSelector::Mu());
  const double rhat_tau = sf::rhat(draws, sf::ParamSelector::Tau());

  std::vector<std::string> files;
  json j;
  j["chains"] = chains;
  j["iterations"] = iters;
  j["warmup"] = mcmc.warmup;
  j["rhat"] = {{"mu", rhat_mu}, {"tau", rhat_tau}};
  for (const auto& s : summaries) j["posterior"][s.name] = sf::param_summary_json(s);
  sf::write_json_file(dir / "meta_summary.json", j);
  files.push_back("meta_summary.json");
  sf::write_text_file(dir / "meta_hist_mu.csv", sf::histogram_csv(summaries[0].hist));
  files.push_back("meta_hist_mu.csv");
  sf::write_text_file(dir / "meta_hist_tau.csv", sf::histogram_csv(summaries[1].hist));
  files.push_back("meta_hist_tau.csv");

  if (emit_draws) {
    std::string csv = "chain,draw,mu,tau";
    for (int i = 0; i < draws.n_studies; ++i) csv += ",mu_" + std::to_string(i + 1);
    csv += '\n';
    for (std::size_t c = 0; c < draws.chains.size(); ++c) {
      const sf::ChainDraws& ch = draws.chains[c];
      for (std::size_t k = 0; k < ch.mu.size(); ++k) {
        csv += std::to_string(c) + ',' + std::to_string(k) + ',' + sf::format_double(ch.mu[k]) +
               ',' + sf::format_double(ch.tau[k]);
        for (int i = 0; i < draws.n_studies; ++i)
          csv += ',' + sf::format_double(ch.study[i][k]);
        csv += '\n';
      }
    }
    sf::write_text_file(dir / "meta_draws.csv", csv);
    files.push_back("meta_draws.csv");
  }

  sf::RunManifest m;
  m.subcommand = "meta";
  m.seed = opts.seed;
  m.config = {{"studies", studies_path.empty() ? "<bundled>" : studies_path},
              {"chains", chains},
              {"iters", iters},
              {"drop_study_prior", drop_study_prior},
              {"emit_draws", emit_draws}};
  sf::write_manifest(std::move(m), dir, files);

  std::printf("posterior mean mu = %.6g, 95%% CI [%.6g, %.6g]\n", summaries[0].mean,
              summaries[0].q2_5, summaries[0].q97_5);
  std::printf("posterior mean tau = %.6g\n", summaries[1].mean);
  std::printf("rhat: mu %.4f, tau %.4f\n", rhat_mu, rhat_tau);
  return 0;
}

struct PowerDistOpts {
  double effect_mean = -0.05;
  double effect_sd = 0.01;
  double precision_mean = 16.3;
  double precision_sd = 7.07;
  bool use_rounded_gamma = false;
  std::vector<int> sample_sizes;
  std::int64_t draws = 100000;
  double alpha = 0.05;
  std::string sided = "two";
};

sf::GammaSpec gamma_of(const PowerDistOpts& o) {
  return o.use_rounded_gamma ? sf::GammaSpec{5.3, 0.3}
                         : sf::gamma_from_moments(o.precision_mean, o.precision_sd);
}

int cmd_power_dist(const CommonOpts& opts, const PowerDistOpts& o) {
  const fs::path dir = prepare_out(opts);
  const sf::GammaSpec gamma = gamma_of(o);
  const sf::TestSpec spec{sf::TestFamily::paired_t, parse_sided(o.sided), o.alpha, 0.0};
  const std::uint64_t seed = sf::derive_seed(opts.seed, "power-dist", 0);
  std::vector<int> ns = o.sample_sizes.empty() ? std::vector<int>{20, 30, 40, 50}
                                               : o.sample_sizes;

  std::vector<std::string> files;
  std::string csv = "n,mean_power,q2.5,q50,q97.5\n";
  for (int n : ns) {
    const sf::PowerDistribution pd =
        sf::sample_power_distribution(o.effect_mean, o.effect_sd, gamma, n, o.draws, spec, seed);
    csv += std::to_string(n) + ',' + sf::format_double(pd.mean_power) + ',' +
           sf::format_double(pd.q2_5) + ',' + sf::format_double(pd.q50) + ',' +
           sf::format_double(pd.q97_5) + '\n';
    const std::string name = "power_dist_n" + std::to_string(n) + ".csv";
    sf::write_text_file(dir / name, sf::histogram_csv(pd.hist));
    files.push_back(name);
    std::printf("n = %d: mean power %.4f, 95%% interval [%.4f, %.4f]\n", n, pd.mean_power,
                pd.q2_5, pd.q97_5);
  }
  sf::write_text_file(dir / "power_dist_summary.csv", csv);
  files.insert(files.begin(), "power_dist_summary.csv");

  sf::RunManifest m;
  m.subcommand = "power-dist";
  m.seed = opts.seed;
  m.config = {{"effect_mean", o.effect_mean}, {"effect_sd", o.effect_sd},
              {"gamma_shape", gamma.shape},   {"gamma_rate", gamma.rate},
              {"rounded_gamma", o.use_rounded_gamma}, {"n", ns},
              {"draws", o.draws},             {"alpha", o.alpha},
              {"sided", o.sided}};
  sf::write_manifest(std::move(m), dir, files);
  return 0;
}

int cmd_pii(const CommonOpts& opts, const PowerDistOpts& o, const std::string& studies_path) {
  const fs::path dir = prepare_out(opts);
  const sf::StudyTable table = load_studies(studies_path);
  const sf::GammaSpec gamma = gamma_of(o);
  const sf::TestSpec spec{sf::TestFamily::paired_t, parse_sided(o.sided), o.alpha, 0.0};
  const std::uint64_t seed = sf::derive_seed(opts.seed, "power-dist", 0);
  std::vector<int> ns = o.sample_sizes.empty() ? std::vector<int>{20, 30, 40} : o.sample_sizes;

  std::map<int, sf::PowerDistribution> dists;
  for (int n : ns)
    dists.emplace(n, sf::sample_power_distribution(o.effect_mean, o.effect_sd, gamma, n, o.draws,
                                                   spec, seed));

  std::string csv = "study_id,n,study_power,ci_2.5,ci_97.5,n_excluded\n";
  for (const sf::StudySummary& s : table.rows) {
    const double sp = sf::study_power_estimate(s, spec);
    for (int n : ns) {
      const sf::PiiDistribution pii = sf::pii_distribution(sp, dists.at(n), s.study_id);
      csv += s.study_id + ',' + std::to_string(n) + ',' + sf::format_double(sp) + ',' +
             sf::format_double(pii.ci_2_5) + ',' + sf::format_double(pii.ci_97_5) + ',' +
             std::to_string(pii.n_excluded) + '\n';
    }
  }
  sf::write_text_file(dir / "pii_intervals.csv", csv);

  sf::RunManifest m;
  m.subcommand = "pii";
  m.seed = opts.seed;
  m.config = {{"studies", studies_path.empty() ? "<bundled>" : studies_path},
              {"effect_mean", o.effect_mean},
              {"effect_sd", o.effect_sd},
              {"gamma_shape", gamma.shape},
              {"gamma_rate", gamma.rate},
              {"n", ns},
              {"draws", o.draws},
              {"alpha", o.alpha},
              {"sided", o.sided}};
  sf::write_manifest(std::move(m), dir, {"pii_intervals.csv"});
  std::printf("wrote %s\n", (dir / "pii_intervals.csv").c_str());
  return 0;
}

int cmd_report(const CommonOpts& opts, const std::string& studies_path, int chains, int iters,
               std::int64_t draws, bool use_rounded_gamma, bool effect_from_draws,
               bool drop_study_prior) {
  const fs::path dir = prepare_out(opts);
  sf::ReportConfig cfg;
  cfg.studies = load_studies(studies_path);
  cfg.seed = opts.seed;
  cfg.out_dir = dir;
  cfg.chains = chains;
  cfg.iterations = iters;
  cfg.power_draws = draws;
  cfg.rounded_gamma = use_rounded_gamma;
  cfg.effect_from_draws = effect_from_draws;
  cfg.drop_study_level_prior = drop_study_prior;
  const sf::RunManifest m = sf::run_report(cfg);
  std::printf("report written to %s (%zu files)\n", dir.c_str(), m.output_digests.size() + 1);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Significance-filter power lab: exact and post-hoc power, publication-filter "
               "simulation, random-effects meta-analysis, and Power Inflation Index intervals"};
  app.require_subcommand(1);

  CommonOpts common;

  // ttest
  auto* ttest = app.add_subcommand("ttest", "Paired t-test on a file of difference scores");
  std::string data_path;
  double mu0 = 0.0, alpha = 0.05;
  std::string sided = "two";
  ttest->add_option("--data", data_path, "Text file, one difference per line")->required();
  ttest->add_option("--mu0", mu0, "Null value");
  ttest->add_option("--alpha", alpha, "Type I error level");
  ttest->add_option("--sided", sided, "two|one|gt|lt");
  add_common(ttest, common);

  // power
  auto* power = app.add_subcommand("power", "Exact one-sample/paired t power");
  double p_effect = 0.0, p_sd = 1.0;
  int p_n = 2;
  double p_alpha = 0.05;
  std::string p_sided = "two";
  power->add_option("--effect", p_effect, "True effect")->required();
  power->add_option("--sd", p_sd, "True SD of one difference")->required();
  power->add_option("--n", p_n, "Sample size")->required();
  power->add_option("--alpha", p_alpha, "Type I error level");
  power->add_option("--sided", p_sided, "two|one|gt|lt");
  add_common(power, common);

  // power-curve
  auto* curve = app.add_subcommand("power-curve", "Post-hoc power vs observed z");
  double c_alpha = 0.05, z_min = 0.0, z_max = 5.0, z_step = 0.01;
  curve->add_option("--alpha", c_alpha, "Type I error level");
  curve->add_option("--z-min", z_min, "Grid start");
  curve->add_option("--z-max", z_max, "Grid end");
  curve->add_option("--z-step", z_step, "Grid step");
  add_common(curve, common);

  // simulate-filter
  auto* filt = app.add_subcommand("simulate-filter",
                                  "Publication filter simulation under a known ground truth");
  double f_effect = 0.0, f_sd = 1.0;
  int f_n = 36;
  std::int64_t f_sims = 100000;
  double f_alpha = 0.05;
  std::string f_sided = "two", f_family = "t";
  filt->add_option("--effect", f_effect, "True effect")->required();
  filt->add_option("--sd", f_sd, "True SD")->required();
  filt->add_option("--n", f_n, "Sample size per study")->required();
  filt->add_option("--sims", f_sims, "Number of simulated studies");
  filt->add_option("--alpha", f_alpha, "Type I error level");
  filt->add_option("--sided", f_sided, "two|one|gt|lt");
  filt->add_option("--family", f_family, "t|z");
  add_common(filt, common);

  // meta
  auto* meta = app.add_subcommand("meta", "Bayesian random-effects meta-analysis");
  std::string m_studies;
  int m_chains = 4, m_iters = 4000;
  bool m_drop_prior = false, m_emit_draws = false;
  meta->add_option("--studies", m_studies, "Study CSV (default: bundled case-study table)");
  meta->add_option("--chains", m_chains, "Number of chains");
  meta->add_option("--iters", m_iters, "Iterations per chain (half are warmup)");
  meta->add_flag("--drop-study-prior", m_drop_prior,
                 "Drop the per-study location prior (sensitivity analysis)");
  meta->add_flag("--emit-draws", m_emit_draws, "Also write meta_draws.csv");
  add_common(meta, common);

  // power-dist
  auto* pdist = app.add_subcommand("power-dist",
                                   "Monte Carlo power distribution from an effect summary and a "
                                   "Gamma precision model");
  PowerDistOpts pd_opts;
  auto add_power_dist_opts = [&](CLI::App* cmd, PowerDistOpts& o) {
    cmd->add_option("--effect-mean", o.effect_mean, "Posterior mean of the effect");
    cmd->add_option("--effect-sd", o.effect_sd,
                    "Posterior SD of the effect (interpreted as an SD, not a variance)");
    cmd->add_option("--precision-mean", o.precision_mean, "Mean of study precisions");
    cmd->add_option("--precision-sd", o.precision_sd, "SD of study precisions");
    cmd->add_flag("--rounded-gamma", o.use_rounded_gamma,
                  "Use the published rounded Gamma(5.3, 0.3) preset instead of moment matching");
    cmd->add_option("--n", o.sample_sizes, "Sample size(s)");
    cmd->add_option("--draws", o.draws, "Monte Carlo draws");
    cmd->add_option("--alpha", o.alpha, "Type I error level");
    cmd->add_option("--sided", o.sided, "two|one|gt|lt");
  };
  add_power_dist_opts(pdist, pd_opts);
  add_common(pdist, common);

  // pii
  auto* pii = app.add_subcommand("pii", "Power Inflation Index intervals per study");
  PowerDistOpts pii_opts;
  std::string pii_studies;
  add_power_dist_opts(pii, pii_opts);
  pii->add_option("--studies", pii_studies, "Study CSV (default: bundled case-study table)");
  add_common(pii, common);

  // report
  auto* report = app.add_subcommand("report", "Full case-study pipeline with manifest");
  std::string r_studies;
  int r_chains = 4, r_iters = 4000;
  std::int64_t r_draws = 100000;
  bool r_rounded_gamma = false, r_from_draws = false, r_drop_prior = false;
  report->add_option("--studies", r_studies, "Study CSV (default: bundled case-study table)");
  report->add_option("--chains", r_chains, "Meta-analysis chains");
  report->add_option("--iters", r_iters, "Iterations per chain");
  report->add_option("--draws", r_draws, "Power-distribution draws");
  report->add_flag("--rounded-gamma", r_rounded_gamma, "Use the published rounded Gamma(5.3, 0.3) preset");
  report->add_flag("--effect-from-draws", r_from_draws,
                   "Sample effects from posterior draws instead of the normal summary");
  report->add_flag("--drop-study-prior", r_drop_prior, "Drop the per-study location prior");
  add_common(report, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(ttest))
      return cmd_ttest(common, data_path, mu0, alpha, sided);
    if (app.got_subcommand(power))
      return cmd_power(common, p_effect, p_sd, p_n, p_alpha, p_sided);
    if (app.got_subcommand(curve))
      return cmd_power_curve(common, c_alpha, z_min, z_max, z_step);
    if (app.got_subcommand(filt))
      return cmd_simulate_filter(common, f_effect, f_sd, f_n, f_sims, f_alpha, f_sided, f_family);
    if (app.got_subcommand(meta))
      return cmd_meta(common, m_studies, m_chains, m_iters, m_drop_prior, m_emit_draws);
    if (app.got_subcommand(pdist)) return cmd_power_dist(common, pd_opts);
    if (app.got_subcommand(pii)) return cmd_pii(common, pii_opts, pii_studies);
    if (app.got_subcommand(report))
      return cmd_report(common, r_studies, r_chains, r_iters, r_draws, r_rounded_gamma,
                        r_from_draws, r_drop_prior);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
