#include "sigfilter/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sigfilter/filter_sim.hpp"
#include "sigfilter/meta_analysis.hpp"
#include "sigfilter/normal.hpp"
#include "sigfilter/power.hpp"
#include "sigfilter/power_dist.hpp"
#include "sigfilter/rng.hpp"

namespace sigfilter {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

nlohmann::json param_summary_json(const ParamSummary& s) {
  return nlohmann::json{{"name", s.name},   {"mean", s.mean}, {"sd", s.sd},
                        {"mcse", s.mcse},   {"q2.5", s.q2_5}, {"q50", s.q50},
                        {"q97.5", s.q97_5}};
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,count\n";
  const double width = h.bin_width();
  for (int b = 0; b < h.bins; ++b) {
    out += format_double(h.lo + b * width);
    out += ',';
    out += format_double(h.lo + (b + 1) * width);
    out += ',';
    out += std::to_string(h.counts[b]);
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a64_bytes(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("digest_file: cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return hex64(fnv1a64_bytes(buf.str()));
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

RunManifest write_manifest(RunManifest manifest, const std::filesystem::path& out_dir,
                           const std::vector<std::string>& output_files) {
  for (const std::string& name : output_files)
    manifest.output_digests[name] = digest_file(out_dir / name);
  nlohmann::json j{{"subcommand", manifest.subcommand},
                   {"config", manifest.config},
                   {"seed", manifest.seed},
                   {"version", manifest.version},
                   {"output_digests", manifest.output_digests}};
  write_json_file(out_dir / "manifest.json", j);
  return manifest;
}

RunManifest run_report(const ReportConfig& config, ExecPolicy policy) {
  config.studies.validate();
  std::filesystem::create_directories(config.out_dir);
  const auto& studies = config.studies.rows;
  std::vector<std::string> files;

  const TestSpec test_spec{TestFamily::paired_t, Sidedness::two_sided, config.alpha, 0.0};
  const char* provenance_label =
      config.studies.provenance == Provenance::reconstructed_table1 ? "reconstructed" : "user";

  // Per-study t table with the exact-power column.
  std::vector<double> study_powers;
  {
    std::string csv = "# provenance: ";
    csv += provenance_label;
    csv += "\nstudy_id,t,d,n,se,s,pval,power_estimate\n";
    for (const StudySummary& s : studies) {
      const double pw = study_power_estimate(s, test_spec);
      study_powers.push_back(pw);
      csv += s.study_id + ',' + format_double(s.t_stat) + ',' + format_double(s.effect) + ',' +
             std::to_string(s.n) + ',' + format_double(s.se) + ',' + format_double(s.sd) + ',' +
             format_double(s.p_value) + ',' + format_double(pw) + '\n';
    }
    write_text_file(config.out_dir / "ttests.csv", csv);
    files.push_back("ttests.csv");
  }

  // Random-effects meta-analysis.
  MetaModelSpec model_spec;
  model_spec.include_study_level_prior = !config.drop_study_level_prior;
  McmcConfig mcmc;
  mcmc.chains = config.chains;
  mcmc.iterations = config.iterations;
  mcmc.warmup = config.iterations / 2;
  mcmc.seed = derive_seed(config.seed, "report-meta", 0);
  const PosteriorDraws draws = fit_meta(studies, model_spec, mcmc, policy);
  const std::vector<ParamSummary> summaries = summarize(draws);
  const double rhat_mu = rhat(draws, ParamSelector::Mu());
  const double rhat_tau = rhat(draws, ParamSelector::Tau());

  {
    nlohmann::json j;
    j["provenance"] = provenance_label;
    j["chains"] = mcmc.chains;
    j["iterations"] = mcmc.iterations;
    j["warmup"] = mcmc.warmup;
    j["rhat"] = {{"mu", rhat_mu}, {"tau", rhat_tau}};
    for (const ParamSummary& s : summaries) j["posterior"][s.name] = param_summary_json(s);
    write_json_file(config.out_dir / "meta_summary.json", j);
    files.push_back("meta_summary.json");
  }
  write_text_file(config.out_dir / "meta_hist_mu.csv", histogram_csv(summaries[0].hist));
  files.push_back("meta_hist_mu.csv");
  write_text_file(config.out_dir / "meta_hist_tau.csv", histogram_csv(summaries[1].hist));
  files.push_back("meta_hist_tau.csv");

  // Effect summary feeding the power distribution: either the fitted normal
  // summary of mu or the raw posterior draws.
  const double effect_mean = summaries[0].mean;
  const double effect_sd = summaries[0].sd;
  const std::vector<double> mu_pool = config.effect_from_draws ? draws.flat_mu()
                                                               : std::vector<double>{};

  const GammaSpec gamma = config.rounded_gamma
                              ? GammaSpec{5.3, 0.3}
                              : gamma_from_moments(config.precision_mean, config.precision_sd);

  // Power distributions over sample sizes; one shared seed so
  // sample sizes see common random numbers.
  const std::uint64_t power_seed = derive_seed(config.seed, "report-power", 0);
  std::map<int, PowerDistribution> dists;
  std::vector<int> all_ns = config.power_sample_sizes;
  for (int n : config.pii_sample_sizes)
    if (std::find(all_ns.begin(), all_ns.end(), n) == all_ns.end()) all_ns.push_back(n);
  std::sort(all_ns.begin(), all_ns.end());
  for (int n : all_ns) {
    dists.emplace(n, config.effect_from_draws
                         ? sample_power_distribution_from_pool(mu_pool, gamma, n,
                                                               config.power_draws, test_spec,
                                                               power_seed, policy)
                         : sample_power_distribution(effect_mean, effect_sd, gamma, n,
                                                     config.power_draws, test_spec, power_seed,
                                                     policy));
  }

  {
    std::string csv = "n,mean_power,q2.5,q50,q97.5\n";
    for (int n : config.power_sample_sizes) {
      const PowerDistribution& pd = dists.at(n);
      csv += std::to_string(n) + ',' + format_double(pd.mean_power) + ',' +
             format_double(pd.q2_5) + ',' + format_double(pd.q50) + ',' +
             format_double(pd.q97_5) + '\n';
    }
    write_text_file(config.out_dir / "power_dist_summary.csv", csv);
    files.push_back("power_dist_summary.csv");
    for (int n : config.power_sample_sizes) {
      const std::string name = "power_dist_n" + std::to_string(n) + ".csv";
      write_text_file(config.out_dir / name, histogram_csv(dists.at(n).hist));
      files.push_back(name);
    }
  }

  // PII intervals.
  {
    std::string csv = "study_id,n,study_power,ci_2.5,ci_97.5,n_excluded\n";
    for (std::size_t i = 0; i < studies.size(); ++i) {
      for (int n : config.pii_sample_sizes) {
        const PiiDistribution pii =
            pii_distribution(study_powers[i], dists.at(n), studies[i].study_id);
        csv += studies[i].study_id + ',' + std::to_string(n) + ',' +
               format_double(pii.study_power) + ',' + format_double(pii.ci_2_5) + ',' +
               format_double(pii.ci_97_5) + ',' + std::to_string(pii.n_excluded) + '\n';
      }
    }
    write_text_file(config.out_dir / "pii_intervals.csv", csv);
    files.push_back("pii_intervals.csv");
  }

  // Post-hoc power curve with the critical z inserted into the grid.
  {
    std::vector<double> grid;
    const auto steps = static_cast<std::int64_t>(
        std::floor((config.z_max - config.z_min) / config.z_step + 1e-9));
    for (std::int64_t i = 0; i <= steps; ++i) grid.push_back(config.z_min + i * config.z_step);
    const double z_alpha = std_normal_quantile(1.0 - config.alpha);
    if (z_alpha >= config.z_min && z_alpha <= config.z_max) {
      grid.insert(std::upper_bound(grid.begin(), grid.end(), z_alpha), z_alpha);
    }
    std::string csv = "z,power\n";
    for (const auto& [z, pw] : power_curve(config.alpha, grid))
      csv += format_double(z) + ',' + format_double(pw) + '\n';
    write_text_file(config.out_dir / "power_curve.csv", csv);
    files.push_back("power_curve.csv");
  }

  // Master structured record.
  {
    nlohmann::json j;
    j["version"] = kArtifactVersion;
    j["seed"] = config.seed;
    j["provenance"] = provenance_label;
    j["n_studies"] = studies.size();
    j["alpha"] = config.alpha;
    j["gamma"] = {{"shape", gamma.shape}, {"rate", gamma.rate}};
    j["effect_model"] = config.effect_from_draws
                            ? nlohmann::json{{"kind", "posterior_draws"}}
                            : nlohmann::json{{"kind", "normal_summary"},
                                             {"mean", effect_mean},
                                             {"sd", effect_sd}};
    j["meta"] = {{"posterior_mean_mu", summaries[0].mean},
                 {"ci_mu", {summaries[0].q2_5, summaries[0].q97_5}},
                 {"posterior_mean_tau", summaries[1].mean},
                 {"rhat_mu", rhat_mu},
                 {"rhat_tau", rhat_tau}};
    for (std::size_t i = 0; i < studies.size(); ++i)
      j["study_power"][studies[i].study_id] = study_powers[i];
    for (int n : config.power_sample_sizes) {
      const PowerDistribution& pd = dists.at(n);
      j["power_dist"][std::to_string(n)] = {{"mean", pd.mean_power},
                                            {"q2.5", pd.q2_5},
                                            {"q50", pd.q50},
                                            {"q97.5", pd.q97_5}};
    }
    write_json_file(config.out_dir / "summary.json", j);
    files.push_back("summary.json");
  }

  RunManifest manifest;
  manifest.subcommand = "report";
  manifest.seed = config.seed;
  manifest.config = {{"chains", config.chains},
                     {"iterations", config.iterations},
                     {"power_draws", config.power_draws},
                     {"power_sample_sizes", config.power_sample_sizes},
                     {"pii_sample_sizes", config.pii_sample_sizes},
                     {"alpha", config.alpha},
                     {"precision_mean", config.precision_mean},
                     {"precision_sd", config.precision_sd},
                     {"rounded_gamma", config.rounded_gamma},
                     {"effect_from_draws", config.effect_from_draws},
                     {"drop_study_level_prior", config.drop_study_level_prior},
                     {"z_grid", {config.z_min, config.z_max, config.z_step}},
                     {"provenance", provenance_label},
                     {"n_studies", studies.size()}};
  return write_manifest(std::move(manifest), config.out_dir, files);
}

}  // namespace sigfilter
