#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigfilter/parallel.hpp"
#include "sigfilter/study_table.hpp"
#include "sigfilter/ttest.hpp"

namespace sigfilter {

inline constexpr const char* kArtifactVersion = "0.1.0";

// FNV-1a 64-bit digest, hex-encoded; used to fingerprint output files.
std::uint64_t fnv1a64_bytes(std::string_view bytes);
std::string digest_file(const std::filesystem::path& path);

// Everything needed to re-run a subcommand bit-identically: the subcommand
// name, its full configuration, the master seed, the artifact version, and a
// digest per output file.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string version = kArtifactVersion;
  std::map<std::string, std::string> output_digests;
};

// Writes `manifest.json` into out_dir, digesting the named files (paths
// relative to out_dir); returns the completed manifest.
RunManifest write_manifest(RunManifest manifest, const std::filesystem::path& out_dir,
                           const std::vector<std::string>& output_files);

// Deterministic text helpers shared by all emitters.
std::string format_double(double x);  // exact round-trip via %.17g
void write_text_file(const std::filesystem::path& path, std::string_view contents);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
std::string histogram_csv(const Histogram& h);
nlohmann::json param_summary_json(const ParamSummary& s);

struct ReportConfig {
  StudyTable studies;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  int chains = 4;
  int iterations = 4000;  // warmup = iterations/2
  std::int64_t power_draws = 100000;
  std::vector<int> power_sample_sizes = {20, 30, 40, 50};
  std::vector<int> pii_sample_sizes = {20, 30, 40};
  double alpha = 0.05;
  double precision_mean = 16.3;
  double precision_sd = 7.07;
  bool rounded_gamma = false;         // preset Gamma(5.3, 0.3) instead of moment matching
  bool effect_from_draws = false;     // resample posterior draws instead of normal summary
  bool drop_study_level_prior = false;
  double z_min = 0.0, z_max = 5.0, z_step = 0.01;
};

// Runs the full case-study pipeline (per-study t table, meta-analysis fit,
// power distributions, PII intervals, power curve) and writes all outputs
// plus summary.json and manifest.json into out_dir. Byte-identical for a
// fixed config and seed, at any worker count.
RunManifest run_report(const ReportConfig& config, ExecPolicy policy = ExecPolicy::parallel);

}  // namespace sigfilter
