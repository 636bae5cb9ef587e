// Benchmark comparing the serial reference path of each Monte Carlo kernel
// against the OpenMP path, and checking that both produce identical output.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "sigfilter/filter_sim.hpp"
#include "sigfilter/meta_analysis.hpp"
#include "sigfilter/parallel.hpp"
#include "sigfilter/power_dist.hpp"
#include "sigfilter/study_table.hpp"

namespace sf = sigfilter;

namespace {

template <class Fn>
double time_seconds(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

void print_row(const char* kernel, double serial_s, double parallel_s, bool identical) {
  std::printf("%-22s %10.3fs %12.3fs %8.2fx   %s\n", kernel, serial_s, parallel_s,
              serial_s / parallel_s, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) sf::set_workers(std::stoi(argv[1]));
  std::printf("workers: %d\n", sf::max_workers());
  std::printf("%-22s %11s %13s %9s   %s\n", "kernel", "serial", "parallel", "speedup",
              "outputs");

  {
    sf::FilterSimConfig cfg;
    cfg.scenario = {0.1, 1.0, 36};
    cfg.spec = {sf::TestFamily::paired_t, sf::Sidedness::one_sided_gt, 0.05, 0.0};
    cfg.n_sims = 200000;
    cfg.seed = 42;
    sf::FilterReport serial_r, parallel_r;
    const double ts = time_seconds([&] { serial_r = simulate_filter(cfg, sf::ExecPolicy::serial); });
    const double tp =
        time_seconds([&] { parallel_r = simulate_filter(cfg, sf::ExecPolicy::parallel); });
    const bool same = serial_r.publication_rate == parallel_r.publication_rate &&
                      serial_r.mean_estimated_power_published ==
                          parallel_r.mean_estimated_power_published &&
                      serial_r.mean_published_abs_effect == parallel_r.mean_published_abs_effect;
    print_row("simulate_filter", ts, tp, same);
  }

  {
    const sf::GammaSpec gamma = sf::gamma_from_moments(16.3, 7.07);
    const sf::TestSpec spec{sf::TestFamily::paired_t, sf::Sidedness::two_sided, 0.05, 0.0};
    sf::PowerDistribution serial_d, parallel_d;
    const double ts = time_seconds([&] {
      serial_d = sample_power_distribution(-0.05, 0.01, gamma, 40, 100000, spec, 42,
                                           sf::ExecPolicy::serial);
    });
    const double tp = time_seconds([&] {
      parallel_d = sample_power_distribution(-0.05, 0.01, gamma, 40, 100000, spec, 42,
                                             sf::ExecPolicy::parallel);
    });
    print_row("power_distribution", ts, tp, serial_d.power_samples == parallel_d.power_samples);
  }

  {
    const sf::StudyTable table = sf::reconstructed_table1();
    const sf::MetaModelSpec spec;
    sf::McmcConfig mcmc;
    mcmc.seed = 42;
    sf::PosteriorDraws serial_d, parallel_d;
    const double ts =
        time_seconds([&] { serial_d = fit_meta(table.rows, spec, mcmc, sf::ExecPolicy::serial); });
    const double tp = time_seconds(
        [&] { parallel_d = fit_meta(table.rows, spec, mcmc, sf::ExecPolicy::parallel); });
    bool same = serial_d.chains.size() == parallel_d.chains.size();
    for (std::size_t c = 0; same && c < serial_d.chains.size(); ++c)
      same = serial_d.chains[c].mu == parallel_d.chains[c].mu &&
             serial_d.chains[c].tau == parallel_d.chains[c].tau;
    print_row("fit_meta (4 chains)", ts, tp, same);
  }

  return 0;
}
