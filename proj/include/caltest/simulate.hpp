// SPDX-License-Identifier: MIT
//
// Monte Carlo check of the normal approximation.  Defaults are generated at
// subperiod resolution with a per-year hazard calibrated so a full window
// defaults with exactly the obligor's PD; overlapping windows then correlate
// through their shared subperiods.  Draws are keyed by
// (seed, replication, obligor, subperiod), so results are independent of
// evaluation order and thread count.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "caltest/panel.hpp"

namespace caltest {

// Obligors draw a PD from a discrete grade mixture at first appearance.
struct GradeMixture {
  std::vector<double> pds;      // each in (0,1)
  std::vector<double> weights;  // positive; normalized internally
};

// Exact persisting counts: k[i-1][t-1] = |members(t) ^ members(t+i)| for
// lag i = 1..q-1, t = 1..N-i.
struct LagCounts {
  std::vector<std::vector<int>> k;
};

// Stationary overlap fractions per lag; realized counts round down:
// k = floor(r_i * min(n_t, n_{t+i})).
struct LagRatios {
  std::vector<double> r;  // size q-1, each in [0,1]
};

struct Scenario {
  int n_dates = 0;
  int windows_per_year = 1;
  std::vector<int> customers;  // per date; size n_dates
  std::variant<std::monostate, LagCounts, LagRatios> persistence;
  std::variant<double, GradeMixture> pd = 0.01;
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
  std::vector<double> tail_thresholds = {0.5};
};

// JSON schema (unknown keys ignored):
//   n_dates, windows_per_year, customers (int or per-date array),
//   replications, seed, tail_thresholds (optional),
//   pd (number) or pd {grades:[...], weights:[...]},
//   persistence (optional) {lag_counts:[[...],...]} or {lag_ratios:[...]}.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

// Per-subperiod hazard theta with (1 - theta)^q = 1 - p, computed stably
// for small p.  Pre: p in (0,1), q >= 1.
double subperiod_hazard(double p, int q);

// Membership realization: interval lifetimes built by cohort survival
// (oldest obligors are retained first).  Deterministic; independent of the
// seed.  Throws std::invalid_argument when no interval-lifetime panel can
// meet the requested persisting counts ("persistence counts inconsistent").
// The returned panel of one replication carries the drawn PDs as estimates
// and the simulated window outcomes as flags.
Panel simulate_panel(const Scenario& scenario, std::uint32_t replication);

struct SimulationSummary {
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
  std::vector<double> samples;        // indexed by replication
  double analytic_mean = 0.0;         // moments of Z under the scenario PDs
  double analytic_sd = 0.0;
  double empirical_mean = 0.0;
  double empirical_variance = 0.0;
  double ks_distance = 0.0;           // sup |ECDF - Normal(analytic)|
  std::vector<double> tail_thresholds;
  std::vector<double> tail_probabilities;  // P(Z >= threshold), aligned
};

// Runs all replications (parallelized over a fixed worker budget, results
// bit-reproducible for any thread count) and compares the sample law with
// the normal approximation.  Pre: replications >= 1.
SimulationSummary simulate_lrdr(const Scenario& scenario);

// sup-distance between the ECDF of `samples` and Normal(mean, sd); ties are
// handled by evaluating both one-sided gaps at every sample.  Pre: sd > 0,
// samples nonempty.
double ks_normal_distance(std::vector<double> samples, double mean, double sd);

// Rule-of-thumb screen for trusting the normal approximation: at least 30
// active dates, every active n_t >= 2, min/max count ratio >= 1/10.
struct HeuristicReport {
  bool passed = false;
  int active_dates = 0;
  int min_count = 0;
  int max_count = 0;
  double count_ratio = 0.0;
  std::vector<std::string> failures;
};

HeuristicReport convergence_heuristic(const Panel& panel);
HeuristicReport convergence_heuristic(const Scenario& scenario);

}  // namespace caltest
