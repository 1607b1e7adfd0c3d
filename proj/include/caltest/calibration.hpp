// SPDX-License-Identifier: MIT
//
// The calibration decision: a two-sided normal acceptance range around the
// hypothesized long-run rate, at grade level (homogeneous PD) or portfolio
// level (heterogeneous PDs with a conservative variance lower bound).

#pragma once

#include <optional>
#include <utility>

#include "caltest/bounds.hpp"
#include "caltest/moments.hpp"
#include "caltest/panel.hpp"

namespace caltest {

enum class Method {
  grade,
  lp_identity,
  lp_pd_max,
  lp_pd_bar,
  alt_bound,
};

struct TestConfig {
  Method method = Method::grade;
  double alpha = 0.05;

  double pd_grade = 0.0;  // grade method: hypothesized grade PD

  // lp_* methods: admissible PD box.  pd_bar additionally needs the scale
  // and n_worst; pd_max is then unused.
  double pd_min = 0.0;
  double pd_max = 0.0;
  std::optional<MasterScale> scale;
  int n_worst = 0;

  // alt_bound method (also reuses pd_max).
  double gamma = 0.0;
  double mu_old = 0.0;
};

struct GradeDiagnostics {
  double variance = 0.0;
  double harmonic_sum = 0.0;          // sum of 1/n_t over active dates
  std::vector<double> lambda;
};

struct BoundDiagnostics {
  double constant = 0.0;              // LP methods
  std::size_t at_lower = 0;
  std::size_t at_upper = 0;
  bool has_boundary = false;
  double boundary_value = 0.0;
  double box_lower = 0.0;
  double box_upper = 0.0;
  double per_date_coefficient = 0.0;  // alt method: (1 - pd_max) / n_max
  double k1 = 0.0;                    // overlap floor, slope side
  double k2 = 0.0;                    // overlap floor, early-history side
  double mu_old_cap = 1.0;
};

struct TestOutcome {
  Method method = Method::grade;
  double alpha = 0.0;
  double center = 0.0;      // hypothesized rate: grade PD or portfolio LRCT
  double sigma = 0.0;
  double lower_raw = 0.0;   // unclamped bounds; the decision uses these
  double upper_raw = 0.0;
  double lower = 0.0;       // clamped to [0,1] for reporting
  double upper = 0.0;
  double statistic = 0.0;   // realized long-run default rate
  bool passed = false;
  std::optional<GradeDiagnostics> grade;
  std::optional<BoundDiagnostics> bound;
};

// Inverse standard normal CDF (Wichura's rational approximations), absolute
// error below 1e-9 across [1e-10, 1-1e-10].  Throws outside (0,1).
double normal_quantile(double p);

// Standard normal CDF via erfc; accurate in both tails.
double normal_cdf(double z);

// Equal-tailed bounds: center + quantile(alpha/2) * sigma and
// center + quantile(1 - alpha/2) * sigma, unclamped.  Pre: alpha in (0,1),
// sigma >= 0.  sigma == 0 collapses both bounds onto the center.
std::pair<double, double> acceptance_range(double center, double sigma,
                                           double alpha);

// Homogeneous-PD test with the exact overlap-aware variance.
// Pre: pd_grade in (0,1), at least one active date, outcomes complete.
TestOutcome grade_test(const Panel& panel, const TestConfig& config);

// Heterogeneous test: center = mean estimate over all dates (requires every
// date active), sigma from the method's conservative lower bound, outcomes
// complete.  The hypothesized mean must lie inside the admissible PD box.
TestOutcome portfolio_test(const Panel& panel, const TestConfig& config);

}  // namespace caltest
