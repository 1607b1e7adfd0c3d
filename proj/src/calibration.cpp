// SPDX-License-Identifier: MIT

#include "caltest/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace caltest {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument(message);
}

// Rational approximations from Wichura's PPND16.  Three regimes: a central
// expansion in (p - 1/2)^2 and two tail expansions in sqrt(-log(tail)).
double quantile_central(double r) {
  const double s = 0.180625 - r * r;
  const double num =
      (((((((2.5090809287301226727e3 * s + 3.3430575583588128105e4) * s +
            6.7265770927008700853e4) *
               s +
           4.5921953931549871457e4) *
              s +
          1.3731693765509461125e4) *
             s +
         1.9715909503065514427e3) *
            s +
        1.3314166789178437745e2) *
           s +
       3.3871328727963666080e0);
  const double den =
      (((((((5.2264952788528545610e3 * s + 2.8729085735721942674e4) * s +
            3.9307895800092710610e4) *
               s +
           2.1213794301586595867e4) *
              s +
          5.3941960214247511077e3) *
             s +
         6.8718700749205790830e2) *
            s +
        4.2313330701600911252e1) *
           s +
       1.0);
  return r * num / den;
}

double quantile_tail(double r) {
  double num;
  double den;
  if (r <= 5.0) {
    const double s = r - 1.6;
    num =
        (((((((7.74545014278341407640e-4 * s + 2.27238449892691845833e-2) *
                  s +
              2.41780725177450611770e-1) *
                 s +
             1.27045825245236838258) *
                s +
            3.64784832476320460504) *
               s +
           5.76949722146069140550) *
              s +
          4.63033784615654529590) *
             s +
         1.42343711074968357734);
    den =
        (((((((1.05075007164441684324e-9 * s + 5.47593808499534494600e-4) *
                  s +
              1.51986665636164571966e-2) *
                 s +
             1.48103976427480074590e-1) *
                s +
            6.89767334985100004550e-1) *
               s +
           1.67638483018380384940) *
              s +
          2.05319162663775882187) *
             s +
         1.0);
  } else {
    const double s = r - 5.0;
    num =
        (((((((2.01033439929228813265e-7 * s + 2.71155556874348757815e-5) *
                  s +
              1.24266094738807843860e-3) *
                 s +
             2.65321895265761230930e-2) *
                s +
            2.96560571828504891230e-1) *
               s +
           1.78482653991729133580) *
              s +
          5.46378491116411436990) *
             s +
         6.65790464350110377720);
    den =
        (((((((2.04426310338993978564e-15 * s + 1.42151175831644588870e-7) *
                  s +
              1.84631831751005468180e-5) *
                 s +
             7.86869131145613259100e-4) *
                s +
            1.48753612908506148525e-2) *
               s +
           1.36929880922735805310e-1) *
              s +
          5.99832206555887937690e-1) *
             s +
         1.0);
  }
  return num / den;
}

void common_checks(const Panel& panel, const TestConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    fail("alpha must lie strictly inside (0,1)");
  }
  if (!panel.outcomes_complete()) {
    fail("panel has unresolved outcomes; the test needs realized flags");
  }
}

TestOutcome assemble(const Panel& panel, const TestConfig& config,
                     double center, double sigma) {
  TestOutcome out;
  out.method = config.method;
  out.alpha = config.alpha;
  out.center = center;
  out.sigma = sigma;
  const auto [lo, hi] = acceptance_range(center, sigma, config.alpha);
  out.lower_raw = lo;
  out.upper_raw = hi;
  out.lower = std::clamp(lo, 0.0, 1.0);
  out.upper = std::clamp(hi, 0.0, 1.0);
  out.statistic = realized_lrdr(panel);
  // The decision uses the unclamped bounds: a range entirely outside [0,1]
  // must reject even though the clamped range degenerates.
  out.passed = out.statistic >= out.lower_raw && out.statistic <= out.upper_raw;
  return out;
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    fail("quantile argument must lie strictly inside (0,1)");
  }
  const double r = p - 0.5;
  if (std::fabs(r) <= 0.425) {
    return quantile_central(r);
  }
  const double tail = r < 0.0 ? p : 1.0 - p;
  const double value = quantile_tail(std::sqrt(-std::log(tail)));
  return r < 0.0 ? -value : value;
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

std::pair<double, double> acceptance_range(double center, double sigma,
                                           double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail("alpha must lie strictly inside (0,1)");
  }
  if (!(sigma >= 0.0)) {
    fail("sigma must be nonnegative");
  }
  if (sigma == 0.0) {
    return {center, center};
  }
  const double lo = center + normal_quantile(alpha / 2.0) * sigma;
  const double hi = center + normal_quantile(1.0 - alpha / 2.0) * sigma;
  return {lo, hi};
}

TestOutcome grade_test(const Panel& panel, const TestConfig& config) {
  common_checks(panel, config);
  if (!(config.pd_grade > 0.0 && config.pd_grade < 1.0)) {
    fail("pd_grade must lie strictly inside (0,1)");
  }
  if (panel.active_count() == 0) {
    fail("panel has no populated dates");
  }
  const double variance = grade_variance(panel, config.pd_grade);
  TestOutcome out =
      assemble(panel, config, config.pd_grade, std::sqrt(variance));
  out.method = Method::grade;

  GradeDiagnostics diag;
  diag.variance = variance;
  diag.lambda = lambda_coefficients(panel);
  double harmonic = 0.0;
  for (const int t : panel.active_dates()) {
    harmonic += 1.0 / panel.count_at(t);
  }
  diag.harmonic_sum = harmonic;
  out.grade = std::move(diag);
  return out;
}

TestOutcome portfolio_test(const Panel& panel, const TestConfig& config) {
  common_checks(panel, config);
  if (config.method == Method::grade) {
    fail("portfolio_test does not run the grade method");
  }
  if (panel.active_count() != panel.n_dates()) {
    fail("portfolio test requires every date to be populated");
  }
  const double mu = long_run_mean(panel);

  BoundDiagnostics diag;
  double sigma2 = 0.0;
  if (config.method == Method::alt_bound) {
    if (!(config.mu_old > 0.0)) {
      fail("alt method needs mu_old in (0,1)");
    }
    const AltBound alt =
        sigma_alt(panel, mu, config.pd_max, config.gamma, config.mu_old);
    sigma2 = alt.sigma2;
    diag.per_date_coefficient = alt.per_date_coefficient;
    diag.k1 = alt.k1;
    diag.k2 = alt.k2;
    diag.mu_old_cap = alt.mu_old_cap;
    diag.box_lower = 0.0;
    diag.box_upper = config.pd_max;
  } else {
    BoundMode mode = BoundMode::identity;
    double upper = config.pd_max;
    if (config.method == Method::lp_pd_max) {
      mode = BoundMode::pd_max;
    } else if (config.method == Method::lp_pd_bar) {
      mode = BoundMode::pd_bar;
      if (!config.scale.has_value()) {
        fail("pd_bar method needs a master scale");
      }
      upper = pd_bar(*config.scale, config.n_worst);
    }
    const Linearization lin = make_linearization(
        mode, panel.windows_per_year(), config.pd_min, upper);
    const MinVariance mv = sigma_min(panel, lin, mu);
    sigma2 = mv.sigma2;
    diag.constant = mv.constant;
    diag.at_lower = mv.solution.at_lower;
    diag.at_upper = mv.solution.at_upper;
    diag.has_boundary = mv.solution.boundary.has_value();
    diag.boundary_value = mv.solution.boundary.has_value()
                              ? mv.solution.x[*mv.solution.boundary]
                              : 0.0;
    diag.box_lower = lin.lower;
    diag.box_upper = lin.upper;
  }

  TestOutcome out = assemble(panel, config, mu, std::sqrt(sigma2));
  out.bound = diag;
  return out;
}

}  // namespace caltest
