// SPDX-License-Identifier: MIT

#include "caltest/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace caltest {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument(message);
}

// Relative slack for the equality-constraint feasibility check; corner
// targets (mu exactly at a box edge) survive double rounding.
constexpr double kFeasibilitySlack = 1e-9;

void require_all_dates_active(const Panel& panel) {
  if (panel.active_count() != panel.n_dates()) {
    fail("portfolio bounds require every date to be populated");
  }
}

}  // namespace

Linearization make_linearization(BoundMode mode, int q, double pd_min,
                                 double upper) {
  if (q < 1) {
    fail("windows_per_year must be at least 1");
  }
  if (!(pd_min >= 0.0) || !(upper < 1.0) || !(pd_min < upper)) {
    fail("PD box must satisfy 0 <= pd_min < upper bound < 1");
  }
  Linearization lin;
  lin.mode = mode;
  lin.q = q;
  lin.lower = pd_min;
  lin.upper = upper;
  lin.slope.resize(static_cast<std::size_t>(q));
  lin.intercept.resize(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    const double weight = 1.0 - static_cast<double>(i) / q;
    if (mode == BoundMode::pd_max) {
      lin.slope[static_cast<std::size_t>(i)] = weight * (1.0 - upper);
      lin.intercept[static_cast<std::size_t>(i)] = 0.0;
    } else {
      lin.slope[static_cast<std::size_t>(i)] =
          weight * (1.0 - upper - pd_min);
      lin.intercept[static_cast<std::size_t>(i)] = weight * pd_min * upper;
    }
  }
  return lin;
}

double pd_bar(const MasterScale& scale, int n_worst) {
  const int grades = static_cast<int>(scale.pds.size());
  if (n_worst < 1 || n_worst > grades) {
    fail("n_worst must lie in [1, number of grades]");
  }
  long double sum = 0.0L;
  for (int j = grades - n_worst; j < grades; ++j) {
    sum += scale.pds[static_cast<std::size_t>(j)];
  }
  return static_cast<double>(sum / n_worst);
}

BoundProblem build_bound_problem(const Panel& panel, const Linearization& lin,
                                 double mu) {
  require_all_dates_active(panel);
  if (lin.q != panel.windows_per_year()) {
    fail("linearization was built for a different window count");
  }
  const int n_dates = panel.n_dates();
  const int q = lin.q;

  BoundProblem prob;
  prob.lower = lin.lower;
  prob.upper = lin.upper;
  prob.n_dates = n_dates;

  std::vector<std::size_t> base(static_cast<std::size_t>(n_dates) + 1, 0);
  for (int t = 1; t <= n_dates; ++t) {
    base[static_cast<std::size_t>(t)] =
        base[static_cast<std::size_t>(t) - 1] +
        static_cast<std::size_t>(panel.count_at(t));
  }
  const std::size_t n_vars = base.back();
  prob.alpha.assign(n_vars, 0.0);
  prob.beta.assign(n_vars, 0.0);
  prob.label.reserve(n_vars);

  for (int t = 1; t <= n_dates; ++t) {
    const double n_t = panel.count_at(t);
    const double diag = lin.slope[0] / (n_t * n_t);
    const double beta = 1.0 / (n_dates * n_t);
    const auto ids = panel.members(t);
    for (std::size_t j = 0; j < ids.size(); ++j) {
      const std::size_t var = base[static_cast<std::size_t>(t) - 1] + j;
      prob.alpha[var] = diag;
      prob.beta[var] = beta;
      prob.label.emplace_back(t, ids[j]);
    }
  }

  // Cross terms attach to the later date's variable: the pair (t, t+i)
  // adds 2 slope_i / (n_t n_{t+i}) to every persisting obligor at t+i.
  long double constant = 0.0L;
  {
    long double harmonic = 0.0L;
    for (int t = 1; t <= n_dates; ++t) {
      harmonic += 1.0L / panel.count_at(t);
    }
    constant = static_cast<long double>(lin.intercept[0]) * harmonic;
  }
  for (int i = 1; i < q; ++i) {
    const double slope = lin.slope[static_cast<std::size_t>(i)];
    const double intercept = lin.intercept[static_cast<std::size_t>(i)];
    for (int t = 1; t + i <= n_dates; ++t) {
      const int s = t + i;
      const double pair_scale =
          static_cast<double>(panel.count_at(t)) * panel.count_at(s);
      const auto ma = panel.members(t);
      const auto mb = panel.members(s);
      std::size_t a = 0;
      std::size_t b = 0;
      int persisting = 0;
      while (a < ma.size() && b < mb.size()) {
        if (ma[a] < mb[b]) {
          ++a;
        } else if (mb[b] < ma[a]) {
          ++b;
        } else {
          prob.alpha[base[static_cast<std::size_t>(s) - 1] + b] +=
              2.0 * slope / pair_scale;
          ++persisting;
          ++a;
          ++b;
        }
      }
      constant += 2.0L * intercept * persisting / pair_scale;
    }
  }
  prob.constant = static_cast<double>(constant);

  long double beta_sum = 0.0L;
  for (const double b : prob.beta) {
    beta_sum += b;
  }
  const long double lo = prob.lower * beta_sum;
  const long double hi = prob.upper * beta_sum;
  const long double slack =
      kFeasibilitySlack * std::max<long double>(hi - lo, 1e-300L);
  if (mu < lo - slack || mu > hi + slack) {
    fail("target mean is infeasible for the PD box");
  }
  prob.mean = static_cast<double>(
      std::clamp<long double>(mu, lo, hi));
  return prob;
}

GreedySolution greedy_minimize(std::span<const double> alpha,
                               std::span<const double> beta, double lower,
                               double upper, double mean) {
  const std::size_t n = alpha.size();
  if (n == 0 || beta.size() != n) {
    fail("objective and constraint rows must be nonempty and equal-sized");
  }
  if (!(lower <= upper)) {
    fail("box bounds are inverted");
  }
  for (const double b : beta) {
    if (!(b > 0.0)) {
      fail("constraint weights must be positive");
    }
  }

  long double beta_sum = 0.0L;
  for (const double b : beta) {
    beta_sum += b;
  }
  const long double feas_lo = lower * beta_sum;
  const long double feas_hi = upper * beta_sum;
  const long double slack =
      kFeasibilitySlack * std::max<long double>(feas_hi - feas_lo, 1e-300L);
  if (mean < feas_lo - slack || mean > feas_hi + slack) {
    fail("target mean is infeasible for the box");
  }
  const long double target = std::clamp<long double>(mean, feas_lo, feas_hi);

  // Profitability order: alpha/beta descending, stable so ties keep the
  // smaller original index first.  Cross-multiplied in extended precision;
  // beta > 0 keeps the comparison exact in direction.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return static_cast<long double>(alpha[a]) * beta[b] >
                            static_cast<long double>(alpha[b]) * beta[a];
                   });

  // Largest prefix that can be parked at `lower` while the suffix at
  // `upper` still reaches the target.
  std::size_t k0 = 0;
  {
    long double low_mass = 0.0L;  // beta over the prefix
    for (std::size_t k = 1; k <= n; ++k) {
      low_mass += beta[order[k - 1]];
      const long double reach =
          lower * low_mass + upper * (beta_sum - low_mass);
      if (reach >= target) {
        k0 = k;
      } else {
        break;
      }
    }
  }

  GreedySolution sol;
  sol.x.assign(n, upper);
  long double low_mass = 0.0L;
  for (std::size_t k = 0; k < k0; ++k) {
    sol.x[order[k]] = lower;
    low_mass += beta[order[k]];
  }
  sol.at_lower = k0;
  sol.at_upper = n - k0;
  if (k0 < n) {
    const std::size_t pivot = order[k0];
    const long double rest = beta_sum - low_mass - beta[pivot];
    long double value =
        (target - lower * low_mass - upper * rest) / beta[pivot];
    value = std::clamp<long double>(value, lower, upper);
    sol.x[pivot] = static_cast<double>(value);
    sol.boundary = pivot;
    sol.at_upper = n - k0 - 1;
  }

  long double objective = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    objective += static_cast<long double>(alpha[j]) * sol.x[j];
  }
  sol.objective = static_cast<double>(objective);
  return sol;
}

MinVariance sigma_min(const Panel& panel, const Linearization& lin,
                      double mu) {
  const BoundProblem prob = build_bound_problem(panel, lin, mu);
  MinVariance out;
  out.mu = mu;
  out.constant = prob.constant;
  out.solution = greedy_minimize(prob.alpha, prob.beta, prob.lower,
                                 prob.upper, prob.mean);
  const double n2 =
      static_cast<double>(prob.n_dates) * static_cast<double>(prob.n_dates);
  out.sigma2 = std::max(0.0, (out.solution.objective + prob.constant) / n2);
  return out;
}

namespace {

struct AltParts {
  double c = 0.0;
  double k1 = 0.0;
  double k2_per_mu_old = 0.0;
};

AltParts alt_parts(const Panel& panel, double pd_max, double gamma) {
  require_all_dates_active(panel);
  if (!(pd_max > 0.0 && pd_max < 1.0)) {
    fail("pd_max must lie strictly inside (0,1)");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    fail("gamma must lie in (0,1]");
  }
  AltParts parts;
  parts.c = (1.0 - pd_max) / panel.max_count();
  const int q = panel.windows_per_year();
  for (int i = 1; i < q; ++i) {
    if (panel.n_dates() - i < 1) {
      break;  // no date pairs at this lag
    }
    double floor_ratio = 0.0;
    bool first = true;
    for (int t = 1; t + i <= panel.n_dates(); ++t) {
      const double ratio =
          static_cast<double>(persisting_count(panel, t, t + i)) /
          (static_cast<double>(panel.count_at(t)) * panel.count_at(t + i));
      if (first || ratio < floor_ratio) {
        floor_ratio = ratio;
        first = false;
      }
    }
    const double weight = 1.0 - static_cast<double>(i) / q;
    const double term = 2.0 * floor_ratio * weight * (1.0 - pd_max) * gamma;
    parts.k1 += term;
    parts.k2_per_mu_old += term * i;
  }
  return parts;
}

}  // namespace

double mu_old_cap(const Panel& panel, double mu, double pd_max,
                  double gamma) {
  if (!(mu > 0.0 && mu < 1.0)) {
    fail("mu must lie strictly inside (0,1)");
  }
  const AltParts parts = alt_parts(panel, pd_max, gamma);
  const int q = panel.windows_per_year();
  if (q == 1 || parts.k1 <= 0.0) {
    return 1.0;
  }
  const double cap = panel.n_dates() * (parts.c + parts.k1) * mu /
                     ((q - 1) * parts.k1);
  return std::min(1.0, cap);
}

AltBound sigma_alt(const Panel& panel, double mu, double pd_max, double gamma,
                   double mu_old) {
  if (!(mu > 0.0 && mu < 1.0)) {
    fail("mu must lie strictly inside (0,1)");
  }
  if (!(mu_old > 0.0 && mu_old < 1.0)) {
    fail("mu_old must lie strictly inside (0,1)");
  }
  const AltParts parts = alt_parts(panel, pd_max, gamma);
  AltBound out;
  out.per_date_coefficient = parts.c;
  out.k1 = parts.k1;
  out.k2 = parts.k2_per_mu_old * mu_old;
  out.mu_old_cap = mu_old_cap(panel, mu, pd_max, gamma);
  if (mu_old > out.mu_old_cap) {
    fail("mu_old exceeds the admissible early-history cap");
  }
  const double n = panel.n_dates();
  out.sigma2 = std::max(0.0, (parts.c + parts.k1) * mu / n - out.k2 / (n * n));
  return out;
}

}  // namespace caltest
