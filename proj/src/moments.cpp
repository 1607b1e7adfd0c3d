// SPDX-License-Identifier: MIT

#include "caltest/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "caltest/kernels.hpp"

namespace caltest {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument(message);
}

struct Accum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double term) {
    const double next = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) {
      comp += (sum - next) + term;
    } else {
      comp += (term - next) + sum;
    }
    sum = next;
  }

  double value() const { return sum + comp; }
};

double mean_of(std::span<const double> values) {
  Accum acc;
  for (const double v : values) {
    acc.add(v);
  }
  return acc.value() / static_cast<double>(values.size());
}

// Estimates of obligors present at both dates, aligned pairwise.
void gather_persisting(const Panel& panel, int t, int s,
                       std::vector<double>& early,
                       std::vector<double>& late) {
  early.clear();
  late.clear();
  const auto ma = panel.members(t);
  const auto mb = panel.members(s);
  const auto pa = panel.estimates(t);
  const auto pb = panel.estimates(s);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ma.size() && j < mb.size()) {
    if (ma[i] < mb[j]) {
      ++i;
    } else if (mb[j] < ma[i]) {
      ++j;
    } else {
      early.push_back(pa[i]);
      late.push_back(pb[j]);
      ++i;
      ++j;
    }
  }
}

}  // namespace

double state_covariance(double p_earlier, double p_later, double weight) {
  if (!(p_earlier > 0.0 && p_earlier < 1.0) ||
      !(p_later > 0.0 && p_later < 1.0)) {
    fail("state PDs must lie strictly inside (0,1)");
  }
  if (!(weight >= 0.0 && weight <= 1.0)) {
    fail("overlap weight must lie in [0,1]");
  }
  return weight * p_later * (1.0 - p_earlier);
}

double rate_covariance(const Panel& panel, int t, int s) {
  const int lo = t < s ? t : s;
  const int hi = t < s ? s : t;
  const double weight = overlap_weight(lo, hi, panel.windows_per_year());
  if (weight == 0.0) {
    return 0.0;
  }
  const int n_lo = panel.count_at(lo);
  const int n_hi = panel.count_at(hi);
  if (n_lo == 0 || n_hi == 0) {
    return 0.0;
  }
  std::vector<double> early;
  std::vector<double> late;
  gather_persisting(panel, lo, hi, early, late);
  if (early.empty()) {
    return 0.0;
  }
  const double cross = kernels::active_ops().cross(early, late);
  return weight * cross /
         (static_cast<double>(n_lo) * static_cast<double>(n_hi));
}

double long_run_mean(const Panel& panel) {
  if (panel.active_count() == 0) {
    return 0.0;
  }
  Accum acc;
  for (const int t : panel.active_dates()) {
    acc.add(mean_of(panel.estimates(t)));
  }
  return acc.value() / panel.active_count();
}

VarianceBreakdown long_run_variance_exact(const Panel& panel) {
  VarianceBreakdown out;
  const int q = panel.windows_per_year();
  out.lag_terms.assign(q > 1 ? static_cast<std::size_t>(q - 1) : 0, 0.0);
  const int active = panel.active_count();
  if (active == 0) {
    return out;
  }
  const double r2 = static_cast<double>(active) * active;
  const auto& ops = kernels::active_ops();

  Accum diagonal;
  for (const int t : panel.active_dates()) {
    const double n = panel.count_at(t);
    diagonal.add(ops.pq(panel.estimates(t)) / (n * n));
  }
  out.diagonal = diagonal.value() / r2;

  std::vector<double> early;
  std::vector<double> late;
  Accum total;
  total.add(out.diagonal);
  for (int i = 1; i < q; ++i) {
    const double weight = 1.0 - static_cast<double>(i) / q;
    Accum lag;
    for (int t = 1; t + i <= panel.n_dates(); ++t) {
      const int n_t = panel.count_at(t);
      const int n_s = panel.count_at(t + i);
      if (n_t == 0 || n_s == 0) {
        continue;
      }
      gather_persisting(panel, t, t + i, early, late);
      if (early.empty()) {
        continue;
      }
      lag.add(ops.cross(early, late) /
              (static_cast<double>(n_t) * static_cast<double>(n_s)));
    }
    out.lag_terms[static_cast<std::size_t>(i) - 1] =
        2.0 * weight * lag.value() / r2;
    total.add(out.lag_terms[static_cast<std::size_t>(i) - 1]);
  }
  out.total = total.value();
  out.mean = long_run_mean(panel);
  return out;
}

std::vector<double> lambda_coefficients(const Panel& panel) {
  const int q = panel.windows_per_year();
  std::vector<double> lambda(q > 1 ? static_cast<std::size_t>(q - 1) : 0,
                             0.0);
  for (int i = 1; i < q; ++i) {
    const double weight = 1.0 - static_cast<double>(i) / q;
    Accum acc;
    for (int t = 1; t + i <= panel.n_dates(); ++t) {
      const int n_t = panel.count_at(t);
      const int n_s = panel.count_at(t + i);
      if (n_t == 0 || n_s == 0) {
        continue;
      }
      const int k = persisting_count(panel, t, t + i);
      if (k == 0) {
        continue;
      }
      acc.add(static_cast<double>(k) /
              (static_cast<double>(n_t) * static_cast<double>(n_s)));
    }
    lambda[static_cast<std::size_t>(i) - 1] = 2.0 * weight * acc.value();
  }
  return lambda;
}

double grade_variance(const Panel& panel, double pd) {
  if (!(pd > 0.0 && pd < 1.0)) {
    fail("grade pd must lie strictly inside (0,1)");
  }
  const int active = panel.active_count();
  if (active == 0) {
    fail("panel has no populated dates");
  }
  Accum harmonic;
  for (const int t : panel.active_dates()) {
    harmonic.add(1.0 / panel.count_at(t));
  }
  Accum structure;
  structure.add(harmonic.value());
  for (const double l : lambda_coefficients(panel)) {
    structure.add(l);
  }
  const double r2 = static_cast<double>(active) * active;
  return pd * (1.0 - pd) / r2 * structure.value();
}

double realized_lrdr(const Panel& panel) {
  if (!panel.outcomes_complete()) {
    fail("panel has unresolved outcomes; realized rate undefined");
  }
  const int active = panel.active_count();
  if (active == 0) {
    return 0.0;
  }
  Accum acc;
  for (const int t : panel.active_dates()) {
    const auto flags = panel.outcomes(t);
    long defaults = 0;
    for (const std::int8_t f : flags) {
      defaults += f == 1 ? 1 : 0;
    }
    acc.add(static_cast<double>(defaults) /
            static_cast<double>(flags.size()));
  }
  return acc.value() / active;
}

}  // namespace caltest
