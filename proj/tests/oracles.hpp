// SPDX-License-Identifier: MIT
//
// Independent reference implementations used only by tests.  Deliberately
// slow and simple: exhaustive enumeration of the joint default law for tiny
// panels, and vertex enumeration for box-constrained LPs.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "caltest/panel.hpp"

namespace oracle {

struct Slot {
  int date = 0;
  double pd = 0.0;
};

// One obligor observed at one or two dates (slots sorted by date).  The
// two-date joint law is the bivariate Bernoulli whose covariance equals the
// window-overlap value w * p_later * (1 - p_earlier); the marginal default
// probabilities are the slot PDs.
struct Member {
  std::vector<Slot> slots;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

inline Moments enumerate_moments(const std::vector<Member>& members,
                                 int n_dates, int q) {
  std::vector<int> count(static_cast<std::size_t>(n_dates) + 1, 0);
  for (const Member& m : members) {
    if (m.slots.empty() || m.slots.size() > 2) {
      throw std::logic_error("oracle members carry one or two slots");
    }
    for (const Slot& s : m.slots) {
      count[static_cast<std::size_t>(s.date)] += 1;
    }
  }
  std::vector<int> active;
  for (int t = 1; t <= n_dates; ++t) {
    if (count[static_cast<std::size_t>(t)] > 0) {
      active.push_back(t);
    }
  }
  const double r = static_cast<double>(active.size());

  struct Outcome {
    double prob = 0.0;
    std::array<int, 2> d = {0, 0};
  };
  std::vector<std::vector<Outcome>> tables;
  for (const Member& m : members) {
    std::vector<Outcome> tab;
    if (m.slots.size() == 1) {
      const double p = m.slots[0].pd;
      tab.push_back({1.0 - p, {0, 0}});
      tab.push_back({p, {1, 0}});
    } else {
      const Slot& a = m.slots[0];
      const Slot& b = m.slots[1];
      if (a.date >= b.date) {
        throw std::logic_error("oracle slots must be date-sorted");
      }
      const double w = caltest::overlap_weight(a.date, b.date, q);
      const double p11 = a.pd * b.pd + w * b.pd * (1.0 - a.pd);
      const Outcome table[4] = {{1.0 - a.pd - b.pd + p11, {0, 0}},
                                {a.pd - p11, {1, 0}},
                                {b.pd - p11, {0, 1}},
                                {p11, {1, 1}}};
      for (const Outcome& o : table) {
        if (o.prob < -1e-15) {
          throw std::logic_error("oracle joint pmf is not valid: " +
                                 std::to_string(o.prob));
        }
        tab.push_back(o);
      }
    }
    tables.push_back(std::move(tab));
  }

  long double ez = 0.0L;
  long double ez2 = 0.0L;
  std::vector<int> defaults(static_cast<std::size_t>(n_dates) + 1, 0);
  std::function<void(std::size_t, long double)> walk =
      [&](std::size_t idx, long double prob) {
        if (idx == members.size()) {
          long double z = 0.0L;
          for (const int t : active) {
            z += static_cast<long double>(defaults[static_cast<std::size_t>(t)]) /
                 count[static_cast<std::size_t>(t)];
          }
          z /= r;
          ez += prob * z;
          ez2 += prob * z * z;
          return;
        }
        for (const auto& o : tables[idx]) {
          for (std::size_t s = 0; s < members[idx].slots.size(); ++s) {
            defaults[static_cast<std::size_t>(members[idx].slots[s].date)] +=
                o.d[s];
          }
          walk(idx + 1, prob * o.prob);
          for (std::size_t s = 0; s < members[idx].slots.size(); ++s) {
            defaults[static_cast<std::size_t>(members[idx].slots[s].date)] -=
                o.d[s];
          }
        }
      };
  walk(0, 1.0L);
  return {static_cast<double>(ez), static_cast<double>(ez2 - ez * ez)};
}

// min sum alpha[j] x[j] s.t. sum beta[j] x[j] = mean, lower <= x <= upper,
// by trying every vertex: all-but-one variable at a bound, the remaining one
// solving the equality.  Usable up to a dozen variables.
inline double vertex_min(std::span<const double> alpha,
                         std::span<const double> beta, double lower,
                         double upper, double mean) {
  const std::size_t n = alpha.size();
  if (n == 0 || n > 20 || beta.size() != n) {
    throw std::logic_error("vertex oracle misuse");
  }
  const double slack = 1e-9 * (std::fabs(lower) + std::fabs(upper) + 1.0);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t pivot = 0; pivot < n; ++pivot) {
    const std::uint32_t masks = 1u << (n - 1);
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      long double bsum = 0.0L;
      long double obj = 0.0L;
      std::uint32_t bit = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == pivot) {
          continue;
        }
        const double v = ((mask >> bit) & 1u) != 0 ? upper : lower;
        ++bit;
        bsum += static_cast<long double>(beta[j]) * v;
        obj += static_cast<long double>(alpha[j]) * v;
      }
      double xv = static_cast<double>(
          (static_cast<long double>(mean) - bsum) / beta[pivot]);
      if (xv < lower - slack || xv > upper + slack) {
        continue;
      }
      xv = std::clamp(xv, lower, upper);
      best = std::min(
          best, static_cast<double>(obj + static_cast<long double>(alpha[pivot]) * xv));
    }
  }
  return best;
}

// Record shorthand: outcome < 0 leaves the window unresolved.
inline caltest::ObligorRecord rec(int date, const std::string& id, double pd,
                                  int outcome = -1) {
  caltest::ObligorRecord r;
  r.date_index = date;
  r.obligor_id = id;
  r.pd_estimate = pd;
  if (outcome >= 0) {
    r.defaulted = outcome != 0;
  }
  return r;
}

// n_obligors obligors present at every date with one shared PD; the first
// defaults_per_date of them default in every window.
inline std::vector<caltest::ObligorRecord> uniform_records(
    int n_dates, int n_obligors, double pd, int defaults_per_date = 0) {
  std::vector<caltest::ObligorRecord> out;
  for (int t = 1; t <= n_dates; ++t) {
    for (int j = 0; j < n_obligors; ++j) {
      out.push_back(rec(t, "c" + std::to_string(j + 1), pd,
                        j < defaults_per_date ? 1 : 0));
    }
  }
  return out;
}

// Steady churn: date t hosts ids (t-1)*step .. (t-1)*step + n - 1, so dates
// i apart share n - i*step obligors and every count is n.
inline std::vector<caltest::ObligorRecord> sliding_records(
    int n_dates, int n, int step, double pd, int defaults_per_date = 0) {
  std::vector<caltest::ObligorRecord> out;
  for (int t = 1; t <= n_dates; ++t) {
    const int first = (t - 1) * step;
    for (int j = 0; j < n; ++j) {
      out.push_back(rec(t, "c" + std::to_string(first + j), pd,
                        j < defaults_per_date ? 1 : 0));
    }
  }
  return out;
}

}  // namespace oracle
