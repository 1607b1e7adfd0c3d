// SPDX-License-Identifier: MIT
//
// First and second moments of the long-run default rate under the
// hypothesized PDs.  The rate averages per-date default rates over active
// dates; its variance picks up positive covariance from overlapping windows,
// restricted to obligors persisting between the two dates.

#pragma once

#include <vector>

#include "caltest/panel.hpp"

namespace caltest {

// Cov(x_t, x_s) for one obligor observed at both dates, windows sharing
// fraction `weight`: weight * p_later * (1 - p_earlier).  The earlier date's
// PD enters through the survival factor.
double state_covariance(double p_earlier, double p_later, double weight);

// Cov(X_t, X_s) of the per-date rates under the panel's stored estimates;
// t == s gives Var(X_t).  Zero when the windows do not overlap or no obligor
// persists.
double rate_covariance(const Panel& panel, int t, int s);

// E[Z] = average of per-date mean PDs over active dates (dates with no
// obligors contribute nothing).  Zero for an empty panel.
double long_run_mean(const Panel& panel);

struct VarianceBreakdown {
  double mean = 0.0;
  double diagonal = 0.0;            // sum_t Var(X_t) / R^2
  std::vector<double> lag_terms;    // [i-1] = 2 sum_t Cov(X_t, X_{t+i}) / R^2
  double total = 0.0;               // diagonal + sum(lag_terms)
};

// Var(Z) under the stored estimates, assembled per lag:
//   R^2 Var(Z) = sum_t n_t^-2 sum_j p(1-p)
//              + sum_{i<q} 2 w_i sum_t (n_t n_{t+i})^-1 sum_{persisting} p_{t+i,j} (1 - p_{t,j})
// with w_i = (q-i)/q.  Only active-date pairs contribute.
VarianceBreakdown long_run_variance_exact(const Panel& panel);

// Structure-only overlap coefficients for a homogeneous PD:
//   lambda_i = 2 w_i sum_t k_{t,t+i} / (n_t n_{t+i}),  i = 1..q-1.
// Empty when q == 1.
std::vector<double> lambda_coefficients(const Panel& panel);

// Var(Z) when every obligor carries the same PD:
//   pd (1-pd) / R^2 * (sum_{active} 1/n_t + sum_i lambda_i).
// Agrees with long_run_variance_exact on a constant-PD panel.
double grade_variance(const Panel& panel, double pd);

// Realized long-run default rate from the recorded outcomes.
// Pre: outcomes_complete().  Zero for a panel with no active dates.
double realized_lrdr(const Panel& panel);

}  // namespace caltest
