// SPDX-License-Identifier: MIT
//
// Conservative variance lower bounds for the portfolio-level test.  The
// exact variance is concave in the obligor PDs, so replacing each concave
// per-lag term by an underestimating chord turns the minimization over
// box-constrained PDs with a fixed portfolio mean into a linear program
// whose minimum is attained at a near-vertex point: every variable sits at a
// box bound except at most one.  A closed-form alternative bound trades
// tightness for not needing the LP at all.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "caltest/panel.hpp"

namespace caltest {

enum class BoundMode {
  identity,  // chord of x(1-x)-type terms over [pd_min, pd_max]
  pd_max,    // line through the origin with slope (1 - pd_max); intercept 0
  pd_bar,    // identity chords with the upper box bound tightened to pd_bar
};

// Chords f_i(x) = slope[i] x + intercept[i], i = 0..q-1, underestimating the
// per-lag covariance integrands on [lower, upper].  Index 0 is the diagonal
// term; index i carries the overlap factor (q-i)/q.
struct Linearization {
  BoundMode mode = BoundMode::identity;
  int q = 1;
  std::vector<double> slope;
  std::vector<double> intercept;
  double lower = 0.0;   // admissible PD box
  double upper = 0.0;
};

// `upper` is pd_max for identity/pd_max mode, pd_bar for pd_bar mode.
// Pre: 0 <= pd_min < upper < 1, q >= 1.
Linearization make_linearization(BoundMode mode, int q, double pd_min,
                                 double upper);

// Mean of the n_worst largest master-scale PDs.
// Pre: 1 <= n_worst <= scale size.
double pd_bar(const MasterScale& scale, int n_worst);

// min sum_j alpha[j] x[j]  s.t.  sum_j beta[j] x[j] = mean,
//                                lower <= x[j] <= upper.
// One variable per (obligor, date) membership; label[j] records it.
// `constant` is the additive remainder of the variance expansion, so
// N^2 sigma_min^2 = minimum + constant.
struct BoundProblem {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::pair<int, std::uint32_t>> label;  // (date, dense obligor)
  double lower = 0.0;
  double upper = 0.0;
  double mean = 0.0;
  double constant = 0.0;
  int n_dates = 0;
};

// Assembles the program for a panel (variables ordered date-major, members
// ascending within a date).  Pre: every date active.  Throws when `mu` is
// outside the feasible interval [lower, upper] (tolerance 1e-9 relative).
BoundProblem build_bound_problem(const Panel& panel, const Linearization& lin,
                                 double mu);

struct GreedySolution {
  std::vector<double> x;                  // input variable order
  double objective = 0.0;                 // sum alpha x, constant excluded
  std::size_t at_lower = 0;
  std::size_t at_upper = 0;
  std::optional<std::size_t> boundary;    // the one interior variable, if any
};

// Exact LP minimum: sort by alpha/beta descending (stable; ratios compared
// by cross-multiplication), fill from the top with `lower` while the
// constraint stays reachable, give the pivot variable the balancing value,
// fill the rest with `upper`.  Pre: beta[j] > 0 for all j, lower <= upper,
// mean within [lower, upper] * sum(beta) (tolerance 1e-9 relative; the
// target is clamped into the feasible interval before solving).
GreedySolution greedy_minimize(std::span<const double> alpha,
                               std::span<const double> beta, double lower,
                               double upper, double mean);

struct MinVariance {
  double sigma2 = 0.0;
  double mu = 0.0;
  double constant = 0.0;
  GreedySolution solution;
};

// sigma_min^2(mu) = (LP minimum + constant) / N^2.
MinVariance sigma_min(const Panel& panel, const Linearization& lin, double mu);

struct AltBound {
  double sigma2 = 0.0;
  double per_date_coefficient = 0.0;  // (1 - pd_max) / n_max
  double k1 = 0.0;                    // overlap floor, slope side
  double k2 = 0.0;                    // overlap floor, early-history side
  double mu_old_cap = 1.0;
};

// Largest admissible early-history mean cap: min(1, N (c + K1) mu /
// ((q-1) K1)); 1 when q == 1 or no lag has obligors persisting at every
// date pair.  Pre: every date active.
double mu_old_cap(const Panel& panel, double mu, double pd_max, double gamma);

// Closed-form lower bound
//   sigma_alt^2(mu) = (c + K1) mu / N - K2 / N^2
// with c = (1 - pd_max)/n_max and K1, K2 built from the per-lag floors
// min_t k_{t,t+i} / (n_t n_{t+i}).  Conservative when pd_max dominates every
// PD, gamma under-estimates the persisting-to-portfolio mean ratio, and
// mu_old dominates the first q-1 per-date means.  Pre: every date active,
// pd_max in (0,1), gamma in (0,1], mu in (0,1), mu_old in (0,1) and at most
// mu_old_cap.
AltBound sigma_alt(const Panel& panel, double mu, double pd_max, double gamma,
                   double mu_old);

}  // namespace caltest
