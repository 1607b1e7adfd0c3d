// SPDX-License-Identifier: MIT

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <doctest.h>

#include "caltest/bounds.hpp"
#include "caltest/moments.hpp"
#include "caltest/panel.hpp"
#include "oracles.hpp"

using caltest::BoundMode;
using caltest::build_panel;
using caltest::Linearization;
using caltest::make_linearization;
using caltest::ObligorRecord;
using caltest::Panel;
using oracle::rec;

TEST_CASE("linearization coefficients and the chord property") {
  const Linearization lin =
      make_linearization(BoundMode::identity, 4, 0.0003, 0.2);
  REQUIRE(lin.slope.size() == 4);
  for (int i = 0; i < 4; ++i) {
    const double w = 1.0 - i / 4.0;
    CHECK(lin.slope[i] == doctest::Approx(w * (1.0 - 0.2 - 0.0003)).epsilon(1e-14));
    CHECK(lin.intercept[i] == doctest::Approx(w * 0.0003 * 0.2).epsilon(1e-14));
  }
  // chord of x(1-x): exact at the box ends, below in the middle
  const auto chord = [&](double x) { return lin.slope[0] * x + lin.intercept[0]; };
  CHECK(chord(0.0003) == doctest::Approx(0.0003 * 0.9997).epsilon(1e-12));
  CHECK(chord(0.2) == doctest::Approx(0.2 * 0.8).epsilon(1e-12));
  const double mid = 0.5 * (0.0003 + 0.2);
  CHECK(chord(mid) < mid * (1.0 - mid));

  const Linearization flat =
      make_linearization(BoundMode::pd_max, 4, 0.0003, 0.2);
  for (int i = 0; i < 4; ++i) {
    const double w = 1.0 - i / 4.0;
    CHECK(flat.slope[i] == doctest::Approx(w * 0.8).epsilon(1e-14));
    CHECK(flat.intercept[i] == 0.0);
  }

  CHECK_THROWS_AS(make_linearization(BoundMode::identity, 0, 0.0, 0.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_linearization(BoundMode::identity, 4, 0.2, 0.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_linearization(BoundMode::identity, 4, -0.1, 0.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_linearization(BoundMode::identity, 4, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("pd_bar averages the worst grades") {
  caltest::MasterScale scale;
  scale.grades = {"A", "B", "C", "D", "E"};
  scale.pds = {0.0003, 0.005, 0.02, 0.1, 0.2};
  CHECK(caltest::pd_bar(scale, 1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(caltest::pd_bar(scale, 2) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(caltest::pd_bar(scale, 5) == doctest::Approx(0.3253 / 5).epsilon(1e-13));
  CHECK_THROWS_AS(caltest::pd_bar(scale, 0), std::invalid_argument);
  CHECK_THROWS_AS(caltest::pd_bar(scale, 6), std::invalid_argument);
}

TEST_CASE("bound problem assembly on a two-date panel") {
  // 2 dates, 2 obligors, full persistence, q=2.
  const Panel panel = build_panel(oracle::uniform_records(2, 2, 0.05), 2, 2);
  const Linearization lin = make_linearization(BoundMode::identity, 2, 0.01, 0.3);
  const caltest::BoundProblem prob = caltest::build_bound_problem(panel, lin, 0.05);

  REQUIRE(prob.alpha.size() == 4);
  REQUIRE(prob.label.size() == 4);
  // date-major variable order
  CHECK(prob.label[0] == std::pair<int, std::uint32_t>{1, 0});
  CHECK(prob.label[1] == std::pair<int, std::uint32_t>{1, 1});
  CHECK(prob.label[2] == std::pair<int, std::uint32_t>{2, 0});
  CHECK(prob.label[3] == std::pair<int, std::uint32_t>{2, 1});
  for (const double b : prob.beta) {
    CHECK(b == doctest::Approx(0.25).epsilon(1e-15));
  }
  // date-1 variables carry only the diagonal slope; date-2 variables add the
  // lag-1 cross slope for their persisting obligor
  const double diag = lin.slope[0] / 4.0;
  const double cross = 2.0 * lin.slope[1] / 4.0;
  CHECK(prob.alpha[0] == doctest::Approx(diag).epsilon(1e-14));
  CHECK(prob.alpha[1] == doctest::Approx(diag).epsilon(1e-14));
  CHECK(prob.alpha[2] == doctest::Approx(diag + cross).epsilon(1e-14));
  CHECK(prob.alpha[3] == doctest::Approx(diag + cross).epsilon(1e-14));
  // constant: intercept_0 * sum 1/n_t + 2 intercept_1 * k/(n n)
  CHECK(prob.constant ==
        doctest::Approx(lin.intercept[0] * 1.0 + 2.0 * lin.intercept[1] * 2.0 / 4.0)
            .epsilon(1e-13));

  CHECK_THROWS_AS(caltest::build_bound_problem(panel, lin, 0.5),
                  std::invalid_argument);  // mean outside the box

  const Linearization other_q = make_linearization(BoundMode::identity, 3, 0.01, 0.3);
  CHECK_THROWS_AS(caltest::build_bound_problem(panel, other_q, 0.05),
                  std::invalid_argument);

  const std::vector<ObligorRecord> gap{rec(1, "a", 0.05, 0), rec(3, "a", 0.05, 0)};
  const Panel with_gap = build_panel(gap, 3, 2);
  CHECK_THROWS_AS(caltest::build_bound_problem(with_gap, other_q, 0.05),
                  std::invalid_argument);  // empty date 2
}

TEST_CASE("greedy minimize: worked example") {
  const std::vector<double> alpha{3.0, 2.0, 1.0};
  const std::vector<double> beta{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const caltest::GreedySolution sol =
      caltest::greedy_minimize(alpha, beta, 0.1, 0.9, 0.5);
  REQUIRE(sol.x.size() == 3);
  CHECK(sol.x[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(sol.x[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.x[2] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(sol.objective == doctest::Approx(2.2).epsilon(1e-12));
  CHECK(sol.at_lower == 1);
  CHECK(sol.at_upper == 1);
  REQUIRE(sol.boundary.has_value());
  CHECK(*sol.boundary == 1);
}

TEST_CASE("greedy minimize: corner targets") {
  const std::vector<double> alpha{3.0, 2.0, 1.0};
  const std::vector<double> beta{0.5, 0.25, 0.25};

  const auto all_low = caltest::greedy_minimize(alpha, beta, 0.1, 0.9, 0.1);
  CHECK(all_low.at_lower == 3);
  CHECK_FALSE(all_low.boundary.has_value());
  CHECK(all_low.objective == doctest::Approx(0.6).epsilon(1e-12));

  const auto all_high = caltest::greedy_minimize(alpha, beta, 0.1, 0.9, 0.9);
  CHECK(all_high.at_lower == 0);
  // the pivot lands exactly on the upper bound
  CHECK(all_high.objective == doctest::Approx(0.9 * 6.0).epsilon(1e-12));
  for (const double x : all_high.x) {
    CHECK(x == doctest::Approx(0.9).epsilon(1e-12));
  }

  CHECK_THROWS_AS(caltest::greedy_minimize(alpha, beta, 0.1, 0.9, 0.95),
                  std::invalid_argument);
  CHECK_THROWS_AS(caltest::greedy_minimize(alpha, beta, 0.1, 0.9, 0.05),
                  std::invalid_argument);
  CHECK_THROWS_AS(caltest::greedy_minimize({}, {}, 0.1, 0.9, 0.5),
                  std::invalid_argument);
  const std::vector<double> bad_beta{0.5, -0.25, 0.25};
  CHECK_THROWS_AS(caltest::greedy_minimize(alpha, bad_beta, 0.1, 0.9, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(caltest::greedy_minimize(alpha, beta, 0.9, 0.1, 0.5),
                  std::invalid_argument);
}

TEST_CASE("greedy minimize matches vertex enumeration and meets the constraint") {
  std::mt19937 gen(31415);
  std::uniform_real_distribution<double> coef(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(gen);
    std::vector<double> alpha(n);
    std::vector<double> beta(n);
    for (int j = 0; j < n; ++j) {
      alpha[j] = coef(gen) * 2.0 - 0.5;  // may be negative
      beta[j] = 0.05 + coef(gen);
    }
    const double lower = 0.1 * coef(gen);
    const double upper = lower + 0.05 + coef(gen) * 0.5;
    double beta_sum = 0.0;
    for (const double b : beta) {
      beta_sum += b;
    }
    const double mean =
        beta_sum * (lower + (upper - lower) * coef(gen));

    const auto sol = caltest::greedy_minimize(alpha, beta, lower, upper, mean);
    const double oracle_min =
        oracle::vertex_min(alpha, beta, lower, upper, mean);
    CHECK(sol.objective == doctest::Approx(oracle_min).epsilon(5e-13));

    long double lhs = 0.0L;
    for (int j = 0; j < n; ++j) {
      REQUIRE(sol.x[j] >= lower - 1e-12);
      REQUIRE(sol.x[j] <= upper + 1e-12);
      lhs += static_cast<long double>(beta[j]) * sol.x[j];
    }
    CHECK(static_cast<double>(lhs) ==
          doctest::Approx(mean).epsilon(1e-10));
  }
}

TEST_CASE("sigma_min agrees with vertex enumeration on a small panel") {
  // 3 dates x 2 obligors with churn: 6 LP variables.
  const std::vector<ObligorRecord> records{
      rec(1, "a", 0.02, 0), rec(1, "b", 0.04, 0),
      rec(2, "a", 0.02, 0), rec(2, "c", 0.05, 0),
      rec(3, "a", 0.02, 0), rec(3, "c", 0.05, 0),
  };
  const Panel panel = build_panel(records, 3, 3);
  const double mu = caltest::long_run_mean(panel);
  for (const BoundMode mode : {BoundMode::identity, BoundMode::pd_max}) {
    const Linearization lin = make_linearization(mode, 3, 0.01, 0.10);
    const caltest::BoundProblem prob =
        caltest::build_bound_problem(panel, lin, mu);
    const double oracle_min = oracle::vertex_min(
        prob.alpha, prob.beta, prob.lower, prob.upper, prob.mean);
    const caltest::MinVariance bound = caltest::sigma_min(panel, lin, mu);
    CHECK(bound.sigma2 ==
          doctest::Approx((oracle_min + prob.constant) / 9.0).epsilon(1e-12));
  }
}

TEST_CASE("sigma_min is a lower bound for the exact variance") {
  std::mt19937 gen(9001);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n_dates = 3 + static_cast<int>(unif(gen) * 5);
    const int q = 1 + static_cast<int>(unif(gen) * 4);
    const int pool = 4 + static_cast<int>(unif(gen) * 8);
    std::vector<double> obligor_pd(pool);
    for (double& p : obligor_pd) {
      p = 0.005 + 0.06 * unif(gen);
    }
    std::vector<ObligorRecord> records;
    for (int t = 1; t <= n_dates; ++t) {
      int members = 0;
      for (int j = 0; j < pool; ++j) {
        if (unif(gen) < 0.7 || (j == 0)) {  // obligor 0 keeps dates active
          records.push_back(rec(t, "c" + std::to_string(j), obligor_pd[j], 0));
          ++members;
        }
      }
      (void)members;
    }
    const Panel panel = build_panel(records, n_dates, q);
    const double exact = caltest::long_run_variance_exact(panel).total;
    const double mu = caltest::long_run_mean(panel);
    const double lo = *std::min_element(obligor_pd.begin(), obligor_pd.end());
    const double hi = *std::max_element(obligor_pd.begin(), obligor_pd.end());
    for (const BoundMode mode : {BoundMode::identity, BoundMode::pd_max}) {
      const Linearization lin =
          make_linearization(mode, q, lo * 0.999, hi * 1.001);
      const caltest::MinVariance bound = caltest::sigma_min(panel, lin, mu);
      CHECK(bound.sigma2 <= exact * (1.0 + 1e-12) + 1e-18);
      ++checked;
    }
  }
  CHECK(checked == 200);

  // pd_max mode also covers estimates that move between dates
  for (int trial = 0; trial < 50; ++trial) {
    const int n_dates = 3 + static_cast<int>(unif(gen) * 5);
    const int q = 2 + static_cast<int>(unif(gen) * 3);
    const int pool = 4 + static_cast<int>(unif(gen) * 6);
    std::vector<ObligorRecord> records;
    double lo = 1.0;
    double hi = 0.0;
    for (int t = 1; t <= n_dates; ++t) {
      for (int j = 0; j < pool; ++j) {
        if (j != 0 && unif(gen) >= 0.7) {
          continue;
        }
        const double p = 0.005 + 0.06 * unif(gen);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
        records.push_back(rec(t, "c" + std::to_string(j), p, 0));
      }
    }
    const Panel panel = build_panel(records, n_dates, q);
    const double exact = caltest::long_run_variance_exact(panel).total;
    const double mu = caltest::long_run_mean(panel);
    const Linearization lin =
        make_linearization(BoundMode::pd_max, q, lo * 0.999, hi * 1.001);
    const caltest::MinVariance bound = caltest::sigma_min(panel, lin, mu);
    CHECK(bound.sigma2 <= exact * (1.0 + 1e-12) + 1e-18);
  }
}

TEST_CASE("narrowing the upper box bound tightens sigma_min") {
  const Panel panel = build_panel(oracle::sliding_records(12, 20, 4, 0.02), 12, 4);
  const double mu = 0.02;
  caltest::MasterScale scale;
  scale.grades = {"A", "B", "C", "D"};
  scale.pds = {0.005, 0.02, 0.08, 0.3};

  const Linearization wide = make_linearization(BoundMode::identity, 4, 0.001, 0.3);
  const double bar = caltest::pd_bar(scale, 2);  // 0.19 < 0.3
  const Linearization tight = make_linearization(BoundMode::pd_bar, 4, 0.001, bar);
  const double sigma_wide = caltest::sigma_min(panel, wide, mu).sigma2;
  const double sigma_tight = caltest::sigma_min(panel, tight, mu).sigma2;
  CHECK(sigma_tight >= sigma_wide - 1e-18);

  // a one-grade bar degenerates to the identity chord at the top PD
  const Linearization bar1 = make_linearization(
      BoundMode::pd_bar, 4, 0.001, caltest::pd_bar(scale, 1));
  const Linearization ident = make_linearization(BoundMode::identity, 4, 0.001, 0.3);
  CHECK(caltest::sigma_min(panel, bar1, mu).sigma2 ==
        caltest::sigma_min(panel, ident, mu).sigma2);
}

TEST_CASE("alternative bound: parts and hand values on the steady panel") {
  const Panel panel = build_panel(oracle::sliding_records(32, 50, 5, 0.02), 32, 4);
  CHECK(caltest::mu_old_cap(panel, 0.02, 0.02, 1.0) ==
        doctest::Approx(0.29866666666666666).epsilon(1e-12));

  const caltest::AltBound alt = caltest::sigma_alt(panel, 0.02, 0.02, 1.0, 0.1);
  CHECK(alt.per_date_coefficient == doctest::Approx(0.98 / 50).epsilon(1e-13));
  CHECK(alt.k1 == doctest::Approx(0.049).epsilon(1e-13));
  CHECK(alt.k2 == doctest::Approx(0.0784 * 0.1).epsilon(1e-13));
  CHECK(alt.mu_old_cap == doctest::Approx(0.29866666666666666).epsilon(1e-12));
  CHECK(alt.sigma2 == doctest::Approx(3.521875e-5).epsilon(1e-12));
  // conservative against the exact value 4.134375e-5
  CHECK(alt.sigma2 <= caltest::long_run_variance_exact(panel).total);

  CHECK_THROWS_AS(caltest::sigma_alt(panel, 0.02, 0.02, 1.0, 0.35),
                  std::invalid_argument);  // above the cap
  CHECK_THROWS_AS(caltest::sigma_alt(panel, 0.02, 1.0, 1.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(caltest::sigma_alt(panel, 0.02, 0.02, 0.0, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(caltest::sigma_alt(panel, 0.0, 0.02, 1.0, 0.1),
                  std::invalid_argument);
}

TEST_CASE("alternative bound equals the exact variance in the homogeneous limit") {
  // full persistence, constant counts, one PD; gamma=1, mu_old=p, pd_max=p
  for (const int q : {1, 2, 4}) {
    const Panel panel = build_panel(oracle::uniform_records(8, 5, 0.03), 8, q);
    const double exact = caltest::long_run_variance_exact(panel).total;
    const caltest::AltBound alt = caltest::sigma_alt(panel, 0.03, 0.03, 1.0, 0.03);
    CHECK(alt.sigma2 == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("alternative bound stays below the exact variance") {
  std::mt19937 gen(777);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n_dates = 8 + static_cast<int>(unif(gen) * 16);
    const int q = 1 + static_cast<int>(unif(gen) * 4);
    const int n = 3 + static_cast<int>(unif(gen) * 20);
    std::vector<double> pds(n);
    double pd_max = 0.0;
    for (double& p : pds) {
      p = 0.005 + 0.045 * unif(gen);
      pd_max = std::max(pd_max, p);
    }
    std::vector<ObligorRecord> records;
    for (int t = 1; t <= n_dates; ++t) {
      for (int j = 0; j < n; ++j) {
        records.push_back(rec(t, "c" + std::to_string(j), pds[j], 0));
      }
    }
    const Panel panel = build_panel(records, n_dates, q);
    const double mu = caltest::long_run_mean(panel);
    // constant membership and per-obligor PDs: every per-date mean equals mu
    const caltest::AltBound alt = caltest::sigma_alt(panel, mu, pd_max, 1.0, mu);
    const double exact = caltest::long_run_variance_exact(panel).total;
    CHECK(alt.sigma2 <= exact * (1.0 + 1e-12) + 1e-18);
  }
}
