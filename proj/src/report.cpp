// SPDX-License-Identifier: MIT

#include "caltest/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

namespace caltest {

namespace {

using nlohmann::json;

const char* method_name(Method method) {
  switch (method) {
    case Method::grade:
      return "grade";
    case Method::lp_identity:
      return "lp-id";
    case Method::lp_pd_max:
      return "lp-pdmax";
    case Method::lp_pd_bar:
      return "lp-pdbar";
    case Method::alt_bound:
      return "alt";
  }
  return "unknown";
}

std::string format_17g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

json panel_json(const Panel& panel) {
  json counts = json::array();
  for (int t = 1; t <= panel.n_dates(); ++t) {
    counts.push_back(panel.count_at(t));
  }
  return json{
      {"n_dates", panel.n_dates()},
      {"windows_per_year", panel.windows_per_year()},
      {"records", panel.total_records()},
      {"distinct_obligors", panel.distinct_obligors()},
      {"active_dates", panel.active_count()},
      {"min_count", panel.min_count()},
      {"max_count", panel.max_count()},
      {"unresolved_outcomes", panel.unresolved_outcomes()},
      {"counts", std::move(counts)},
  };
}

json outcome_json(const TestOutcome& outcome) {
  json j{
      {"method", method_name(outcome.method)},
      {"alpha", outcome.alpha},
      {"center", outcome.center},
      {"sigma", outcome.sigma},
      {"lower_raw", outcome.lower_raw},
      {"upper_raw", outcome.upper_raw},
      {"lower", outcome.lower},
      {"upper", outcome.upper},
      {"lrdr", outcome.statistic},
      {"passed", outcome.passed},
  };
  if (outcome.grade.has_value()) {
    j["diagnostics"] = json{
        {"variance", outcome.grade->variance},
        {"harmonic_sum", outcome.grade->harmonic_sum},
        {"lambda", outcome.grade->lambda},
    };
  }
  if (outcome.bound.has_value()) {
    const BoundDiagnostics& b = *outcome.bound;
    json d{
        {"box_lower", b.box_lower},
        {"box_upper", b.box_upper},
    };
    if (outcome.method == Method::alt_bound) {
      d["per_date_coefficient"] = b.per_date_coefficient;
      d["k1"] = b.k1;
      d["k2"] = b.k2;
      d["mu_old_cap"] = b.mu_old_cap;
    } else {
      d["constant"] = b.constant;
      d["at_lower"] = b.at_lower;
      d["at_upper"] = b.at_upper;
      d["has_boundary"] = b.has_boundary;
      if (b.has_boundary) {
        d["boundary_value"] = b.boundary_value;
      }
    }
    j["diagnostics"] = std::move(d);
  }
  return j;
}

json heuristic_json(const HeuristicReport& report) {
  return json{
      {"passed", report.passed},
      {"active_dates", report.active_dates},
      {"min_count", report.min_count},
      {"max_count", report.max_count},
      {"count_ratio", report.count_ratio},
      {"failures", report.failures},
  };
}

json summary_json(const SimulationSummary& summary) {
  json tails = json::object();
  for (std::size_t i = 0; i < summary.tail_thresholds.size(); ++i) {
    tails[format_17g(summary.tail_thresholds[i])] =
        summary.tail_probabilities[i];
  }
  return json{
      {"replications", summary.replications},
      {"seed", summary.seed},
      {"analytic_mean", summary.analytic_mean},
      {"analytic_sd", summary.analytic_sd},
      {"empirical_mean", summary.empirical_mean},
      {"empirical_variance", summary.empirical_variance},
      {"ks_distance", summary.ks_distance},
      {"tail_probabilities", std::move(tails)},
  };
}

std::string render_human(const json& report) {
  std::ostringstream out;
  std::vector<std::pair<std::string, std::string>> rows;
  std::function<void(const std::string&, const json&)> walk =
      [&](const std::string& prefix, const json& node) {
        if (node.is_object()) {
          for (const auto& [key, value] : node.items()) {
            walk(prefix.empty() ? key : prefix + "." + key, value);
          }
        } else {
          rows.emplace_back(prefix, node.dump());
        }
      };
  walk("", report);
  std::size_t width = 0;
  for (const auto& [key, value] : rows) {
    width = std::max(width, key.size());
  }
  for (const auto& [key, value] : rows) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << key << value
        << '\n';
  }
  return out.str();
}

void write_test_curve(std::ostream& out, const TestOutcome& outcome) {
  out << "z,pdf,cdf\n";
  const double sigma = outcome.sigma;
  if (sigma <= 0.0) {
    out << format_17g(outcome.center) << ",inf,0.5\n";
    return;
  }
  constexpr int kPoints = 513;
  const double lo = outcome.center - 6.0 * sigma;
  const double hi = outcome.center + 6.0 * sigma;
  for (int i = 0; i < kPoints; ++i) {
    const double z = lo + (hi - lo) * i / (kPoints - 1);
    const double u = (z - outcome.center) / sigma;
    const double pdf =
        std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    out << format_17g(z) << ',' << format_17g(pdf) << ','
        << format_17g(normal_cdf(u)) << '\n';
  }
}

void write_simulation_curve(std::ostream& out,
                            const SimulationSummary& summary) {
  out << "z,ecdf,normal_cdf\n";
  std::vector<double> sorted(summary.samples);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  constexpr std::size_t kMaxRows = 2048;
  const std::size_t step = n <= kMaxRows ? 1 : n / kMaxRows;
  for (std::size_t i = 0; i < n; i += step) {
    const double z = sorted[i];
    const double ecdf = static_cast<double>(i + 1) / static_cast<double>(n);
    const double ref =
        normal_cdf((z - summary.analytic_mean) / summary.analytic_sd);
    out << format_17g(z) << ',' << format_17g(ecdf) << ',' << format_17g(ref)
        << '\n';
  }
}

void write_samples_csv(std::ostream& out, const SimulationSummary& summary) {
  out << "lrdr\n";
  for (const double z : summary.samples) {
    out << format_17g(z) << '\n';
  }
}

}  // namespace caltest
