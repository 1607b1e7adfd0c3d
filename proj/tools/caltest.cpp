// SPDX-License-Identifier: MIT
//
// caltest: calibration testing for long-run default rates computed from
// overlapping one-year windows.
//
// Exit codes: 0 test passed (or simulation completed), 1 test failed,
// 2 invalid input or runtime error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "caltest/calibration.hpp"
#include "caltest/moments.hpp"
#include "caltest/panel.hpp"
#include "caltest/report.hpp"
#include "caltest/simulate.hpp"

namespace {

using nlohmann::json;

struct PanelArgs {
  std::string input;
  int q = 1;
  int n_dates_override = 0;
};

struct OutputArgs {
  bool human = false;
  std::string emit_curves;
};

void add_panel_options(CLI::App* cmd, PanelArgs& args) {
  cmd->add_option("--input", args.input, "panel CSV path")->required();
  cmd->add_option("--q", args.q, "observation windows per year")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--n-dates", args.n_dates_override,
                  "panel length; default: largest date_index present")
      ->check(CLI::PositiveNumber);
}

caltest::Panel load_panel(const PanelArgs& args) {
  const std::vector<caltest::ObligorRecord> records =
      caltest::load_panel_records(args.input);
  if (records.empty()) {
    throw std::invalid_argument("panel '" + args.input + "' has no records");
  }
  int n_dates = args.n_dates_override;
  if (n_dates == 0) {
    for (const caltest::ObligorRecord& rec : records) {
      n_dates = std::max(n_dates, rec.date_index);
    }
  }
  return caltest::build_panel(records, n_dates, args.q);
}

void emit(const json& report, const OutputArgs& out) {
  if (out.human) {
    std::cout << caltest::render_human(report);
  } else {
    std::cout << report.dump(2) << '\n';
  }
}

void write_curves(const std::string& path, const caltest::TestOutcome& outcome) {
  std::ofstream f(path);
  if (!f) {
    throw std::invalid_argument("cannot write curve file '" + path + "'");
  }
  caltest::write_test_curve(f, outcome);
}

int run_grade(const PanelArgs& panel_args, const OutputArgs& out_args,
              double pd_grade, double alpha) {
  const caltest::Panel panel = load_panel(panel_args);
  caltest::TestConfig config;
  config.method = caltest::Method::grade;
  config.alpha = alpha;
  config.pd_grade = pd_grade;
  const caltest::TestOutcome outcome = caltest::grade_test(panel, config);
  if (!out_args.emit_curves.empty()) {
    write_curves(out_args.emit_curves, outcome);
  }
  json report{
      {"command", "grade"},
      {"input", caltest::panel_json(panel)},
      {"result", caltest::outcome_json(outcome)},
      {"heuristic", caltest::heuristic_json(caltest::convergence_heuristic(panel))},
  };
  report["input"]["path"] = panel_args.input;
  emit(report, out_args);
  return outcome.passed ? 0 : 1;
}

int run_portfolio(const PanelArgs& panel_args, const OutputArgs& out_args,
                  const std::string& method, double alpha, double pd_min,
                  double pd_max, const std::string& scale_path, int n_worst,
                  double gamma, double mu_old, bool compare) {
  const caltest::Panel panel = load_panel(panel_args);
  caltest::TestConfig config;
  config.alpha = alpha;
  config.pd_min = pd_min;
  config.pd_max = pd_max;
  config.n_worst = n_worst;
  config.gamma = gamma;
  config.mu_old = mu_old;
  if (method == "lp-id") {
    config.method = caltest::Method::lp_identity;
  } else if (method == "lp-pdmax") {
    config.method = caltest::Method::lp_pd_max;
  } else if (method == "lp-pdbar") {
    config.method = caltest::Method::lp_pd_bar;
    if (scale_path.empty()) {
      throw std::invalid_argument("method lp-pdbar needs --scale");
    }
    config.scale = caltest::load_master_scale(scale_path);
  } else if (method == "alt") {
    config.method = caltest::Method::alt_bound;
  } else {
    throw std::invalid_argument(
        "method must be one of lp-id, lp-pdmax, lp-pdbar, alt");
  }
  const caltest::TestOutcome outcome = caltest::portfolio_test(panel, config);
  if (!out_args.emit_curves.empty()) {
    write_curves(out_args.emit_curves, outcome);
  }
  json report{
      {"command", "portfolio"},
      {"input", caltest::panel_json(panel)},
      {"result", caltest::outcome_json(outcome)},
      {"heuristic", caltest::heuristic_json(caltest::convergence_heuristic(panel))},
  };
  report["input"]["path"] = panel_args.input;
  if (compare) {
    // Baseline: identity chords on the same admissible box.  The width
    // ratio < 1 quantifies how much the chosen method sharpens the range.
    const caltest::Linearization base = caltest::make_linearization(
        caltest::BoundMode::identity, panel.windows_per_year(),
        outcome.bound->box_lower, outcome.bound->box_upper);
    const double identity_sigma =
        std::sqrt(caltest::sigma_min(panel, base, outcome.center).sigma2);
    report["comparison"] = json{
        {"identity_sigma", identity_sigma},
        {"width_ratio",
         identity_sigma > 0.0 ? outcome.sigma / identity_sigma : 0.0},
    };
  }
  emit(report, out_args);
  return outcome.passed ? 0 : 1;
}

int run_simulate(const std::string& scenario_path, const OutputArgs& out_args,
                 const std::string& out_path, std::optional<std::uint64_t> seed,
                 std::optional<std::int64_t> reps) {
  caltest::Scenario scenario = caltest::load_scenario(scenario_path);
  if (seed.has_value()) {
    scenario.seed = *seed;
  }
  if (reps.has_value()) {
    scenario.replications = *reps;
  }
  const caltest::SimulationSummary summary = caltest::simulate_lrdr(scenario);
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) {
      throw std::invalid_argument("cannot write samples file '" + out_path +
                                  "'");
    }
    caltest::write_samples_csv(f, summary);
  }
  if (!out_args.emit_curves.empty()) {
    std::ofstream f(out_args.emit_curves);
    if (!f) {
      throw std::invalid_argument("cannot write curve file '" +
                                  out_args.emit_curves + "'");
    }
    caltest::write_simulation_curve(f, summary);
  }
  json report{
      {"command", "simulate"},
      {"scenario", scenario_path},
      {"result", caltest::summary_json(summary)},
      {"heuristic",
       caltest::heuristic_json(caltest::convergence_heuristic(scenario))},
  };
  if (!out_path.empty()) {
    report["samples_path"] = out_path;
  }
  emit(report, out_args);
  return 0;
}

int run_check(const PanelArgs& panel_args, const OutputArgs& out_args) {
  const caltest::Panel panel = load_panel(panel_args);
  const caltest::HeuristicReport heuristic =
      caltest::convergence_heuristic(panel);
  json report{
      {"command", "check"},
      {"input", caltest::panel_json(panel)},
      {"result", caltest::heuristic_json(heuristic)},
  };
  report["input"]["path"] = panel_args.input;
  emit(report, out_args);
  return heuristic.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "calibration tests for long-run default rates over overlapping "
      "one-year windows"};
  app.require_subcommand(1);

  PanelArgs grade_panel;
  OutputArgs grade_out;
  double pd_grade = 0.0;
  double grade_alpha = 0.05;
  CLI::App* grade = app.add_subcommand(
      "grade", "test one rating grade against a hypothesized PD");
  add_panel_options(grade, grade_panel);
  grade->add_option("--pd-grade", pd_grade, "hypothesized grade PD")
      ->required();
  grade->add_option("--alpha", grade_alpha, "two-sided test level");
  grade->add_flag("--human", grade_out.human, "plain-text report");
  grade->add_option("--emit-curves", grade_out.emit_curves,
                    "write the acceptance density/CDF curve CSV here");

  PanelArgs port_panel;
  OutputArgs port_out;
  std::string port_method;
  double port_alpha = 0.05;
  double pd_min = 0.0;
  double pd_max = 0.0;
  std::string scale_path;
  int n_worst = 1;
  double gamma = 1.0;
  double mu_old = 0.0;
  bool compare = false;
  CLI::App* portfolio = app.add_subcommand(
      "portfolio", "test the whole portfolio against its mean estimate");
  add_panel_options(portfolio, port_panel);
  portfolio
      ->add_option("--method", port_method,
                   "variance bound: lp-id, lp-pdmax, lp-pdbar, alt")
      ->required();
  portfolio->add_option("--alpha", port_alpha, "two-sided test level");
  portfolio->add_option("--pd-min", pd_min, "smallest admissible PD");
  portfolio->add_option("--pd-max", pd_max, "largest admissible PD");
  portfolio->add_option("--scale", scale_path,
                        "master scale CSV (lp-pdbar)");
  portfolio->add_option("--n-worst", n_worst,
                        "grades averaged into the pd-bar cap (lp-pdbar)");
  portfolio->add_option("--gamma", gamma,
                        "persisting-mean ratio floor in (0,1] (alt)");
  portfolio->add_option("--mu-old", mu_old,
                        "early-history mean cap in (0,1) (alt)");
  portfolio->add_flag(
      "--compare", compare,
      "report the width ratio against identity chords on the same box");
  portfolio->add_flag("--human", port_out.human, "plain-text report");
  portfolio->add_option("--emit-curves", port_out.emit_curves,
                        "write the acceptance density/CDF curve CSV here");

  OutputArgs sim_out;
  std::string scenario_path;
  std::string samples_path;
  std::uint64_t seed_value = 0;
  std::int64_t reps_value = 0;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo check of the normal approximation");
  simulate->add_option("--scenario", scenario_path, "scenario JSON path")
      ->required();
  simulate->add_option("--out", samples_path,
                       "write the sampled rates as single-column CSV");
  CLI::Option* seed_opt =
      simulate->add_option("--seed", seed_value, "override the scenario seed");
  CLI::Option* reps_opt = simulate->add_option(
      "--reps", reps_value, "override the scenario replication count");
  simulate->add_flag("--human", sim_out.human, "plain-text report");
  simulate->add_option("--emit-curves", sim_out.emit_curves,
                       "write the ECDF-vs-normal curve CSV here");

  PanelArgs check_panel;
  OutputArgs check_out;
  CLI::App* check = app.add_subcommand(
      "check", "evaluate the normal-approximation rule of thumb");
  add_panel_options(check, check_panel);
  check->add_flag("--human", check_out.human, "plain-text report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (grade->parsed()) {
      return run_grade(grade_panel, grade_out, pd_grade, grade_alpha);
    }
    if (portfolio->parsed()) {
      return run_portfolio(port_panel, port_out, port_method, port_alpha,
                           pd_min, pd_max, scale_path, n_worst, gamma, mu_old,
                           compare);
    }
    if (simulate->parsed()) {
      return run_simulate(
          scenario_path, sim_out, samples_path,
          seed_opt->count() > 0 ? std::optional<std::uint64_t>(seed_value)
                                : std::nullopt,
          reps_opt->count() > 0 ? std::optional<std::int64_t>(reps_value)
                                : std::nullopt);
    }
    if (check->parsed()) {
      return run_check(check_panel, check_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
