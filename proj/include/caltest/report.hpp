// SPDX-License-Identifier: MIT
//
// JSON report assembly shared by the CLI and the tests.  Doubles are
// emitted as shortest-round-trip decimals (lossless re-parse).

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "caltest/calibration.hpp"
#include "caltest/panel.hpp"
#include "caltest/simulate.hpp"

namespace caltest {

nlohmann::json panel_json(const Panel& panel);
nlohmann::json outcome_json(const TestOutcome& outcome);
nlohmann::json heuristic_json(const HeuristicReport& report);
nlohmann::json summary_json(const SimulationSummary& summary);

// Aligned plain-text rendering of a report produced by the functions above.
std::string render_human(const nlohmann::json& report);

// Acceptance-range density/CDF curve (columns z,pdf,cdf) for test reports,
// or ECDF-vs-normal curve (columns z,ecdf,normal_cdf) for simulations.
void write_test_curve(std::ostream& out, const TestOutcome& outcome);
void write_simulation_curve(std::ostream& out, const SimulationSummary&);

// Single-column CSV (header "lrdr") with %.17g values; byte-stable for a
// fixed seed.
void write_samples_csv(std::ostream& out, const SimulationSummary&);

}  // namespace caltest
