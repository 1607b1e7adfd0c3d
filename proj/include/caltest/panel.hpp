// SPDX-License-Identifier: MIT
//
// Panel model: obligor-level records organised into per-date cohorts.
// Dates are 1-based snapshot indices spaced one subperiod apart; each date
// opens a one-year observation window covering q subperiods, so windows of
// dates closer than q subperiods overlap.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace caltest {

struct ObligorRecord {
  int date_index = 0;              // 1-based
  std::string obligor_id;
  double pd_estimate = 0.0;        // one-year PD forecast, in (0,1)
  std::optional<bool> defaulted;   // window outcome; empty while unresolved
};

// Rating grades with strictly increasing PDs.
struct MasterScale {
  std::vector<std::string> grades;
  std::vector<double> pds;
};

class Panel {
 public:
  int n_dates() const { return n_dates_; }
  int windows_per_year() const { return q_; }

  // n_t; zero for dates without records.
  int count_at(int t) const;

  // Dense obligor ids at date t, ascending.  Ids are assigned by first
  // appearance in the record stream; estimates/outcomes are parallel arrays.
  std::span<const std::uint32_t> members(int t) const;
  std::span<const double> estimates(int t) const;
  std::span<const std::int8_t> outcomes(int t) const;  // 1/0, -1 unresolved

  // Dates with n_t > 0, ascending.  R(N) = active_count().
  const std::vector<int>& active_dates() const { return active_; }
  int active_count() const { return static_cast<int>(active_.size()); }

  std::uint32_t distinct_obligors() const {
    return static_cast<std::uint32_t>(names_.size());
  }
  const std::string& obligor_name(std::uint32_t dense_id) const;

  std::size_t total_records() const { return records_; }
  bool outcomes_complete() const { return unresolved_ == 0; }
  std::size_t unresolved_outcomes() const { return unresolved_; }

  // Extremes of n_t over active dates; 0 when the panel is empty.
  int min_count() const { return min_count_; }
  int max_count() const { return max_count_; }

 private:
  friend Panel build_panel(std::span<const ObligorRecord>, int, int);

  int n_dates_ = 0;
  int q_ = 1;
  std::vector<std::vector<std::uint32_t>> members_;
  std::vector<std::vector<double>> estimates_;
  std::vector<std::vector<std::int8_t>> outcomes_;
  std::vector<int> active_;
  std::vector<std::string> names_;
  std::size_t records_ = 0;
  std::size_t unresolved_ = 0;
  int min_count_ = 0;
  int max_count_ = 0;
};

// Groups records by date and assigns dense obligor ids.  Throws
// std::invalid_argument on: n_dates < 1, windows_per_year < 1, a date index
// outside [1, n_dates], a PD estimate outside (0,1), or a duplicate
// (date, obligor) pair.
Panel build_panel(std::span<const ObligorRecord> records, int n_dates,
                  int windows_per_year);

// Fraction of the two observation windows that coincides:
// max{0, 1 - |s-t|/q}.  Symmetric; zero once the dates are >= q apart.
double overlap_weight(int t, int s, int q);

// |members(t) ^ members(s)|, the count persisting between the two dates.
int persisting_count(const Panel& panel, int t, int s);

// CSV with header "date_index,obligor_id,pd_estimate,defaulted".
// '#' starts a comment, blank lines are skipped, the defaulted field may be
// empty (unresolved).  Throws std::invalid_argument on malformed input.
std::vector<ObligorRecord> read_panel_csv(std::istream& in);
std::vector<ObligorRecord> load_panel_records(const std::filesystem::path&);

// CSV with header "grade,pd"; PDs must be strictly increasing and in (0,1).
MasterScale read_master_scale_csv(std::istream& in);
MasterScale load_master_scale(const std::filesystem::path&);

}  // namespace caltest
