// SPDX-License-Identifier: MIT

#include "caltest/panel.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

namespace caltest {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument(message);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

int parse_int(std::string_view field, std::size_t line_no,
              const char* what) {
  const std::string text(field);
  errno = 0;
  char* end = nullptr;
  const long value = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
    fail("line " + std::to_string(line_no) + ": invalid " + what + " '" +
         text + "'");
  }
  return static_cast<int>(value);
}

double parse_double(std::string_view field, std::size_t line_no,
                    const char* what) {
  const std::string text(field);
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE ||
      !std::isfinite(value)) {
    fail("line " + std::to_string(line_no) + ": invalid " + what + " '" +
         text + "'");
  }
  return value;
}

// Yields (line_number, content) for data rows: comments and blanks skipped.
template <typename Fn>
void for_each_row(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty() || content.front() == '#') {
      continue;
    }
    fn(line_no, content);
  }
}

}  // namespace

int Panel::count_at(int t) const {
  if (t < 1 || t > n_dates_) {
    fail("date index " + std::to_string(t) + " outside [1, " +
         std::to_string(n_dates_) + "]");
  }
  return static_cast<int>(members_[static_cast<std::size_t>(t) - 1].size());
}

std::span<const std::uint32_t> Panel::members(int t) const {
  count_at(t);  // validates
  return members_[static_cast<std::size_t>(t) - 1];
}

std::span<const double> Panel::estimates(int t) const {
  count_at(t);
  return estimates_[static_cast<std::size_t>(t) - 1];
}

std::span<const std::int8_t> Panel::outcomes(int t) const {
  count_at(t);
  return outcomes_[static_cast<std::size_t>(t) - 1];
}

const std::string& Panel::obligor_name(std::uint32_t dense_id) const {
  if (dense_id >= names_.size()) {
    fail("obligor id " + std::to_string(dense_id) + " out of range");
  }
  return names_[dense_id];
}

Panel build_panel(std::span<const ObligorRecord> records, int n_dates,
                  int windows_per_year) {
  if (n_dates < 1) {
    fail("panel needs at least one date");
  }
  if (windows_per_year < 1) {
    fail("windows_per_year must be at least 1");
  }

  Panel panel;
  panel.n_dates_ = n_dates;
  panel.q_ = windows_per_year;
  panel.members_.resize(static_cast<std::size_t>(n_dates));
  panel.estimates_.resize(static_cast<std::size_t>(n_dates));
  panel.outcomes_.resize(static_cast<std::size_t>(n_dates));
  panel.records_ = records.size();

  std::unordered_map<std::string, std::uint32_t> ids;
  ids.reserve(records.size());
  for (const ObligorRecord& rec : records) {
    if (rec.date_index < 1 || rec.date_index > n_dates) {
      fail("date_index " + std::to_string(rec.date_index) + " outside [1, " +
           std::to_string(n_dates) + "]");
    }
    if (!(rec.pd_estimate > 0.0 && rec.pd_estimate < 1.0)) {
      fail("pd_estimate for obligor '" + rec.obligor_id +
           "' must lie strictly inside (0,1)");
    }
    const auto [it, fresh] =
        ids.try_emplace(rec.obligor_id,
                        static_cast<std::uint32_t>(panel.names_.size()));
    if (fresh) {
      panel.names_.push_back(rec.obligor_id);
    }
    const std::size_t slot = static_cast<std::size_t>(rec.date_index) - 1;
    panel.members_[slot].push_back(it->second);
    panel.estimates_[slot].push_back(rec.pd_estimate);
    if (rec.defaulted.has_value()) {
      panel.outcomes_[slot].push_back(*rec.defaulted ? 1 : 0);
    } else {
      panel.outcomes_[slot].push_back(-1);
      ++panel.unresolved_;
    }
  }

  // Per-date canonical order: ascending dense id, with duplicate detection.
  std::vector<std::uint32_t> perm;
  for (std::size_t slot = 0; slot < panel.members_.size(); ++slot) {
    auto& ms = panel.members_[slot];
    const std::size_t n = ms.size();
    if (n == 0) {
      continue;
    }
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::sort(perm.begin(), perm.end(),
              [&ms](std::uint32_t a, std::uint32_t b) { return ms[a] < ms[b]; });
    std::vector<std::uint32_t> sorted_members(n);
    std::vector<double> sorted_estimates(n);
    std::vector<std::int8_t> sorted_outcomes(n);
    for (std::size_t j = 0; j < n; ++j) {
      sorted_members[j] = ms[perm[j]];
      sorted_estimates[j] = panel.estimates_[slot][perm[j]];
      sorted_outcomes[j] = panel.outcomes_[slot][perm[j]];
    }
    for (std::size_t j = 1; j < n; ++j) {
      if (sorted_members[j] == sorted_members[j - 1]) {
        fail("duplicate record for obligor '" +
             panel.names_[sorted_members[j]] + "' at date " +
             std::to_string(slot + 1));
      }
    }
    panel.members_[slot] = std::move(sorted_members);
    panel.estimates_[slot] = std::move(sorted_estimates);
    panel.outcomes_[slot] = std::move(sorted_outcomes);
  }

  for (int t = 1; t <= n_dates; ++t) {
    const int n = panel.count_at(t);
    if (n > 0) {
      panel.active_.push_back(t);
      panel.min_count_ =
          panel.min_count_ == 0 ? n : std::min(panel.min_count_, n);
      panel.max_count_ = std::max(panel.max_count_, n);
    }
  }
  return panel;
}

double overlap_weight(int t, int s, int q) {
  if (t < 1 || s < 1) {
    fail("date indices must be positive");
  }
  if (q < 1) {
    fail("windows_per_year must be at least 1");
  }
  const int lag = t < s ? s - t : t - s;
  return lag >= q ? 0.0 : 1.0 - static_cast<double>(lag) / q;
}

int persisting_count(const Panel& panel, int t, int s) {
  const std::span<const std::uint32_t> a = panel.members(t);
  const std::span<const std::uint32_t> b = panel.members(s);
  int count = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

std::vector<ObligorRecord> read_panel_csv(std::istream& in) {
  std::vector<ObligorRecord> records;
  bool saw_header = false;
  for_each_row(in, [&](std::size_t line_no, std::string_view content) {
    const std::vector<std::string_view> fields = split_fields(content);
    if (!saw_header) {
      if (fields.size() != 4 || fields[0] != "date_index" ||
          fields[1] != "obligor_id" || fields[2] != "pd_estimate" ||
          fields[3] != "defaulted") {
        fail("line " + std::to_string(line_no) +
             ": expected header 'date_index,obligor_id,pd_estimate,"
             "defaulted'");
      }
      saw_header = true;
      return;
    }
    if (fields.size() != 4) {
      fail("line " + std::to_string(line_no) + ": expected 4 fields, got " +
           std::to_string(fields.size()));
    }
    ObligorRecord rec;
    rec.date_index = parse_int(fields[0], line_no, "date_index");
    rec.obligor_id = std::string(fields[1]);
    if (rec.obligor_id.empty()) {
      fail("line " + std::to_string(line_no) + ": empty obligor_id");
    }
    rec.pd_estimate = parse_double(fields[2], line_no, "pd_estimate");
    if (fields[3].empty()) {
      rec.defaulted = std::nullopt;
    } else if (fields[3] == "0") {
      rec.defaulted = false;
    } else if (fields[3] == "1") {
      rec.defaulted = true;
    } else {
      fail("line " + std::to_string(line_no) +
           ": defaulted must be 0, 1 or empty");
    }
    records.push_back(std::move(rec));
  });
  if (!saw_header) {
    fail("panel CSV has no header row");
  }
  return records;
}

std::vector<ObligorRecord> load_panel_records(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail("cannot open panel file '" + path.string() + "'");
  }
  return read_panel_csv(in);
}

MasterScale read_master_scale_csv(std::istream& in) {
  MasterScale scale;
  bool saw_header = false;
  for_each_row(in, [&](std::size_t line_no, std::string_view content) {
    const std::vector<std::string_view> fields = split_fields(content);
    if (!saw_header) {
      if (fields.size() != 2 || fields[0] != "grade" || fields[1] != "pd") {
        fail("line " + std::to_string(line_no) +
             ": expected header 'grade,pd'");
      }
      saw_header = true;
      return;
    }
    if (fields.size() != 2) {
      fail("line " + std::to_string(line_no) + ": expected 2 fields");
    }
    if (fields[0].empty()) {
      fail("line " + std::to_string(line_no) + ": empty grade name");
    }
    const double pd = parse_double(fields[1], line_no, "pd");
    if (!(pd > 0.0 && pd < 1.0)) {
      fail("line " + std::to_string(line_no) +
           ": grade pd must lie strictly inside (0,1)");
    }
    if (!scale.pds.empty() && pd <= scale.pds.back()) {
      fail("line " + std::to_string(line_no) +
           ": grade pds must be strictly increasing");
    }
    scale.grades.emplace_back(fields[0]);
    scale.pds.push_back(pd);
  });
  if (!saw_header) {
    fail("master scale CSV has no header row");
  }
  if (scale.pds.empty()) {
    fail("master scale has no grades");
  }
  return scale;
}

MasterScale load_master_scale(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail("cannot open master scale file '" + path.string() + "'");
  }
  return read_master_scale_csv(in);
}

}  // namespace caltest
