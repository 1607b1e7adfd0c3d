// SPDX-License-Identifier: MIT

#include "caltest/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "caltest/calibration.hpp"
#include "caltest/kernels.hpp"
#include "caltest/moments.hpp"

namespace caltest {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument(message);
}

constexpr std::uint32_t kStreamDefaults = 0;
constexpr std::uint32_t kStreamGrades = 1;

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

// ---------------------------------------------------------------------------
// Scenario validation and persistence targets.

void validate_shape(const Scenario& s) {
  if (s.n_dates < 1) {
    fail("scenario needs at least one date");
  }
  if (s.windows_per_year < 1) {
    fail("windows_per_year must be at least 1");
  }
  if (static_cast<int>(s.customers.size()) != s.n_dates) {
    fail("customers must list one count per date");
  }
  bool any = false;
  for (const int n : s.customers) {
    if (n < 0) {
      fail("customer counts must be nonnegative");
    }
    any = any || n > 0;
  }
  if (!any) {
    fail("scenario has no customers on any date");
  }
  if (const auto* mix = std::get_if<GradeMixture>(&s.pd)) {
    if (mix->pds.empty() || mix->pds.size() != mix->weights.size()) {
      fail("pd mixture needs matching, nonempty grades and weights");
    }
    for (const double p : mix->pds) {
      if (!(p > 0.0 && p < 1.0)) {
        fail("mixture pds must lie strictly inside (0,1)");
      }
    }
    for (const double w : mix->weights) {
      if (!(w > 0.0)) {
        fail("mixture weights must be positive");
      }
    }
  } else {
    const double p = std::get<double>(s.pd);
    if (!(p > 0.0 && p < 1.0)) {
      fail("pd must lie strictly inside (0,1)");
    }
  }
  for (const double thr : s.tail_thresholds) {
    if (!std::isfinite(thr)) {
      fail("tail thresholds must be finite");
    }
  }
}

// Persisting-count targets k[i-1][t-1]; empty rows where no pair exists.
std::vector<std::vector<int>> resolve_targets(const Scenario& s) {
  const int n = s.n_dates;
  const int q = s.windows_per_year;
  std::vector<std::vector<int>> k;
  if (q == 1) {
    if (!std::holds_alternative<std::monostate>(s.persistence)) {
      fail("persistence has no effect when windows_per_year is 1");
    }
    return k;
  }
  k.resize(static_cast<std::size_t>(q - 1));
  for (int i = 1; i < q; ++i) {
    k[static_cast<std::size_t>(i) - 1]
        .assign(static_cast<std::size_t>(std::max(0, n - i)), 0);
  }
  if (std::holds_alternative<std::monostate>(s.persistence)) {
    return k;
  }
  if (const auto* counts = std::get_if<LagCounts>(&s.persistence)) {
    if (static_cast<int>(counts->k.size()) != q - 1) {
      fail("lag_counts needs one row per lag 1..q-1");
    }
    for (int i = 1; i < q; ++i) {
      const auto& row = counts->k[static_cast<std::size_t>(i) - 1];
      const std::size_t want = static_cast<std::size_t>(std::max(0, n - i));
      if (row.size() != want) {
        fail("lag_counts row " + std::to_string(i) + " needs " +
             std::to_string(want) + " entries");
      }
      for (std::size_t t = 0; t < row.size(); ++t) {
        const int cap = std::min(s.customers[t],
                                 s.customers[t + static_cast<std::size_t>(i)]);
        if (row[t] < 0 || row[t] > cap) {
          fail("persistence counts inconsistent: lag " + std::to_string(i) +
               " at date " + std::to_string(t + 1) + " wants " +
               std::to_string(row[t]) + " of at most " + std::to_string(cap));
        }
        k[static_cast<std::size_t>(i) - 1][t] = row[t];
      }
    }
    return k;
  }
  const auto& ratios = std::get<LagRatios>(s.persistence);
  if (static_cast<int>(ratios.r.size()) != q - 1) {
    fail("lag_ratios needs one entry per lag 1..q-1");
  }
  for (int i = 1; i < q; ++i) {
    const double r = ratios.r[static_cast<std::size_t>(i) - 1];
    if (!(r >= 0.0 && r <= 1.0)) {
      fail("lag_ratios entries must lie in [0,1]");
    }
    for (int t = 1; t + i <= n; ++t) {
      const int cap = std::min(s.customers[static_cast<std::size_t>(t) - 1],
                               s.customers[static_cast<std::size_t>(t + i) - 1]);
      // Round down; the epsilon only absorbs representation noise in r*cap.
      const int value = static_cast<int>(std::floor(r * cap + 1e-9));
      k[static_cast<std::size_t>(i) - 1][static_cast<std::size_t>(t) - 1] =
          std::min(value, cap);
    }
  }
  return k;
}

// ---------------------------------------------------------------------------
// Membership realization: interval lifetimes by cohort survival.

struct Skeleton {
  int n_dates = 0;
  int q = 1;
  std::uint64_t seed = 0;
  std::vector<int> counts;                       // per date
  std::vector<int> active;                       // 1-based dates, ascending
  std::vector<int> birth;                        // per obligor
  std::vector<int> death;
  std::vector<double> pd;
  std::vector<std::vector<std::uint32_t>> members;  // per date, ascending
  // Flattened Bernoulli batch, shared by every replication: entry ranges
  // [entry_begin[j], entry_begin[j+1]) cover obligor j's lifetime blocks.
  std::vector<std::uint32_t> wl_obligor;
  std::vector<std::uint32_t> wl_block;
  std::vector<std::uint32_t> wl_threshold;
  std::vector<std::size_t> entry_begin;
  std::vector<std::uint32_t> first_block;        // per obligor
};

double draw_pd(const std::variant<double, GradeMixture>& pd,
               std::uint64_t seed, std::uint32_t obligor) {
  if (const auto* p = std::get_if<double>(&pd)) {
    return *p;
  }
  const auto& mix = std::get<GradeMixture>(pd);
  long double total = 0.0L;
  for (const double w : mix.weights) {
    total += w;
  }
  const kernels::Block blk =
      kernels::philox4x32({0, obligor, kStreamGrades, 0}, seed);
  const long double u =
      (static_cast<long double>(blk.v[0]) + 0.5L) / 4294967296.0L;
  long double cum = 0.0L;
  for (std::size_t g = 0; g < mix.pds.size(); ++g) {
    cum += mix.weights[g] / total;
    if (u <= cum) {
      return mix.pds[g];
    }
  }
  return mix.pds.back();
}

Skeleton build_skeleton(const Scenario& s) {
  validate_shape(s);
  const std::vector<std::vector<int>> targets = resolve_targets(s);
  const int n = s.n_dates;
  const int q = s.windows_per_year;

  Skeleton sk;
  sk.n_dates = n;
  sk.q = q;
  sk.seed = s.seed;
  sk.counts = s.customers;
  sk.members.resize(static_cast<std::size_t>(n));

  // alive[b] lists currently-alive obligors born at date b, ascending.
  std::vector<std::vector<std::uint32_t>> alive(
      static_cast<std::size_t>(n) + 1);

  auto spawn = [&](int date, int count) {
    auto& cohort = alive[static_cast<std::size_t>(date)];
    for (int j = 0; j < count; ++j) {
      const std::uint32_t id = static_cast<std::uint32_t>(sk.birth.size());
      sk.birth.push_back(date);
      sk.death.push_back(date);
      cohort.push_back(id);
      sk.members[static_cast<std::size_t>(date) - 1].push_back(id);
    }
  };

  auto target_at = [&](int from_date, int to_date) -> int {
    const int lag = to_date - from_date;
    return targets[static_cast<std::size_t>(lag) - 1]
                  [static_cast<std::size_t>(from_date) - 1];
  };

  spawn(1, s.customers[0]);
  for (int next = 2; next <= n; ++next) {
    const int t = next - 1;
    const int n_next = s.customers[static_cast<std::size_t>(next) - 1];
    const int tau_lo = std::max(1, next - q + 1);

    // Cumulative survivor requirements S(tau) = persisting(tau, next),
    // nondecreasing in tau for interval lifetimes.
    int prev = -1;
    for (int tau = tau_lo; tau <= t && q > 1; ++tau) {
      const int s_tau = target_at(tau, next);
      if (prev >= 0 && s_tau < prev) {
        fail("persistence counts inconsistent: persisting(" +
             std::to_string(tau) + "," + std::to_string(next) +
             ") is below persisting(" + std::to_string(tau - 1) + "," +
             std::to_string(next) + ")");
      }
      prev = s_tau;
    }
    const int total_survivors = q > 1 ? target_at(t, next) : 0;
    if (total_survivors > n_next) {
      fail("persistence counts inconsistent: date " + std::to_string(next) +
           " keeps " + std::to_string(total_survivors) + " of only " +
           std::to_string(n_next) + " customers");
    }

    std::vector<std::uint32_t> survivors;
    survivors.reserve(static_cast<std::size_t>(total_survivors));
    if (q > 1) {
      // Exact cohorts above the merge point.
      for (int tau = t; tau > tau_lo; --tau) {
        const int need = target_at(tau, next) - target_at(tau - 1, next);
        auto& cohort = alive[static_cast<std::size_t>(tau)];
        if (need > static_cast<int>(cohort.size())) {
          fail("persistence counts inconsistent: cohort born at date " +
               std::to_string(tau) + " has " +
               std::to_string(cohort.size()) + " members, date " +
               std::to_string(next) + " needs " + std::to_string(need));
        }
        survivors.insert(survivors.end(), cohort.begin(),
                         cohort.begin() + need);
        cohort.resize(static_cast<std::size_t>(need));
      }
      // Merged old cohorts: retain the oldest ids first.
      int need = target_at(tau_lo, next);
      int available = 0;
      for (int b = 1; b <= tau_lo; ++b) {
        available += static_cast<int>(alive[static_cast<std::size_t>(b)].size());
      }
      if (need > available) {
        fail("persistence counts inconsistent: only " +
             std::to_string(available) + " customers born by date " +
             std::to_string(tau_lo) + " remain, date " +
             std::to_string(next) + " needs " + std::to_string(need));
      }
      for (int b = 1; b <= tau_lo; ++b) {
        auto& cohort = alive[static_cast<std::size_t>(b)];
        const int take = std::min(need, static_cast<int>(cohort.size()));
        survivors.insert(survivors.end(), cohort.begin(),
                         cohort.begin() + take);
        cohort.resize(static_cast<std::size_t>(take));
        need -= take;
      }
    }
    // With q == 1 no constraint reaches across dates: every cohort turns
    // over.  For q > 1 the trims above already removed the casualties.
    if (q == 1) {
      for (int b = 1; b <= t; ++b) {
        alive[static_cast<std::size_t>(b)].clear();
      }
    }

    auto& date_members = sk.members[static_cast<std::size_t>(next) - 1];
    for (const std::uint32_t id : survivors) {
      sk.death[id] = next;
      date_members.push_back(id);
    }
    spawn(next, n_next - total_survivors);
    std::sort(date_members.begin(), date_members.end());
  }

  for (int t = 1; t <= n; ++t) {
    if (!sk.members[static_cast<std::size_t>(t) - 1].empty()) {
      sk.active.push_back(t);
    }
    if (static_cast<int>(sk.members[static_cast<std::size_t>(t) - 1].size()) !=
        s.customers[static_cast<std::size_t>(t) - 1]) {
      fail("internal error: realized count mismatch at date " +
           std::to_string(t));
    }
  }

  // Per-obligor PDs, subperiod thresholds, and the shared work list.
  sk.pd.resize(sk.birth.size());
  sk.first_block.resize(sk.birth.size());
  sk.entry_begin.resize(sk.birth.size() + 1, 0);
  for (std::size_t j = 0; j < sk.birth.size(); ++j) {
    sk.pd[j] = draw_pd(s.pd, s.seed, static_cast<std::uint32_t>(j));
    const double theta = subperiod_hazard(sk.pd[j], q);
    const std::uint32_t thr = static_cast<std::uint32_t>(std::min<long long>(
        std::llround(theta * 4294967296.0), 4294967295LL));
    const std::uint32_t b0 =
        static_cast<std::uint32_t>((sk.birth[j] - 1) / 4);
    const std::uint32_t b1 =
        static_cast<std::uint32_t>((sk.death[j] + q - 2) / 4);
    sk.first_block[j] = b0;
    sk.entry_begin[j] = sk.wl_obligor.size();
    for (std::uint32_t b = b0; b <= b1; ++b) {
      sk.wl_obligor.push_back(static_cast<std::uint32_t>(j));
      sk.wl_block.push_back(b);
      sk.wl_threshold.push_back(thr);
    }
  }
  sk.entry_begin[sk.birth.size()] = sk.wl_obligor.size();
  return sk;
}

// Window outcomes of one replication; defaults[t-1] counts date t.
void run_replication(const Skeleton& sk, std::uint32_t replication,
                     std::vector<std::uint8_t>& bytes,
                     std::vector<int>& defaults) {
  bytes.resize(sk.wl_obligor.size() * 4);
  kernels::BernoulliBatch batch;
  batch.key = sk.seed;
  batch.replication = replication;
  batch.stream = kStreamDefaults;
  batch.obligors = sk.wl_obligor;
  batch.blocks = sk.wl_block;
  batch.thresholds = sk.wl_threshold;
  kernels::active_ops().bernoulli(batch, bytes);

  defaults.assign(static_cast<std::size_t>(sk.n_dates), 0);
  const int q = sk.q;
  for (std::size_t j = 0; j < sk.birth.size(); ++j) {
    const std::uint8_t* base = bytes.data() + sk.entry_begin[j] * 4;
    const std::size_t len = (sk.entry_begin[j + 1] - sk.entry_begin[j]) * 4;
    // Quick reject: most obligors never default within their span.
    bool any = false;
    std::size_t pos = 0;
    for (; pos + 8 <= len && !any; pos += 8) {
      std::uint64_t word;
      std::memcpy(&word, base + pos, 8);
      any = word != 0;
    }
    for (; pos < len && !any; ++pos) {
      any = base[pos] != 0;
    }
    if (!any) {
      continue;
    }
    const int birth = sk.birth[j];
    const int death = sk.death[j];
    // Subperiod u occupies base[u - first_subperiod]; the window of date
    // tau covers u in [tau, tau+q-1].
    const int first_sub = static_cast<int>(sk.first_block[j]) * 4 + 1;
    int window = 0;
    for (int u = birth; u <= birth + q - 1; ++u) {
      window += base[u - first_sub];
    }
    if (window > 0) {
      ++defaults[static_cast<std::size_t>(birth) - 1];
    }
    for (int tau = birth + 1; tau <= death; ++tau) {
      window += base[tau + q - 1 - first_sub];
      window -= base[tau - 1 - first_sub];
      if (window > 0) {
        ++defaults[static_cast<std::size_t>(tau) - 1];
      }
    }
  }
}

double lrdr_of(const Skeleton& sk, const std::vector<int>& defaults) {
  Accum acc;
  for (const int t : sk.active) {
    acc.add(static_cast<double>(defaults[static_cast<std::size_t>(t) - 1]) /
            sk.counts[static_cast<std::size_t>(t) - 1]);
  }
  return sk.active.empty() ? 0.0
                           : acc.value() / static_cast<double>(sk.active.size());
}

Panel skeleton_panel(const Skeleton& sk,
                     const std::vector<std::uint8_t>* bytes) {
  std::vector<ObligorRecord> records;
  std::size_t total = 0;
  for (const auto& m : sk.members) {
    total += m.size();
  }
  records.reserve(total);
  const int q = sk.q;
  for (int t = 1; t <= sk.n_dates; ++t) {
    for (const std::uint32_t id : sk.members[static_cast<std::size_t>(t) - 1]) {
      ObligorRecord rec;
      rec.date_index = t;
      rec.obligor_id = "c" + std::to_string(id + 1);
      rec.pd_estimate = sk.pd[id];
      if (bytes != nullptr) {
        const std::uint8_t* base = bytes->data() + sk.entry_begin[id] * 4;
        const int first_sub = static_cast<int>(sk.first_block[id]) * 4 + 1;
        bool hit = false;
        for (int u = t; u <= t + q - 1; ++u) {
          hit = hit || base[u - first_sub] != 0;
        }
        rec.defaulted = hit;
      }
      records.push_back(std::move(rec));
    }
  }
  return build_panel(records, sk.n_dates, sk.q);
}

}  // namespace

double subperiod_hazard(double p, int q) {
  if (!(p > 0.0 && p < 1.0)) {
    fail("pd must lie strictly inside (0,1)");
  }
  if (q < 1) {
    fail("windows_per_year must be at least 1");
  }
  if (q == 1) {
    return p;
  }
  // 1 - (1-p)^(1/q) without cancellation for small p.
  return -std::expm1(std::log1p(-p) / q);
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text, /*cb=*/nullptr, /*allow_exceptions=*/true,
                    /*ignore_comments=*/true);
  } catch (const json::parse_error& err) {
    fail(std::string("scenario JSON malformed: ") + err.what());
  }
  if (!j.is_object()) {
    fail("scenario JSON must be an object");
  }
  auto require = [&](const char* key) -> const json& {
    if (!j.contains(key)) {
      fail(std::string("scenario is missing '") + key + "'");
    }
    return j.at(key);
  };

  Scenario s;
  try {
    s.n_dates = require("n_dates").get<int>();
    s.windows_per_year = require("windows_per_year").get<int>();
    const json& customers = require("customers");
    if (customers.is_number()) {
      s.customers.assign(static_cast<std::size_t>(std::max(0, s.n_dates)),
                         customers.get<int>());
    } else {
      s.customers = customers.get<std::vector<int>>();
    }
    s.replications = require("replications").get<std::int64_t>();
    s.seed = require("seed").get<std::uint64_t>();
    if (j.contains("tail_thresholds")) {
      s.tail_thresholds = j.at("tail_thresholds").get<std::vector<double>>();
    }
    const json& pd = require("pd");
    if (pd.is_number()) {
      s.pd = pd.get<double>();
    } else if (pd.is_object()) {
      GradeMixture mix;
      mix.pds = pd.at("grades").get<std::vector<double>>();
      mix.weights = pd.at("weights").get<std::vector<double>>();
      s.pd = std::move(mix);
    } else {
      fail("pd must be a number or a {grades, weights} object");
    }
    if (j.contains("persistence") && !j.at("persistence").is_null()) {
      const json& pers = j.at("persistence");
      const bool has_counts = pers.contains("lag_counts");
      const bool has_ratios = pers.contains("lag_ratios");
      if (has_counts == has_ratios) {
        fail("persistence needs exactly one of lag_counts or lag_ratios");
      }
      if (has_counts) {
        LagCounts counts;
        counts.k = pers.at("lag_counts").get<std::vector<std::vector<int>>>();
        s.persistence = std::move(counts);
      } else {
        LagRatios ratios;
        ratios.r = pers.at("lag_ratios").get<std::vector<double>>();
        s.persistence = std::move(ratios);
      }
    }
  } catch (const json::exception& err) {
    fail(std::string("scenario JSON invalid: ") + err.what());
  }
  validate_shape(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    fail("cannot open scenario file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

Panel simulate_panel(const Scenario& scenario, std::uint32_t replication) {
  const Skeleton sk = build_skeleton(scenario);
  std::vector<std::uint8_t> bytes;
  std::vector<int> defaults;
  run_replication(sk, replication, bytes, defaults);
  (void)defaults;
  return skeleton_panel(sk, &bytes);
}

double ks_normal_distance(std::vector<double> samples, double mean,
                          double sd) {
  if (samples.empty()) {
    fail("KS distance needs at least one sample");
  }
  if (!(sd > 0.0)) {
    fail("KS distance needs a positive reference sd");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = normal_cdf((samples[i] - mean) / sd);
    const double above = (static_cast<double>(i) + 1.0) / n - f;
    const double below = f - static_cast<double>(i) / n;
    dist = std::max(dist, std::max(above, below));
  }
  return dist;
}

SimulationSummary simulate_lrdr(const Scenario& scenario) {
  if (scenario.replications < 1) {
    fail("replications must be at least 1");
  }
  if (scenario.replications > (1LL << 31)) {
    fail("replications above 2^31 are not supported");
  }
  const Skeleton sk = build_skeleton(scenario);

  SimulationSummary out;
  out.replications = scenario.replications;
  out.seed = scenario.seed;
  out.tail_thresholds = scenario.tail_thresholds;

  const Panel analytic = skeleton_panel(sk, nullptr);
  const VarianceBreakdown breakdown = long_run_variance_exact(analytic);
  out.analytic_mean = breakdown.mean;
  out.analytic_sd = std::sqrt(breakdown.total);

  const std::int64_t reps = scenario.replications;
  out.samples.assign(static_cast<std::size_t>(reps), 0.0);
  const int workers = static_cast<int>(std::min<std::int64_t>(
      kernels::thread_budget(), reps));

  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run_range = [&](std::int64_t lo, std::int64_t hi) {
    try {
      std::vector<std::uint8_t> bytes;
      std::vector<int> defaults;
      for (std::int64_t rep = lo; rep < hi; ++rep) {
        run_replication(sk, static_cast<std::uint32_t>(rep), bytes, defaults);
        out.samples[static_cast<std::size_t>(rep)] = lrdr_of(sk, defaults);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) {
        first_error = std::current_exception();
      }
    }
  };

  if (workers <= 1) {
    run_range(0, reps);
  } else {
    const std::int64_t chunk = (reps + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      const std::int64_t lo = static_cast<std::int64_t>(w) * chunk;
      const std::int64_t hi = std::min<std::int64_t>(lo + chunk, reps);
      if (lo >= hi) {
        break;
      }
      pool.emplace_back(run_range, lo, hi);
    }
    for (std::thread& th : pool) {
      th.join();
    }
  }
  if (first_error) {
    std::rethrow_exception(first_error);
  }

  Accum mean_acc;
  for (const double z : out.samples) {
    mean_acc.add(z);
  }
  out.empirical_mean = mean_acc.value() / static_cast<double>(reps);
  if (reps > 1) {
    Accum var_acc;
    for (const double z : out.samples) {
      const double d = z - out.empirical_mean;
      var_acc.add(d * d);
    }
    out.empirical_variance = var_acc.value() / static_cast<double>(reps - 1);
  }

  out.ks_distance =
      ks_normal_distance(out.samples, out.analytic_mean, out.analytic_sd);
  out.tail_probabilities.reserve(out.tail_thresholds.size());
  for (const double thr : out.tail_thresholds) {
    std::int64_t count = 0;
    for (const double z : out.samples) {
      count += z >= thr ? 1 : 0;
    }
    out.tail_probabilities.push_back(static_cast<double>(count) /
                                     static_cast<double>(reps));
  }
  return out;
}

namespace {

HeuristicReport heuristic_from_counts(int active, int min_count,
                                      int max_count) {
  HeuristicReport rep;
  rep.active_dates = active;
  rep.min_count = min_count;
  rep.max_count = max_count;
  rep.count_ratio =
      max_count > 0 ? static_cast<double>(min_count) / max_count : 0.0;
  if (active < 30) {
    rep.failures.push_back("fewer than 30 populated dates (" +
                           std::to_string(active) + ")");
  }
  if (min_count < 2) {
    rep.failures.push_back("smallest populated date has " +
                           std::to_string(min_count) +
                           " customers (need at least 2)");
  }
  if (rep.count_ratio < 0.1) {
    std::ostringstream msg;
    msg << "count ratio " << rep.count_ratio << " below 1/10";
    rep.failures.push_back(msg.str());
  }
  rep.passed = rep.failures.empty();
  return rep;
}

}  // namespace

HeuristicReport convergence_heuristic(const Panel& panel) {
  return heuristic_from_counts(panel.active_count(), panel.min_count(),
                               panel.max_count());
}

HeuristicReport convergence_heuristic(const Scenario& scenario) {
  validate_shape(scenario);
  int active = 0;
  int min_count = 0;
  int max_count = 0;
  for (const int n : scenario.customers) {
    if (n > 0) {
      ++active;
      min_count = min_count == 0 ? n : std::min(min_count, n);
      max_count = std::max(max_count, n);
    }
  }
  return heuristic_from_counts(active, min_count, max_count);
}

}  // namespace caltest
