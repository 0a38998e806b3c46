#ifndef BOOSTER_STATS_AGGREGATE_HPP
#define BOOSTER_STATS_AGGREGATE_HPP

#include <booster/error.hpp>
#include <booster/plan/condition.hpp>
#include <booster/stats/t_distribution.hpp>
#include <booster/stats/welch.hpp>
#include <booster/trial_record.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace booster::stats {

inline constexpr double kConfidenceLevel = 0.95;

enum class Grouping { Overall, BySignal, ByNoise };

inline std::string to_string(Grouping g) {
  switch (g) {
  case Grouping::Overall: return "overall";
  case Grouping::BySignal: return "by-signal";
  case Grouping::ByNoise: return "by-noise";
  }
  return {};
}

inline Grouping parse_grouping(const std::string& s) {
  if (s == "overall") return Grouping::Overall;
  if (s == "by-signal") return Grouping::BySignal;
  if (s == "by-noise") return Grouping::ByNoise;
  throw ParameterError("unknown grouping '" + s + "' (expected overall, by-signal or by-noise)");
}

/// Summary of one (group, method) cell. sd and the interval need n >= 2.
struct StatsRow {
  Grouping grouping = Grouping::Overall;
  std::string group;  // "all", or the signal / noise letter
  BoosterMethod method;
  std::size_t n = 0;
  double mean_db = 0.0;
  std::optional<double> sd_db;
  std::optional<double> ci_low_db;
  std::optional<double> ci_high_db;
  double level = kConfidenceLevel;
};

/// Mean, sample sd and the t interval mean +/- t(1 - alpha/2, n - 1) sd / sqrt(n).
inline StatsRow summarize(std::span<const double> values, double level = kConfidenceLevel) {
  if (values.empty()) throw StatsError("summarize: empty sample");
  StatsRow row;
  row.n = values.size();
  row.level = level;
  row.mean_db = mean(values);
  if (values.size() >= 2) {
    const double sd = sample_sd(values);
    const double half = t_quantile(0.5 + level / 2.0, static_cast<double>(values.size() - 1)) * sd /
                        std::sqrt(static_cast<double>(values.size()));
    row.sd_db = sd;
    row.ci_low_db = row.mean_db - half;
    row.ci_high_db = row.mean_db + half;
  }
  return row;
}

struct AggregateResult {
  std::vector<StatsRow> rows;
  std::vector<std::string> warnings;
};

/// One row per method within each group, in canonical (group, method) order.
/// Groups without records are omitted and reported in warnings.
inline AggregateResult aggregate_bhld(std::span<const TrialRecord> records, Grouping grouping) {
  std::vector<std::string> groups;
  switch (grouping) {
  case Grouping::Overall: groups = {"all"}; break;
  case Grouping::BySignal:
  case Grouping::ByNoise: groups = {"A", "B", "C"}; break;
  }
  auto group_of = [&](const TrialRecord& r) -> std::string {
    switch (grouping) {
    case Grouping::Overall: return "all";
    case Grouping::BySignal: return std::string(1, to_char(r.condition.signal));
    case Grouping::ByNoise: return std::string(1, to_char(r.condition.noise));
    }
    return {};
  };

  std::map<std::pair<std::string, std::size_t>, std::vector<double>> cells;
  for (const auto& r : records) {
    cells[{group_of(r), r.condition.method.index()}].push_back(static_cast<double>(r.bhld_db));
  }

  AggregateResult out;
  for (const auto& g : groups) {
    for (const auto& m : BoosterMethod::enumerate()) {
      const auto it = cells.find({g, m.index()});
      if (it == cells.end()) {
        out.warnings.push_back("no trials for " + to_string(grouping) + " group " + g + ", method " + m.name());
        continue;
      }
      auto row = summarize(it->second);
      row.grouping = grouping;
      row.group = g;
      row.method = m;
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

/// CSV with one line per row: grouping, group, method kind, fc, n, mean,
/// sd, interval. Missing values are empty fields.
inline void export_figure_data(std::ostream& os, std::span<const StatsRow> rows) {
  auto num = [](std::optional<double> v) {
    if (!v) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return std::string(buf);
  };
  os << "grouping,group,method,fc_hz,n,mean_db,sd_db,ci_low_db,ci_high_db\n";
  for (const auto& r : rows) {
    os << to_string(r.grouping) << ',' << r.group << ',' << r.method.kind_name() << ',' << r.method.fc_hz() << ','
       << r.n << ',' << num(r.mean_db) << ',' << num(r.sd_db) << ',' << num(r.ci_low_db) << ',' << num(r.ci_high_db)
       << '\n';
  }
}

} // namespace booster::stats

#endif
