#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "enscal/date.hpp"

namespace enscal {

enum class VariableKind { real_line, nonnegative };

VariableKind parse_variable_kind(std::string_view text);
std::string to_string(VariableKind kind);

// One station's forecast/observation pair for one date.
// members[0] is the control member by file convention (column m1).
struct ForecastCase {
  Date date;
  std::string station;
  std::optional<double> obs;
  std::vector<double> members;
};

// Ordered partition of member indices (0-based) into exchangeable groups.
class GroupingScheme {
 public:
  GroupingScheme() = default;
  explicit GroupingScheme(std::vector<std::vector<int>> groups);

  int group_count() const { return static_cast<int>(groups_.size()); }
  int member_count() const { return member_count_; }
  int group_size(int k) const { return static_cast<int>(groups_[k].size()); }
  const std::vector<int>& group(int k) const { return groups_[k]; }
  const std::vector<std::vector<int>>& groups() const { return groups_; }

  // Canonical text form, 1-based member ids: "1|2,4|3,5".
  std::string to_text() const;

 private:
  std::vector<std::vector<int>> groups_;
  int member_count_ = 0;
};

// kind: "exchangeable" (one group), "two_group" (control + rest),
// "three_group" (control + odd-numbered perturbed + even-numbered perturbed),
// or "custom:1|2,4|3,5" with 1-based member ids.
GroupingScheme make_grouping(std::string_view kind, int member_count);

struct Dataset {
  VariableKind kind = VariableKind::real_line;
  int member_count = 0;
  std::vector<ForecastCase> cases;  // sorted by (date, station)

  // Distinct dates carrying at least one case, ascending.
  std::vector<Date> dates() const;
  std::vector<std::string> stations() const;
};

// CSV with header `date,station,obs,m1,...,mM`; empty obs field = missing.
Dataset load_dataset_csv(const std::string& path, VariableKind kind);
Dataset parse_dataset_csv(std::string_view text, VariableKind kind,
                          const std::string& origin);
void save_dataset_csv(const Dataset& ds, const std::string& path);
std::string format_dataset_csv(const Dataset& ds);

// The n most recent data-bearing dates strictly before target, pooled over
// stations. Cases with missing observations are carried (flagged via obs)
// so callers can decide; fitters use obs_cases().
struct TrainingWindow {
  Date target;
  int length_days = 0;
  std::vector<Date> dates;                       // ascending
  std::vector<const ForecastCase*> cases;        // (date, station) order
  std::vector<const ForecastCase*> obs_cases() const;
};

struct WindowPlan {
  TrainingWindow window;
  std::vector<const ForecastCase*> targets;      // all cases at target date
};

// One plan per data-bearing target date >= start; windows slide by one date
// and never include the target date. Pointers alias ds.cases.
std::vector<WindowPlan> rolling_windows(const Dataset& ds, int length_days,
                                        Date start);

// Earliest date usable as an evaluation start for the given window length.
Date earliest_feasible_start(const Dataset& ds, int length_days);

}  // namespace enscal
