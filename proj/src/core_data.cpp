#include "enscal/core_data.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "enscal/errors.hpp"
#include "enscal/textio.hpp"

namespace enscal {

VariableKind parse_variable_kind(std::string_view text) {
  if (text == "real_line") return VariableKind::real_line;
  if (text == "nonnegative") return VariableKind::nonnegative;
  fail_config("unknown variable kind '" + std::string(text) +
              "' (expected real_line or nonnegative)");
}

std::string to_string(VariableKind kind) {
  return kind == VariableKind::real_line ? "real_line" : "nonnegative";
}

GroupingScheme::GroupingScheme(std::vector<std::vector<int>> groups)
    : groups_(std::move(groups)) {
  if (groups_.empty()) fail_config("grouping needs at least one group");
  std::set<int> seen;
  int max_id = -1;
  for (auto& g : groups_) {
    if (g.empty()) fail_config("grouping contains an empty group");
    std::sort(g.begin(), g.end());
    for (int id : g) {
      if (id < 0) fail_config("grouping member ids must be positive");
      if (!seen.insert(id).second)
        fail_config("grouping assigns member " + std::to_string(id + 1) +
                    " twice");
      max_id = std::max(max_id, id);
    }
  }
  member_count_ = static_cast<int>(seen.size());
  if (max_id + 1 != member_count_)
    fail_config("grouping must cover members 1.." +
                std::to_string(member_count_) + " without gaps");
}

std::string GroupingScheme::to_text() const {
  std::string out;
  for (int k = 0; k < group_count(); ++k) {
    if (k) out += '|';
    for (size_t i = 0; i < groups_[k].size(); ++i) {
      if (i) out += ',';
      out += std::to_string(groups_[k][i] + 1);
    }
  }
  return out;
}

GroupingScheme make_grouping(std::string_view kind, int member_count) {
  if (member_count <= 0) fail_config("member count must be positive");
  auto seq = [&](int from, int to, int step = 1) {
    std::vector<int> g;
    for (int i = from; i < to; i += step) g.push_back(i);
    return g;
  };
  if (kind == "exchangeable")
    return GroupingScheme({seq(0, member_count)});
  if (kind == "two_group") {
    if (member_count < 2) fail_config("two_group needs at least 2 members");
    return GroupingScheme({{0}, seq(1, member_count)});
  }
  if (kind == "three_group") {
    if (member_count < 3) fail_config("three_group needs at least 3 members");
    return GroupingScheme({{0}, seq(1, member_count, 2), seq(2, member_count, 2)});
  }
  constexpr std::string_view prefix = "custom:";
  if (kind.substr(0, prefix.size()) == prefix) {
    std::vector<std::vector<int>> groups;
    for (std::string_view part : split(kind.substr(prefix.size()), '|')) {
      std::vector<int> g;
      for (std::string_view tok : split(part, ',')) {
        long id = parse_long(trim(tok), "grouping member id");
        if (id < 1) fail_config("grouping member ids are 1-based");
        g.push_back(static_cast<int>(id - 1));
      }
      groups.push_back(std::move(g));
    }
    GroupingScheme scheme(std::move(groups));
    if (scheme.member_count() != member_count)
      fail_config("grouping covers " + std::to_string(scheme.member_count()) +
                  " members but the dataset has " + std::to_string(member_count));
    return scheme;
  }
  fail_config("unknown grouping '" + std::string(kind) + "'");
}

std::vector<Date> Dataset::dates() const {
  std::vector<Date> out;
  for (const auto& c : cases)
    if (out.empty() || !(out.back() == c.date)) out.push_back(c.date);
  return out;
}

std::vector<std::string> Dataset::stations() const {
  std::set<std::string> s;
  for (const auto& c : cases) s.insert(c.station);
  return {s.begin(), s.end()};
}

Dataset parse_dataset_csv(std::string_view text, VariableKind kind,
                          const std::string& origin) {
  auto where = [&origin](size_t line) {
    return origin + ":" + std::to_string(line);
  };
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) fail_data(origin + ": empty dataset");

  std::vector<std::string_view> header = split(trim(lines[0]), ',');
  if (header.size() < 4 || trim(header[0]) != "date" ||
      trim(header[1]) != "station" || trim(header[2]) != "obs")
    fail_data(where(1) + ": header must be date,station,obs,m1,...,mM");
  int member_count = static_cast<int>(header.size()) - 3;
  for (int i = 0; i < member_count; ++i) {
    std::string want = "m" + std::to_string(i + 1);
    if (trim(header[3 + i]) != want)
      fail_data(where(1) + ": expected member column '" + want + "'");
  }

  Dataset ds;
  ds.kind = kind;
  ds.member_count = member_count;
  std::set<std::pair<long, std::string>> keys;
  for (size_t li = 1; li < lines.size(); ++li) {
    std::string_view line = trim(lines[li]);
    if (line.empty()) continue;
    std::vector<std::string_view> f = split(line, ',');
    if (static_cast<int>(f.size()) != member_count + 3)
      fail_data(where(li + 1) + ": expected " + std::to_string(member_count + 3) +
                " fields, got " + std::to_string(f.size()));
    ForecastCase c;
    c.date = Date::parse(trim(f[0]));
    c.station = std::string(trim(f[1]));
    if (c.station.empty()) fail_data(where(li + 1) + ": empty station id");
    std::string_view obs = trim(f[2]);
    if (!obs.empty()) {
      double v = parse_double(obs, where(li + 1) + ": obs");
      if (!std::isfinite(v)) fail_data(where(li + 1) + ": non-finite obs");
      if (kind == VariableKind::nonnegative && v < 0.0)
        fail_data(where(li + 1) + ": negative obs for a nonnegative variable");
      c.obs = v;
    }
    c.members.reserve(member_count);
    for (int i = 0; i < member_count; ++i) {
      double v = parse_double(trim(f[3 + i]),
                              where(li + 1) + ": m" + std::to_string(i + 1));
      if (!std::isfinite(v)) fail_data(where(li + 1) + ": non-finite member value");
      c.members.push_back(v);
    }
    if (!keys.insert({c.date.serial(), c.station}).second)
      fail_data(where(li + 1) + ": duplicate case for " + c.date.iso() + " " +
                c.station);
    ds.cases.push_back(std::move(c));
  }
  if (ds.cases.empty()) fail_data(origin + ": dataset has no cases");
  std::sort(ds.cases.begin(), ds.cases.end(),
            [](const ForecastCase& a, const ForecastCase& b) {
              if (!(a.date == b.date)) return a.date < b.date;
              return a.station < b.station;
            });
  return ds;
}

Dataset load_dataset_csv(const std::string& path, VariableKind kind) {
  return parse_dataset_csv(read_text_file(path), kind, path);
}

std::string format_dataset_csv(const Dataset& ds) {
  std::string out = "date,station,obs";
  for (int i = 0; i < ds.member_count; ++i) out += ",m" + std::to_string(i + 1);
  out += '\n';
  for (const auto& c : ds.cases) {
    out += c.date.iso();
    out += ',';
    out += c.station;
    out += ',';
    if (c.obs) out += format_double(*c.obs);
    for (double m : c.members) {
      out += ',';
      out += format_double(m);
    }
    out += '\n';
  }
  return out;
}

void save_dataset_csv(const Dataset& ds, const std::string& path) {
  write_text_file(path, format_dataset_csv(ds));
}

std::vector<const ForecastCase*> TrainingWindow::obs_cases() const {
  std::vector<const ForecastCase*> out;
  for (const ForecastCase* c : cases)
    if (c->obs) out.push_back(c);
  return out;
}

std::vector<WindowPlan> rolling_windows(const Dataset& ds, int length_days,
                                        Date start) {
  if (length_days < 1) fail_config("training length must be at least 1 day");
  std::vector<Date> dates = ds.dates();

  // Index case ranges per date once; pointers below alias ds.cases.
  std::vector<std::pair<size_t, size_t>> ranges;
  ranges.reserve(dates.size());
  size_t pos = 0;
  for (const Date& d : dates) {
    size_t begin = pos;
    while (pos < ds.cases.size() && ds.cases[pos].date == d) ++pos;
    ranges.emplace_back(begin, pos);
  }

  size_t prior = static_cast<size_t>(
      std::lower_bound(dates.begin(), dates.end(), start) - dates.begin());
  if (prior < static_cast<size_t>(length_days)) {
    if (dates.size() <= static_cast<size_t>(length_days))
      fail_data("dataset has " + std::to_string(dates.size()) +
                " data-bearing dates, need more than " +
                std::to_string(length_days));
    fail_data("start " + start.iso() + " has " + std::to_string(prior) +
              " prior data dates, need " + std::to_string(length_days) +
              "; earliest feasible start is " +
              dates[static_cast<size_t>(length_days)].iso());
  }

  std::vector<WindowPlan> plans;
  for (size_t ti = 0; ti < dates.size(); ++ti) {
    if (dates[ti] < start) continue;
    if (ti < static_cast<size_t>(length_days)) continue;
    WindowPlan plan;
    plan.window.target = dates[ti];
    plan.window.length_days = length_days;
    size_t from = ti - static_cast<size_t>(length_days);
    for (size_t wi = from; wi < ti; ++wi) {
      plan.window.dates.push_back(dates[wi]);
      for (size_t ci = ranges[wi].first; ci < ranges[wi].second; ++ci)
        plan.window.cases.push_back(&ds.cases[ci]);
    }
    for (size_t ci = ranges[ti].first; ci < ranges[ti].second; ++ci)
      plan.targets.push_back(&ds.cases[ci]);
    plans.push_back(std::move(plan));
  }
  return plans;
}

Date earliest_feasible_start(const Dataset& ds, int length_days) {
  if (length_days < 1) fail_config("training length must be at least 1 day");
  std::vector<Date> dates = ds.dates();
  if (dates.size() <= static_cast<size_t>(length_days))
    fail_data("dataset has " + std::to_string(dates.size()) +
              " data-bearing dates, need more than " +
              std::to_string(length_days));
  return dates[static_cast<size_t>(length_days)];
}

}  // namespace enscal
