#include "enscal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "enscal/emos.hpp"
#include "enscal/errors.hpp"
#include "enscal/model_io.hpp"
#include "enscal/textio.hpp"

namespace enscal {

Method parse_method(std::string_view text) {
  if (text == "raw") return Method::raw;
  if (text == "bma_normal") return Method::bma_normal;
  if (text == "bma_gamma") return Method::bma_gamma;
  if (text == "bma_truncnormal") return Method::bma_truncnormal;
  if (text == "emos_normal") return Method::emos_normal;
  if (text == "emos_truncnormal") return Method::emos_truncnormal;
  fail_config("unknown method '" + std::string(text) + "'");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::raw: return "raw";
    case Method::bma_normal: return "bma_normal";
    case Method::bma_gamma: return "bma_gamma";
    case Method::bma_truncnormal: return "bma_truncnormal";
    case Method::emos_normal: return "emos_normal";
    case Method::emos_truncnormal: return "emos_truncnormal";
  }
  fail_config("unknown method");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool needs_nonnegative(Method m) {
  return m == Method::bma_gamma || m == Method::bma_truncnormal ||
         m == Method::emos_truncnormal;
}

struct FittedModel {
  std::optional<AnyModel> model;  // empty for raw
};

FittedModel fit_for(Method method, BiasMode bias,
                    std::span<const ForecastCase* const> window_cases,
                    const GroupingScheme& grouping) {
  FittedModel fm;
  switch (method) {
    case Method::raw:
      break;
    case Method::bma_normal:
      fm.model = fit_bma_normal_em(window_cases, grouping, bias);
      break;
    case Method::bma_gamma:
      fm.model = fit_bma_gamma(window_cases, grouping);
      break;
    case Method::bma_truncnormal:
      fm.model = fit_bma_truncnormal_ml(window_cases, grouping);
      break;
    case Method::emos_normal:
      fm.model = fit_emos(window_cases, grouping, EmosFamily::normal);
      break;
    case Method::emos_truncnormal:
      fm.model = fit_emos(window_cases, grouping, EmosFamily::truncnormal);
      break;
  }
  return fm;
}

std::shared_ptr<const Dist> predict(const AnyModel& model,
                                    const ForecastCase& c) {
  if (const auto* m = std::get_if<BmaNormalModel>(&model))
    return std::make_shared<MixtureDist>(predict_bma(*m, c));
  if (const auto* m = std::get_if<BmaGammaModel>(&model))
    return std::make_shared<MixtureDist>(predict_bma(*m, c));
  if (const auto* m = std::get_if<BmaTruncNormalModel>(&model))
    return std::make_shared<MixtureDist>(predict_bma(*m, c));
  return predict_emos(std::get<EmosModel>(model), c);
}

void members_sorted(const ForecastCase& c, std::vector<double>& out) {
  out.assign(c.members.begin(), c.members.end());
  std::sort(out.begin(), out.end());
}

}  // namespace

ExperimentResult run_experiment(const Dataset& ds, const GroupingScheme& grouping,
                                const ExperimentSpec& spec, bool keep_models) {
  if (!(spec.interval_level > 0.0 && spec.interval_level < 1.0))
    fail_config("interval level must be in (0,1)");
  if (needs_nonnegative(spec.method) && ds.kind != VariableKind::nonnegative)
    fail_config("method " + to_string(spec.method) +
                " needs a nonnegative variable");
  if (grouping.member_count() != ds.member_count)
    fail_config("grouping covers " + std::to_string(grouping.member_count()) +
                " members but the dataset has " +
                std::to_string(ds.member_count));

  Date start = spec.eval_start ? *spec.eval_start
                               : earliest_feasible_start(ds, spec.training_length);
  std::vector<WindowPlan> plans =
      rolling_windows(ds, spec.training_length, start);
  if (plans.empty())
    fail_data("no evaluation dates at or after " + start.iso() +
              " with " + std::to_string(spec.training_length) +
              " days of history");

  ExperimentResult res;
  res.method = spec.method;
  res.training_length = spec.training_length;
  res.eval_start = plans.front().window.target;

  std::vector<double> pits, members;
  std::vector<int> ranks;
  double se_median = 0.0, se_mean = 0.0;
  long covered = 0;

  for (const WindowPlan& plan : plans) {
    for (const Date& d : plan.window.dates)
      if (!(d < plan.window.target))
        fail_data("internal: training window reaches into the target date");

    int obs_targets = 0;
    for (const ForecastCase* c : plan.targets)
      if (c->obs) ++obs_targets;
    if (obs_targets == 0) continue;

    FittedModel fitted;
    if (spec.method != Method::raw) {
      try {
        fitted = fit_for(spec.method, spec.bias, plan.window.cases, grouping);
      } catch (const Error& e) {
        res.skipped_cases += obs_targets;
        res.skip_log.push_back(plan.window.target.iso() + ": fit failed: " +
                               e.what());
        continue;
      }
      if (keep_models)
        res.fitted_models.push_back(
            {plan.window.target, serialize_model(*fitted.model)});
    }
    ++res.n_windows;

    for (const ForecastCase* c : plan.targets) {
      if (!c->obs) continue;
      double y = *c->obs;
      Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(c->date.serial()),
                          fnv1a64(c->station)));
      CaseScore cs;
      cs.date = c->date;
      cs.station = c->station;
      cs.obs = y;
      try {
        if (spec.method == Method::raw) {
          members_sorted(*c, members);
          cs.crps = crps_ensemble(members, y);
          cs.rank = verification_rank(members, y, rng);
          cs.pit = kNaN;
          cs.lo = members.front();
          cs.hi = members.back();
          size_t n = members.size();
          cs.median = n % 2 ? members[n / 2]
                            : 0.5 * (members[n / 2 - 1] + members[n / 2]);
          double sum = 0.0;
          for (double v : members) sum += v;
          cs.mean = sum / static_cast<double>(n);
          cs.covered = cs.rank != 1 &&
                       cs.rank != static_cast<int>(members.size()) + 1;
        } else {
          std::shared_ptr<const Dist> dist = predict(*fitted.model, *c);
          cs.crps = dist->crps(y);
          cs.pit = pit_value(*dist, y);
          if (ds.kind == VariableKind::nonnegative && y <= 0.0) {
            double p0 = dist->cdf(0.0);
            if (p0 > 0.0) {
              cs.pit = rng.uniform01() * p0;
              cs.pit_randomized = true;
              ++res.pit_randomized_count;
            }
          }
          Interval iv = central_interval(*dist, spec.interval_level);
          cs.lo = iv.lo;
          cs.hi = iv.hi;
          cs.median = dist->quantile(0.5);
          cs.mean = dist->mean();
          cs.covered = y >= cs.lo && y <= cs.hi;
        }
      } catch (const Error& e) {
        ++res.skipped_cases;
        res.skip_log.push_back(c->date.iso() + " " + c->station +
                               ": scoring failed: " + e.what());
        continue;
      }

      res.report.mean_crps += cs.crps;
      res.report.mae_median += std::fabs(cs.median - y);
      res.report.mae_mean += std::fabs(cs.mean - y);
      se_median += (cs.median - y) * (cs.median - y);
      se_mean += (cs.mean - y) * (cs.mean - y);
      res.report.avg_width += cs.hi - cs.lo;
      if (cs.covered) ++covered;
      if (spec.method == Method::raw)
        ranks.push_back(cs.rank);
      else
        pits.push_back(cs.pit);
      res.cases.push_back(std::move(cs));
    }
  }

  long total = res.skipped_cases + static_cast<long>(res.cases.size());
  if (total == 0) fail_data("experiment produced no scorable cases");
  if (static_cast<double>(res.skipped_cases) >
      spec.max_skip_fraction * static_cast<double>(total)) {
    std::string detail = res.skip_log.empty() ? "" : ("; first: " + res.skip_log[0]);
    fail_data("skipped " + std::to_string(res.skipped_cases) + " of " +
              std::to_string(total) + " cases (over the " +
              format_double(spec.max_skip_fraction) + " limit)" + detail);
  }

  double n = static_cast<double>(res.cases.size());
  res.report.n_cases = static_cast<int>(res.cases.size());
  res.report.level = spec.interval_level;
  res.report.mean_crps /= n;
  res.report.mae_median /= n;
  res.report.mae_mean /= n;
  res.report.rmse_median = std::sqrt(se_median / n);
  res.report.rmse_mean = std::sqrt(se_mean / n);
  res.report.avg_width /= n;
  res.report.coverage = static_cast<double>(covered) / n;

  if (spec.method == Method::raw) {
    res.hist = rank_histogram(ranks, ds.member_count);
    res.pit_ks = KsResult{kNaN, kNaN};
  } else {
    res.hist = pit_histogram(pits);
    res.pit_ks = ks_uniform_test(pits);
  }
  return res;
}

namespace {

bool same_eval_cases(const ExperimentResult& a, const ExperimentResult& b) {
  if (a.cases.size() != b.cases.size()) return false;
  for (size_t i = 0; i < a.cases.size(); ++i)
    if (!(a.cases[i].date == b.cases[i].date) ||
        a.cases[i].station != b.cases[i].station)
      return false;
  return true;
}

}  // namespace

SweepResult sweep_training_length(const Dataset& ds, const GroupingScheme& grouping,
                                  const ExperimentSpec& spec, int length_lo,
                                  int length_hi,
                                  std::optional<int> reference_length, int jobs) {
  if (length_lo < 1 || length_hi < length_lo)
    fail_config("sweep range must satisfy 1 <= lo <= hi");
  int reference = reference_length.value_or(length_hi);
  if (reference < length_lo || reference > length_hi)
    fail_config("reference length " + std::to_string(reference) +
                " outside sweep range [" + std::to_string(length_lo) + "," +
                std::to_string(length_hi) + "]");

  // One evaluation window for every length keeps the scores comparable.
  Date start = spec.eval_start ? *spec.eval_start
                               : earliest_feasible_start(ds, length_hi);

  const int count = length_hi - length_lo + 1;
  std::vector<ExperimentResult> results(count);
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        ExperimentSpec cell = spec;
        cell.training_length = length_lo + i;
        cell.eval_start = start;
        results[i] = run_experiment(ds, grouping, cell);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(jobs, count); ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  SweepResult sweep;
  for (int i = 0; i < count; ++i) {
    if (!same_eval_cases(results[i], results[0]))
      fail_data("sweep lengths disagree on the evaluation cases; scores would "
                "not be comparable");
    sweep.rows.push_back({length_lo + i, results[i].report});
  }
  sweep.reference_length = reference;
  sweep.reference_report = results[reference - length_lo].report;

  auto argmin = [&](std::string score, auto value) {
    SweepOptimum opt;
    opt.score = std::move(score);
    opt.best_length = sweep.rows.front().length;
    opt.best_value = value(sweep.rows.front().report);
    for (const SweepRow& row : sweep.rows)
      if (value(row.report) < opt.best_value) {
        opt.best_value = value(row.report);
        opt.best_length = row.length;
      }
    return opt;
  };
  sweep.optima.push_back(
      argmin("crps", [](const ScoreReport& r) { return r.mean_crps; }));
  sweep.optima.push_back(
      argmin("mae", [](const ScoreReport& r) { return r.mae_median; }));
  sweep.optima.push_back(
      argmin("rmse", [](const ScoreReport& r) { return r.rmse_mean; }));
  return sweep;
}

std::vector<ComparisonRow> compare_methods(const Dataset& ds,
                                           const GroupingScheme& grouping,
                                           std::span<const ExperimentSpec> specs) {
  if (specs.empty()) fail_config("method comparison needs at least one spec");
  std::vector<ExperimentResult> results;
  for (const ExperimentSpec& spec : specs)
    results.push_back(run_experiment(ds, grouping, spec));
  for (const ExperimentResult& r : results)
    if (!same_eval_cases(r, results[0]))
      fail_data("methods disagree on the evaluation cases; rows would not be "
                "comparable");
  std::vector<ComparisonRow> rows;
  for (size_t i = 0; i < results.size(); ++i)
    rows.push_back({specs[i].method, results[i].report, results[i].pit_ks.p});
  return rows;
}

namespace {

std::string field(double v) { return std::isnan(v) ? std::string() : format_double(v); }

}  // namespace

std::string format_cases_csv(std::span<const CaseScore> cases, Method method) {
  std::string out =
      "date,station,obs,crps,pit,rank,lo,hi,median,mean,covered,pit_randomized\n";
  for (const CaseScore& c : cases) {
    out += c.date.iso();
    out += ',';
    out += c.station;
    out += ',';
    out += format_double(c.obs);
    out += ',';
    out += format_double(c.crps);
    out += ',';
    out += field(c.pit);
    out += ',';
    out += method == Method::raw ? std::to_string(c.rank) : std::string();
    out += ',';
    out += format_double(c.lo);
    out += ',';
    out += format_double(c.hi);
    out += ',';
    out += format_double(c.median);
    out += ',';
    out += format_double(c.mean);
    out += ',';
    out += c.covered ? '1' : '0';
    out += ',';
    out += c.pit_randomized ? '1' : '0';
    out += '\n';
  }
  return out;
}

namespace {

void report_fields(std::string& out, const ScoreReport& r) {
  out += format_double(r.mean_crps);
  out += ',';
  out += format_double(r.mae_median);
  out += ',';
  out += format_double(r.mae_mean);
  out += ',';
  out += format_double(r.rmse_median);
  out += ',';
  out += format_double(r.rmse_mean);
  out += ',';
  out += format_double(r.avg_width);
  out += ',';
  out += format_double(100.0 * r.coverage);
}

}  // namespace

std::string format_scores_csv(std::span<const ExperimentResult> results) {
  std::string out =
      "method,training_length,eval_start,n_cases,n_windows,skipped,mean_crps,"
      "mae_median,mae_mean,rmse_median,rmse_mean,avg_width,coverage_pct,ks_p\n";
  for (const ExperimentResult& r : results) {
    out += to_string(r.method);
    out += ',';
    out += std::to_string(r.training_length);
    out += ',';
    out += r.eval_start.iso();
    out += ',';
    out += std::to_string(r.report.n_cases);
    out += ',';
    out += std::to_string(r.n_windows);
    out += ',';
    out += std::to_string(r.skipped_cases);
    out += ',';
    report_fields(out, r.report);
    out += ',';
    out += field(r.pit_ks.p);
    out += '\n';
  }
  return out;
}

std::string format_sweep_csv(const SweepResult& sweep, Method method) {
  std::string out =
      "method,length,n_cases,mean_crps,mae_median,mae_mean,rmse_median,"
      "rmse_mean,avg_width,coverage_pct\n";
  for (const SweepRow& row : sweep.rows) {
    out += to_string(method);
    out += ',';
    out += std::to_string(row.length);
    out += ',';
    out += std::to_string(row.report.n_cases);
    out += ',';
    report_fields(out, row.report);
    out += '\n';
  }
  return out;
}

std::string format_sweep_optima_csv(const SweepResult& sweep) {
  std::string out = "score,best_length,best_value\n";
  for (const SweepOptimum& opt : sweep.optima) {
    out += opt.score;
    out += ',';
    out += std::to_string(opt.best_length);
    out += ',';
    out += format_double(opt.best_value);
    out += '\n';
  }
  return out;
}

std::string format_hist_csv(const HistogramData& hist) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (size_t i = 0; i < hist.counts.size(); ++i) {
    out += format_double(hist.edges[i]);
    out += ',';
    out += format_double(hist.edges[i + 1]);
    out += ',';
    out += std::to_string(hist.counts[i]);
    out += '\n';
  }
  return out;
}

}  // namespace enscal
