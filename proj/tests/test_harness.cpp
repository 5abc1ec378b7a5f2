#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "enscal/errors.hpp"
#include "enscal/harness.hpp"
#include "enscal/model_io.hpp"
#include "enscal/rng.hpp"
#include "enscal/synth.hpp"

using namespace enscal;

namespace {

SynthResult make_synth(Scenario scenario, std::uint64_t seed, int n_dates,
                       int n_stations, int n_members,
                       std::map<std::string, double> params = {},
                       std::vector<Date> missing = {}) {
  SynthSpec s;
  s.scenario = scenario;
  s.seed = seed;
  s.n_dates = n_dates;
  s.n_stations = n_stations;
  s.n_members = n_members;
  s.missing = std::move(missing);
  s.params = std::move(params);
  return generate_synth(s);
}

const std::vector<Date> kPaperMissing{
    Date::from_ymd(2012, 7, 16),  Date::from_ymd(2012, 8, 5),
    Date::from_ymd(2012, 10, 21), Date::from_ymd(2012, 12, 24),
    Date::from_ymd(2013, 1, 17),  Date::from_ymd(2013, 3, 3)};

double chi_squared_p(const HistogramData& h) {
  double expected = static_cast<double>(h.total) / h.counts.size();
  double stat = 0.0;
  for (long c : h.counts) {
    double d = c - expected;
    stat += d * d / expected;
  }
  return chi_squared_sf(stat, static_cast<int>(h.counts.size()) - 1);
}

// Mean of the generator's exact per-case CRPS over the evaluated cases.
double oracle_mean_crps(const SynthResult& synth,
                        const std::vector<CaseScore>& cases) {
  std::map<std::pair<long, std::string>, double> truth;
  for (size_t i = 0; i < synth.data.cases.size(); ++i)
    truth[{synth.data.cases[i].date.serial(), synth.data.cases[i].station}] =
        synth.true_crps[i];
  double sum = 0.0;
  for (const CaseScore& c : cases) sum += truth.at({c.date.serial(), c.station});
  return sum / static_cast<double>(cases.size());
}

bool reports_equal(const ScoreReport& a, const ScoreReport& b) {
  return a.n_cases == b.n_cases && a.mean_crps == b.mean_crps &&
         a.mae_median == b.mae_median && a.mae_mean == b.mae_mean &&
         a.rmse_median == b.rmse_median && a.rmse_mean == b.rmse_mean &&
         a.avg_width == b.avg_width && a.coverage == b.coverage &&
         a.level == b.level;
}

}  // namespace

TEST_CASE("experiments are deterministic") {
  SynthResult synth = make_synth(Scenario::emos_normal, 11, 60, 3, 8);
  GroupingScheme grouping = make_grouping("exchangeable", 8);
  ExperimentSpec spec;
  spec.method = Method::emos_normal;
  spec.training_length = 20;
  spec.seed = 9;

  ExperimentResult a = run_experiment(synth.data, grouping, spec);
  ExperimentResult b = run_experiment(synth.data, grouping, spec);
  CHECK(format_cases_csv(a.cases, a.method) ==
        format_cases_csv(b.cases, b.method));
  std::vector<ExperimentResult> va{a}, vb{b};
  CHECK(format_scores_csv(va) == format_scores_csv(vb));

  CHECK(a.eval_start == synth.data.dates()[20]);
  CHECK(a.n_windows == 40);
  CHECK(a.report.n_cases == 40 * 3);
  CHECK(a.skipped_cases == 0);
}

TEST_CASE("rank histogram of a calibrated ensemble is flat") {
  SynthResult synth =
      make_synth(Scenario::underdispersive_raw, 21, 100, 10, 7,
                 {{"obs_noise_ratio", 1.0}});
  GroupingScheme grouping = make_grouping("exchangeable", 7);
  ExperimentSpec spec;
  spec.method = Method::raw;
  spec.training_length = 1;
  spec.seed = 4;

  ExperimentResult res = run_experiment(synth.data, grouping, spec);
  CHECK(res.report.n_cases == 99 * 10);
  REQUIRE(res.hist.counts.size() == 8);
  CHECK(res.hist.total == res.report.n_cases);
  for (long c : res.hist.counts) CHECK(c > 0);
  CHECK(chi_squared_p(res.hist) > 0.01);
  for (const CaseScore& c : res.cases) {
    REQUIRE(c.rank >= 1);
    REQUIRE(c.rank <= 8);
    CHECK(std::isnan(c.pit));
  }
}

TEST_CASE("rank histogram of an underdispersive ensemble is U-shaped") {
  SynthResult synth = make_synth(Scenario::underdispersive_raw, 22, 100, 10, 7);
  GroupingScheme grouping = make_grouping("exchangeable", 7);
  ExperimentSpec spec;
  spec.method = Method::raw;
  spec.training_length = 1;

  ExperimentResult res = run_experiment(synth.data, grouping, spec);
  CHECK(chi_squared_p(res.hist) < 1e-6);
  double average = static_cast<double>(res.hist.total) / 8.0;
  CHECK(res.hist.counts.front() + res.hist.counts.back() > 2.0 * average);
}

TEST_CASE("fitted mixture tracks the generator's CRPS") {
  SynthResult synth = make_synth(Scenario::bma_normal, 5, 120, 4, 11);
  GroupingScheme grouping = make_grouping("two_group", 11);
  ExperimentSpec spec;
  spec.method = Method::bma_normal;
  spec.bias = BiasMode::linear;
  spec.training_length = 30;

  ExperimentResult res = run_experiment(synth.data, grouping, spec);
  CHECK(res.report.n_cases == 90 * 4);
  CHECK(res.skipped_cases == 0);

  double oracle = oracle_mean_crps(synth, res.cases);
  CAPTURE(res.report.mean_crps);
  CAPTURE(oracle);
  CHECK(std::abs(res.report.mean_crps - oracle) / oracle < 0.03);
  CHECK(res.report.coverage > 0.7);
  CHECK(res.report.coverage < 0.95);
  CHECK(res.report.avg_width > 0.0);
}

TEST_CASE("PIT of a well-specified fit is uniform") {
  SynthResult synth = make_synth(Scenario::emos_normal, 3, 80, 5, 8);
  GroupingScheme grouping = make_grouping("exchangeable", 8);
  ExperimentSpec spec;
  spec.method = Method::emos_normal;
  spec.training_length = 25;

  ExperimentResult res = run_experiment(synth.data, grouping, spec);
  CHECK(res.report.n_cases == 55 * 5);
  CHECK(res.pit_ks.p > 0.01);
  CHECK(res.report.coverage > 0.75);
  CHECK(res.report.coverage < 0.92);
  for (const CaseScore& c : res.cases) {
    REQUIRE(c.pit >= 0.0);
    REQUIRE(c.pit <= 1.0);
    CHECK(c.rank == 0);
  }
}

TEST_CASE("year-long calendar with gaps") {
  SynthResult synth =
      make_synth(Scenario::underdispersive_raw, 13, 365, 3, 11, {},
                 kPaperMissing);
  REQUIRE(synth.data.dates().size() == 359);
  GroupingScheme grouping = make_grouping("exchangeable", 11);

  SUBCASE("sweep holds the evaluation window fixed across lengths") {
    ExperimentSpec spec;
    spec.method = Method::raw;
    spec.eval_start = Date::from_ymd(2012, 6, 1);
    SweepResult sweep =
        sweep_training_length(synth.data, grouping, spec, 55, 60);
    REQUIRE(sweep.rows.size() == 6);
    for (const SweepRow& row : sweep.rows) {
      CHECK(row.report.n_cases == 298 * 3);
      // Raw scoring ignores the training window entirely.
      CHECK(row.report.mean_crps == sweep.rows[0].report.mean_crps);
    }
    CHECK(sweep.reference_length == 60);
    CHECK(sweep.reference_report.n_cases == 298 * 3);
    REQUIRE(sweep.optima.size() == 3);
    for (const SweepOptimum& opt : sweep.optima) {
      CAPTURE(opt.score);
      CHECK(opt.best_length == 55);  // exact ties resolve to the shortest
    }
  }

  SUBCASE("35-day training evaluated from 2012-05-07") {
    ExperimentSpec spec;
    spec.method = Method::raw;
    spec.training_length = 35;
    spec.eval_start = Date::from_ymd(2012, 5, 7);
    ExperimentResult res = run_experiment(synth.data, grouping, spec);
    CHECK(res.n_windows == 323);
    CHECK(res.report.n_cases == 323 * 3);
    CHECK(res.eval_start == Date::from_ymd(2012, 5, 7));
  }
}

TEST_CASE("single-length sweep equals a plain run") {
  SynthResult synth = make_synth(Scenario::emos_normal, 17, 50, 3, 8);
  GroupingScheme grouping = make_grouping("exchangeable", 8);
  ExperimentSpec spec;
  spec.method = Method::emos_normal;
  spec.training_length = 15;

  SweepResult sweep = sweep_training_length(synth.data, grouping, spec, 15, 15);
  ExperimentResult single = run_experiment(synth.data, grouping, spec);
  REQUIRE(sweep.rows.size() == 1);
  CHECK(reports_equal(sweep.rows[0].report, single.report));
}

TEST_CASE("parallel sweep matches serial") {
  SynthResult synth = make_synth(Scenario::emos_normal, 23, 55, 3, 8);
  GroupingScheme grouping = make_grouping("exchangeable", 8);
  ExperimentSpec spec;
  spec.method = Method::emos_normal;

  SweepResult serial =
      sweep_training_length(synth.data, grouping, spec, 10, 14, {}, 1);
  SweepResult parallel =
      sweep_training_length(synth.data, grouping, spec, 10, 14, {}, 4);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (size_t i = 0; i < serial.rows.size(); ++i) {
    CAPTURE(i);
    CHECK(serial.rows[i].length == parallel.rows[i].length);
    CHECK(reports_equal(serial.rows[i].report, parallel.rows[i].report));
  }
  for (size_t i = 0; i < serial.optima.size(); ++i) {
    CHECK(serial.optima[i].best_length == parallel.optima[i].best_length);
    CHECK(serial.optima[i].best_value == parallel.optima[i].best_value);
  }
}

TEST_CASE("method comparison") {
  SynthResult synth = make_synth(Scenario::emos_normal, 29, 60, 3, 8);
  GroupingScheme grouping = make_grouping("exchangeable", 8);

  SUBCASE("rows share the evaluation multiset") {
    ExperimentSpec raw;
    raw.method = Method::raw;
    raw.training_length = 20;
    ExperimentSpec emos;
    emos.method = Method::emos_normal;
    emos.training_length = 20;
    std::vector<ExperimentSpec> specs{raw, emos};
    std::vector<ComparisonRow> rows =
        compare_methods(synth.data, grouping, specs);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].method == Method::raw);
    CHECK(std::isnan(rows[0].ks_p));
    CHECK(rows[1].ks_p >= 0.0);
    CHECK(rows[1].ks_p <= 1.0);
    CHECK(rows[0].report.n_cases == rows[1].report.n_cases);
  }

  SUBCASE("identical specs give identical rows") {
    ExperimentSpec spec;
    spec.method = Method::emos_normal;
    spec.training_length = 20;
    std::vector<ExperimentSpec> specs{spec, spec};
    std::vector<ComparisonRow> rows =
        compare_methods(synth.data, grouping, specs);
    CHECK(reports_equal(rows[0].report, rows[1].report));
  }

  SUBCASE("mismatched evaluation windows are rejected") {
    ExperimentSpec shorter;
    shorter.method = Method::raw;
    shorter.training_length = 10;
    ExperimentSpec longer;
    longer.method = Method::raw;
    longer.training_length = 20;
    std::vector<ExperimentSpec> specs{shorter, longer};
    CHECK_THROWS_WITH_AS(compare_methods(synth.data, grouping, specs),
                         doctest::Contains("comparable"), Error);
  }
}

TEST_CASE("insufficient history is reported, not silently truncated") {
  SynthResult synth = make_synth(Scenario::emos_normal, 31, 60, 2, 8);
  GroupingScheme grouping = make_grouping("exchangeable", 8);
  ExperimentSpec spec;
  spec.method = Method::emos_normal;
  spec.training_length = 100;
  CHECK_THROWS_WITH_AS(run_experiment(synth.data, grouping, spec),
                       doctest::Contains("data-bearing dates"), Error);
}

TEST_CASE("window fit failures are skipped, logged, and bounded") {
  // One station, two members; five consecutive dates lack observations, so
  // the windows right after the gap have too few cases to fit.
  Dataset ds;
  ds.kind = VariableKind::real_line;
  ds.member_count = 2;
  Rng rng(41);
  Date d0 = Date::from_ymd(2021, 3, 1);
  for (int i = 0; i < 40; ++i) {
    ForecastCase c;
    c.date = d0.plus_days(i);
    c.station = "S1";
    c.members = {rng.normal(10.0, 1.0), rng.normal(10.0, 1.0)};
    if (i < 15 || i > 19)
      c.obs = 0.5 * (c.members[0] + c.members[1]) + rng.normal(0.0, 0.3);
    ds.cases.push_back(std::move(c));
  }
  GroupingScheme grouping = make_grouping("exchangeable", 2);

  ExperimentSpec spec;
  spec.method = Method::emos_normal;
  spec.training_length = 6;

  SUBCASE("above the skip budget the run fails") {
    CHECK_THROWS_WITH_AS(run_experiment(ds, grouping, spec),
                         doctest::Contains("skipped"), Error);
  }

  SUBCASE("with a wider budget the skips are accounted for") {
    spec.max_skip_fraction = 0.2;
    ExperimentResult res = run_experiment(ds, grouping, spec);
    CHECK(res.skipped_cases == 4);
    REQUIRE(res.skip_log.size() == 4);
    for (const std::string& line : res.skip_log)
      CHECK(line.find("fit failed") != std::string::npos);
    CHECK(res.n_windows == 25);
    CHECK(res.report.n_cases == 25);
  }
}

TEST_CASE("fitted models are kept on request") {
  SynthResult synth = make_synth(Scenario::emos_normal, 37, 40, 2, 8);
  GroupingScheme grouping = make_grouping("exchangeable", 8);
  ExperimentSpec spec;
  spec.method = Method::emos_normal;
  spec.training_length = 15;

  ExperimentResult plain = run_experiment(synth.data, grouping, spec);
  CHECK(plain.fitted_models.empty());

  ExperimentResult kept = run_experiment(synth.data, grouping, spec, true);
  REQUIRE(kept.fitted_models.size() == static_cast<size_t>(kept.n_windows));
  CHECK(kept.fitted_models.front().date == kept.eval_start);
  AnyModel parsed = parse_model(kept.fitted_models.front().text);
  CHECK(serialize_model(parsed) == kept.fitted_models.front().text);
}

TEST_CASE("gamma mixtures run end to end on nonnegative data") {
  SynthResult synth = make_synth(Scenario::bma_gamma, 19, 70, 3, 3);
  REQUIRE(synth.data.kind == VariableKind::nonnegative);
  GroupingScheme grouping = make_grouping("exchangeable", 3);
  ExperimentSpec spec;
  spec.method = Method::bma_gamma;
  spec.training_length = 25;

  ExperimentResult res = run_experiment(synth.data, grouping, spec);
  CHECK(res.report.n_cases == 45 * 3);
  CHECK(res.pit_randomized_count == 0);  // gamma has no mass at zero
  double oracle = oracle_mean_crps(synth, res.cases);
  CAPTURE(res.report.mean_crps);
  CAPTURE(oracle);
  CHECK(std::abs(res.report.mean_crps - oracle) / oracle < 0.1);
}

TEST_CASE("nonnegative-only methods refuse real-line data") {
  SynthResult synth = make_synth(Scenario::emos_normal, 43, 30, 2, 8);
  GroupingScheme grouping = make_grouping("exchangeable", 8);
  ExperimentSpec spec;
  spec.method = Method::emos_truncnormal;
  spec.training_length = 10;
  CHECK_THROWS_WITH_AS(run_experiment(synth.data, grouping, spec),
                       doctest::Contains("nonnegative"), Error);
}
