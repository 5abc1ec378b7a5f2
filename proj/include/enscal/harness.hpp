#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "enscal/bma.hpp"
#include "enscal/core_data.hpp"
#include "enscal/verification.hpp"

namespace enscal {

enum class Method {
  raw,
  bma_normal,
  bma_gamma,
  bma_truncnormal,
  emos_normal,
  emos_truncnormal,
};

Method parse_method(std::string_view text);
std::string to_string(Method method);

struct ExperimentSpec {
  Method method = Method::emos_normal;
  BiasMode bias = BiasMode::linear;  // bma_normal only
  int training_length = 30;
  std::optional<Date> eval_start;    // default: earliest feasible date
  double interval_level = 10.0 / 12.0;
  std::uint64_t seed = 1;
  double max_skip_fraction = 0.05;
};

struct CaseScore {
  Date date;
  std::string station;
  double obs = 0.0;
  double crps = 0.0;
  double pit = 0.0;       // NaN for raw
  int rank = 0;           // 0 for non-raw
  double lo = 0.0, hi = 0.0;
  double median = 0.0, mean = 0.0;
  bool covered = false;
  bool pit_randomized = false;
};

struct DatedModel {
  Date date;         // target date the model was fitted for
  std::string text;  // serialize_model output
};

struct ExperimentResult {
  Method method = Method::raw;
  int training_length = 0;
  Date eval_start;
  ScoreReport report;
  std::vector<CaseScore> cases;       // (date, station) order
  KsResult pit_ks;                    // dist methods only
  HistogramData hist;                 // PIT hist, or rank hist for raw
  int n_windows = 0;
  int skipped_cases = 0;
  int pit_randomized_count = 0;
  std::vector<std::string> skip_log;
  std::vector<DatedModel> fitted_models;  // one per successfully fitted date
};

// One model per target date, shared across stations; scores only cases with
// observations. Window fit failures skip that date's cases (logged); more
// than max_skip_fraction of cases skipped is an error.
ExperimentResult run_experiment(const Dataset& ds, const GroupingScheme& grouping,
                                const ExperimentSpec& spec,
                                bool keep_models = false);

struct SweepRow {
  int length = 0;
  ScoreReport report;
};

struct SweepOptimum {
  std::string score;  // "crps" | "mae" | "rmse"
  int best_length = 0;
  double best_value = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepOptimum> optima;   // ties broken toward shorter length
  int reference_length = 0;
  ScoreReport reference_report;
};

// Shared evaluation window across lengths: eval_start must be feasible for
// the longest window (defaults to the earliest such date).
SweepResult sweep_training_length(const Dataset& ds, const GroupingScheme& grouping,
                                  const ExperimentSpec& spec, int length_lo,
                                  int length_hi,
                                  std::optional<int> reference_length = {},
                                  int jobs = 1);

struct ComparisonRow {
  Method method = Method::raw;
  ScoreReport report;
  double ks_p = 0.0;  // NaN for raw
};

// All specs must produce the same (date, station) evaluation multiset.
std::vector<ComparisonRow> compare_methods(const Dataset& ds,
                                           const GroupingScheme& grouping,
                                           std::span<const ExperimentSpec> specs);

// CSV emission (stable column sets, documented in the README).
std::string format_cases_csv(std::span<const CaseScore> cases, Method method);
std::string format_scores_csv(std::span<const ExperimentResult> results);
std::string format_sweep_csv(const SweepResult& sweep, Method method);
std::string format_sweep_optima_csv(const SweepResult& sweep);
std::string format_hist_csv(const HistogramData& hist);

}  // namespace enscal
