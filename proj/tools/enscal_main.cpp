// enscal: calibrate ensemble forecasts, sweep training lengths, build
// verification histograms, and generate synthetic datasets with known truth.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "enscal/config.hpp"
#include "enscal/core_data.hpp"
#include "enscal/errors.hpp"
#include "enscal/harness.hpp"
#include "enscal/synth.hpp"
#include "enscal/textio.hpp"
#include "enscal/verification.hpp"

namespace fs = std::filesystem;

namespace {

using namespace enscal;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::data: return 3;
    case ErrorKind::numeric: return 4;
  }
  return 1;
}

// The only environment hook: ENSCAL_OUTPUT_DIR overrides the config's
// output_dir, so CI can redirect outputs without editing configs.
std::string resolve_output_dir(const std::string& configured) {
  if (const char* env = std::getenv("ENSCAL_OUTPUT_DIR"); env && *env)
    return env;
  return configured;
}

std::string ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    fail_config("cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

void emit(const std::string& dir, const std::string& name,
          std::string_view content) {
  write_text_file((fs::path(dir) / name).string(), content);
  std::cout << "wrote " << (fs::path(dir) / name).string() << "\n";
}

struct Loaded {
  Dataset data;
  GroupingScheme grouping;
};

Loaded load_inputs(const RunConfig& cfg) {
  Loaded l;
  l.data = load_dataset_csv(cfg.dataset_path, cfg.kind);
  l.grouping = make_grouping(cfg.grouping, l.data.member_count);
  return l;
}

void print_skips(const ExperimentResult& res) {
  for (const std::string& line : res.skip_log) std::cerr << "skip " << line << "\n";
}

int cmd_calibrate(const std::string& config_path, int jobs_flag) {
  RunConfig cfg = load_run_config(config_path);
  (void)jobs_flag;  // calibration is sequential over dates by design
  Loaded in = load_inputs(cfg);

  ExperimentResult res =
      run_experiment(in.data, in.grouping, cfg.spec, cfg.write_models);
  print_skips(res);

  std::string dir = ensure_dir(resolve_output_dir(cfg.output_dir));
  emit(dir, "scores.csv", format_scores_csv({&res, 1}));
  emit(dir, "cases.csv", format_cases_csv(res.cases, res.method));
  emit(dir, res.method == Method::raw ? "hist_rank.csv" : "hist_pit.csv",
       format_hist_csv(res.hist));
  if (cfg.write_models && res.method != Method::raw) {
    std::string blob;
    for (const DatedModel& m : res.fitted_models) {
      blob += "--- " + m.date.iso() + "\n";
      blob += m.text;
    }
    emit(dir, "models.txt", blob);
  }
  std::cout << to_string(res.method) << " length " << res.training_length
            << ": " << res.report.n_cases << " cases, mean CRPS "
            << format_double(res.report.mean_crps) << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, int jobs_flag) {
  RunConfig cfg = load_run_config(config_path);
  if (!cfg.sweep_lo || !cfg.sweep_hi)
    fail_config(config_path + ": sweep needs sweep_lo and sweep_hi");
  int jobs = jobs_flag > 0 ? jobs_flag : cfg.jobs;
  Loaded in = load_inputs(cfg);

  SweepResult sweep =
      sweep_training_length(in.data, in.grouping, cfg.spec, *cfg.sweep_lo,
                            *cfg.sweep_hi, cfg.reference_length, jobs);

  std::string dir = ensure_dir(resolve_output_dir(cfg.output_dir));
  emit(dir, "sweep.csv", format_sweep_csv(sweep, cfg.spec.method));
  emit(dir, "sweep_optima.csv", format_sweep_optima_csv(sweep));
  for (const SweepOptimum& opt : sweep.optima)
    std::cout << opt.score << " best length " << opt.best_length << " ("
              << format_double(opt.best_value) << ")\n";
  return 0;
}

// Pulls one named column out of a cases.csv produced by calibrate.
std::vector<std::string> read_column(const std::string& path,
                                     const std::string& name) {
  std::string text = read_text_file(path);
  std::vector<std::string_view> lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) fail_data(path + ": empty input");
  std::vector<std::string_view> header = split(lines[0], ',');
  int col = -1;
  for (size_t i = 0; i < header.size(); ++i)
    if (trim(header[i]) == name) col = static_cast<int>(i);
  if (col < 0) fail_data(path + ": no '" + name + "' column");
  std::vector<std::string> out;
  for (size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string_view> fields = split(lines[i], ',');
    if (static_cast<int>(fields.size()) <= col)
      fail_data(path + ":" + std::to_string(i + 1) + ": short row");
    out.emplace_back(trim(fields[static_cast<size_t>(col)]));
  }
  if (out.empty()) fail_data(path + ": no data rows");
  return out;
}

int cmd_hist(const std::string& cases_path, const std::string& kind, int bins,
             int members, const std::string& out_path) {
  HistogramData hist;
  if (kind == "rank") {
    std::vector<int> ranks;
    for (const std::string& tok : read_column(cases_path, "rank")) {
      if (tok.empty()) continue;  // rank is only filled for the raw method
      ranks.push_back(static_cast<int>(parse_long(tok, "rank")));
    }
    if (ranks.empty()) fail_data(cases_path + ": no rank values");
    int m = members;
    if (m <= 0) {
      for (int r : ranks) m = std::max(m, r - 1);
    }
    hist = rank_histogram(ranks, m);
  } else if (kind == "pit") {
    std::vector<double> pits;
    for (const std::string& tok : read_column(cases_path, "pit")) {
      if (tok.empty()) continue;
      pits.push_back(parse_double(tok, "pit"));
    }
    if (pits.empty()) fail_data(cases_path + ": no pit values");
    hist = pit_histogram(pits, bins);
  } else {
    fail_config("hist kind must be 'rank' or 'pit', got '" + kind + "'");
  }
  std::string csv = format_hist_csv(hist);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_text_file(out_path, csv);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_synth(const std::string& scenario_text, std::uint64_t seed, int n_dates,
              int n_stations, int n_members, const std::string& start_text,
              const std::vector<std::string>& missing_texts,
              const std::vector<std::string>& param_texts,
              const std::string& out_path) {
  SynthSpec spec;
  spec.scenario = parse_scenario(scenario_text);
  spec.seed = seed;
  spec.n_dates = n_dates;
  spec.n_stations = n_stations;
  spec.n_members = n_members;
  spec.start = Date::parse(start_text);
  for (const std::string& t : missing_texts)
    spec.missing.push_back(Date::parse(t));
  for (const std::string& t : param_texts) {
    size_t eq = t.find('=');
    if (eq == std::string::npos || eq == 0)
      fail_config("--param expects key=value, got '" + t + "'");
    spec.params[t.substr(0, eq)] =
        parse_double(t.substr(eq + 1), "param " + t.substr(0, eq));
  }

  SynthResult res = generate_synth(spec);
  save_dataset_csv(res.data, out_path);

  std::cout << "scenario " << to_string(spec.scenario) << "\n";
  std::cout << "seed " << seed << "\n";
  std::cout << "kind " << to_string(res.data.kind) << "\n";
  std::cout << "cases " << res.data.cases.size() << "\n";
  for (const auto& [name, value] : res.truth)
    std::cout << "param " << name << " " << format_double(value) << "\n";
  std::cout << "exact_mean_crps " << format_double(res.exact_mean_crps) << "\n";
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble forecast calibration and verification"};
  app.require_subcommand(1);

  std::string config_path;
  int jobs_flag = 0;

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Fit rolling models and score them");
  calibrate->add_option("-c,--config", config_path, "Run config file")
      ->required();

  CLI::App* sweep =
      app.add_subcommand("sweep", "Score a range of training lengths");
  sweep->add_option("-c,--config", config_path, "Run config file")->required();
  sweep->add_option("--jobs", jobs_flag,
                    "Parallel sweep workers (overrides the config)");

  std::string cases_path, hist_kind, hist_out;
  int hist_bins = 11, hist_members = 0;
  CLI::App* hist = app.add_subcommand("hist", "Histogram a cases.csv column");
  hist->add_option("cases", cases_path, "cases.csv from calibrate")->required();
  hist->add_option("--kind", hist_kind, "rank or pit")->required();
  hist->add_option("--bins", hist_bins, "PIT bin count");
  hist->add_option("--members", hist_members,
                   "Ensemble size for rank bins (default: infer)");
  hist->add_option("--out", hist_out, "Output CSV path (default: stdout)");

  std::string scenario_text, start_text = "2012-04-01", synth_out = "synth.csv";
  std::uint64_t seed = 1;
  int n_dates = 60, n_stations = 5, n_members = 11;
  std::vector<std::string> missing_texts, param_texts;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate a dataset with known truth");
  synth->add_option("--scenario", scenario_text,
                    "bma_normal | bma_gamma | bma_truncnormal | emos_normal | "
                    "emos_truncnormal | underdispersive_raw")
      ->required();
  synth->add_option("--seed", seed, "Generator seed");
  synth->add_option("--dates", n_dates, "Calendar length in days");
  synth->add_option("--stations", n_stations, "Station count");
  synth->add_option("--members", n_members, "Ensemble size");
  synth->add_option("--start", start_text, "First date (ISO)");
  synth->add_option("--missing", missing_texts, "Dates to drop (ISO, repeat)");
  synth->add_option("--param", param_texts, "Override key=value (repeat)");
  synth->add_option("-o,--out", synth_out, "Output dataset CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // usage problems share the config exit code
  }

  try {
    if (app.got_subcommand(calibrate)) return cmd_calibrate(config_path, jobs_flag);
    if (app.got_subcommand(sweep)) return cmd_sweep(config_path, jobs_flag);
    if (app.got_subcommand(hist))
      return cmd_hist(cases_path, hist_kind, hist_bins, hist_members, hist_out);
    if (app.got_subcommand(synth))
      return cmd_synth(scenario_text, seed, n_dates, n_stations, n_members,
                       start_text, missing_texts, param_texts, synth_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
