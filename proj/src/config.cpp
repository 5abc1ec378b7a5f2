#include "enscal/config.hpp"

#include <filesystem>

#include "enscal/errors.hpp"
#include "enscal/textio.hpp"

namespace enscal {

RunConfig parse_run_config(std::string_view text, const std::string& origin) {
  RunConfig cfg;
  bool seen_version = false;
  bool seen_dataset = false;

  std::vector<std::string_view> lines = split(text, '\n');
  for (size_t li = 0; li < lines.size(); ++li) {
    std::string_view line = trim(lines[li]);
    if (line.empty() || line[0] == '#') continue;
    std::string where = origin + ":" + std::to_string(li + 1);

    size_t sp = line.find(' ');
    std::string_view key = sp == std::string_view::npos ? line : line.substr(0, sp);
    std::string_view value =
        sp == std::string_view::npos ? std::string_view() : trim(line.substr(sp + 1));

    if (!seen_version) {
      if (key != "enscal_config" || value != "1")
        fail_config(where + ": first line must be 'enscal_config 1'");
      seen_version = true;
      continue;
    }
    if (value.empty()) fail_config(where + ": key '" + std::string(key) +
                                   "' has no value");

    auto as_int = [&](const char* what) {
      return static_cast<int>(parse_long(value, what));
    };
    if (key == "dataset") {
      cfg.dataset_path = std::string(value);
      seen_dataset = true;
    } else if (key == "kind") {
      cfg.kind = parse_variable_kind(value);
    } else if (key == "grouping") {
      cfg.grouping = std::string(value);
    } else if (key == "method") {
      cfg.spec.method = parse_method(value);
    } else if (key == "bias") {
      cfg.spec.bias = parse_bias_mode(value);
    } else if (key == "training_length") {
      cfg.spec.training_length = as_int("training_length");
      if (cfg.spec.training_length < 1)
        fail_config(where + ": training_length must be positive");
    } else if (key == "eval_start") {
      cfg.spec.eval_start = Date::parse(value);
    } else if (key == "level") {
      cfg.spec.interval_level = parse_double(value, "level");
      if (!(cfg.spec.interval_level > 0.0 && cfg.spec.interval_level < 1.0))
        fail_config(where + ": level must be in (0,1)");
    } else if (key == "seed") {
      cfg.spec.seed = static_cast<std::uint64_t>(parse_long(value, "seed"));
    } else if (key == "max_skip_fraction") {
      cfg.spec.max_skip_fraction = parse_double(value, "max_skip_fraction");
      if (!(cfg.spec.max_skip_fraction >= 0.0 &&
            cfg.spec.max_skip_fraction <= 1.0))
        fail_config(where + ": max_skip_fraction must be in [0,1]");
    } else if (key == "sweep_lo") {
      cfg.sweep_lo = as_int("sweep_lo");
    } else if (key == "sweep_hi") {
      cfg.sweep_hi = as_int("sweep_hi");
    } else if (key == "reference_length") {
      cfg.reference_length = as_int("reference_length");
    } else if (key == "output_dir") {
      cfg.output_dir = std::string(value);
    } else if (key == "write_models") {
      if (value == "true")
        cfg.write_models = true;
      else if (value == "false")
        cfg.write_models = false;
      else
        fail_config(where + ": write_models must be true or false");
    } else if (key == "jobs") {
      cfg.jobs = as_int("jobs");
      if (cfg.jobs < 1) fail_config(where + ": jobs must be positive");
    } else {
      fail_config(where + ": unknown key '" + std::string(key) + "'");
    }
  }

  if (!seen_version) fail_config(origin + ": missing 'enscal_config 1' header");
  if (!seen_dataset) fail_config(origin + ": missing required key 'dataset'");
  if (cfg.sweep_lo.has_value() != cfg.sweep_hi.has_value())
    fail_config(origin + ": sweep_lo and sweep_hi must be given together");
  if (cfg.sweep_lo && (*cfg.sweep_lo < 1 || *cfg.sweep_hi < *cfg.sweep_lo))
    fail_config(origin + ": sweep range must satisfy 1 <= sweep_lo <= sweep_hi");
  if (!std::filesystem::exists(cfg.dataset_path))
    fail_config(origin + ": dataset file '" + cfg.dataset_path +
                "' does not exist");
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_text_file(path), path);
}

}  // namespace enscal
