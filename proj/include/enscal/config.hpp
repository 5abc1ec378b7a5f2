#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "enscal/harness.hpp"

namespace enscal {

// Flat key-value config document, one `key value` pair per line, `#`
// comments allowed. First non-comment line must be `enscal_config 1`.
// Unknown keys are rejected.
struct RunConfig {
  std::string dataset_path;
  VariableKind kind = VariableKind::real_line;
  std::string grouping = "exchangeable";
  ExperimentSpec spec;
  std::optional<int> sweep_lo;
  std::optional<int> sweep_hi;
  std::optional<int> reference_length;
  std::string output_dir = ".";
  bool write_models = true;
  int jobs = 1;
};

RunConfig parse_run_config(std::string_view text, const std::string& origin);
RunConfig load_run_config(const std::string& path);

}  // namespace enscal
