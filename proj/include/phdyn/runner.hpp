#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace phdyn::runner {

struct RunOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // "dotted.key=value"
  int workers = 1;
  std::string out_dir;  // empty: the config's "output", else "out"
};

// Applies `a.b.c=value` to a scalar (or absent) field.  The value is parsed as
// JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& config, const std::string& assignment);

// Exit codes: 0 success, 2 invalid input (nothing written), 1 analysis failure.
int run(const RunOptions& opt, std::ostream& err);

// Dispatches one analysis and returns artifact name → file contents.
std::vector<std::pair<std::string, std::string>> run_analysis(const nlohmann::json& config, int workers);

}  // namespace phdyn::runner
