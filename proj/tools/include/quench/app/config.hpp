#pragma once

// Run configuration: one "key = value" pair per line, "#" starts a comment.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quench/domain.hpp"
#include "quench/error.hpp"
#include "quench/solver.hpp"

namespace quench::app {

class ConfigError : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

enum class Mode { lemma7, theorem8, theorem9, comparison, convergence, sweep };

std::string to_string(Mode m);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 1;

  // count evenly spaced values from lo to hi inclusive.
  std::vector<double> values() const;
};

struct RunConfig {
  Mode mode = Mode::lemma7;
  ProblemParams problem;
  StepControl control;
  std::size_t M = 201;
  std::string initial = "zero";  // zero | parabolic | file
  std::string initial_file;      // "r,u" CSV for initial = file

  double beta = 2.5;            // theorem9
  double lambda_factor = 1.1;   // theorem9: certified λ = factor · max(λ₀, λ₁)
  InitialData upper = InitialData::parabolic(0.1);  // comparison
  std::string upper_initial = "parabolic";
  std::string upper_initial_file;
  std::vector<std::size_t> M_list{101, 201, 401};   // convergence
  Range lambda_range{1.0, 200.0, 8};                // sweep
  Range chi_range{0.0, 2.0, 8};                     // sweep
  std::size_t workers = 1;                          // sweep

  std::filesystem::path output_dir = "out";
  // Directory relative paths in the config resolve against.
  std::filesystem::path base_dir = ".";

  // Every key with its resolved value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> resolved() const;
};

// Parses and validates a config. Errors (unknown key, duplicate key, bad or
// out-of-range value, missing required key) throw ConfigError with the line
// number. Profiles named by initial_file / upper_initial_file are read
// relative to base_dir.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");

// Reads the file and parses it with base_dir = its directory.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace quench::app
