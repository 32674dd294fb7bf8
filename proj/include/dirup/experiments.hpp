#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirup/csv_table.hpp"

namespace dirup {

inline constexpr const char* kVersion = "0.1.0";

/// Experiments known to the runner.
const std::vector<std::string>& experiment_names();

struct ExperimentSpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  /// Empty or "-" writes to stdout.
  std::string output;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  /// Cap on lattice points touched across the whole experiment.
  double budget = 5e7;
};

/// Reads {"name", "params", "output", "format", "seed", "threads", "budget"}.
ExperimentSpec parse_spec(const nlohmann::json& j);
/// Echo written into table headers; the output path is left out so that the
/// same run written to two places yields identical bytes.
nlohmann::json spec_echo(const ExperimentSpec& spec);

/// --threads, else the DIRUP_THREADS environment variable, else 1.
int resolve_threads(const ExperimentSpec& spec);

struct ExperimentResult {
  Table table;
  /// One line for stderr.
  std::string summary;
};

/// Validates the spec and runs it. Throws InvalidArgument on schema errors and
/// BudgetExceeded when the point budget would be exceeded.
ExperimentResult run_experiment(const ExperimentSpec& spec);

std::string render(const ExperimentSpec& spec, const Table& t);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int validation = 2;
inline constexpr int budget = 3;
}  // namespace exit_code

/// Runs the experiment, writes the artifact and a summary line to `err`.
int run(const ExperimentSpec& spec, std::ostream& err);

}  // namespace dirup

#include "dirup/coeff_map.hpp"

namespace dirup {

/// Real-valued trigonometric polynomial with c_{-k} = conj(c_k) and
/// components uniform in [-1, 1] on the box [-radius, radius]^d.
CoeffMap random_real_trig_polynomial(int d, Int radius, std::uint64_t seed);

}  // namespace dirup
