#pragma once

// Command-line driver: resolves a JSON config, runs one verification
// suite or experiment and renders the resulting table as CSV or JSON.

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace duality::cli {

/// Bad config file, unknown key, wrong value type or invalid parameter.
/// Maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<std::string, double, long long, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  std::string command;
  nlohmann::ordered_json config;  // fully resolved, keys sorted
  Table table;
  bool all_pass = true;
  bool assertable = true;  // false for reproduce-examples
};

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
};

const std::vector<std::string>& commands();

/// Defaults for `command`, overlaid with the file's values and then the
/// flag overrides. Throws ConfigError on unknown keys or type mismatches.
nlohmann::ordered_json resolve_config(const std::string& command, const nlohmann::json& file,
                                      const Overrides& overrides = {});

/// Run a resolved config. Parameter errors surface as ConfigError.
Report run_command(const std::string& command, const nlohmann::ordered_json& config);

/// 17 significant digits; non-finite values as nan, inf, -inf.
std::string format_double(double v);

std::string render_csv(const Report& report);
std::string render_json(const Report& report);

/// Exit status for a completed report: 0 when every assertable row passes.
int exit_status(const Report& report);

/// Full program: parse argv, run, write <out>/report.{csv,json} and
/// <out>/run.log. Returns the process exit status.
int main(int argc, char** argv);

}  // namespace duality::cli
