#include "duality/cli.hpp"

#include "duality/exact.hpp"
#include "duality/montecarlo.hpp"
#include "suites.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace duality::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Defaults per command. Every key a config file may set appears here; the
// JSON type of the default is the type the key must have.
const std::map<std::string, json>& defaults_for(const std::string& command) {
  static const std::map<std::string, std::map<std::string, json>> table = [] {
    std::map<std::string, std::map<std::string, json>> t;
    t["check-algebra"] = {{"M", 32},
                          {"N", 10},
                          {"m", 1.0},
                          {"float_N_max", 20},
                          {"rational_N_max", 10},
                          {"binomial_N_max", 30},
                          {"tolerance", 1e-10}};
    t["check-exact"] = {{"moran_N", 8},
                        {"sip_N_max", 6},
                        {"tolerance", 1e-10},
                        {"semigroup_tolerance", 1e-8},
                        {"identity_tolerance", 1e-12},
                        {"instances", 100},
                        {"kingman_sigma", 1.0},
                        {"kingman_n_max", 200},
                        {"kingman_n0", 10},
                        {"leak_t", 1.0}};
    t["check-pointwise"] = {{"n_max", 6},  {"theta", 0.7},      {"sigma", 1.0},
                            {"h", 1e-4},   {"analytic", true},  {"tolerance", 1e-9},
                            {"c1", 1.0},   {"c2", 0.5},         {"c3", -0.3},
                            {"d", 3},      {"N", 3}};
    t["run-mc"] = {{"experiment", "wf-moran"},
                   {"x0", 0.3},
                   {"theta", 0.5},
                   {"N", 3},
                   {"k1", 2},
                   {"t", 0.5},
                   {"dt", 1e-3},
                   {"n_paths", 100000},
                   {"antithetic", false},
                   {"tolerance_multiplier", 3.0},
                   {"bias_per_dt", 5.0},
                   {"backend", "openmp"}};
    t["reproduce-examples"] = {{"x", 0.3}, {"y", 0.7}, {"t", 0.5}, {"d", 3}};
    for (auto& [name, keys] : t) {
      keys["out"] = "out";
      keys["format"] = "csv";
      keys["seed"] = std::uint64_t{0};
      keys["command"] = name;
    }
    return t;
  }();
  const auto it = table.find(command);
  if (it == table.end()) throw ConfigError("unknown command '" + command + "'");
  return it->second;
}

bool same_type(const json& def, const json& v) {
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_string()) return v.is_string();
  if (def.is_number_unsigned()) return v.is_number_unsigned();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number_float()) return v.is_number();
  return false;
}

const char* type_name(const json& def) {
  if (def.is_boolean()) return "boolean";
  if (def.is_string()) return "string";
  if (def.is_number_unsigned()) return "non-negative integer";
  if (def.is_number_integer()) return "integer";
  return "number";
}

std::string render_value(const json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

std::string escape_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>)
          return v;
        else if constexpr (std::is_same_v<T, double>)
          return format_double(v);
        else if constexpr (std::is_same_v<T, bool>)
          return v ? "true" : "false";
        else
          return std::to_string(v);
      },
      c);
}

std::string cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>)
          return json(v).dump();
        else if constexpr (std::is_same_v<T, double>)
          return std::isfinite(v) ? format_double(v) : "\"" + format_double(v) + "\"";
        else if constexpr (std::is_same_v<T, bool>)
          return v ? "true" : "false";
        else
          return std::to_string(v);
      },
      c);
}

Report check_report(const std::string& command, const ordered_json& config,
                    const std::vector<CheckRow>& rows) {
  Report r;
  r.command = command;
  r.config = config;
  r.table.columns = {"check", "subject", "identity", "parameters", "residual", "tolerance", "pass"};
  for (const CheckRow& row : rows) {
    r.table.rows.push_back(
        {row.check, row.subject, row.identity, row.parameters, row.residual, row.tolerance, row.pass});
    r.all_pass = r.all_pass && row.pass;
  }
  return r;
}

Report run_mc(const ordered_json& cfg) {
  Experiment e;
  e.kind = experiment_kind_from_string(cfg.at("experiment").get<std::string>());
  e.x0 = cfg.at("x0").get<double>();
  e.theta = cfg.at("theta").get<double>();
  e.N = cfg.at("N").get<int>();
  e.k1 = cfg.at("k1").get<long>();
  e.cfg.t = cfg.at("t").get<double>();
  e.cfg.dt = cfg.at("dt").get<double>();
  const long long n = cfg.at("n_paths").get<long long>();
  if (n < 0) throw ConfigError("n_paths must be non-negative");
  e.cfg.n_paths = static_cast<std::size_t>(n);
  e.cfg.antithetic = cfg.at("antithetic").get<bool>();
  e.cfg.seed = cfg.at("seed").get<std::uint64_t>();
  e.tolerance_multiplier = cfg.at("tolerance_multiplier").get<double>();
  e.bias_per_dt = cfg.at("bias_per_dt").get<double>();
  if (!(e.tolerance_multiplier > 0.0)) throw ConfigError("tolerance_multiplier must be > 0");
  if (!(e.bias_per_dt >= 0.0)) throw ConfigError("bias_per_dt must be >= 0");
  const std::string b = cfg.at("backend").get<std::string>();
  Backend backend;
  if (b == "serial")
    backend = Backend::Serial;
  else if (b == "openmp")
    backend = Backend::OpenMP;
  else
    throw ConfigError("backend must be 'serial' or 'openmp'");

  const ComparisonReport c = run_experiment(e, backend);
  Report r;
  r.command = "run-mc";
  r.config = cfg;
  r.table.columns = {"experiment", "lhs_mean", "lhs_se", "lhs_n", "rhs_mean", "rhs_se",
                     "rhs_n", "rhs_exact", "diff", "combined_se", "z",
                     "tolerance_multiplier", "bias_budget", "pass", "metadata"};
  std::string meta;
  for (const auto& [k, v] : c.metadata) meta += (meta.empty() ? "" : ";") + k + "=" + v;
  r.table.rows.push_back({to_string(e.kind), c.lhs.mean, c.lhs.se,
                          static_cast<long long>(c.lhs.n), c.rhs.mean, c.rhs.se,
                          static_cast<long long>(c.rhs.n), c.rhs_exact, c.diff, c.combined_se, c.z,
                          c.tolerance_multiplier, c.bias_budget, c.pass, meta});
  r.all_pass = c.pass;
  return r;
}

Report run_examples(const ordered_json& cfg) {
  ExampleParams p;
  p.x = cfg.at("x").get<double>();
  p.y = cfg.at("y").get<double>();
  p.t = cfg.at("t").get<double>();
  p.d = cfg.at("d").get<int>();
  Report r;
  r.command = "reproduce-examples";
  r.config = cfg;
  r.assertable = false;
  r.table.columns = {"example", "parameters", "formula_value", "oracle_value", "abs_diff",
                     "state_space_size", "agrees"};
  for (ExampleId id : {ExampleId::Heterozygosity, ExampleId::X2yTwoType, ExampleId::DTypeProduct,
                       ExampleId::X2ProductDType}) {
    const ExampleRecord rec = reproduce_example(id, p);
    const bool agrees = rec.abs_diff <= 1e-10;
    r.table.rows.push_back({to_string(id), rec.parameters, rec.formula_value,
                            rec.oracle_value, rec.abs_diff,
                            static_cast<long long>(rec.state_space_size), agrees});
    r.all_pass = r.all_pass && agrees;
  }
  return r;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class RunLog {
 public:
  explicit RunLog(std::vector<std::string>& lines) : lines_(lines) {}
  void operator()(const std::string& msg) { lines_.push_back(timestamp() + " " + msg); }

 private:
  std::vector<std::string>& lines_;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"check-algebra", "check-exact", "check-pointwise",
                                              "run-mc", "reproduce-examples"};
  return names;
}

ordered_json resolve_config(const std::string& command, const json& file,
                            const Overrides& overrides) {
  const auto& defaults = defaults_for(command);
  std::map<std::string, json> resolved(defaults.begin(), defaults.end());
  if (!file.is_null()) {
    if (!file.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : file.items()) {
      const auto it = defaults.find(key);
      if (it == defaults.end())
        throw ConfigError("unknown config key '" + key + "' for " + command);
      if (!same_type(it->second, value))
        throw ConfigError("config key '" + key + "' must be a " + type_name(it->second));
      resolved[key] = value;
    }
  }
  if (resolved.at("command").get<std::string>() != command)
    throw ConfigError("config is for '" + resolved.at("command").get<std::string>() +
                      "' but the command is '" + command + "'");
  if (overrides.out) resolved["out"] = *overrides.out;
  if (overrides.format) resolved["format"] = *overrides.format;
  if (overrides.seed) resolved["seed"] = *overrides.seed;
  const std::string fmt = resolved.at("format").get<std::string>();
  if (fmt != "csv" && fmt != "json") throw ConfigError("format must be 'csv' or 'json'");
  // Float-typed keys keep float type even when the file gave an integer.
  for (auto& [key, value] : resolved)
    if (defaults.at(key).is_number_float() && !value.is_number_float())
      value = value.get<double>();
  ordered_json out;
  for (const auto& [key, value] : resolved) out[key] = value;
  return out;
}

Report run_command(const std::string& command, const ordered_json& config) {
  try {
    if (command == "check-algebra") return check_report(command, config, algebra_suite(config));
    if (command == "check-exact") return check_report(command, config, exact_suite(config));
    if (command == "check-pointwise")
      return check_report(command, config, pointwise_suite(config));
    if (command == "run-mc") return run_mc(config);
    if (command == "reproduce-examples") return run_examples(config);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown command '" + command + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const Report& report) {
  std::ostringstream os;
  for (const auto& [key, value] : report.config.items())
    os << "# " << key << "=" << render_value(value) << "\n";
  for (size_t i = 0; i < report.table.columns.size(); ++i)
    os << (i ? "," : "") << report.table.columns[i];
  os << "\n";
  for (const auto& row : report.table.rows) {
    for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << escape_csv(cell_text(row[i]));
    os << "\n";
  }
  return os.str();
}

std::string render_json(const Report& report) {
  std::ostringstream os;
  os << "{\n  \"command\": " << json(report.command).dump() << ",\n  \"config\": {";
  bool first = true;
  for (const auto& [key, value] : report.config.items()) {
    os << (first ? "\n" : ",\n") << "    " << json(key).dump() << ": " << render_value(value);
    first = false;
  }
  os << "\n  },\n  \"all_pass\": " << (report.all_pass ? "true" : "false")
     << ",\n  \"assertable\": " << (report.assertable ? "true" : "false") << ",\n  \"rows\": [";
  for (size_t r = 0; r < report.table.rows.size(); ++r) {
    const auto& row = report.table.rows[r];
    os << (r ? ",\n" : "\n") << "    {";
    for (size_t i = 0; i < row.size(); ++i)
      os << (i ? ", " : "") << json(report.table.columns[i]).dump() << ": " << cell_json(row[i]);
    os << "}";
  }
  os << "\n  ]\n}\n";
  return os.str();
}

int exit_status(const Report& report) {
  if (!report.assertable) return 0;
  return report.all_pass ? 0 : 1;
}

int main(int argc, char** argv) {
  CLI::App app{"Verify and simulate dualities of Markov processes"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides ov;
  std::string out, format;
  std::uint64_t seed = 0;
  for (const std::string& name : commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--seed", seed, "random seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  if (sub->count("--out")) ov.out = out;
  if (sub->count("--format")) ov.format = format;
  if (sub->count("--seed")) ov.seed = seed;

  std::vector<std::string> log_lines;
  RunLog log(log_lines);
  ordered_json config;
  try {
    std::ifstream is(config_path);
    if (!is) throw ConfigError("cannot open config file '" + config_path + "'");
    json file;
    try {
      file = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    config = resolve_config(command, file, ov);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const std::filesystem::path dir = config.at("out").get<std::string>();
  const std::string fmt = config.at("format").get<std::string>();
  int status = 0;
  try {
    std::filesystem::create_directories(dir);
    log("start " + command + " config=" + config_path);
    log("resolved config " + config.dump());
    const auto t0 = std::chrono::steady_clock::now();
    Report report;
    try {
      report = run_command(command, config);
    } catch (const ConfigError& e) {
      log(std::string("config error: ") + e.what());
      write_file(dir / "run.log", [&] {
        std::string s;
        for (const auto& l : log_lines) s += l + "\n";
        return s;
      }());
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::filesystem::path report_path = dir / (fmt == "json" ? "report.json" : "report.csv");
    write_file(report_path, fmt == "json" ? render_json(report) : render_csv(report));
    status = exit_status(report);
    size_t failed = 0;
    for (const auto& row : report.table.rows)
      for (size_t i = 0; i < row.size(); ++i)
        if (report.table.columns[i] == "pass" && !std::get<bool>(row[i])) ++failed;
    log("rows=" + std::to_string(report.table.rows.size()) + " failed=" + std::to_string(failed) +
        " elapsed_s=" + format_double(secs));
    log("wrote " + report_path.string() + " exit=" + std::to_string(status));
  } catch (const std::exception& e) {
    log(std::string("runtime failure: ") + e.what());
    std::cerr << "error: " << e.what() << "\n";
    status = 1;
  }
  try {
    std::string s;
    for (const auto& l : log_lines) s += l + "\n";
    write_file(dir / "run.log", s);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}

}  // namespace duality::cli
