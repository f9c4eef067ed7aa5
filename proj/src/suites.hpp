#pragma once

// Verification suites behind the check-* commands. Each row is one
// asserted identity with its residual and tolerance.

#include <json.hpp>

#include <string>
#include <vector>

namespace duality::cli {

struct CheckRow {
  std::string check;
  std::string subject;
  std::string identity;
  std::string parameters;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

std::vector<CheckRow> algebra_suite(const nlohmann::ordered_json& cfg);
std::vector<CheckRow> exact_suite(const nlohmann::ordered_json& cfg);
std::vector<CheckRow> pointwise_suite(const nlohmann::ordered_json& cfg);

}  // namespace duality::cli
