#pragma once

/// \file verify.hpp
/// Invariant suites run by `ellvne verify` and `ellvne scan`.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ellvne/cli/io.hpp"
#include "ellvne/dynamics.hpp"
#include "ellvne/scenarios.hpp"

namespace ellvne::cli {

struct CheckResult {
  std::string name;
  double max_defect = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerificationReport {
  std::string subject;
  std::vector<CheckResult> checks;

  bool passed() const;
  /// Records a check; NaN defects fail.
  void add(std::string name, double defect, double tolerance, std::string detail = {});
  void add_failure(std::string name, std::string detail, double defect = 0.0, double tolerance = 0.0);
};

std::string to_json(const VerificationReport& report, int indent = 2);

struct VerifySettings {
  IntegratorControl control;
  /// Overrides the scenario's default span when set.
  std::optional<std::pair<double, double>> span;
  std::size_t samples = 201;
};

VerificationReport verify_scenario(const ScenarioInstance& inst, const VerifySettings& settings);

/// Closure, theorem residual and coefficient re-derivation for user operators.
VerificationReport verify_operator_file(const OperatorFile& file, double omega, double k, double nu,
                                        int case_number, const VerifySettings& settings);

/// Case inferred from the roles present: C or D means Case 2.
int infer_case(const OperatorFile& file);

}  // namespace ellvne::cli
