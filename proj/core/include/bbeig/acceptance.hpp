#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bbeig/asymptotics.hpp"
#include "bbeig/config.hpp"

namespace bbeig {

struct AcceptanceOptions {
  // Sweep settings shared by the domain sweeps. A zero placement stride
  // selects min(0.125, d_max / 4) per domain.
  SweepSettings sweep;
  double m_bar = 1.0;
  double m_under = 0.25;
  // Progress messages for the long criteria.
  std::function<void(const std::string&)> log;

  static AcceptanceOptions from_config(const RunConfig& config);
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// One line: "criterion <id> PASS|FAIL <name>: <detail> (<seconds> s)".
std::string format_result(const CriterionResult& r);

struct SweepRun {
  std::string shape;
  double d_max = 0.0;
  LimitSolution sol;
  std::vector<AsymptoticRecord> records;
  std::optional<ExpansionReport> report;
  std::vector<PropertyCheck> checks;
};

class AcceptanceSuite {
 public:
  explicit AcceptanceSuite(AcceptanceOptions options = {});

  struct Info {
    int id;
    std::string name;
  };
  static const std::vector<Info>& criteria();

  CriterionResult run(int id);
  std::vector<CriterionResult> run_all(const std::function<void(const CriterionResult&)>& on_result = {});

  // Sweeps computed so far, by domain descriptor.
  const std::map<std::string, SweepRun>& sweeps() const { return sweeps_; }

 private:
  const SweepRun& sweep_for(const std::string& shape, bool blowup);
  CriterionResult evaluate(int id);

  AcceptanceOptions options_;
  std::map<std::string, SweepRun> sweeps_;
};

}  // namespace bbeig
