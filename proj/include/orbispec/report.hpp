#pragma once

#include "orbispec/operator.hpp"

#include <json.hpp>

#include <Eigen/Core>
#include <gmp.h>

#include <chrono>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace orbispec {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

/**
 * JSON run report: config echo, verdicts, tables, timing and versions.
 * Every verdict names the invariant it checks. Ungated verdicts are
 * diagnostics and do not affect the status.
 */
class Report {
public:
  using json = nlohmann::ordered_json;

  explicit Report(std::string command) : command_(std::move(command)), start_(std::chrono::steady_clock::now())
  {
    config_ = json::object();
    verdicts_ = json::array();
    tables_ = json::object();
    phases_ = json::object();
  }

  json& config() { return config_; }

  void verdict(const std::string& name, const std::string& invariant, bool passed, json details = json::object(),
               bool gated = true)
  {
    json v;
    v["name"] = name;
    v["invariant"] = invariant;
    v["passed"] = passed;
    v["gated"] = gated;
    v["details"] = std::move(details);
    verdicts_.push_back(std::move(v));
    if (gated && !passed)
      ok_ = false;
  }

  void table(const std::string& name, std::vector<std::string> columns, json rows)
  {
    tables_[name] = {{"columns", std::move(columns)}, {"rows", std::move(rows)}};
  }

  void phase(const std::string& name, double seconds) { phases_[name] = seconds; }

  void fail() { ok_ = false; }
  bool passed() const { return ok_; }

  json to_json() const
  {
    json j;
    j["schema"] = "orbispec-report";
    j["schema_version"] = kReportSchemaVersion;
    j["command"] = command_;
    j["config"] = config_;
    j["verdicts"] = verdicts_;
    j["tables"] = tables_;
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    j["timing"] = {{"total_seconds", total}, {"phases", phases_}};
    j["versions"] = {{"orbispec", kVersion},
                     {"scheme", Scheme::version},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"gmp", gmp_version}};
    j["status"] = ok_ ? "pass" : "fail";
    return j;
  }

private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  json config_, verdicts_, tables_, phases_;
  bool ok_ = true;
};

/// JSON numbers cannot hold NaN or infinities; those become null.
inline Report::json json_number(double v)
{
  if (!std::isfinite(v))
    return nullptr;
  return v;
}

} // namespace orbispec
