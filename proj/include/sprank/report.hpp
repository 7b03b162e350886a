#pragma once

#include <string>

#include <json.hpp>

#include "sprank/rank.hpp"

namespace sprank {

/// Output of one command. Keys are emitted in sorted order; doubles use the
/// shortest round-trip representation, non-finite values become null.
struct Report {
  std::string command;
  nlohmann::json manifest;
  nlohmann::json payload;
  nlohmann::json versions;
  double wall_clock_seconds = 0.0;
  nlohmann::json verdict;

  bool operator==(const Report&) const = default;
};

nlohmann::json to_json(const Report& report);
Report report_from_json(const nlohmann::json& doc);

/// Pretty-printed JSON with a trailing newline.
std::string serialize(const Report& report);
Report parse_report(const std::string& text);

/// serialize() with the wall-clock field zeroed; equal for repeated runs.
std::string serialize_stable(const Report& report);

nlohmann::json library_versions();

/// JSON number, or null for NaN and infinities.
nlohmann::json json_number(double x);
nlohmann::json json_vector(const Eigen::VectorXd& v);

nlohmann::json to_json(const ConjugateEvent& event);
nlohmann::json to_json(const RankEvidence& evidence, double time_tol);
nlohmann::json to_json(const RankVerdict& verdict, double time_tol);
/// Row summary: ranges, fiber closure, verdict states and worst cases.
nlohmann::json to_json(const BergerRow& row);

/// "%.17g"
std::string format_double(double x);

}  // namespace sprank
