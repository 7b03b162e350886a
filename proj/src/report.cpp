#include "sprank/report.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <gsl/gsl_version.h>

namespace sprank {

using nlohmann::json;

json json_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json json_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json_number(v(i)));
  return out;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json library_versions() {
  return {
      {"sprank", "0.1.0"},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                    "." + std::to_string(EIGEN_MINOR_VERSION)},
      {"boost", std::to_string(BOOST_VERSION / 100000) + "." +
                    std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                    std::to_string(BOOST_VERSION % 100)},
      {"gsl", GSL_VERSION},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
  };
}

json to_json(const Report& r) {
  return {
      {"command", r.command},
      {"manifest", r.manifest},
      {"payload", r.payload},
      {"versions", r.versions},
      {"wall_clock_seconds", json_number(r.wall_clock_seconds)},
      {"verdict", r.verdict},
  };
}

Report report_from_json(const json& doc) {
  static const std::set<std::string> keys = {"command",  "manifest",           "payload",
                                             "versions", "wall_clock_seconds", "verdict"};
  if (!doc.is_object()) throw Error("report must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!keys.count(key)) throw Error("unknown report key '" + key + "'");
  }
  for (const auto& key : keys)
    if (!doc.contains(key)) throw Error("report is missing '" + key + "'");
  Report r;
  r.command = doc.at("command").get<std::string>();
  r.manifest = doc.at("manifest");
  r.payload = doc.at("payload");
  r.versions = doc.at("versions");
  const json& wall = doc.at("wall_clock_seconds");
  r.wall_clock_seconds = wall.is_null() ? std::nan("") : wall.get<double>();
  r.verdict = doc.at("verdict");
  return r;
}

std::string serialize(const Report& r) { return to_json(r).dump(2) + "\n"; }

Report parse_report(const std::string& text) {
  try {
    return report_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
}

std::string serialize_stable(const Report& r) {
  Report copy = r;
  copy.wall_clock_seconds = 0.0;
  return serialize(copy);
}

json to_json(const ConjugateEvent& e) { return {{"time", json_number(e.time)}, {"multiplicity", e.multiplicity}}; }

json to_json(const RankEvidence& e, double time_tol) {
  json events = json::array();
  int at_pi = 0;
  for (const auto& ev : e.events) {
    events.push_back(to_json(ev));
    if (std::abs(ev.time - std::numbers::pi) <= time_tol) at_pi = ev.multiplicity;
  }
  return {
      {"index", e.index},
      {"point", json_vector(e.initial.point.coords)},
      {"velocity", json_vector(e.initial.velocity.components)},
      {"events", events},
      {"multiplicity_at_pi", at_pi},
      {"certificate", e.certificate},
      {"certificate_deviation", json_number(e.certificate_deviation)},
      {"max_normal_curvature", json_number(e.max_normal_curvature)},
      {"min_normal_curvature", json_number(e.min_normal_curvature)},
      {"witness", e.witness},
      {"weak_deviation", json_number(e.weak_deviation)},
      {"excluded_samples", e.excluded_samples},
      {"holds", e.holds},
  };
}

json to_json(const RankVerdict& v, double time_tol) {
  json evidence = json::array();
  for (const auto& e : v.evidence) evidence.push_back(to_json(e, time_tol));
  return {
      {"property", to_string(v.property)},
      {"state", to_string(v.state)},
      {"holds", v.holds},
      {"worst_case", v.worst_case ? json(*v.worst_case) : json(nullptr)},
      {"message", v.message},
      {"evidence", evidence},
  };
}

namespace {

json verdict_summary(const std::optional<RankVerdict>& v) {
  if (!v) return nullptr;
  return {
      {"state", to_string(v->state)},
      {"holds", v->holds},
      {"worst_case", v->worst_case ? json(*v->worst_case) : json(nullptr)},
      {"message", v->message},
  };
}

}  // namespace

json to_json(const BergerRow& row) {
  return {
      {"eta", row.eta},
      {"closed_form", {{"min", json_number(row.closed_form.min)}, {"max", json_number(row.closed_form.max)}}},
      {"scanned", {{"min", json_number(row.scanned.min)}, {"max", json_number(row.scanned.max)}}},
      {"positively_curved", row.positively_curved},
      {"fiber_closure_time", json_number(row.fiber_closure_time)},
      {"fiber_closure_error", json_number(row.fiber_closure_error)},
      {"positive_spherical", verdict_summary(row.positive_spherical)},
      {"weak_upper", verdict_summary(row.weak_upper)},
      {"weak_lower", verdict_summary(row.weak_lower)},
      {"note", row.note},
  };
}

}  // namespace sprank
