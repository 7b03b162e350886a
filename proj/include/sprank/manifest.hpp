#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sprank/rank.hpp"

namespace sprank {

class ManifestError : public Error {
 public:
  using Error::Error;
};

enum class Normalization { None, Upper, Lower };
enum class OutputFormat { Json, Csv };

/// A run description. JSON layout:
///
///   {
///     "model": {"kind": "round", "dim": 3}          // or berger/eta, cpn/n,
///                                                   // scaled/lambda/base
///     "normalization": "none" | "upper" | "lower",
///     "sampler": {"count": 200, "seed": 1, "stratification": "include-special"},
///     "integrator": {"step": 0.001, "horizon": 3.5},
///     "tolerances": {"time_tol": 1e-4, "rank_tol": 1e-7, "weak_tol": 1e-6,
///                    "curv_tol": 1e-8},
///     "output": {"format": "json", "path": ""},
///     "eta_list": [0.5, 0.8],                       // berger-report
///     "direction": "first-sample",                  // geodesic, conjugate
///     "property": "positive-spherical"              // rank
///   }
///
/// Every key is optional; all commands except berger-report need "model". Unknown keys are rejected at every level.
struct RunManifest {
  nlohmann::json model_spec;
  Normalization normalization = Normalization::None;
  GeodesicSampler sampler;
  double step = kDefaultStep;
  double horizon = 3.5;
  double time_tol = 1e-4;
  double rank_tol = kDefaultRankTol;
  double weak_tol = 1e-6;
  double curv_tol = 1e-8;
  OutputFormat format = OutputFormat::Json;
  std::string path;
  std::vector<double> eta_list;
  std::string direction = "first-sample";
  std::string property = "positive-spherical";

  /// The model before normalization.
  ManifoldModel base_model() const;
  /// The model after the requested normalization.
  ManifoldModel model() const;
  RankOptions rank_options() const;
};

RunManifest parse_manifest(const nlohmann::json& doc);
nlohmann::json to_json(const RunManifest& manifest);

ManifoldModel model_from_json(const nlohmann::json& spec);
nlohmann::json model_to_json(const ManifoldModel& model);

/// Short model forms: "round:3", "berger:1.2", "cpn:2".
nlohmann::json parse_model_shorthand(const std::string& text);

/// Sets doc[a][b]... for a dotted key path; the value is parsed as JSON when
/// possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& dotted_key, const std::string& value);

}  // namespace sprank
