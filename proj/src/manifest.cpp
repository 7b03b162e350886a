#include "sprank/manifest.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace sprank {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ManifestError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) throw ManifestError("unknown key '" + key + "' in " + where);
  }
}

double positive_number(const json& obj, const std::string& key, double fallback,
                       const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ManifestError(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) throw ManifestError(where + "." + key + " must be positive");
  return x;
}

long long positive_integer(const json& obj, const std::string& key, long long fallback,
                           const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ManifestError(where + "." + key + " must be an integer");
  const long long x = v.get<long long>();
  if (x < 1) throw ManifestError(where + "." + key + " must be positive");
  return x;
}

std::string string_field(const json& obj, const std::string& key, const std::string& fallback,
                         const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ManifestError(where + "." + key + " must be a string");
  return obj.at(key).get<std::string>();
}

}  // namespace

ManifoldModel model_from_json(const json& spec) {
  if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string())
    throw ManifestError("model needs a string 'kind'");
  const std::string kind = spec.at("kind").get<std::string>();
  try {
    if (kind == "round") {
      reject_unknown(spec, {"kind", "dim"}, "model");
      if (!spec.contains("dim")) throw ManifestError("round model needs 'dim'");
      return ManifoldModel::round_sphere(static_cast<int>(positive_integer(spec, "dim", 0, "model")));
    }
    if (kind == "berger") {
      reject_unknown(spec, {"kind", "eta"}, "model");
      if (!spec.contains("eta")) throw ManifestError("berger model needs 'eta'");
      return ManifoldModel::berger_sphere(positive_number(spec, "eta", 0.0, "model"));
    }
    if (kind == "cpn") {
      reject_unknown(spec, {"kind", "n"}, "model");
      if (!spec.contains("n")) throw ManifestError("cpn model needs 'n'");
      return ManifoldModel::complex_projective(static_cast<int>(positive_integer(spec, "n", 0, "model")));
    }
    if (kind == "scaled") {
      reject_unknown(spec, {"kind", "lambda", "base"}, "model");
      if (!spec.contains("lambda") || !spec.contains("base"))
        throw ManifestError("scaled model needs 'lambda' and 'base'");
      return ManifoldModel::scaled(model_from_json(spec.at("base")),
                                   positive_number(spec, "lambda", 0.0, "model"));
    }
  } catch (const ParameterError& e) {
    throw ManifestError(std::string("invalid model: ") + e.what());
  }
  throw ManifestError("unknown model kind '" + kind + "'");
}

json model_to_json(const ManifoldModel& model) {
  json base;
  switch (model.kind()) {
    case ModelKind::RoundSphere:
      base = {{"kind", "round"}, {"dim", model.sphere_dim()}};
      break;
    case ModelKind::BergerSphere:
      base = {{"kind", "berger"}, {"eta", model.eta()}};
      break;
    case ModelKind::ComplexProjective:
      base = {{"kind", "cpn"}, {"n", model.complex_dim()}};
      break;
  }
  if (!model.is_scaled()) return base;
  return {{"kind", "scaled"}, {"lambda", model.scale()}, {"base", base}};
}

json parse_model_shorthand(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ManifestError("model shorthand must look like kind:value");
  const std::string kind = text.substr(0, colon);
  const std::string value = text.substr(colon + 1);
  try {
    std::size_t used = 0;
    if (kind == "round" || kind == "cpn") {
      const int n = std::stoi(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return kind == "round" ? json{{"kind", "round"}, {"dim", n}} : json{{"kind", "cpn"}, {"n", n}};
    }
    if (kind == "berger") {
      const double eta = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return {{"kind", "berger"}, {"eta", eta}};
    }
  } catch (const std::logic_error&) {
    throw ManifestError("bad model parameter '" + value + "'");
  }
  throw ManifestError("unknown model kind '" + kind + "'");
}

void apply_override(json& doc, const std::string& dotted_key, const std::string& value) {
  if (dotted_key.empty()) throw ManifestError("empty override key");
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json* node = &doc;
  std::stringstream ss(dotted_key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) *node = json::object();
    node = &(*node)[parts[i]];
  }
  if (!node->is_object()) *node = json::object();
  (*node)[parts.back()] = parsed;
}

RunManifest parse_manifest(const json& doc) {
  reject_unknown(doc, {"model", "normalization", "sampler", "integrator", "tolerances", "output",
                       "eta_list", "direction", "property"},
                 "manifest");
  RunManifest m;
  if (doc.contains("model")) {
    m.model_spec = doc.at("model");
    model_from_json(m.model_spec);
  }

  const std::string norm = string_field(doc, "normalization", "none", "manifest");
  if (norm == "none") {
    m.normalization = Normalization::None;
  } else if (norm == "upper") {
    m.normalization = Normalization::Upper;
  } else if (norm == "lower") {
    m.normalization = Normalization::Lower;
  } else {
    throw ManifestError("normalization must be none, upper or lower");
  }

  if (doc.contains("sampler")) {
    const json& s = doc.at("sampler");
    reject_unknown(s, {"count", "seed", "stratification"}, "sampler");
    m.sampler.count = static_cast<std::size_t>(positive_integer(s, "count", 200, "sampler"));
    m.sampler.seed = static_cast<std::uint64_t>(positive_integer(s, "seed", 1, "sampler"));
    const std::string strat = string_field(s, "stratification", "include-special", "sampler");
    if (strat == "uniform") {
      m.sampler.stratification = Stratification::Uniform;
    } else if (strat == "include-special") {
      m.sampler.stratification = Stratification::IncludeSpecial;
    } else {
      throw ManifestError("sampler.stratification must be uniform or include-special");
    }
  }

  if (doc.contains("integrator")) {
    const json& s = doc.at("integrator");
    reject_unknown(s, {"step", "horizon"}, "integrator");
    m.step = positive_number(s, "step", m.step, "integrator");
    m.horizon = positive_number(s, "horizon", m.horizon, "integrator");
  }

  if (doc.contains("tolerances")) {
    const json& s = doc.at("tolerances");
    reject_unknown(s, {"time_tol", "rank_tol", "weak_tol", "curv_tol"}, "tolerances");
    m.time_tol = positive_number(s, "time_tol", m.time_tol, "tolerances");
    m.rank_tol = positive_number(s, "rank_tol", m.rank_tol, "tolerances");
    m.weak_tol = positive_number(s, "weak_tol", m.weak_tol, "tolerances");
    m.curv_tol = positive_number(s, "curv_tol", m.curv_tol, "tolerances");
  }

  if (doc.contains("output")) {
    const json& s = doc.at("output");
    reject_unknown(s, {"format", "path"}, "output");
    const std::string format = string_field(s, "format", "json", "output");
    if (format == "json") {
      m.format = OutputFormat::Json;
    } else if (format == "csv") {
      m.format = OutputFormat::Csv;
    } else {
      throw ManifestError("output.format must be json or csv");
    }
    m.path = string_field(s, "path", "", "output");
  }

  if (doc.contains("eta_list")) {
    const json& list = doc.at("eta_list");
    if (!list.is_array()) throw ManifestError("eta_list must be an array");
    for (const auto& v : list) {
      if (!v.is_number() || !(v.get<double>() > 0.0))
        throw ManifestError("eta_list entries must be positive numbers");
      m.eta_list.push_back(v.get<double>());
    }
  }
  m.direction = string_field(doc, "direction", m.direction, "manifest");
  m.property = string_field(doc, "property", m.property, "manifest");
  if (m.property != "positive-spherical" && m.property != "weak-upper" && m.property != "weak-lower")
    throw ManifestError("property must be positive-spherical, weak-upper or weak-lower");
  return m;
}

json to_json(const RunManifest& m) {
  auto norm = [&] {
    switch (m.normalization) {
      case Normalization::None:
        return "none";
      case Normalization::Upper:
        return "upper";
      case Normalization::Lower:
        return "lower";
    }
    return "none";
  };
  return {
      {"model", m.model_spec},
      {"normalization", norm()},
      {"sampler",
       {{"count", m.sampler.count},
        {"seed", m.sampler.seed},
        {"stratification", to_string(m.sampler.stratification)}}},
      {"integrator", {{"step", m.step}, {"horizon", m.horizon}}},
      {"tolerances",
       {{"time_tol", m.time_tol}, {"rank_tol", m.rank_tol}, {"weak_tol", m.weak_tol},
        {"curv_tol", m.curv_tol}}},
      {"output", {{"format", m.format == OutputFormat::Json ? "json" : "csv"}, {"path", m.path}}},
      {"eta_list", m.eta_list},
      {"direction", m.direction},
      {"property", m.property},
  };
}

ManifoldModel RunManifest::base_model() const {
  if (model_spec.is_null()) throw ManifestError("manifest has no 'model'");
  return model_from_json(model_spec);
}

ManifoldModel RunManifest::model() const {
  const ManifoldModel base = base_model();
  switch (normalization) {
    case Normalization::None:
      return base;
    case Normalization::Upper:
      return normalize_to_bound(base, CurvatureBound::Upper, 10000, sampler.seed);
    case Normalization::Lower:
      return normalize_to_bound(base, CurvatureBound::Lower, 10000, sampler.seed);
  }
  return base;
}

RankOptions RunManifest::rank_options() const {
  RankOptions o;
  o.step = step;
  o.horizon = horizon;
  o.time_tol = time_tol;
  o.rank_tol = rank_tol;
  o.curv_tol = curv_tol;
  o.weak_tol = weak_tol;
  o.certificate_tol = weak_tol;
  return o;
}

}  // namespace sprank
