// sprank: run manifests against the model manifolds.
//
//   sprank <command> [--manifest FILE] [--set key.path=value]... [shortcut flags]
//
// Flags override the manifest file. Exit status: 0 verdict holds, 1 verdict
// fails, 2 on errors and failed preconditions.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "sprank/commands.hpp"

namespace {

using nlohmann::json;

struct Overrides {
  std::string manifest_path;
  std::vector<std::string> sets;
  std::string model;
  double scale = 0.0;
  std::string normalization;
  long long count = 0;
  long long seed = 0;
  std::string stratification;
  double step = 0.0;
  double horizon = 0.0;
  std::string direction;
  std::string property;
  std::string eta_list;
  std::string format;
  std::string output;
};

json load_document(const Overrides& o) {
  json doc = json::object();
  if (!o.manifest_path.empty()) {
    std::ifstream in(o.manifest_path);
    if (!in) throw sprank::ManifestError("cannot open manifest '" + o.manifest_path + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw sprank::ManifestError(std::string("manifest is not valid JSON: ") + e.what());
    }
  }
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw sprank::ManifestError("--set expects key=value, got '" + s + "'");
    sprank::apply_override(doc, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!o.model.empty()) doc["model"] = sprank::parse_model_shorthand(o.model);
  if (o.scale != 0.0) {
    if (!doc.contains("model")) throw sprank::ManifestError("--scale needs a model");
    doc["model"] = json{{"kind", "scaled"}, {"lambda", o.scale}, {"base", doc["model"]}};
  }
  if (!o.normalization.empty()) doc["normalization"] = o.normalization;
  if (o.count != 0) doc["sampler"]["count"] = o.count;
  if (o.seed != 0) doc["sampler"]["seed"] = o.seed;
  if (!o.stratification.empty()) doc["sampler"]["stratification"] = o.stratification;
  if (o.step != 0.0) doc["integrator"]["step"] = o.step;
  if (o.horizon != 0.0) doc["integrator"]["horizon"] = o.horizon;
  if (!o.direction.empty()) doc["direction"] = o.direction;
  if (!o.property.empty()) doc["property"] = o.property;
  if (!o.eta_list.empty()) {
    json list = json::array();
    std::stringstream ss(o.eta_list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        list.push_back(std::stod(item));
      } catch (const std::logic_error&) {
        throw sprank::ManifestError("bad eta '" + item + "'");
      }
    }
    doc["eta_list"] = list;
  }
  if (!o.format.empty()) doc["output"]["format"] = o.format;
  if (!o.output.empty()) doc["output"]["path"] = o.output;
  return doc;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sprank::Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical rank checks on model manifolds"};
  app.require_subcommand(1);
  Overrides o;
  std::string csv_path;
  std::string report_path;

  const std::map<std::string_view, std::string> help = {
      {"scan-curvature", "Sampled sectional curvature extremes against the closed form"},
      {"geodesic", "Integrate one geodesic and report speed drift"},
      {"conjugate", "Conjugate points along one geodesic"},
      {"rank", "Positive or weak spherical rank over sampled geodesics"},
      {"berger-report", "Curvature and rank table for a list of Berger spheres"},
  };
  for (auto name : sprank::kCommandNames) {
    CLI::App* sub = app.add_subcommand(std::string(name), help.at(name));
    sub->add_option("-m,--manifest", o.manifest_path, "JSON run manifest");
    sub->add_option("--set", o.sets, "Override a manifest field, e.g. integrator.step=5e-4");
    sub->add_option("--model", o.model, "Model shorthand: round:N, berger:ETA, cpn:N");
    sub->add_option("--scale", o.scale, "Wrap the model in Scaled(model, lambda)");
    sub->add_option("--normalization", o.normalization, "none, upper or lower");
    sub->add_option("--count", o.count, "Sampler count");
    sub->add_option("--seed", o.seed, "Sampler seed");
    sub->add_option("--stratification", o.stratification, "uniform or include-special");
    sub->add_option("--step", o.step, "Integrator step");
    sub->add_option("--horizon", o.horizon, "Integration horizon");
    sub->add_option("--direction", o.direction,
                    "first-sample, sample:K, fiber, horizontal or ambient:x0,x1,...");
    sub->add_option("--property", o.property, "positive-spherical, weak-upper or weak-lower");
    sub->add_option("--eta-list", o.eta_list, "Comma-separated eta values");
    sub->add_option("--format", o.format, "json or csv");
    sub->add_option("-o,--output", o.output, "Output path (default stdout)");
    sub->add_option("--csv", csv_path, "Also write the CSV data to this path");
    sub->add_option("--report", report_path, "Also write the JSON report to this path");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return sprank::kExitError;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    const sprank::RunManifest manifest = sprank::parse_manifest(load_document(o));
    const sprank::CommandOutput result = sprank::run_command(command, manifest);
    const std::string report = sprank::serialize(result.report);
    emit(manifest.format == sprank::OutputFormat::Json ? report : result.csv, manifest.path);
    if (!csv_path.empty()) emit(result.csv, csv_path);
    if (!report_path.empty()) emit(report, report_path);
    if (result.exit_code != sprank::kExitHolds)
      std::cerr << "verdict: " << result.report.verdict.value("state", std::string("fails")) << "\n";
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return sprank::kExitError;
  }
}
