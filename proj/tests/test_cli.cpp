#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "sprank/commands.hpp"

using namespace sprank;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

RunManifest manifest(json doc) { return parse_manifest(doc); }

std::vector<std::string> csv_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST(Manifest, Defaults) {
  const RunManifest m = manifest({{"model", {{"kind", "round"}, {"dim", 3}}}});
  EXPECT_EQ(m.normalization, Normalization::None);
  EXPECT_EQ(m.sampler.count, 200u);
  EXPECT_EQ(m.sampler.seed, 1u);
  EXPECT_DOUBLE_EQ(m.step, 1e-3);
  EXPECT_DOUBLE_EQ(m.horizon, 3.5);
  EXPECT_DOUBLE_EQ(m.time_tol, 1e-4);
  EXPECT_EQ(m.format, OutputFormat::Json);
  EXPECT_EQ(m.base_model(), ManifoldModel::round_sphere(3));
}

TEST(Manifest, RejectsUnknownKeys) {
  const json model = {{"kind", "round"}, {"dim", 3}};
  EXPECT_THROW(manifest({{"model", model}, {"extra", 1}}), ManifestError);
  EXPECT_THROW(manifest({{"model", model}, {"sampler", {{"cnt", 3}}}}), ManifestError);
  EXPECT_THROW(manifest({{"model", model}, {"integrator", {{"dt", 0.1}}}}), ManifestError);
  EXPECT_THROW(manifest({{"model", model}, {"tolerances", {{"tol", 0.1}}}}), ManifestError);
  EXPECT_THROW(manifest({{"model", model}, {"output", {{"fmt", "csv"}}}}), ManifestError);
  EXPECT_THROW(manifest({{"model", {{"kind", "round"}, {"dim", 3}, {"eta", 1.0}}}}), ManifestError);
}

TEST(Manifest, RejectsNonPositiveNumbers) {
  const json model = {{"kind", "berger"}, {"eta", 0.8}};
  EXPECT_THROW(manifest({{"model", model}, {"integrator", {{"step", 0.0}}}}), ManifestError);
  EXPECT_THROW(manifest({{"model", model}, {"integrator", {{"horizon", -1.0}}}}), ManifestError);
  EXPECT_THROW(manifest({{"model", model}, {"sampler", {{"count", 0}}}}), ManifestError);
  EXPECT_THROW(manifest({{"model", model}, {"tolerances", {{"rank_tol", -1e-7}}}}), ManifestError);
  EXPECT_THROW(manifest({{"model", {{"kind", "berger"}, {"eta", -0.8}}}}), ManifestError);
  EXPECT_THROW(manifest({{"model", {{"kind", "round"}, {"dim", 1}}}}), ManifestError);
  EXPECT_THROW(manifest({{"model", model}, {"eta_list", {0.5, 0.0}}}), ManifestError);
  EXPECT_THROW(manifest({{"model", model}, {"property", "strong"}}), ManifestError);
}

TEST(Manifest, RoundTripAndScaledModels) {
  const json doc = {
      {"model", {{"kind", "scaled"}, {"lambda", 2.0}, {"base", {{"kind", "cpn"}, {"n", 2}}}}},
      {"normalization", "upper"},
      {"sampler", {{"count", 7}, {"seed", 9}, {"stratification", "uniform"}}},
      {"integrator", {{"step", 5e-4}, {"horizon", 4.0}}},
      {"tolerances", {{"time_tol", 1e-5}, {"rank_tol", 1e-8}, {"weak_tol", 1e-5}, {"curv_tol", 1e-7}}},
      {"output", {{"format", "csv"}, {"path", "out.csv"}}},
      {"eta_list", {0.5, 1.0}},
      {"direction", "sample:3"},
      {"property", "weak-upper"}};
  const RunManifest m = manifest(doc);
  EXPECT_EQ(to_json(parse_manifest(to_json(m))), to_json(m));
  EXPECT_EQ(to_json(m), doc);
  EXPECT_DOUBLE_EQ(m.base_model().scale(), 2.0);
  EXPECT_EQ(model_to_json(m.base_model()), doc["model"]);
}

TEST(Manifest, OverridesAndShorthand) {
  json doc = {{"model", {{"kind", "round"}, {"dim", 3}}}, {"integrator", {{"step", 1e-3}}}};
  apply_override(doc, "integrator.step", "5e-4");
  apply_override(doc, "direction", "fiber");
  apply_override(doc, "sampler.count", "12");
  const RunManifest m = manifest(doc);
  EXPECT_DOUBLE_EQ(m.step, 5e-4);
  EXPECT_EQ(m.direction, "fiber");
  EXPECT_EQ(m.sampler.count, 12u);
  EXPECT_EQ(parse_model_shorthand("berger:1.2"), (json{{"kind", "berger"}, {"eta", 1.2}}));
  EXPECT_EQ(parse_model_shorthand("cpn:2"), (json{{"kind", "cpn"}, {"n", 2}}));
  EXPECT_THROW(parse_model_shorthand("berger:abc"), ManifestError);
  EXPECT_THROW(parse_model_shorthand("torus:2"), ManifestError);
  EXPECT_THROW(parse_model_shorthand("round"), ManifestError);
}

TEST(Report, RoundTrip) {
  Report r;
  r.command = "scan-curvature";
  r.manifest = {{"a", 1}};
  r.payload = {{"x", 0.1}, {"y", {1.0 / 3.0, 2.0e-300}}, {"z", nullptr}};
  r.versions = library_versions();
  r.wall_clock_seconds = 0.123456789012345;
  r.verdict = {{"holds", true}};
  EXPECT_EQ(parse_report(serialize(r)), r);
  EXPECT_THROW(parse_report("{\"command\": 1}"), Error);
  EXPECT_THROW(parse_report("not json"), Error);
}

TEST(Report, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(kPi)), kPi);
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(Commands, ScanCurvature) {
  RunManifest m = manifest({{"model", {{"kind", "berger"}, {"eta", 1.2}}}, {"sampler", {{"count", 10000}}}});
  const auto out = cmd_scan_curvature(m);
  EXPECT_EQ(out.exit_code, kExitHolds);
  EXPECT_NEAR(out.report.payload["scanned"]["min"].get<double>(), -0.32, 1e-3);
  EXPECT_NEAR(out.report.payload["scanned"]["max"].get<double>(), 1.44, 1e-3);
  const auto lines = csv_lines(out.csv);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "statistic,scanned,closed_form,difference");
  EXPECT_EQ(parse_report(serialize(out.report)), out.report);

  const auto round = cmd_scan_curvature(manifest({{"model", {{"kind", "round"}, {"dim", 3}}}}));
  EXPECT_NEAR(round.report.payload["scanned"]["min"].get<double>(), 1.0, 1e-12);
  const auto scaled = cmd_scan_curvature(
      manifest({{"model", {{"kind", "scaled"}, {"lambda", 2.0}, {"base", {{"kind", "round"}, {"dim", 3}}}}}}));
  EXPECT_NEAR(scaled.report.payload["scanned"]["max"].get<double>(), 0.25, 1e-12);
}

TEST(Commands, Geodesic) {
  const auto out = cmd_geodesic(manifest(
      {{"model", {{"kind", "berger"}, {"eta", 0.8}}}, {"direction", "fiber"}, {"integrator", {{"horizon", 1.0}}}}));
  EXPECT_EQ(out.exit_code, kExitHolds);
  const auto lines = csv_lines(out.csv);
  EXPECT_EQ(lines[0], "t,x_0,x_1,x_2,x_3,v_0,v_1,v_2,v_3,speed");
  EXPECT_EQ(lines.size(), 1002u);
  EXPECT_LT(out.report.payload["max_speed_drift"].get<double>(), 1e-8);
}

TEST(Commands, ConjugateExamples) {
  auto events = [](const json& doc) { return cmd_conjugate(manifest(doc)).report.payload["events"]; };
  const json round = events({{"model", {{"kind", "round"}, {"dim", 3}}}});
  ASSERT_EQ(round.size(), 1u);
  EXPECT_NEAR(round[0]["time"].get<double>(), kPi, 1e-6);
  EXPECT_EQ(round[0]["multiplicity"].get<int>(), 2);

  const json cp = events({{"model", {{"kind", "cpn"}, {"n", 2}}}, {"integrator", {{"horizon", 4.0}}}});
  ASSERT_EQ(cp.size(), 1u);
  EXPECT_NEAR(cp[0]["time"].get<double>(), kPi, 1e-6);
  EXPECT_EQ(cp[0]["multiplicity"].get<int>(), 1);

  const json berger = events({{"model", {{"kind", "berger"}, {"eta", 1.2}}},
                              {"normalization", "upper"},
                              {"direction", "horizontal"}});
  for (const auto& e : berger) EXPECT_GT(e["time"].get<double>(), kPi + 1e-4);

  const auto out = cmd_conjugate(manifest({{"model", {{"kind", "round"}, {"dim", 2}}}}));
  EXPECT_EQ(csv_lines(out.csv)[0], "t,sigma_min,sigma_rel");
}

TEST(Commands, Directions) {
  const auto m = manifest({{"model", {{"kind", "round"}, {"dim", 2}}}, {"direction", "ambient:0,1,1"}});
  const auto s = resolve_direction(m.model(), m);
  EXPECT_NEAR(s.velocity.components[1], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.velocity.components[2], 1.0 / std::sqrt(2.0), 1e-15);
  RunManifest bad = m;
  bad.direction = "fiber";
  EXPECT_THROW(resolve_direction(bad.model(), bad), DomainError);
  bad.direction = "ambient:1,0,0";
  EXPECT_THROW(resolve_direction(bad.model(), bad), ParameterError);
  bad.direction = "sideways";
  EXPECT_THROW(resolve_direction(bad.model(), bad), ParameterError);
}

TEST(Commands, RankExitCodes) {
  auto code = [](const json& doc) { return cmd_rank(manifest(doc)).exit_code; };
  EXPECT_EQ(code({{"model", {{"kind", "round"}, {"dim", 4}}}, {"sampler", {{"count", 10}}}}), kExitHolds);
  EXPECT_EQ(code({{"model", {{"kind", "berger"}, {"eta", 0.8}}},
                  {"normalization", "lower"},
                  {"property", "weak-lower"},
                  {"sampler", {{"count", 10}}}}),
            kExitHolds);
  EXPECT_EQ(code({{"model", {{"kind", "berger"}, {"eta", 1.2}}},
                  {"normalization", "upper"},
                  {"sampler", {{"count", 10}}}}),
            kExitFails);
  EXPECT_EQ(code({{"model", {{"kind", "berger"}, {"eta", 1.2}}}, {"sampler", {{"count", 3}}}}), kExitError);
}

TEST(Commands, BergerReportCsv) {
  const auto out = cmd_berger_report(manifest({{"eta_list", {0.5, 0.8, 1.0, 1.1}}, {"sampler", {{"count", 4}}}}));
  const auto lines = csv_lines(out.csv);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0],
            "eta,closed_min,closed_max,scan_min,scan_max,positively_curved,fiber_closure_time,"
            "fiber_closure_error,positive_spherical,weak_upper,weak_lower,note");
  EXPECT_EQ(out.exit_code, kExitHolds);
  EXPECT_THROW(cmd_berger_report(manifest({{"sampler", {{"count", 4}}}})), ParameterError);
}

TEST(Commands, StableReports) {
  const RunManifest m = manifest({{"model", {{"kind", "cpn"}, {"n", 2}}}, {"sampler", {{"count", 6}}}});
  for (auto name : kCommandNames) {
    if (name == "berger-report") continue;
    const auto a = run_command(name, m);
    const auto b = run_command(name, m);
    EXPECT_EQ(serialize_stable(a.report), serialize_stable(b.report)) << name;
    EXPECT_EQ(a.csv, b.csv) << name;
    EXPECT_EQ(parse_report(serialize(a.report)), a.report) << name;
    EXPECT_EQ(a.report.manifest, to_json(m));
  }
  EXPECT_THROW(run_command("nope", m), ParameterError);
}
