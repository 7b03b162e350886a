#include "sprank/commands.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace sprank {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kSpeedTol = 1e-8;
constexpr double kFiberClosureTol = 1e-6;
constexpr std::size_t kReportScanSamples = 10000;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(cells[i]);
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

Report start_report(const std::string& command, const RunManifest& m) {
  Report r;
  r.command = command;
  r.manifest = to_json(m);
  r.versions = library_versions();
  return r;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json plane_json(const Plane& p) {
  return {{"point", json_vector(p.u.base.coords)},
          {"u", json_vector(p.u.components)},
          {"v", json_vector(p.v.components)}};
}

json state_json(const GeodesicState& s) {
  return {{"point", json_vector(s.point.coords)}, {"velocity", json_vector(s.velocity.components)}};
}

GeodesicState unit_at(const ManifoldModel& model, const Tangent& v) {
  const double n = metric_norm(model, v);
  if (!(n > 1e-12)) throw ParameterError("direction has no tangential part");
  return make_state(model, v.base, Tangent{v.base, v.components / n});
}

std::string verdict_cell(const std::optional<RankVerdict>& v) {
  return v ? to_string(v->state) : "n/a";
}

}  // namespace

GeodesicState resolve_direction(const ManifoldModel& model, const RunManifest& manifest) {
  const std::string& d = manifest.direction;
  if (d == "first-sample" || d.rfind("sample:", 0) == 0) {
    std::size_t k = 0;
    if (d != "first-sample") {
      try {
        std::size_t used = 0;
        const long long idx = std::stoll(d.substr(7), &used);
        if (used != d.size() - 7 || idx < 0) throw std::invalid_argument(d);
        k = static_cast<std::size_t>(idx);
      } catch (const std::logic_error&) {
        throw ParameterError("bad sample index in direction '" + d + "'");
      }
    }
    GeodesicSampler s = manifest.sampler;
    s.count = k + 1;
    return s.draw(model).back();
  }
  const Point p = default_point(model);
  if (d == "fiber" || d == "horizontal") {
    if (model.kind() != ModelKind::BergerSphere)
      throw DomainError("direction '" + d + "' needs a Berger model");
    return unit_at(model, Tangent{p, Eigen::Vector3d::Unit(d == "fiber" ? 0 : 1)});
  }
  if (d.rfind("ambient:", 0) == 0) {
    std::vector<double> xs;
    std::stringstream ss(d.substr(8));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        xs.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::logic_error&) {
        throw ParameterError("bad ambient component '" + item + "'");
      }
    }
    if (static_cast<int>(xs.size()) != model.ambient_dim())
      throw ParameterError("ambient direction needs " + std::to_string(model.ambient_dim()) +
                           " components");
    const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(xs.data(), xs.size());
    return unit_at(model, tangent_from_ambient(model, p, a));
  }
  throw ParameterError("unknown direction '" + d + "'");
}

CommandOutput cmd_scan_curvature(const RunManifest& m) {
  const auto t0 = Clock::now();
  const ManifoldModel model = m.model();
  const CurvatureScan scan = curvature_scan(model, m.sampler.count, m.sampler.seed);
  const CurvatureRange exact = closed_form_range(model);
  const double dmin = std::abs(scan.min - exact.min);
  const double dmax = std::abs(scan.max - exact.max);
  const bool agrees = dmin <= kScanAgreementTol && dmax <= kScanAgreementTol;

  CommandOutput out;
  out.report = start_report("scan-curvature", m);
  out.report.payload = {
      {"model", model.describe()},
      {"samples", scan.samples},
      {"seed", m.sampler.seed},
      {"scanned", {{"min", json_number(scan.min)}, {"max", json_number(scan.max)}}},
      {"argmin", plane_json(scan.argmin)},
      {"argmax", plane_json(scan.argmax)},
      {"closed_form", {{"min", json_number(exact.min)}, {"max", json_number(exact.max)}}},
      {"difference", {{"min", json_number(dmin)}, {"max", json_number(dmax)}}},
      {"agreement_tol", kScanAgreementTol},
  };
  out.report.verdict = {{"state", agrees ? "holds" : "fails"}, {"holds", agrees}};
  out.exit_code = agrees ? kExitHolds : kExitFails;

  CsvWriter csv({"statistic", "scanned", "closed_form", "difference"});
  csv.row({"min", format_double(scan.min), format_double(exact.min), format_double(dmin)});
  csv.row({"max", format_double(scan.max), format_double(exact.max), format_double(dmax)});
  out.csv = csv.str();
  out.report.wall_clock_seconds = seconds_since(t0);
  return out;
}

CommandOutput cmd_geodesic(const RunManifest& m) {
  const auto t0 = Clock::now();
  const ManifoldModel model = m.model();
  const GeodesicState init = resolve_direction(model, m);
  const Trajectory traj = geodesic_flow(model, init, m.horizon, m.step);

  const int a = model.ambient_dim();
  std::vector<std::string> header{"t"};
  for (int i = 0; i < a; ++i) header.push_back("x_" + std::to_string(i));
  for (int i = 0; i < a; ++i) header.push_back("v_" + std::to_string(i));
  header.push_back("speed");
  CsvWriter csv(header);

  double drift = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const GeodesicState& s = traj.state(i);
    const double speed = metric_norm(model, s.velocity);
    drift = std::max(drift, std::abs(speed - 1.0));
    const Eigen::VectorXd v = to_ambient(model, s.velocity);
    std::vector<std::string> cells{format_double(traj.times()[i])};
    for (int k = 0; k < a; ++k) cells.push_back(format_double(s.point.coords(k)));
    for (int k = 0; k < a; ++k) cells.push_back(format_double(v(k)));
    cells.push_back(format_double(speed));
    csv.row(cells);
  }
  const bool ok = drift <= kSpeedTol;

  CommandOutput out;
  out.report = start_report("geodesic", m);
  const GeodesicState& end = traj.states().back();
  out.report.payload = {
      {"model", model.describe()},
      {"direction", m.direction},
      {"initial", state_json(init)},
      {"final", state_json(end)},
      {"final_canonical", json_vector(canonical_point(model, end.point).coords)},
      {"horizon", traj.horizon()},
      {"step", traj.step()},
      {"samples", traj.size()},
      {"max_speed_drift", json_number(drift)},
      {"speed_tol", kSpeedTol},
  };
  out.report.verdict = {{"state", ok ? "holds" : "fails"}, {"holds", ok}};
  out.exit_code = ok ? kExitHolds : kExitFails;
  out.csv = csv.str();
  out.report.wall_clock_seconds = seconds_since(t0);
  return out;
}

CommandOutput cmd_conjugate(const RunManifest& m) {
  const auto t0 = Clock::now();
  const ManifoldModel model = m.model();
  const GeodesicState init = resolve_direction(model, m);
  const Trajectory traj = geodesic_flow(model, init, m.horizon, m.step);
  const CurvatureProfile profile = curvature_profile(traj);
  const JacobiPropagator prop = jacobi_propagate(profile);
  const auto events = conjugate_points(prop, 0.0, m.horizon, m.rank_tol);

  CsvWriter csv({"t", "sigma_min", "sigma_rel"});
  for (std::size_t i = 0; i < prop.size(); ++i) {
    Eigen::JacobiSVD<Eigen::MatrixXd> sv_m(prop.M(i));
    Eigen::JacobiSVD<Eigen::MatrixXd> sv_d(prop.Mp(i));
    const double smin = sv_m.singularValues()(sv_m.singularValues().size() - 1);
    const double scale = sv_d.singularValues()(0);
    csv.row({format_double(prop.times()[i]), format_double(smin), format_double(smin / scale)});
  }

  json rows = json::array();
  for (const auto& e : events) rows.push_back(to_json(e));
  CommandOutput out;
  out.report = start_report("conjugate", m);
  out.report.payload = {
      {"model", model.describe()},
      {"direction", m.direction},
      {"initial", state_json(init)},
      {"window", {0.0, m.horizon}},
      {"rank_tol", m.rank_tol},
      {"events", rows},
      {"index", fixed_endpoint_index(prop, m.horizon, m.rank_tol)},
  };
  out.report.verdict = {{"state", "holds"},
                        {"holds", true},
                        {"events", events.size()},
                        {"first_event", events.empty() ? json(nullptr) : json(events.front().time)}};
  out.csv = csv.str();
  out.report.wall_clock_seconds = seconds_since(t0);
  return out;
}

CommandOutput cmd_rank(const RunManifest& m) {
  const auto t0 = Clock::now();
  const ManifoldModel model = m.model();
  const RankOptions opt = m.rank_options();
  RankVerdict v;
  if (m.property == "positive-spherical") {
    v = check_positive_spherical_rank(model, m.sampler, opt);
  } else {
    const CurvatureBound side = m.property == "weak-upper" ? CurvatureBound::Upper : CurvatureBound::Lower;
    v = check_weak_spherical_rank(model, side, m.sampler, opt);
  }

  CsvWriter csv({"index", "holds", "event_count", "first_event_time", "first_event_multiplicity",
                 "multiplicity_at_pi", "certificate", "certificate_deviation", "witness",
                 "weak_deviation", "excluded_samples"});
  for (const auto& e : v.evidence) {
    const json j = to_json(e, m.time_tol);
    csv.row({std::to_string(e.index), e.holds ? "true" : "false", std::to_string(e.events.size()),
             e.events.empty() ? "" : format_double(e.events.front().time),
             e.events.empty() ? "0" : std::to_string(e.events.front().multiplicity),
             std::to_string(j.at("multiplicity_at_pi").get<int>()),
             e.certificate ? "true" : "false", format_double(e.certificate_deviation), e.witness,
             format_double(e.weak_deviation), std::to_string(e.excluded_samples)});
  }

  CommandOutput out;
  out.report = start_report("rank", m);
  out.report.payload = to_json(v, m.time_tol);
  out.report.payload["model"] = model.describe();
  out.report.verdict = {{"state", to_string(v.state)},
                        {"holds", v.holds},
                        {"property", to_string(v.property)},
                        {"worst_case", v.worst_case ? json(*v.worst_case) : json(nullptr)},
                        {"message", v.message}};
  switch (v.state) {
    case VerdictState::Holds:
      out.exit_code = kExitHolds;
      break;
    case VerdictState::Fails:
      out.exit_code = kExitFails;
      break;
    case VerdictState::PreconditionFailed:
      out.exit_code = kExitError;
      break;
  }
  out.csv = csv.str();
  out.report.wall_clock_seconds = seconds_since(t0);
  return out;
}

CommandOutput cmd_berger_report(const RunManifest& m) {
  const auto t0 = Clock::now();
  const auto rows = berger_report(m.eta_list, m.sampler, m.rank_options(), kReportScanSamples);

  CsvWriter csv({"eta", "closed_min", "closed_max", "scan_min", "scan_max", "positively_curved",
                 "fiber_closure_time", "fiber_closure_error", "positive_spherical", "weak_upper",
                 "weak_lower", "note"});
  json table = json::array();
  bool consistent = true;
  for (const auto& r : rows) {
    table.push_back(to_json(r));
    consistent = consistent && std::abs(r.scanned.min - r.closed_form.min) <= kScanAgreementTol &&
                 std::abs(r.scanned.max - r.closed_form.max) <= kScanAgreementTol &&
                 r.fiber_closure_error <= kFiberClosureTol;
    csv.row({format_double(r.eta), format_double(r.closed_form.min), format_double(r.closed_form.max),
             format_double(r.scanned.min), format_double(r.scanned.max),
             r.positively_curved ? "true" : "false", format_double(r.fiber_closure_time),
             format_double(r.fiber_closure_error), verdict_cell(r.positive_spherical),
             verdict_cell(r.weak_upper), verdict_cell(r.weak_lower), r.note});
  }

  CommandOutput out;
  out.report = start_report("berger-report", m);
  out.report.payload = {{"rows", table},
                        {"scan_samples", kReportScanSamples},
                        {"agreement_tol", kScanAgreementTol},
                        {"fiber_closure_tol", kFiberClosureTol}};
  out.report.verdict = {{"state", consistent ? "holds" : "fails"},
                        {"holds", consistent},
                        {"rows", rows.size()}};
  out.exit_code = consistent ? kExitHolds : kExitFails;
  out.csv = csv.str();
  out.report.wall_clock_seconds = seconds_since(t0);
  return out;
}

CommandOutput run_command(std::string_view name, const RunManifest& manifest) {
  if (name == "scan-curvature") return cmd_scan_curvature(manifest);
  if (name == "geodesic") return cmd_geodesic(manifest);
  if (name == "conjugate") return cmd_conjugate(manifest);
  if (name == "rank") return cmd_rank(manifest);
  if (name == "berger-report") return cmd_berger_report(manifest);
  throw ParameterError("unknown command '" + std::string(name) + "'");
}

}  // namespace sprank
