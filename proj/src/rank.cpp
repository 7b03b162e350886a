#include "sprank/rank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "kernels.hpp"
#include "optimize.hpp"
#include "parallel.hpp"
#include "sprank/sampling.hpp"

namespace sprank {

namespace {

using detail::Vec;
using Mat = Eigen::MatrixXd;
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Analysis {
  Trajectory trajectory;
  CurvatureProfile profile;
  JacobiPropagator propagator;
};

Analysis analyse(const ManifoldModel& model, const GeodesicState& state, const RankOptions& opt) {
  Trajectory traj = geodesic_flow(model, state, opt.horizon, opt.step);
  CurvatureProfile profile = curvature_profile(traj);
  JacobiPropagator prop = jacobi_propagate(profile);
  return {std::move(traj), std::move(profile), std::move(prop)};
}

std::pair<double, double> normal_curvature_range(const CurvatureProfile& profile) {
  double lo = kInf;
  double hi = -kInf;
  for (const Mat& k : profile.curvature) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (k + k.transpose()), Eigen::EigenvaluesOnly);
    lo = std::min(lo, eig.eigenvalues().minCoeff());
    hi = std::max(hi, eig.eigenvalues().maxCoeff());
  }
  return {lo, hi};
}

GeodesicState unit_state(const ManifoldModel& m, const Vec& p, const Vec& direction) {
  Vec c = detail::project_components(m, p, direction);
  c /= std::sqrt(detail::inner(m, c, c));
  Point pt{p};
  return GeodesicState{pt, Tangent{pt, c}};
}

void check_options(const RankOptions& opt) {
  if (!(opt.step > 0.0) || !(opt.horizon > 0.0) || !(opt.time_tol > 0.0) ||
      !(opt.rank_tol > 0.0) || !(opt.curv_tol > 0.0) || !(opt.weak_tol > 0.0) ||
      !(opt.certificate_tol > 0.0) || opt.search_starts < 1 || opt.search_evaluations < 1)
    throw ParameterError("rank options must be positive");
}

// Pulls the evidence together in sample order.
RankVerdict fold(RankProperty property, std::vector<RankEvidence> evidence,
                 const std::vector<double>& defect) {
  RankVerdict v;
  v.property = property;
  v.holds = std::all_of(evidence.begin(), evidence.end(), [](const auto& e) { return e.holds; });
  v.state = v.holds ? VerdictState::Holds : VerdictState::Fails;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < defect.size(); ++i)
    if (defect[i] > defect[worst]) worst = i;
  if (!defect.empty()) v.worst_case = worst;
  v.evidence = std::move(evidence);
  const auto failing = std::count_if(v.evidence.begin(), v.evidence.end(),
                                     [](const auto& e) { return !e.holds; });
  v.message = std::to_string(failing) + " of " + std::to_string(v.evidence.size()) +
              " sampled geodesics fail";
  return v;
}

double sec_along(const Mat& k, const Vec& j) { return j.dot(k * j) / j.squaredNorm(); }

}  // namespace

std::string to_string(RankProperty p) {
  switch (p) {
    case RankProperty::PositiveSpherical:
      return "positive-spherical";
    case RankProperty::WeakUpper:
      return "weak-upper";
    case RankProperty::WeakLower:
      return "weak-lower";
  }
  return "";
}

std::string to_string(VerdictState s) {
  switch (s) {
    case VerdictState::Holds:
      return "holds";
    case VerdictState::Fails:
      return "fails";
    case VerdictState::PreconditionFailed:
      return "precondition-failed";
  }
  return "";
}

std::string to_string(CurvatureBound b) { return b == CurvatureBound::Upper ? "upper" : "lower"; }

std::string to_string(Stratification s) {
  return s == Stratification::Uniform ? "uniform" : "include-special";
}

std::vector<GeodesicState> GeodesicSampler::draw(const ManifoldModel& model) const {
  if (count < 1) throw ParameterError("sampler count must be >= 1");
  std::vector<GeodesicState> out;
  out.reserve(count);
  if (stratification == Stratification::IncludeSpecial &&
      model.kind() == ModelKind::BergerSphere) {
    const Vec id = default_point(model).coords;
    out.push_back(unit_state(model, id, Vec::Unit(3, 0)));
    if (count > 1) out.push_back(unit_state(model, id, Vec::Unit(3, 1)));
  }
  const int ambient = model.ambient_dim();
  const int comps = model.component_count();
  SobolStream stream(ambient + comps, seed);
  while (out.size() < count) {
    const Vec g = stream.next_gaussian();
    const Vec p = g.head(ambient).normalized();
    const Vec c = detail::project_components(model, p, g.tail(comps));
    if (std::sqrt(detail::inner(model, c, c)) < 1e-8) continue;
    out.push_back(unit_state(model, p, c));
  }
  return out;
}

ManifoldModel normalize_to_bound(const ManifoldModel& model, CurvatureBound bound,
                                 std::size_t scan_samples, std::uint64_t seed) {
  CurvatureRange range;
  if (model.kind() == ModelKind::BergerSphere) {
    range = closed_form_range(model);
  } else {
    const CurvatureScan scan = curvature_scan(model, scan_samples, seed);
    range = {scan.min, scan.max};
  }
  const double extreme = bound == CurvatureBound::Upper ? range.max : range.min;
  if (!(extreme > 1e-12))
    throw NormalizationError("the " + to_string(bound) + " curvature bound of " +
                             model.describe() + " is not positive");
  return ManifoldModel::scaled(model, std::sqrt(extreme));
}

RankVerdict check_positive_spherical_rank(const ManifoldModel& model,
                                          const GeodesicSampler& sampler,
                                          const RankOptions& options) {
  check_options(options);
  if (options.horizon <= kPi + options.time_tol)
    throw ParameterError("horizon must extend past pi + time_tol");

  const CurvatureRange range = closed_form_range(model);
  if (range.max > 1.0 + options.curv_tol) {
    RankVerdict v;
    v.property = RankProperty::PositiveSpherical;
    v.state = VerdictState::PreconditionFailed;
    v.message = "sec <= 1 violated: max sec = " + std::to_string(range.max);
    return v;
  }

  const auto states = sampler.draw(model);
  std::vector<RankEvidence> evidence(states.size());
  std::vector<double> defect(states.size());
  detail::parallel_for(states.size(), [&](std::size_t i) {
    const Analysis a = analyse(model, states[i], options);
    RankEvidence& e = evidence[i];
    e.index = i;
    e.initial = states[i];
    e.events = conjugate_points(a.propagator, 0.0, options.horizon, options.rank_tol);
    std::tie(e.min_normal_curvature, e.max_normal_curvature) = normal_curvature_range(a.profile);
    if (auto cert = spherical_field(a.profile, options.certificate_tol)) {
      e.certificate = true;
      e.certificate_deviation = cert->deviation;
    }
    bool early = false;
    double nearest = kInf;
    for (const auto& ev : e.events) {
      if (ev.time < kPi - options.time_tol) early = true;
      nearest = std::min(nearest, std::abs(ev.time - kPi));
    }
    e.holds = !early && nearest <= options.time_tol;
    defect[i] = early ? kInf : nearest;
  });

  const bool violated = std::any_of(evidence.begin(), evidence.end(), [&](const auto& e) {
    return e.max_normal_curvature > 1.0 + options.curv_tol;
  });
  RankVerdict v = fold(RankProperty::PositiveSpherical, std::move(evidence), defect);
  if (violated) {
    v.state = VerdictState::PreconditionFailed;
    v.holds = false;
    v.message = "sampled sec exceeds 1 + curv_tol along some geodesic";
  }
  return v;
}

std::vector<Tangent> killing_jacobi_field(const ManifoldModel& model, const Trajectory& trajectory) {
  if (model.kind() != ModelKind::BergerSphere || trajectory.model().kind() != ModelKind::BergerSphere)
    throw DomainError("the Hopf Killing field is defined on Berger spheres only");
  const ManifoldModel& m = trajectory.model();
  std::vector<Tangent> out;
  out.reserve(trajectory.size());
  const Vec x1 = Vec::Unit(3, 0);
  for (const auto& s : trajectory.states()) {
    const Vec& w = s.velocity.components;
    const Vec normal = x1 - (detail::inner(m, x1, w) / detail::inner(m, w, w)) * w;
    out.push_back(Tangent{s.point, normal});
  }
  return out;
}

WeakWitness weak_deviation(const CurvatureProfile& profile, const std::vector<Eigen::VectorXd>& field,
                           double tol) {
  if (field.size() != profile.size()) throw DomainError("field is not sampled on the profile");
  WeakWitness w;
  w.deviation = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field[i].norm() <= tol) {
      ++w.excluded_samples;
      continue;
    }
    ++used;
    w.deviation = std::max(w.deviation, std::abs(sec_along(profile.curvature[i], field[i]) - 1.0));
  }
  if (used == 0) w.deviation = kInf;
  w.initial_value = field.front();
  return w;
}

WeakWitness search_weak_witness(const CurvatureProfile& profile, double tol, int starts,
                                int evaluations, std::uint64_t seed) {
  const auto m = static_cast<Eigen::Index>(profile.frame_dim());
  const JacobiPropagator from_value = jacobi_solve(profile, Mat::Identity(m, m), Mat::Zero(m, m));
  const JacobiPropagator from_slope = jacobi_propagate(profile);
  const std::size_t n = profile.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 400);

  auto field_at = [&](std::size_t i, const Vec& z) {
    return Vec(from_value.M(i) * z.head(m) + from_slope.M(i) * z.tail(m));
  };
  auto deviation = [&](const Vec& z, std::size_t step, std::size_t* excluded) {
    const double zn = z.norm();
    if (!(zn > 1e-12)) return 10.0;
    const Vec u = z / zn;
    double worst = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; i += step) {
      const Vec j = field_at(i, u);
      if (j.norm() <= tol) {
        if (excluded) ++*excluded;
        continue;
      }
      ++used;
      worst = std::max(worst, std::abs(sec_along(profile.curvature[i], j) - 1.0));
    }
    return used == 0 ? 10.0 : worst;
  };

  SobolStream stream(static_cast<int>(2 * m), seed);
  Vec best_z;
  double best = kInf;
  for (int s = 0; s < starts; ++s) {
    const Vec z0 = stream.next_gaussian().normalized();
    const auto result = detail::simplex_minimize(
        [&](const Vec& z) { return deviation(z, stride, nullptr); }, z0, 0.3, evaluations, 1e-14);
    const double full = deviation(result.x, 1, nullptr);
    if (full < best) {
      best = full;
      best_z = result.x.normalized();
    }
    if (best <= tol) break;
  }

  WeakWitness w;
  w.kind = "search";
  w.deviation = deviation(best_z, 1, &w.excluded_samples);
  w.initial_value = best_z.head(m);
  w.initial_derivative = best_z.tail(m);
  return w;
}

RankVerdict check_weak_spherical_rank(const ManifoldModel& model, CurvatureBound side,
                                      const GeodesicSampler& sampler,
                                      const RankOptions& options) {
  check_options(options);
  const double tol = options.weak_tol;
  CurvatureRange range;
  if (model.kind() == ModelKind::BergerSphere) {
    range = closed_form_range(model);
  } else {
    const CurvatureScan scan = curvature_scan(model, 2000, sampler.seed);
    range = {scan.min, scan.max};
  }
  const double extreme = side == CurvatureBound::Upper ? range.max : range.min;
  if (std::abs(extreme - 1.0) > std::max(tol, 1e-9))
    throw ParameterError("model is not normalized to " + to_string(side) + " bound 1 (found " +
                         std::to_string(extreme) + ")");

  const auto states = sampler.draw(model);
  std::vector<RankEvidence> evidence(states.size());
  std::vector<double> defect(states.size());
  detail::parallel_for(states.size(), [&](std::size_t i) {
    const Analysis a = analyse(model, states[i], options);
    RankEvidence& e = evidence[i];
    e.index = i;
    e.initial = states[i];
    std::tie(e.min_normal_curvature, e.max_normal_curvature) = normal_curvature_range(a.profile);

    std::optional<WeakWitness> witness;
    if (model.kind() == ModelKind::BergerSphere) {
      const auto killing = frame_coefficients(a.profile, killing_jacobi_field(model, a.trajectory));
      const bool vertical = std::all_of(killing.begin(), killing.end(),
                                        [&](const Vec& j) { return j.norm() <= tol; });
      if (!vertical) {
        witness = weak_deviation(a.profile, killing, tol);
        witness->kind = "killing";
      } else {
        // Along the fiber every plane through g' is extremal; any normal
        // Jacobi field vanishing at 0 witnesses it.
        std::vector<Vec> column(a.propagator.size());
        for (std::size_t s = 0; s < column.size(); ++s) column[s] = a.propagator.M(s).col(0);
        witness = weak_deviation(a.profile, column, tol);
        witness->kind = "propagator-column";
      }
    } else if (auto cert = spherical_field(a.profile, tol)) {
      std::vector<Vec> field(a.profile.size());
      const auto ts = a.profile.times();
      for (std::size_t s = 0; s < field.size(); ++s) field[s] = std::sin(ts[s]) * cert->coefficients;
      witness = weak_deviation(a.profile, field, tol);
      witness->kind = "spherical-field";
    }
    if (!witness || witness->deviation > tol) {
      WeakWitness found = search_weak_witness(a.profile, tol, options.search_starts,
                                              options.search_evaluations, sampler.seed + i);
      if (!witness || found.deviation < witness->deviation) witness = std::move(found);
    }
    e.witness = witness->kind;
    e.weak_deviation = witness->deviation;
    e.excluded_samples = witness->excluded_samples;
    e.holds = witness->deviation <= tol;
    defect[i] = witness->deviation;
  });

  return fold(side == CurvatureBound::Upper ? RankProperty::WeakUpper : RankProperty::WeakLower,
              std::move(evidence), defect);
}

BergerRow berger_row(double eta, const GeodesicSampler& sampler, const RankOptions& options,
                     std::size_t scan_samples) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("eta must be positive");
  const ManifoldModel m = ManifoldModel::berger_sphere(eta);
  BergerRow row;
  row.eta = eta;
  row.closed_form = closed_form_range(m);
  const CurvatureScan scan = curvature_scan(m, scan_samples, sampler.seed);
  row.scanned = {scan.min, scan.max};
  row.positively_curved = row.closed_form.min > 1e-12;

  // Hopf fiber through the identity.
  const Point id = default_point(m);
  const double period = 2.0 * kPi * eta;
  const Trajectory fiber =
      geodesic_flow(m, GeodesicState{id, Tangent{id, Vec::Unit(3, 0) / eta}}, 1.1 * period,
                    options.step);
  auto distance = [&](double t) { return (fiber.state_at(t).point.coords - id.coords).norm(); };
  row.fiber_closure_error = distance(period);
  row.fiber_closure_time = detail::golden_section_minimize(distance, 0.9 * period, 1.1 * period, 1e-10);

  const ManifoldModel upper = normalize_to_bound(m, CurvatureBound::Upper);
  row.positive_spherical = check_positive_spherical_rank(upper, sampler, options);
  row.weak_upper = check_weak_spherical_rank(upper, CurvatureBound::Upper, sampler, options);
  if (row.positively_curved) {
    const ManifoldModel lower = normalize_to_bound(m, CurvatureBound::Lower);
    row.weak_lower = check_weak_spherical_rank(lower, CurvatureBound::Lower, sampler, options);
  } else {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", std::abs(row.closed_form.min) < 1e-12 ? 0.0 : row.closed_form.min);
    row.note = std::string("lower bound ") + buf + " <= 0, lower normalization impossible";
  }
  return row;
}

std::vector<BergerRow> berger_report(const std::vector<double>& etas,
                                     const GeodesicSampler& sampler, const RankOptions& options,
                                     std::size_t scan_samples) {
  if (etas.empty()) throw ParameterError("eta list is empty");
  for (double eta : etas)
    if (!(eta > 0.0)) throw ParameterError("eta must be positive");
  std::vector<BergerRow> rows;
  rows.reserve(etas.size());
  for (double eta : etas) rows.push_back(berger_row(eta, sampler, options, scan_samples));
  return rows;
}

}  // namespace sprank
