#include "sprank/geodesics.hpp"

#include <algorithm>
#include <cmath>

#include "kernels.hpp"

namespace sprank {

namespace {

using detail::Vec;
using Mat = Eigen::MatrixXd;

// Point plus a block of component columns: column 0 is the velocity, the rest
// are fields transported along.
struct FlowState {
  Vec point;
  Mat cols;
};

FlowState rate(const ManifoldModel& m, const FlowState& s) {
  FlowState d;
  const Vec v = s.cols.col(0);
  switch (m.kind()) {
    case ModelKind::RoundSphere:
      d.point = v;
      d.cols = -s.point * (v.transpose() * s.cols);
      break;
    case ModelKind::ComplexProjective: {
      const Vec jp = detail::complex_j(s.point);
      const Vec jv = detail::complex_j(v);
      d.point = v;
      d.cols = -s.point * (v.transpose() * s.cols) - jp * (jv.transpose() * s.cols);
      break;
    }
    case ModelKind::BergerSphere: {
      d.point = detail::quat_left_translate(Eigen::Vector4d(s.point), Eigen::Vector3d(v));
      d.cols.resize(3, s.cols.cols());
      for (Eigen::Index k = 0; k < s.cols.cols(); ++k)
        d.cols.col(k) = -detail::berger_connection(m, v, s.cols.col(k));
      break;
    }
  }
  return d;
}

void project(const ManifoldModel& m, FlowState& s) {
  s.point.normalize();
  if (m.kind() == ModelKind::BergerSphere) return;
  s.cols -= s.point * (s.point.transpose() * s.cols);
  if (m.kind() == ModelKind::ComplexProjective) {
    const Vec jp = detail::complex_j(s.point);
    s.cols -= jp * (jp.transpose() * s.cols);
  }
}

FlowState axpy(const FlowState& s, double h, const FlowState& d) {
  return FlowState{s.point + h * d.point, s.cols + h * d.cols};
}

FlowState rk4_step(const ManifoldModel& m, const FlowState& s, double h) {
  const FlowState k1 = rate(m, s);
  const FlowState k2 = rate(m, axpy(s, 0.5 * h, k1));
  const FlowState k3 = rate(m, axpy(s, 0.5 * h, k2));
  const FlowState k4 = rate(m, axpy(s, h, k3));
  FlowState out{s.point + (h / 6.0) * (k1.point + 2.0 * k2.point + 2.0 * k3.point + k4.point),
                s.cols + (h / 6.0) * (k1.cols + 2.0 * k2.cols + 2.0 * k3.cols + k4.cols)};
  project(m, out);
  return out;
}

// Multiples of step from t0 towards t1, plus t1 itself.
std::vector<double> time_grid(double t0, double t1, double step) {
  const double span = std::abs(t1 - t0);
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  const auto n = static_cast<std::size_t>(std::floor(span / step + 1e-9));
  std::vector<double> grid;
  grid.reserve(n + 2);
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(t0 + dir * static_cast<double>(i) * step);
  const double slack = 1e-12 * std::max(1.0, std::abs(t1));
  if (std::abs(t1 - grid.back()) > slack) {
    grid.push_back(t1);
  } else {
    grid.back() = t1;
  }
  if (grid.size() == 1) grid.push_back(t1);
  return grid;
}

std::vector<FlowState> integrate(const ManifoldModel& m, FlowState s, const std::vector<double>& grid) {
  std::vector<FlowState> out;
  out.reserve(grid.size());
  project(m, s);
  out.push_back(s);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    s = rk4_step(m, s, grid[i] - grid[i - 1]);
    out.push_back(s);
  }
  return out;
}

double g_speed(const ManifoldModel& m, const Tangent& v) {
  return std::sqrt(detail::inner(m, v.components, v.components));
}

Vec hermite(double s, double h, const Vec& y0, const Vec& y1, const Vec& d0, const Vec& d1) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * h * d1;
}

}  // namespace

GeodesicState make_state(const ManifoldModel& model, const Point& p, const Tangent& v) {
  validate_point(model, p);
  validate_tangent(model, v);
  if ((v.base.coords - p.coords).lpNorm<Eigen::Infinity>() > kPointTolerance)
    throw DomainError("velocity is not based at the state's point");
  return GeodesicState{p, v};
}

Trajectory::Trajectory(ManifoldModel model, std::vector<double> times,
                       std::vector<GeodesicState> states, double step) {
  if (times.size() != states.size() || times.size() < 2)
    throw ParameterError("trajectory needs at least two samples");
  const double speed = g_speed(model, states.front().velocity);
  const bool unit = std::abs(speed - 1.0) < 1e-8;
  data_ = std::make_shared<const Data>(
      Data{std::move(model), std::move(times), std::move(states), step, unit});
}

bool Trajectory::contains(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(horizon()));
  return t >= start() - slack && t <= horizon() + slack;
}

std::size_t Trajectory::interval(double t) const {
  const auto& ts = data_->times;
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t i = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
  return std::min(i, ts.size() - 2);
}

GeodesicState Trajectory::state_at(double t) const {
  if (!contains(t)) throw ParameterError("time outside the trajectory domain");
  const auto& ts = data_->times;
  const std::size_t i = interval(t);
  if (t == ts[i]) return data_->states[i];
  if (t == ts[i + 1]) return data_->states[i + 1];

  const ManifoldModel& m = model();
  const auto& a = data_->states[i];
  const auto& b = data_->states[i + 1];
  const double h = ts[i + 1] - ts[i];
  const double s = (t - ts[i]) / h;

  auto flow = [&](const GeodesicState& st) {
    FlowState f{st.point.coords, Mat(st.velocity.components)};
    return rate(m, f);
  };
  const FlowState ra = flow(a);
  const FlowState rb = flow(b);

  Vec point = hermite(s, h, a.point.coords, b.point.coords, ra.point, rb.point);
  point.normalize();
  Vec vel = hermite(s, h, a.velocity.components, b.velocity.components, ra.cols.col(0),
                    rb.cols.col(0));
  vel = detail::project_components(m, point, vel);
  return GeodesicState{Point{point}, Tangent{Point{point}, vel}};
}

Trajectory geodesic_flow(const ManifoldModel& model, const GeodesicState& initial, double horizon,
                         double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw ParameterError("step must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterError("horizon must be positive");
  make_state(model, initial.point, initial.velocity);
  step = std::min(step, horizon);

  const auto grid = time_grid(0.0, horizon, step);
  FlowState s0{initial.point.coords, Mat(initial.velocity.components)};
  const auto flow = integrate(model, s0, grid);

  std::vector<GeodesicState> states;
  states.reserve(flow.size());
  for (const auto& f : flow) {
    Point p{f.point};
    states.push_back(GeodesicState{p, Tangent{p, f.cols.col(0)}});
  }
  return Trajectory(model, grid, std::move(states), step);
}

Point exp_map(const ManifoldModel& model, const Point& p, const Tangent& v, double step) {
  make_state(model, p, v);
  const double length = g_speed(model, v);
  if (length == 0.0) return canonical_point(model, p);
  const GeodesicState unit{p, Tangent{p, v.components / length}};
  const Trajectory traj = geodesic_flow(model, unit, length, step);
  return canonical_point(model, traj.states().back().point);
}

Tangent parallel_transport(const Trajectory& trajectory, const Tangent& v0, double from,
                           double to) {
  if (!trajectory.contains(from) || !trajectory.contains(to))
    throw ParameterError("transport time outside the trajectory domain");
  const ManifoldModel& m = trajectory.model();
  const GeodesicState start = trajectory.state_at(from);
  validate_tangent(m, v0);
  if ((v0.base.coords - start.point.coords).lpNorm<Eigen::Infinity>() > kTangentTolerance)
    throw DomainError("vector is not based at the trajectory point at the start time");
  if (from == to) return Tangent{start.point, v0.components};

  Mat cols(m.component_count(), 2);
  cols.col(0) = start.velocity.components;
  cols.col(1) = detail::project_components(m, start.point.coords, v0.components);
  const auto flow = integrate(m, FlowState{start.point.coords, cols},
                              time_grid(from, to, trajectory.step()));
  const FlowState& end = flow.back();
  return Tangent{Point{end.point}, end.cols.col(1)};
}

std::vector<ParallelField> transport_fields(const Trajectory& trajectory,
                                            const std::vector<Tangent>& initial) {
  const ManifoldModel& m = trajectory.model();
  const GeodesicState& start = trajectory.state(0);
  Mat cols(m.component_count(), static_cast<Eigen::Index>(initial.size()) + 1);
  cols.col(0) = start.velocity.components;
  for (std::size_t k = 0; k < initial.size(); ++k) {
    validate_tangent(m, initial[k]);
    if ((initial[k].base.coords - start.point.coords).lpNorm<Eigen::Infinity>() > kPointTolerance)
      throw DomainError("initial field vector is not based at the trajectory start");
    cols.col(static_cast<Eigen::Index>(k) + 1) = initial[k].components;
  }
  const std::vector<double> grid(trajectory.times().begin(), trajectory.times().end());
  const auto flow = integrate(m, FlowState{start.point.coords, cols}, grid);

  std::vector<ParallelField> fields(initial.size());
  for (std::size_t k = 0; k < initial.size(); ++k) {
    fields[k].trajectory = trajectory;
    fields[k].vectors.reserve(flow.size());
  }
  for (std::size_t i = 0; i < flow.size(); ++i) {
    // Use the trajectory's own points so every vector shares its sample's base.
    const Point& base = trajectory.state(i).point;
    for (std::size_t k = 0; k < initial.size(); ++k) {
      Vec c = flow[i].cols.col(static_cast<Eigen::Index>(k) + 1);
      fields[k].vectors.push_back(Tangent{base, detail::project_components(m, base.coords, c)});
    }
  }
  return fields;
}

std::vector<ParallelField> normal_frame(const Trajectory& trajectory) {
  const ManifoldModel& m = trajectory.model();
  const GeodesicState& start = trajectory.state(0);
  const Vec& p = start.point.coords;
  const int wanted = m.dim() - 1;

  std::vector<Vec> basis;
  basis.push_back(start.velocity.components /
                  std::sqrt(detail::inner(m, start.velocity.components, start.velocity.components)));
  for (int e = 0; e < m.ambient_dim() && static_cast<int>(basis.size()) < wanted + 1; ++e) {
    Vec c = detail::components_from_ambient(m, p, Vec::Unit(m.ambient_dim(), e));
    c = detail::project_components(m, p, c);
    const double before = std::sqrt(detail::inner(m, c, c));
    if (before < 1e-12) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) c -= detail::inner(m, b, c) * b;
    const double after = std::sqrt(detail::inner(m, c, c));
    if (after < 1e-3 * before) continue;
    basis.push_back(c / after);
  }
  if (static_cast<int>(basis.size()) != wanted + 1)
    throw DomainError("could not complete a normal frame");

  std::vector<Tangent> initial;
  for (std::size_t k = 1; k < basis.size(); ++k) initial.push_back(Tangent{start.point, basis[k]});
  return transport_fields(trajectory, initial);
}

}  // namespace sprank
