#pragma once

#include <memory>
#include <span>
#include <vector>

#include "sprank/geometry.hpp"

namespace sprank {

inline constexpr double kDefaultStep = 1e-3;

struct GeodesicState {
  Point point;
  Tangent velocity;
};

/// Checks the state against the model and that the velocity is based at the point.
GeodesicState make_state(const ManifoldModel& model, const Point& p, const Tangent& v);

/// An integrated geodesic sampled at multiples of the step plus the horizon
/// endpoint. Immutable; copies share the sample storage.
///
/// For ComplexProjective the samples are the horizontal lift of the geodesic
/// in the unit sphere of C^{n+1}, not canonical representatives.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(ManifoldModel model, std::vector<double> times, std::vector<GeodesicState> states,
             double step);

  const ManifoldModel& model() const { return data_->model; }
  std::span<const double> times() const { return data_->times; }
  const std::vector<GeodesicState>& states() const { return data_->states; }
  const GeodesicState& state(std::size_t i) const { return data_->states[i]; }
  std::size_t size() const { return data_->times.size(); }
  double step() const { return data_->step; }
  double start() const { return data_->times.front(); }
  double horizon() const { return data_->times.back(); }
  bool unit_speed() const { return data_->unit_speed; }
  bool contains(double t) const;

  /// Cubic Hermite interpolation on ambient coordinates, then projection.
  GeodesicState state_at(double t) const;

  /// Index i with times[i] <= t < times[i+1] (last interval is closed).
  std::size_t interval(double t) const;

 private:
  struct Data {
    ManifoldModel model;
    std::vector<double> times;
    std::vector<GeodesicState> states;
    double step;
    bool unit_speed;
  };
  std::shared_ptr<const Data> data_;
};

/// A vector field along a trajectory, one vector per sample.
struct ParallelField {
  Trajectory trajectory;
  std::vector<Tangent> vectors;
};

/// Classical RK4 integration of the geodesic equation. Ambient models use the
/// constrained second-order form with a projection after each step; the Berger
/// sphere integrates the Euler-Arnold equation on frame coefficients and
/// reconstructs the quaternion.
Trajectory geodesic_flow(const ManifoldModel& model, const GeodesicState& initial, double horizon,
                         double step = kDefaultStep);

Point exp_map(const ManifoldModel& model, const Point& p, const Tangent& v,
              double step = kDefaultStep);

/// Transports v0 from time `from` to time `to` (either direction) by integrating
/// the transport equation jointly with the geodesic.
Tangent parallel_transport(const Trajectory& trajectory, const Tangent& v0, double from, double to);

/// dim-1 parallel fields, g-orthonormal and normal to the velocity. The initial
/// frame is Gram-Schmidt of the projected ambient basis e_0, e_1, ... against
/// the velocity, in index order.
std::vector<ParallelField> normal_frame(const Trajectory& trajectory);

/// Transports the given initial vectors along the whole trajectory.
std::vector<ParallelField> transport_fields(const Trajectory& trajectory,
                                            const std::vector<Tangent>& initial);

}  // namespace sprank
