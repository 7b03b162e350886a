#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sprank/errors.hpp"

namespace sprank {

enum class ModelKind { RoundSphere, BergerSphere, ComplexProjective };

/// One of the built-in model geometries, optionally with its metric scaled
/// by lambda^2.
///
/// Points are stored in ambient coordinates:
///  - RoundSphere(n): unit vectors of R^{n+1}, curvature 1.
///  - BergerSphere(eta): unit quaternions (w, x, y, z); tangent vectors are
///    coefficients in the left-invariant frame {i, j, k} with metric weights
///    (eta^2, 1, 1).
///  - ComplexProjective(n): unit vectors of C^{n+1} stored interleaved as
///    (re0, im0, re1, im1, ...); tangents are horizontal ambient vectors.
///    The metric is 4x the Euclidean one, which puts sec in [1/4, 1].
///
/// Scaling composes multiplicatively, and a scale of exactly 1 is the
/// unscaled model.
class ManifoldModel {
 public:
  static ManifoldModel round_sphere(int dim);
  static ManifoldModel berger_sphere(double eta);
  static ManifoldModel complex_projective(int complex_dim);
  static ManifoldModel scaled(const ManifoldModel& base, double lambda);

  ModelKind kind() const { return kind_; }
  bool is_scaled() const { return scale_ != 1.0; }
  double scale() const { return scale_; }
  ManifoldModel unscaled() const;

  double eta() const;
  int sphere_dim() const;
  int complex_dim() const;

  /// Manifold dimension n.
  int dim() const;
  int ambient_dim() const;
  /// Number of reals per tangent vector.
  int component_count() const;

  std::string describe() const;

  // Left-invariant Levi-Civita data for the Berger sphere:
  // nabla_{X_a} X_b = sum_c gamma(a,b,c) X_c and
  // R(X_a, X_b) X_c = sum_d riemann(a,b,c,d) X_d.
  double gamma(int a, int b, int c) const { return gamma_[(a * 3 + b) * 3 + c]; }
  double riemann(int a, int b, int c, int d) const {
    return riemann_[((a * 3 + b) * 3 + c) * 3 + d];
  }
  const std::array<double, 3>& frame_weights() const { return weights_; }

  friend bool operator==(const ManifoldModel& a, const ManifoldModel& b) {
    return a.kind_ == b.kind_ && a.param_ == b.param_ && a.iparam_ == b.iparam_ &&
           a.scale_ == b.scale_;
  }

 private:
  ManifoldModel(ModelKind kind, double param, int iparam);

  ModelKind kind_;
  double param_ = 0.0;  // eta
  int iparam_ = 0;      // sphere dim or complex dim
  double scale_ = 1.0;
  std::array<double, 3> weights_{1.0, 1.0, 1.0};
  std::array<double, 27> gamma_{};
  std::array<double, 81> riemann_{};
};

struct Point {
  Eigen::VectorXd coords;
};

struct Tangent {
  Point base;
  Eigen::VectorXd components;
};

struct Frame {
  Point base;
  std::vector<Tangent> vectors;
};

struct Plane {
  Tangent u;
  Tangent v;
};

struct CurvatureRange {
  double min = 0.0;
  double max = 0.0;
};

struct CurvatureScan {
  double min = 0.0;
  double max = 0.0;
  Plane argmin;
  Plane argmax;
  std::size_t samples = 0;
};

// Thresholds applied by the validators.
inline constexpr double kPointTolerance = 1e-12;
inline constexpr double kTangentTolerance = 1e-10;
inline constexpr double kDegeneratePlane = 1e-14;

/// North pole, identity quaternion or [1 : 0 : ... : 0].
Point default_point(const ManifoldModel& model);

void validate_point(const ManifoldModel& model, const Point& p);
void validate_tangent(const ManifoldModel& model, const Tangent& u);

/// Orthogonal projection of an ambient vector onto T_p M, returned in the
/// model's component convention.
Tangent tangent_from_ambient(const ManifoldModel& model, const Point& p,
                             const Eigen::VectorXd& ambient);
/// Ambient (embedded) representation of a tangent vector.
Eigen::VectorXd to_ambient(const ManifoldModel& model, const Tangent& u);

/// Left-invariant frame field X_a (a = 0, 1, 2 for i, j, k) of the Berger sphere at p.
Tangent left_invariant_field(const ManifoldModel& model, const Point& p, int a);
/// Multiplication by the imaginary unit on a horizontal tangent of CP^n.
Tangent complex_structure(const ManifoldModel& model, const Tangent& u);

/// Ambient distance; phase-invariant for ComplexProjective.
double point_distance(const ManifoldModel& model, const Point& p, const Point& q);
/// Representative with the first largest-modulus coordinate real and
/// positive (ComplexProjective only; other models return p).
Point canonical_point(const ManifoldModel& model, const Point& p);

double metric_inner(const ManifoldModel& model, const Tangent& u, const Tangent& v);
double metric_norm(const ManifoldModel& model, const Tangent& u);

/// R(x, y) z, with sec(u, v) = <R(u, v) v, u> / |u ^ v|^2.
Tangent curvature_operator(const ManifoldModel& model, const Tangent& x, const Tangent& y,
                           const Tangent& z);

double sectional_curvature(const ManifoldModel& model, const Tangent& u, const Tangent& v);

/// Exact sec range of the model.
CurvatureRange closed_form_range(const ManifoldModel& model);

/// Low-discrepancy scan over (base point, 2-plane); the best sampled planes are
/// then polished by a local simplex search at their base point.
CurvatureScan curvature_scan(const ManifoldModel& model, std::size_t samples,
                             std::uint64_t seed);

}  // namespace sprank
