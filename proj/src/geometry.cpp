#include "sprank/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kernels.hpp"
#include "optimize.hpp"
#include "parallel.hpp"
#include "sprank/sampling.hpp"

namespace sprank {

namespace {

using detail::Vec;

// [X_a, X_b] = sum_c structure(a, b, c) X_c for X_0 = i, X_1 = j, X_2 = k.
double structure(int a, int b, int c) {
  if (a == b) return 0.0;
  const int third = 3 - a - b;
  if (c != third) return 0.0;
  return ((b - a + 3) % 3 == 1) ? 2.0 : -2.0;
}

void same_base(const Tangent& u, const Tangent& v) {
  if (u.base.coords.size() != v.base.coords.size() ||
      (u.base.coords - v.base.coords).lpNorm<Eigen::Infinity>() > kPointTolerance) {
    throw DomainError("tangent vectors are based at different points");
  }
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

ManifoldModel::ManifoldModel(ModelKind kind, double param, int iparam)
    : kind_(kind), param_(param), iparam_(iparam) {
  if (kind_ != ModelKind::BergerSphere) return;
  weights_ = {param_ * param_, 1.0, 1.0};
  // Koszul formula for a left-invariant metric with constant weights.
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const double lower = 0.5 * (structure(a, b, c) * weights_[c] -
                                    structure(b, c, a) * weights_[a] +
                                    structure(c, a, b) * weights_[b]);
        gamma_[(a * 3 + b) * 3 + c] = lower / weights_[c];
      }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          double r = 0.0;
          for (int e = 0; e < 3; ++e) {
            r += gamma(b, c, e) * gamma(a, e, d) - gamma(a, c, e) * gamma(b, e, d) -
                 structure(a, b, e) * gamma(e, c, d);
          }
          riemann_[((a * 3 + b) * 3 + c) * 3 + d] = r;
        }
}

ManifoldModel ManifoldModel::round_sphere(int dim) {
  if (dim < 2) throw ParameterError("round sphere dimension must be >= 2");
  return ManifoldModel(ModelKind::RoundSphere, 0.0, dim);
}

ManifoldModel ManifoldModel::berger_sphere(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("Berger eta must be positive");
  return ManifoldModel(ModelKind::BergerSphere, eta, 0);
}

ManifoldModel ManifoldModel::complex_projective(int complex_dim) {
  if (complex_dim < 1) throw ParameterError("complex dimension must be >= 1");
  return ManifoldModel(ModelKind::ComplexProjective, 0.0, complex_dim);
}

ManifoldModel ManifoldModel::scaled(const ManifoldModel& base, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("scale must be positive");
  ManifoldModel out = base;
  out.scale_ = base.scale_ * lambda;
  return out;
}

ManifoldModel ManifoldModel::unscaled() const {
  ManifoldModel out = *this;
  out.scale_ = 1.0;
  return out;
}

double ManifoldModel::eta() const {
  if (kind_ != ModelKind::BergerSphere) throw DomainError("not a Berger sphere");
  return param_;
}

int ManifoldModel::sphere_dim() const {
  if (kind_ != ModelKind::RoundSphere) throw DomainError("not a round sphere");
  return iparam_;
}

int ManifoldModel::complex_dim() const {
  if (kind_ != ModelKind::ComplexProjective) throw DomainError("not a complex projective space");
  return iparam_;
}

int ManifoldModel::dim() const {
  switch (kind_) {
    case ModelKind::RoundSphere:
      return iparam_;
    case ModelKind::BergerSphere:
      return 3;
    case ModelKind::ComplexProjective:
      return 2 * iparam_;
  }
  return 0;
}

int ManifoldModel::ambient_dim() const {
  switch (kind_) {
    case ModelKind::RoundSphere:
      return iparam_ + 1;
    case ModelKind::BergerSphere:
      return 4;
    case ModelKind::ComplexProjective:
      return 2 * iparam_ + 2;
  }
  return 0;
}

int ManifoldModel::component_count() const {
  return kind_ == ModelKind::BergerSphere ? 3 : ambient_dim();
}

std::string ManifoldModel::describe() const {
  std::string s;
  switch (kind_) {
    case ModelKind::RoundSphere:
      s = "RoundSphere(" + std::to_string(iparam_) + ")";
      break;
    case ModelKind::BergerSphere:
      s = "BergerSphere(" + format_double(param_) + ")";
      break;
    case ModelKind::ComplexProjective:
      s = "ComplexProjective(" + std::to_string(iparam_) + ")";
      break;
  }
  if (is_scaled()) s = "Scaled(" + s + ", " + format_double(scale_) + ")";
  return s;
}

Point default_point(const ManifoldModel& model) {
  return Point{Vec::Unit(model.ambient_dim(), 0)};
}

void validate_point(const ManifoldModel& model, const Point& p) {
  if (p.coords.size() != model.ambient_dim())
    throw DomainError("point has " + std::to_string(p.coords.size()) + " coordinates, expected " +
                      std::to_string(model.ambient_dim()));
  if (!p.coords.allFinite() || std::abs(p.coords.norm() - 1.0) > kPointTolerance)
    throw DomainError("point is not on the unit ambient sphere");
}

void validate_tangent(const ManifoldModel& model, const Tangent& u) {
  validate_point(model, u.base);
  if (u.components.size() != model.component_count())
    throw DomainError("tangent has " + std::to_string(u.components.size()) +
                      " components, expected " + std::to_string(model.component_count()));
  if (!u.components.allFinite()) throw DomainError("tangent has non-finite components");
  const double scale = std::max(1.0, u.components.norm());
  const Vec& p = u.base.coords;
  if (model.kind() == ModelKind::RoundSphere ||
      model.kind() == ModelKind::ComplexProjective) {
    if (std::abs(p.dot(u.components)) > kTangentTolerance * scale)
      throw DomainError("tangent is not orthogonal to its base point");
  }
  if (model.kind() == ModelKind::ComplexProjective) {
    if (std::abs(detail::complex_j(p).dot(u.components)) > kTangentTolerance * scale)
      throw DomainError("tangent is not horizontal");
  }
}

Tangent tangent_from_ambient(const ManifoldModel& model, const Point& p,
                             const Eigen::VectorXd& ambient) {
  validate_point(model, p);
  if (ambient.size() != model.ambient_dim()) throw DomainError("ambient vector has wrong size");
  return Tangent{p, detail::components_from_ambient(model, p.coords, ambient)};
}

Eigen::VectorXd to_ambient(const ManifoldModel& model, const Tangent& u) {
  validate_tangent(model, u);
  return detail::ambient_from_components(model, u.base.coords, u.components);
}

Tangent left_invariant_field(const ManifoldModel& model, const Point& p, int a) {
  if (model.kind() != ModelKind::BergerSphere)
    throw DomainError("left-invariant frame is defined for the Berger sphere only");
  if (a < 0 || a > 2) throw ParameterError("frame index must be 0, 1 or 2");
  validate_point(model, p);
  return Tangent{p, Vec::Unit(3, a)};
}

Tangent complex_structure(const ManifoldModel& model, const Tangent& u) {
  if (model.kind() != ModelKind::ComplexProjective)
    throw DomainError("complex structure is defined for ComplexProjective only");
  validate_tangent(model, u);
  return Tangent{u.base, detail::complex_j(u.components)};
}

double point_distance(const ManifoldModel& model, const Point& p, const Point& q) {
  validate_point(model, p);
  validate_point(model, q);
  if (model.kind() != ModelKind::ComplexProjective) return (p.coords - q.coords).norm();
  const double re = p.coords.dot(q.coords);
  const double im = p.coords.dot(detail::complex_j(q.coords));
  const double modulus = std::hypot(re, im);
  if (modulus == 0.0) return std::sqrt(2.0);
  // Rotate q onto the phase closest to p; min over phases of |p - e^{it} q|.
  const Eigen::VectorXd aligned = (re * q.coords + im * detail::complex_j(q.coords)) / modulus;
  return (p.coords - aligned).norm();
}

Point canonical_point(const ManifoldModel& model, const Point& p) {
  validate_point(model, p);
  if (model.kind() != ModelKind::ComplexProjective) return p;
  const Eigen::Index n = p.coords.size() / 2;
  Eigen::Index best = 0;
  double best_mod = -1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double mod = std::hypot(p.coords[2 * k], p.coords[2 * k + 1]);
    if (mod > best_mod + 1e-12) {
      best_mod = mod;
      best = k;
    }
  }
  const double phase = std::atan2(p.coords[2 * best + 1], p.coords[2 * best]);
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  Point out{p.coords};
  for (Eigen::Index k = 0; k < n; ++k) {
    const double re = p.coords[2 * k];
    const double im = p.coords[2 * k + 1];
    out.coords[2 * k] = c * re + s * im;
    out.coords[2 * k + 1] = c * im - s * re;
  }
  out.coords[2 * best + 1] = 0.0;
  out.coords.normalize();
  return out;
}

double metric_inner(const ManifoldModel& model, const Tangent& u, const Tangent& v) {
  validate_tangent(model, u);
  validate_tangent(model, v);
  same_base(u, v);
  return detail::inner(model, u.components, v.components);
}

double metric_norm(const ManifoldModel& model, const Tangent& u) {
  return std::sqrt(metric_inner(model, u, u));
}

Tangent curvature_operator(const ManifoldModel& model, const Tangent& x, const Tangent& y,
                           const Tangent& z) {
  validate_tangent(model, x);
  validate_tangent(model, y);
  validate_tangent(model, z);
  same_base(x, y);
  same_base(x, z);
  return Tangent{x.base, detail::curvature(model, x.components, y.components, z.components)};
}

namespace {

// NaN marks a degenerate plane.
double sec_unchecked(const ManifoldModel& model, const Vec& u, const Vec& v) {
  const double uu = detail::inner(model, u, u);
  const double vv = detail::inner(model, v, v);
  const double uv = detail::inner(model, u, v);
  if (!(uu > 0.0) || !(vv > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double gram = 1.0 - uv * uv / (uu * vv);
  if (gram <= kDegeneratePlane) return std::numeric_limits<double>::quiet_NaN();
  const Vec r = detail::curvature(model, u, v, v);
  return detail::inner(model, r, u) / (uu * vv - uv * uv);
}

}  // namespace

double sectional_curvature(const ManifoldModel& model, const Tangent& u, const Tangent& v) {
  validate_tangent(model, u);
  validate_tangent(model, v);
  same_base(u, v);
  const double sec = sec_unchecked(model, u.components, v.components);
  if (std::isnan(sec)) throw DegeneratePlaneError("tangent vectors span a degenerate plane");
  return sec;
}

CurvatureRange closed_form_range(const ManifoldModel& model) {
  const double inv = 1.0 / (model.scale() * model.scale());
  switch (model.kind()) {
    case ModelKind::RoundSphere:
      return {inv, inv};
    case ModelKind::ComplexProjective:
      if (model.complex_dim() == 1) return {inv, inv};  // CP^1 is the round sphere of radius 1
      return {0.25 * inv, inv};
    case ModelKind::BergerSphere: {
      const double a = model.eta() * model.eta();
      const double b = 4.0 - 3.0 * a;
      return {std::min(a, b) * inv, std::max(a, b) * inv};
    }
  }
  return {};
}

namespace {

struct PlaneDraw {
  Vec point;
  Vec a;
  Vec b;
};

// g-orthonormal pair spanning the projection of (a, b); empty vectors when degenerate.
std::pair<Vec, Vec> orthonormal_pair(const ManifoldModel& model, const Vec& p, const Vec& a,
                                     const Vec& b) {
  Vec u = detail::project_components(model, p, a);
  const double nu = std::sqrt(detail::inner(model, u, u));
  if (!(nu > 1e-300)) return {};
  u /= nu;
  Vec v = detail::project_components(model, p, b);
  v -= detail::inner(model, u, v) * u;
  const double nv = std::sqrt(detail::inner(model, v, v));
  if (!(nv > 1e-7 * std::sqrt(detail::inner(model, b, b)))) return {};
  v /= nv;
  return {u, v};
}

double draw_sec(const ManifoldModel& model, const Vec& p, const Vec& a, const Vec& b) {
  auto [u, v] = orthonormal_pair(model, p, a, b);
  if (u.size() == 0) return std::numeric_limits<double>::quiet_NaN();
  return sec_unchecked(model, u, v);
}

Plane to_plane(const ManifoldModel& model, const Vec& p, const Vec& a, const Vec& b) {
  auto [u, v] = orthonormal_pair(model, p, a, b);
  return Plane{Tangent{Point{p}, u}, Tangent{Point{p}, v}};
}

}  // namespace

CurvatureScan curvature_scan(const ManifoldModel& model, std::size_t samples,
                             std::uint64_t seed) {
  if (samples < 1) throw ParameterError("curvature scan needs at least one sample");
  const int ambient = model.ambient_dim();
  const int comps = model.component_count();
  SobolStream stream(ambient + 2 * comps, seed);

  std::vector<PlaneDraw> draws(samples);
  for (auto& d : draws) {
    const Vec g = stream.next_gaussian();
    d.point = g.head(ambient).normalized();
    d.a = g.segment(ambient, comps);
    d.b = g.tail(comps);
  }

  std::vector<double> values(samples);
  detail::parallel_for(samples, [&](std::size_t i) {
    values[i] = draw_sec(model, draws[i].point, draws[i].a, draws[i].b);
  });

  std::size_t imin = samples;
  std::size_t imax = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    if (std::isnan(values[i])) continue;
    if (imin == samples || values[i] < values[imin]) imin = i;
    if (imax == samples || values[i] > values[imax]) imax = i;
  }
  if (imin == samples) throw DegeneratePlaneError("every sampled plane was degenerate");

  // Local polish of the two extremal draws; the base point stays fixed.
  auto polish = [&](std::size_t i, double sign) {
    const Vec& p = draws[i].point;
    Vec x0(2 * comps);
    x0 << draws[i].a, draws[i].b;
    auto objective = [&](const Vec& x) {
      const double s = draw_sec(model, p, x.head(comps), x.tail(comps));
      return std::isnan(s) ? std::numeric_limits<double>::max() : sign * s;
    };
    const auto best = detail::simplex_minimize(objective, x0, 0.1, 4000, 1e-10);
    PlaneDraw out{p, best.x.head(comps), best.x.tail(comps)};
    return std::pair{out, sign * best.value};
  };

  CurvatureScan scan;
  scan.samples = samples;
  scan.min = values[imin];
  scan.argmin = to_plane(model, draws[imin].point, draws[imin].a, draws[imin].b);
  scan.max = values[imax];
  scan.argmax = to_plane(model, draws[imax].point, draws[imax].a, draws[imax].b);

  const auto [lo, lo_value] = polish(imin, 1.0);
  if (lo_value < scan.min) {
    scan.min = lo_value;
    scan.argmin = to_plane(model, lo.point, lo.a, lo.b);
  }
  const auto [hi, hi_value] = polish(imax, -1.0);
  if (hi_value > scan.max) {
    scan.max = hi_value;
    scan.argmax = to_plane(model, hi.point, hi.a, hi.b);
  }
  return scan;
}

}  // namespace sprank
