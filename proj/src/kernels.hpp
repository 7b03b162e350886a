#pragma once

// Unchecked per-model kernels on raw coefficient vectors. Public entry points
// validate and then call these; the integrators call them directly.

#include <Eigen/Dense>

#include "sprank/geometry.hpp"

namespace sprank::detail {

using Vec = Eigen::VectorXd;

// Quaternions as (w, x, y, z).
inline Eigen::Vector4d quat_mul(const Eigen::Ref<const Eigen::Vector4d>& a,
                                const Eigen::Ref<const Eigen::Vector4d>& b) {
  return {a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
          a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
          a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
          a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]};
}

inline Eigen::Vector4d quat_conj(const Eigen::Ref<const Eigen::Vector4d>& a) {
  return {a[0], -a[1], -a[2], -a[3]};
}

// p * (0, c)
inline Eigen::Vector4d quat_left_translate(const Eigen::Ref<const Eigen::Vector4d>& p,
                                           const Eigen::Ref<const Eigen::Vector3d>& c) {
  return quat_mul(p, Eigen::Vector4d(0.0, c[0], c[1], c[2]));
}

// Multiplication by i on interleaved complex coordinates.
inline Vec complex_j(const Vec& v) {
  Vec out(v.size());
  for (Eigen::Index k = 0; k + 1 < v.size(); k += 2) {
    out[k] = -v[k + 1];
    out[k + 1] = v[k];
  }
  return out;
}

inline double base_inner(const ManifoldModel& m, const Vec& u, const Vec& v) {
  switch (m.kind()) {
    case ModelKind::RoundSphere:
      return u.dot(v);
    case ModelKind::BergerSphere: {
      const auto& w = m.frame_weights();
      return w[0] * u[0] * v[0] + w[1] * u[1] * v[1] + w[2] * u[2] * v[2];
    }
    case ModelKind::ComplexProjective:
      return 4.0 * u.dot(v);
  }
  return 0.0;
}

// Metric g of the (possibly scaled) model.
inline double inner(const ManifoldModel& m, const Vec& u, const Vec& v) {
  return m.scale() * m.scale() * base_inner(m, u, v);
}

// Removes the normal (and, for CP^n, vertical) part of a component vector.
inline Vec project_components(const ManifoldModel& m, const Vec& p, const Vec& c) {
  switch (m.kind()) {
    case ModelKind::RoundSphere:
      return c - p.dot(c) * p;
    case ModelKind::BergerSphere:
      return c;
    case ModelKind::ComplexProjective: {
      const Vec jp = complex_j(p);
      return c - p.dot(c) * p - jp.dot(c) * jp;
    }
  }
  return c;
}

inline Vec components_from_ambient(const ManifoldModel& m, const Vec& p, const Vec& a) {
  if (m.kind() == ModelKind::BergerSphere) {
    // coefficients of the tangent projection in the frame p*i, p*j, p*k
    const Eigen::Vector4d q = p;
    Vec c(3);
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d e = Eigen::Vector3d::Unit(k);
      c[k] = quat_left_translate(q, e).dot(a);
    }
    return c;
  }
  return project_components(m, p, a);
}

inline Vec ambient_from_components(const ManifoldModel& m, const Vec& p, const Vec& c) {
  if (m.kind() == ModelKind::BergerSphere) {
    return quat_left_translate(Eigen::Vector4d(p), Eigen::Vector3d(c));
  }
  return c;
}

// R(x, y) z. The (1,3) tensor does not depend on the metric scale.
inline Vec curvature(const ManifoldModel& m, const Vec& x, const Vec& y, const Vec& z) {
  switch (m.kind()) {
    case ModelKind::RoundSphere:
      return y.dot(z) * x - x.dot(z) * y;
    case ModelKind::BergerSphere: {
      Vec out = Vec::Zero(3);
      for (int a = 0; a < 3; ++a) {
        if (x[a] == 0.0) continue;
        for (int b = 0; b < 3; ++b) {
          if (a == b || y[b] == 0.0) continue;
          for (int c = 0; c < 3; ++c) {
            const double s = x[a] * y[b] * z[c];
            if (s == 0.0) continue;
            for (int d = 0; d < 3; ++d) out[d] += s * m.riemann(a, b, c, d);
          }
        }
      }
      return out;
    }
    case ModelKind::ComplexProjective: {
      // Submersion tensor of S^{2n+1} -> CP^n (holomorphic curvature 4 for the
      // Euclidean metric, hence 1 for the 4x metric).
      const Vec jx = complex_j(x);
      const Vec jy = complex_j(y);
      const Vec jz = complex_j(z);
      return y.dot(z) * x - x.dot(z) * y + jy.dot(z) * jx - jx.dot(z) * jy +
             2.0 * x.dot(jy) * jz;
    }
  }
  return Vec();
}

// Connection term Gamma(a, b) = nabla_{a} b for left-invariant coefficient fields.
inline Eigen::Vector3d berger_connection(const ManifoldModel& m, const Vec& a, const Vec& b) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double s = a[i] * b[j];
      if (s == 0.0) continue;
      for (int k = 0; k < 3; ++k) out[k] += s * m.gamma(i, j, k);
    }
  return out;
}

}  // namespace sprank::detail
