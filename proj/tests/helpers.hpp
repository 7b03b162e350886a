#pragma once

#include <vector>

#include "oracles.hpp"
#include "sprank/geometry.hpp"

namespace testing_support {

using sprank::ManifoldModel;
using sprank::Point;
using sprank::Tangent;

inline Point random_point(const ManifoldModel& m, oracle::Rng& rng) {
  return Point{rng.unit(m.ambient_dim())};
}

inline Tangent random_tangent(const ManifoldModel& m, const Point& p, oracle::Rng& rng) {
  return sprank::tangent_from_ambient(m, p, rng.gaussian(m.ambient_dim()));
}

inline Tangent unit_tangent(const ManifoldModel& m, const Point& p, oracle::Rng& rng) {
  Tangent t = random_tangent(m, p, rng);
  t.components /= sprank::metric_norm(m, t);
  return t;
}

inline std::vector<ManifoldModel> fuzz_models() {
  return {ManifoldModel::round_sphere(2),
          ManifoldModel::round_sphere(3),
          ManifoldModel::round_sphere(5),
          ManifoldModel::berger_sphere(0.5),
          ManifoldModel::berger_sphere(0.8),
          ManifoldModel::berger_sphere(1.2),
          ManifoldModel::complex_projective(1),
          ManifoldModel::complex_projective(2),
          ManifoldModel::complex_projective(3),
          ManifoldModel::scaled(ManifoldModel::berger_sphere(1.2), 1.3),
          ManifoldModel::scaled(ManifoldModel::complex_projective(2), 0.7)};
}

}  // namespace testing_support
