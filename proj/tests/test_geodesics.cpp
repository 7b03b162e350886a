#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sprank/geodesics.hpp"

using namespace sprank;
using testing_support::fuzz_models;
using testing_support::random_point;
using testing_support::random_tangent;
using testing_support::unit_tangent;

namespace {

constexpr double kPi = std::numbers::pi;

GeodesicState random_state(const ManifoldModel& m, oracle::Rng& rng) {
  const Point p = random_point(m, rng);
  return make_state(m, p, unit_tangent(m, p, rng));
}

}  // namespace

TEST(GeodesicFlow, RoundSphereClosedForm) {
  oracle::Rng rng(1);
  for (int n : {2, 4}) {
    const auto m = ManifoldModel::round_sphere(n);
    const GeodesicState s = random_state(m, rng);
    const Trajectory traj = geodesic_flow(m, s, 3.0);
    for (std::size_t i = 0; i < traj.size(); i += 250) {
      const double t = traj.times()[i];
      EXPECT_LT((traj.state(i).point.coords -
                 oracle::sphere_geodesic(s.point.coords, s.velocity.components, t))
                    .norm(),
                1e-8);
    }
  }
}

TEST(GeodesicFlow, ComplexProjectiveClosedForm) {
  oracle::Rng rng(2);
  const auto m = ManifoldModel::complex_projective(2);
  const GeodesicState s = random_state(m, rng);
  const Trajectory traj = geodesic_flow(m, s, 2 * kPi);
  const Eigen::VectorXd x = s.point.coords;
  const Eigen::VectorXd v = s.velocity.components;
  for (std::size_t i = 0; i < traj.size(); i += 500)
    EXPECT_LT((traj.state(i).point.coords - oracle::cp_geodesic(x, v, traj.times()[i])).norm(), 1e-8);
  // Closed of length 2 pi in CP^n with this normalization.
  EXPECT_NEAR(point_distance(m, traj.states().back().point, s.point), 0.0, 1e-8);
}

TEST(GeodesicFlow, BergerClosedForm) {
  oracle::Rng rng(3);
  for (double eta : {0.5, 0.8, 1.0, 1.2}) {
    const auto m = ManifoldModel::berger_sphere(eta);
    for (int k = 0; k < 5; ++k) {
      const GeodesicState s = random_state(m, rng);
      const Trajectory traj = geodesic_flow(m, s, 3.5);
      const Eigen::Vector3d w = s.velocity.components;
      const oracle::Vec4 q0 = s.point.coords;
      for (std::size_t i = 0; i < traj.size(); i += 350) {
        const oracle::Vec4 q = oracle::berger_geodesic(eta, q0, w, traj.times()[i]);
        EXPECT_LT((traj.state(i).point.coords - Eigen::VectorXd(q)).norm(), 1e-8) << "eta " << eta;
      }
    }
  }
}

TEST(GeodesicFlow, HopfFiberClosesAtTwoPiEta) {
  for (double eta : {0.5, 0.8, 1.2}) {
    const auto m = ManifoldModel::berger_sphere(eta);
    const Point id = default_point(m);
    const GeodesicState s = make_state(m, id, Tangent{id, Eigen::Vector3d(1.0 / eta, 0, 0)});
    const Trajectory traj = geodesic_flow(m, s, 2 * kPi * eta);
    EXPECT_LT((traj.states().back().point.coords - id.coords).norm(), 1e-6);
    const GeodesicState half = traj.state_at(kPi * eta);
    EXPECT_NEAR(half.point.coords[0], -1.0, 1e-6);
  }
}

TEST(GeodesicFlow, SpeedConservationFuzz) {
  oracle::Rng rng(4);
  for (const auto& m : fuzz_models()) {
    for (int k = 0; k < 10; ++k) {
      const Trajectory traj = geodesic_flow(m, random_state(m, rng), 3.5);
      EXPECT_TRUE(traj.unit_speed());
      double drift = 0.0;
      for (const auto& st : traj.states()) drift = std::max(drift, std::abs(metric_norm(m, st.velocity) - 1.0));
      EXPECT_LT(drift, 1e-8) << m.describe();
    }
  }
}

TEST(GeodesicFlow, Reversibility) {
  oracle::Rng rng(5);
  for (const auto& m : fuzz_models()) {
    const GeodesicState s = random_state(m, rng);
    const Trajectory fwd = geodesic_flow(m, s, 2.5);
    GeodesicState end = fwd.states().back();
    end.velocity.components = -end.velocity.components;
    const Trajectory back = geodesic_flow(m, end, 2.5);
    EXPECT_LT((back.states().back().point.coords - s.point.coords).norm(), 1e-8) << m.describe();
  }
}

TEST(GeodesicFlow, ScaledModelReparametrises) {
  const auto base = ManifoldModel::berger_sphere(0.8);
  const double lambda = 2.0;
  const auto m = ManifoldModel::scaled(base, lambda);
  oracle::Rng rng(6);
  const Point p = random_point(base, rng);
  const Tangent u = unit_tangent(base, p, rng);
  const Trajectory slow = geodesic_flow(m, make_state(m, p, Tangent{p, u.components / lambda}), 4.0);
  const Trajectory fast = geodesic_flow(base, make_state(base, p, u), 2.0);
  EXPECT_LT((slow.states().back().point.coords - fast.states().back().point.coords).norm(), 1e-8);
}

TEST(GeodesicFlow, TimeGridAndInterpolation) {
  const auto m = ManifoldModel::round_sphere(3);
  oracle::Rng rng(7);
  const GeodesicState s = random_state(m, rng);
  const Trajectory traj = geodesic_flow(m, s, 1.0005, 1e-3);
  EXPECT_DOUBLE_EQ(traj.horizon(), 1.0005);
  EXPECT_DOUBLE_EQ(traj.start(), 0.0);
  EXPECT_EQ(traj.size(), 1002u);
  for (double t : {0.1234567, 0.5, 0.99999, 1.0004}) {
    const auto st = traj.state_at(t);
    EXPECT_LT((st.point.coords - oracle::sphere_geodesic(s.point.coords, s.velocity.components, t)).norm(),
              1e-10);
  }
  EXPECT_THROW(traj.state_at(1.1), ParameterError);
  EXPECT_THROW(traj.state_at(-0.1), ParameterError);
}

TEST(GeodesicFlow, RejectsBadArguments) {
  const auto m = ManifoldModel::round_sphere(2);
  const Point p = default_point(m);
  const GeodesicState s = make_state(m, p, Tangent{p, Eigen::Vector3d(0, 1, 0)});
  EXPECT_THROW(geodesic_flow(m, s, 0.0), ParameterError);
  EXPECT_THROW(geodesic_flow(m, s, -1.0), ParameterError);
  EXPECT_THROW(geodesic_flow(m, s, 1.0, 0.0), ParameterError);
  const Point q{Eigen::Vector3d(0, 1, 0)};
  EXPECT_THROW(make_state(m, p, Tangent{q, Eigen::Vector3d(1, 0, 0)}), DomainError);
  EXPECT_THROW(make_state(m, p, Tangent{p, Eigen::Vector3d(1, 0, 0)}), DomainError);
}

TEST(ExpMap, ZeroAndClosedForms) {
  const auto m = ManifoldModel::round_sphere(3);
  oracle::Rng rng(8);
  const Point p = random_point(m, rng);
  const Tangent zero{p, Eigen::VectorXd::Zero(4)};
  EXPECT_EQ(exp_map(m, p, zero).coords, p.coords);
  Tangent v = unit_tangent(m, p, rng);
  v.components *= 1.7;
  const auto q = exp_map(m, p, v);
  EXPECT_LT((q.coords - oracle::sphere_geodesic(p.coords, v.components / 1.7, 1.7)).norm(), 1e-8);

  const auto cp = ManifoldModel::complex_projective(2);
  const Point x = random_point(cp, rng);
  const Tangent u = unit_tangent(cp, x, rng);
  const Point y = exp_map(cp, x, u);
  EXPECT_NEAR(point_distance(cp, y, Point{oracle::cp_geodesic(x.coords, u.components, 1.0)}), 0.0, 1e-8);
  EXPECT_EQ(canonical_point(cp, y).coords, y.coords);
}

TEST(ParallelTransport, IsometryFuzz) {
  oracle::Rng rng(9);
  for (const auto& m : fuzz_models()) {
    for (int k = 0; k < 5; ++k) {
      const GeodesicState s = random_state(m, rng);
      const Trajectory traj = geodesic_flow(m, s, 3.0);
      const Tangent a = random_tangent(m, s.point, rng);
      const Tangent b = random_tangent(m, s.point, rng);
      const Tangent ta = parallel_transport(traj, a, 0.0, 3.0);
      const Tangent tb = parallel_transport(traj, b, 0.0, 3.0);
      const Tangent tv = parallel_transport(traj, s.velocity, 0.0, 3.0);
      EXPECT_NEAR(metric_inner(m, ta, tb), metric_inner(m, a, b), 1e-8) << m.describe();
      EXPECT_NEAR(metric_inner(m, ta, ta), metric_inner(m, a, a), 1e-8) << m.describe();
      EXPECT_LT((tv.components - traj.states().back().velocity.components).norm(), 1e-8)
          << m.describe();
    }
  }
}

TEST(ParallelTransport, RoundSphereNormalIsConstant) {
  const auto m = ManifoldModel::round_sphere(3);
  const Point p = default_point(m);
  const GeodesicState s = make_state(m, p, Tangent{p, Eigen::Vector4d(0, 1, 0, 0)});
  const Trajectory traj = geodesic_flow(m, s, 3.0);
  const Tangent n{p, Eigen::Vector4d(0, 0, 1, 0)};
  const Tangent t = parallel_transport(traj, n, 0.0, 3.0);
  EXPECT_LT((t.components - n.components).norm(), 1e-10);
}

TEST(ParallelTransport, BackwardsUndoesForwards) {
  const auto m = ManifoldModel::berger_sphere(0.7);
  oracle::Rng rng(10);
  const GeodesicState s = random_state(m, rng);
  const Trajectory traj = geodesic_flow(m, s, 3.0);
  const Tangent a = random_tangent(m, s.point, rng);
  const Tangent mid = parallel_transport(traj, a, 0.0, 1.7);
  const Tangent back = parallel_transport(traj, mid, 1.7, 0.0);
  EXPECT_LT((back.components - a.components).norm(), 1e-9);
  EXPECT_THROW(parallel_transport(traj, a, 0.0, 3.5), ParameterError);
  EXPECT_THROW(parallel_transport(traj, a, 1.0, 2.0), DomainError);
}

TEST(NormalFrame, OrthonormalAndNormal) {
  oracle::Rng rng(11);
  for (const auto& m : fuzz_models()) {
    const Trajectory traj = geodesic_flow(m, random_state(m, rng), 2.0);
    const auto frame = normal_frame(traj);
    ASSERT_EQ(static_cast<int>(frame.size()), m.dim() - 1);
    for (std::size_t i : {std::size_t{0}, traj.size() / 2, traj.size() - 1}) {
      const Tangent& vel = traj.state(i).velocity;
      for (std::size_t a = 0; a < frame.size(); ++a) {
        EXPECT_NEAR(metric_inner(m, frame[a].vectors[i], vel), 0.0, 1e-8) << m.describe();
        for (std::size_t b = 0; b < frame.size(); ++b)
          EXPECT_NEAR(metric_inner(m, frame[a].vectors[i], frame[b].vectors[i]), a == b ? 1.0 : 0.0,
                      1e-8);
      }
    }
  }
}
