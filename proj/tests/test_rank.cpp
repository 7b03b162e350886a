#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sprank/rank.hpp"

using namespace sprank;
using testing_support::random_point;
using testing_support::unit_tangent;

namespace {

constexpr double kPi = std::numbers::pi;

GeodesicSampler sampler(std::size_t count, std::uint64_t seed = 1) {
  GeodesicSampler s;
  s.count = count;
  s.seed = seed;
  return s;
}

}  // namespace

TEST(Normalize, BergerClosedForm) {
  const auto up = normalize_to_bound(ManifoldModel::berger_sphere(1.2), CurvatureBound::Upper);
  EXPECT_NEAR(up.scale() * up.scale(), 1.44, 1e-12);
  const auto lo = normalize_to_bound(ManifoldModel::berger_sphere(0.8), CurvatureBound::Lower);
  EXPECT_NEAR(lo.scale() * lo.scale(), 0.64, 1e-12);
  EXPECT_NEAR(closed_form_range(up).max, 1.0, 1e-12);
  EXPECT_NEAR(closed_form_range(lo).min, 1.0, 1e-12);
}

TEST(Normalize, RoundIsUnchanged) {
  for (auto bound : {CurvatureBound::Upper, CurvatureBound::Lower})
    EXPECT_NEAR(normalize_to_bound(ManifoldModel::round_sphere(3), bound, 2000).scale(), 1.0, 1e-10);
}

TEST(Normalize, ImpossibleLowerBound) {
  EXPECT_THROW(normalize_to_bound(ManifoldModel::berger_sphere(1.3), CurvatureBound::Lower),
               NormalizationError);
  EXPECT_THROW(normalize_to_bound(ManifoldModel::berger_sphere(2.0 / std::sqrt(3.0)), CurvatureBound::Lower),
               NormalizationError);
}

TEST(Normalize, Idempotent) {
  for (const auto& m : {ManifoldModel::berger_sphere(1.2), ManifoldModel::berger_sphere(0.7),
                        ManifoldModel::complex_projective(2)}) {
    const auto once = normalize_to_bound(m, CurvatureBound::Upper, 2000);
    const auto twice = normalize_to_bound(once, CurvatureBound::Upper, 2000);
    EXPECT_NEAR(once.scale(), twice.scale(), 1e-10) << m.describe();
  }
}

TEST(Sampler, DeterministicUnitAndSpecial) {
  const auto m = ManifoldModel::berger_sphere(0.8);
  const auto a = sampler(50, 3).draw(m);
  const auto b = sampler(50, 3).draw(m);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].point.coords, b[i].point.coords);
    EXPECT_EQ(a[i].velocity.components, b[i].velocity.components);
    EXPECT_NEAR(metric_norm(m, a[i].velocity), 1.0, 1e-12);
  }
  // Hopf fiber then a horizontal direction at the identity.
  EXPECT_NEAR(std::abs(a[0].velocity.components[0]) * 0.8, 1.0, 1e-12);
  EXPECT_NEAR(a[1].velocity.components[0], 0.0, 1e-15);

  GeodesicSampler u = sampler(5, 3);
  u.stratification = Stratification::Uniform;
  const auto c = u.draw(m);
  EXPECT_GT(std::abs(std::abs(c[0].velocity.components[0]) * 0.8 - 1.0), 1e-6);
  EXPECT_NE(a[2].point.coords, sampler(50, 4).draw(m)[2].point.coords);
  EXPECT_THROW(sampler(0).draw(m), ParameterError);
}

TEST(PositiveRank, RoundSphereHolds) {
  const auto v = check_positive_spherical_rank(ManifoldModel::round_sphere(3), sampler(20));
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.state, VerdictState::Holds);
  for (const auto& e : v.evidence) {
    ASSERT_EQ(e.events.size(), 1u);
    EXPECT_NEAR(e.events[0].time, kPi, 1e-6);
    EXPECT_EQ(e.events[0].multiplicity, 2);
    EXPECT_TRUE(e.certificate);
  }
}

TEST(PositiveRank, ComplexProjectiveHolds) {
  const auto v = check_positive_spherical_rank(ManifoldModel::complex_projective(2), sampler(20));
  EXPECT_TRUE(v.holds);
  for (const auto& e : v.evidence) {
    ASSERT_FALSE(e.events.empty());
    EXPECT_NEAR(e.events[0].time, kPi, 1e-6);
    EXPECT_EQ(e.events[0].multiplicity, 1);
    EXPECT_TRUE(e.certificate);
    EXPECT_LT(e.certificate_deviation, 1e-6);
  }
}

TEST(PositiveRank, BergerUpperFailsOnHorizontal) {
  const auto m = normalize_to_bound(ManifoldModel::berger_sphere(1.2), CurvatureBound::Upper);
  const auto v = check_positive_spherical_rank(m, sampler(20));
  EXPECT_FALSE(v.holds);
  EXPECT_EQ(v.state, VerdictState::Fails);
  ASSERT_TRUE(v.worst_case.has_value());
  EXPECT_NEAR(v.evidence[*v.worst_case].initial.velocity.components[0], 0.0, 1e-12);
  for (const auto& e : v.evidence) {
    for (const auto& ev : e.events) EXPECT_GE(ev.time, kPi - 1e-4);
    // A certificate must accompany every geodesic that passes.
    if (e.holds) {
      EXPECT_TRUE(e.certificate);
    }
  }
}

TEST(PositiveRank, PreconditionFailure) {
  const auto v = check_positive_spherical_rank(ManifoldModel::berger_sphere(1.2), sampler(5));
  EXPECT_EQ(v.state, VerdictState::PreconditionFailed);
  EXPECT_FALSE(v.holds);
  RankOptions bad;
  bad.horizon = 3.0;
  EXPECT_THROW(check_positive_spherical_rank(ManifoldModel::round_sphere(2), sampler(2), bad), ParameterError);
}

TEST(WeakRank, BergerLowerViaKilling) {
  const auto m = normalize_to_bound(ManifoldModel::berger_sphere(0.8), CurvatureBound::Lower);
  const auto v = check_weak_spherical_rank(m, CurvatureBound::Lower, sampler(30));
  EXPECT_TRUE(v.holds);
  for (const auto& e : v.evidence) {
    EXPECT_LT(e.weak_deviation, 1e-7);
    if (e.index > 0) {
      EXPECT_EQ(e.witness, "killing");
    }
  }
}

TEST(WeakRank, BergerUpper) {
  const auto m = normalize_to_bound(ManifoldModel::berger_sphere(1.2), CurvatureBound::Upper);
  const auto v = check_weak_spherical_rank(m, CurvatureBound::Upper, sampler(30));
  EXPECT_TRUE(v.holds);
  EXPECT_EQ(v.property, RankProperty::WeakUpper);
}

TEST(WeakRank, RoundEitherSide) {
  for (auto side : {CurvatureBound::Upper, CurvatureBound::Lower}) {
    const auto v = check_weak_spherical_rank(ManifoldModel::round_sphere(3), side, sampler(10));
    EXPECT_TRUE(v.holds);
    for (const auto& e : v.evidence) EXPECT_LT(e.weak_deviation, 1e-9);
  }
}

TEST(WeakRank, RequiresNormalizedModel) {
  EXPECT_THROW(check_weak_spherical_rank(ManifoldModel::berger_sphere(1.2), CurvatureBound::Upper, sampler(2)),
               ParameterError);
}

TEST(WeakRank, SearchAgreesWithKilling) {
  const auto m = normalize_to_bound(ManifoldModel::berger_sphere(0.8), CurvatureBound::Lower);
  const auto states = sampler(6).draw(m);
  for (std::size_t i = 2; i < states.size(); ++i) {
    const auto profile = curvature_profile(geodesic_flow(m, states[i], 3.5));
    const auto w = search_weak_witness(profile, 1e-5, 16, 500, 100 + i);
    EXPECT_LE(w.deviation, 1e-5);
    EXPECT_EQ(w.kind, "search");
  }
}

TEST(Killing, FiberAndGenericGeodesic) {
  const auto m = ManifoldModel::berger_sphere(0.8);
  const Point id = default_point(m);
  const Trajectory fiber = geodesic_flow(m, make_state(m, id, Tangent{id, Eigen::Vector3d(1.25, 0, 0)}), 2.0);
  for (const auto& v : killing_jacobi_field(m, fiber)) EXPECT_LT(metric_norm(m, v), 1e-10);

  oracle::Rng rng(3);
  const Point p = random_point(m, rng);
  const Trajectory traj = geodesic_flow(m, make_state(m, p, unit_tangent(m, p, rng)), 3.5);
  const auto field = killing_jacobi_field(m, traj);
  for (std::size_t i = 0; i < traj.size(); i += 50) {
    if (metric_norm(m, field[i]) < 1e-6) continue;
    EXPECT_NEAR(sectional_curvature(m, traj.state(i).velocity, field[i]), 0.64, 1e-8);
  }
  const auto profile = curvature_profile(traj);
  EXPECT_LT(jacobi_residual(profile, frame_coefficients(profile, field)), 1e-5);

  const auto round = ManifoldModel::round_sphere(3);
  const GeodesicState rs = sampler(1).draw(round)[0];
  EXPECT_THROW(killing_jacobi_field(round, geodesic_flow(round, rs, 1.0)), DomainError);
}

TEST(Verdicts, Deterministic) {
  const auto m = normalize_to_bound(ManifoldModel::berger_sphere(1.2), CurvatureBound::Upper);
  const auto a = check_positive_spherical_rank(m, sampler(8, 5));
  const auto b = check_positive_spherical_rank(m, sampler(8, 5));
  ASSERT_EQ(a.evidence.size(), b.evidence.size());
  EXPECT_EQ(a.worst_case, b.worst_case);
  for (std::size_t i = 0; i < a.evidence.size(); ++i) {
    ASSERT_EQ(a.evidence[i].events.size(), b.evidence[i].events.size());
    for (std::size_t k = 0; k < a.evidence[i].events.size(); ++k)
      EXPECT_EQ(a.evidence[i].events[k].time, b.evidence[i].events[k].time);
  }
}

TEST(BergerReport, Rows) {
  const auto s = sampler(6);
  const auto one = berger_row(1.0, s, {}, 2000);
  EXPECT_NEAR(one.closed_form.min, 1.0, 1e-12);
  EXPECT_NEAR(one.closed_form.max, 1.0, 1e-12);
  EXPECT_NEAR(one.fiber_closure_time, 2 * kPi, 1e-6);
  ASSERT_TRUE(one.positive_spherical.has_value());
  EXPECT_TRUE(one.positive_spherical->holds);

  const auto half = berger_row(0.5, s, {}, 2000);
  EXPECT_NEAR(half.closed_form.min, 0.25, 1e-12);
  EXPECT_NEAR(half.closed_form.max, 3.25, 1e-12);
  EXPECT_NEAR(half.fiber_closure_time, kPi, 1e-6);

  const auto r11 = berger_row(1.1, s, {}, 2000);
  EXPECT_TRUE(r11.positively_curved);
  EXPECT_NEAR(r11.closed_form.min, 0.37, 1e-12);
  EXPECT_TRUE(r11.weak_upper->holds);
  EXPECT_FALSE(r11.positive_spherical->holds);

  const auto edge = berger_row(2.0 / std::sqrt(3.0), s, {}, 2000);
  EXPECT_FALSE(edge.positively_curved);
  EXPECT_FALSE(edge.weak_lower.has_value());
  EXPECT_EQ(edge.note, "lower bound 0 <= 0, lower normalization impossible");
}

TEST(BergerReport, Errors) {
  EXPECT_THROW(berger_report({}, sampler(2)), ParameterError);
  EXPECT_THROW(berger_report({0.5, -1.0}, sampler(2)), ParameterError);
  EXPECT_THROW(berger_row(0.0, sampler(2)), ParameterError);
}
