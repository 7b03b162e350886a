#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sprank/jacobi.hpp"

namespace sprank {

enum class Stratification { Uniform, IncludeSpecial };

/// Seeded low-discrepancy sample of the unit tangent bundle. With
/// IncludeSpecial a Berger sample starts with the Hopf fiber direction and a
/// purely horizontal direction.
struct GeodesicSampler {
  std::size_t count = 200;
  std::uint64_t seed = 1;
  Stratification stratification = Stratification::IncludeSpecial;

  std::vector<GeodesicState> draw(const ManifoldModel& model) const;
};

enum class CurvatureBound { Upper, Lower };
enum class RankProperty { PositiveSpherical, WeakUpper, WeakLower };
enum class VerdictState { Holds, Fails, PreconditionFailed };

struct RankOptions {
  double step = kDefaultStep;
  double horizon = 3.5;
  double time_tol = 1e-4;
  double rank_tol = kDefaultRankTol;
  double curv_tol = 1e-8;
  double weak_tol = 1e-6;
  double certificate_tol = 1e-6;
  int search_starts = 16;
  int search_evaluations = 500;
};

struct RankEvidence {
  std::size_t index = 0;
  GeodesicState initial;
  std::vector<ConjugateEvent> events;
  bool certificate = false;
  double certificate_deviation = 0.0;
  double max_normal_curvature = 0.0;
  double min_normal_curvature = 0.0;
  std::string witness;  // weak rank: killing, spherical-field, propagator-column, search
  double weak_deviation = 0.0;
  std::size_t excluded_samples = 0;
  bool holds = false;
};

struct RankVerdict {
  RankProperty property = RankProperty::PositiveSpherical;
  VerdictState state = VerdictState::Fails;
  bool holds = false;
  std::vector<RankEvidence> evidence;
  std::optional<std::size_t> worst_case;
  std::string message;
};

std::string to_string(RankProperty p);
std::string to_string(VerdictState s);
std::string to_string(CurvatureBound b);
std::string to_string(Stratification s);

/// Scaled(model, lambda) with lambda^2 equal to the requested extreme of sec.
/// Berger spheres use the closed-form extremes, other models a curvature scan.
ManifoldModel normalize_to_bound(const ManifoldModel& model, CurvatureBound bound,
                                 std::size_t scan_samples = 10000, std::uint64_t seed = 1);

RankVerdict check_positive_spherical_rank(const ManifoldModel& model,
                                          const GeodesicSampler& sampler,
                                          const RankOptions& options = {});

RankVerdict check_weak_spherical_rank(const ManifoldModel& model, CurvatureBound side,
                                      const GeodesicSampler& sampler,
                                      const RankOptions& options = {});

/// Normal part of the Hopf Killing field X_1 = i along a Berger geodesic.
std::vector<Tangent> killing_jacobi_field(const ManifoldModel& model, const Trajectory& trajectory);

struct WeakWitness {
  std::string kind;
  double deviation = 0.0;
  std::size_t excluded_samples = 0;
  Eigen::VectorXd initial_value;       // J(0) in frame coefficients
  Eigen::VectorXd initial_derivative;  // J'(0)
};

/// max over samples with |J| > tol of |sec(g', J) - 1|.
WeakWitness weak_deviation(const CurvatureProfile& profile, const std::vector<Eigen::VectorXd>& field,
                           double tol);

/// Multi-start simplex search over unit initial data (J(0), J'(0)).
WeakWitness search_weak_witness(const CurvatureProfile& profile, double tol, int starts,
                                int evaluations, std::uint64_t seed);

struct BergerRow {
  double eta = 0.0;
  CurvatureRange closed_form;
  CurvatureRange scanned;
  bool positively_curved = false;
  double fiber_closure_time = 0.0;
  double fiber_closure_error = 0.0;
  std::optional<RankVerdict> positive_spherical;
  std::optional<RankVerdict> weak_upper;
  std::optional<RankVerdict> weak_lower;
  std::string note;
};

BergerRow berger_row(double eta, const GeodesicSampler& sampler, const RankOptions& options = {},
                     std::size_t scan_samples = 10000);
std::vector<BergerRow> berger_report(const std::vector<double>& etas,
                                     const GeodesicSampler& sampler,
                                     const RankOptions& options = {},
                                     std::size_t scan_samples = 10000);

}  // namespace sprank
