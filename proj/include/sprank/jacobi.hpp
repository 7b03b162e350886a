#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sprank/geodesics.hpp"

namespace sprank {

/// K_ab(t) = <R(E_a, g') g', E_b> in a parallel normal frame E.
struct CurvatureProfile {
  Trajectory trajectory;
  std::vector<ParallelField> frame;
  std::vector<Eigen::MatrixXd> curvature;

  std::span<const double> times() const { return trajectory.times(); }
  std::size_t size() const { return curvature.size(); }
  int frame_dim() const { return static_cast<int>(frame.size()); }
  /// Cubic Lagrange interpolation of K on the four nearest samples.
  Eigen::MatrixXd curvature_at(double t) const;
};

CurvatureProfile curvature_profile(const Trajectory& trajectory,
                                   const std::vector<ParallelField>& frame);
/// Convenience overload using normal_frame(trajectory).
CurvatureProfile curvature_profile(const Trajectory& trajectory);

/// Matrix solution of X'' + K(t) X = 0 sampled on the profile's times.
/// jacobi_propagate gives the fundamental solution M(0) = 0, M'(0) = I, whose
/// columns span the normal Jacobi fields vanishing at t = 0.
class JacobiPropagator {
 public:
  JacobiPropagator() = default;
  JacobiPropagator(std::vector<double> times, std::vector<Eigen::MatrixXd> value,
                   std::vector<Eigen::MatrixXd> derivative, std::vector<Eigen::MatrixXd> curvature);

  std::span<const double> times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  const Eigen::MatrixXd& M(std::size_t i) const { return value_[i]; }
  const Eigen::MatrixXd& Mp(std::size_t i) const { return derivative_[i]; }
  double start() const { return times_.front(); }
  double end() const { return times_.back(); }

  /// Cubic Hermite interpolation using M and M' (resp. M' and -K M).
  Eigen::MatrixXd value_at(double t) const;
  Eigen::MatrixXd derivative_at(double t) const;

 private:
  std::size_t interval(double t) const;

  std::vector<double> times_;
  std::vector<Eigen::MatrixXd> value_;
  std::vector<Eigen::MatrixXd> derivative_;
  std::vector<Eigen::MatrixXd> curvature_;
};

JacobiPropagator jacobi_propagate(const CurvatureProfile& profile);

/// General initial data: columns of x0 / xp0 are frame coefficients.
JacobiPropagator jacobi_solve(const CurvatureProfile& profile, const Eigen::MatrixXd& x0,
                              const Eigen::MatrixXd& xp0);

struct ConjugateEvent {
  double time = 0.0;
  int multiplicity = 0;
};

inline constexpr double kDefaultRankTol = 1e-7;
inline constexpr double kEventMergeGap = 1e-5;

/// Conjugate times in (t0, t1]: local minima of the smallest singular value of
/// M(t), refined by golden-section search to 1e-8 in time. Multiplicity counts
/// singular values below rank_tol * |M'(t)|.
std::vector<ConjugateEvent> conjugate_points(const JacobiPropagator& propagator, double t0,
                                             double t1, double rank_tol = kDefaultRankTol);

/// Smallest singular value of M at every sample.
std::vector<double> smallest_singular_values(const JacobiPropagator& propagator);

struct SphericalFieldCertificate {
  ParallelField field;
  Eigen::VectorXd coefficients;  // E in the parallel normal frame
  double deviation = 0.0;        // max_t |sec(E, g') - 1|
};

/// Looks for a parallel unit normal E with sec(E(t), g'(t)) = 1 for all samples,
/// so that sin(t) E(t) is a Jacobi field. Candidates are taken from the
/// eigenvalue-1 eigenspace of K(0).
std::optional<SphericalFieldCertificate> spherical_field(const CurvatureProfile& profile,
                                                         double tol);

struct SturmCheck {
  bool holds = false;
  double margin = 0.0;             // min_s |X(s)| - cos(s)
  double min_norm_residual = 0.0;  // min_s |X|'' + |X| over smooth samples
  bool convexity_holds = false;    // min_norm_residual >= -10 h^2
  std::size_t skipped = 0;         // samples with |X| <= 1e-6
};

/// Comparison of the Jacobi field with X(0) = x0, X'(0) = transverse (orthogonal
/// to x0) against |Y(s)| = cos(s) on [0, horizon], horizon <= pi/2.
SturmCheck verify_sturm_bound(const CurvatureProfile& profile, const Tangent& x0, double horizon,
                              double tol, const std::optional<Tangent>& transverse = std::nullopt);

/// Number of conjugate points in (0, L) counted with multiplicity.
int fixed_endpoint_index(const JacobiPropagator& propagator, double length,
                         double rank_tol = kDefaultRankTol);

/// Frame coefficients of a field along the profile's trajectory.
std::vector<Eigen::VectorXd> frame_coefficients(const CurvatureProfile& profile,
                                                const std::vector<Tangent>& field);

/// Max over interior samples of |j'' + K j| using second differences.
double jacobi_residual(const CurvatureProfile& profile, const std::vector<Eigen::VectorXd>& field);

}  // namespace sprank
