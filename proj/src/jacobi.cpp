#include "sprank/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kernels.hpp"
#include "optimize.hpp"

namespace sprank {

namespace {

using detail::Vec;
using Mat = Eigen::MatrixXd;

// Lagrange interpolation of samples[j0 .. j0+count) at t.
Mat lagrange(std::span<const double> ts, const std::vector<Mat>& samples, std::size_t j0,
             std::size_t count, double t) {
  Mat out = Mat::Zero(samples[j0].rows(), samples[j0].cols());
  for (std::size_t a = j0; a < j0 + count; ++a) {
    double w = 1.0;
    for (std::size_t b = j0; b < j0 + count; ++b)
      if (b != a) w *= (t - ts[b]) / (ts[a] - ts[b]);
    out += w * samples[a];
  }
  return out;
}

Mat interpolate_curvature(std::span<const double> ts, const std::vector<Mat>& k, std::size_t i,
                          double t) {
  const std::size_t n = ts.size();
  if (n < 4) return lagrange(ts, k, 0, n, t);
  const std::size_t j0 = std::min(i == 0 ? 0 : i - 1, n - 4);
  return lagrange(ts, k, j0, 4, t);
}

std::size_t locate(std::span<const double> ts, double t) {
  auto it = std::upper_bound(ts.begin(), ts.end(), t);
  std::size_t i = it == ts.begin() ? 0 : static_cast<std::size_t>(it - ts.begin()) - 1;
  return std::min(i, ts.size() - 2);
}

template <class T>
T hermite(double s, double h, const T& y0, const T& y1, const T& d0, const T& d1) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * h * d1;
}

double smallest_sv(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double largest_sv(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

double second_difference(double fm, double f0, double fp, double h1, double h2) {
  return 2.0 * ((fp - f0) / h2 - (f0 - fm) / h1) / (h1 + h2);
}

}  // namespace

Eigen::MatrixXd CurvatureProfile::curvature_at(double t) const {
  return interpolate_curvature(times(), curvature, locate(times(), t), t);
}

CurvatureProfile curvature_profile(const Trajectory& trajectory,
                                   const std::vector<ParallelField>& frame) {
  const ManifoldModel& m = trajectory.model();
  const auto n = static_cast<Eigen::Index>(frame.size());
  if (n != m.dim() - 1) throw DomainError("frame must have dim - 1 fields");
  for (const auto& f : frame)
    if (f.vectors.size() != trajectory.size())
      throw DomainError("frame field is not sampled on the trajectory");

  const Vec& v0 = trajectory.state(0).velocity.components;
  const double speed2 = detail::inner(m, v0, v0);
  for (Eigen::Index a = 0; a < n; ++a) {
    const Vec& ea = frame[static_cast<std::size_t>(a)].vectors[0].components;
    if (std::abs(detail::inner(m, ea, v0)) > 1e-8 * std::sqrt(speed2))
      throw DomainError("frame is not normal to the velocity");
    for (Eigen::Index b = 0; b < n; ++b) {
      const double expect = a == b ? 1.0 : 0.0;
      const double g = detail::inner(m, ea, frame[static_cast<std::size_t>(b)].vectors[0].components);
      if (std::abs(g - expect) > 1e-8) throw DomainError("frame is not orthonormal");
    }
  }

  CurvatureProfile profile{trajectory, frame, {}};
  profile.curvature.resize(trajectory.size());
  std::vector<Vec> r(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const Vec& v = trajectory.state(i).velocity.components;
    for (Eigen::Index a = 0; a < n; ++a)
      r[static_cast<std::size_t>(a)] =
          detail::curvature(m, frame[static_cast<std::size_t>(a)].vectors[i].components, v, v);
    Mat k(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b)
        k(a, b) = detail::inner(m, r[static_cast<std::size_t>(a)],
                                frame[static_cast<std::size_t>(b)].vectors[i].components);
    profile.curvature[i] = std::move(k);
  }
  return profile;
}

CurvatureProfile curvature_profile(const Trajectory& trajectory) {
  return curvature_profile(trajectory, normal_frame(trajectory));
}

JacobiPropagator::JacobiPropagator(std::vector<double> times, std::vector<Eigen::MatrixXd> value,
                                   std::vector<Eigen::MatrixXd> derivative,
                                   std::vector<Eigen::MatrixXd> curvature)
    : times_(std::move(times)),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      curvature_(std::move(curvature)) {}

std::size_t JacobiPropagator::interval(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(end()));
  if (t < start() - slack || t > end() + slack)
    throw ParameterError("time outside the propagator domain");
  return locate(times_, t);
}

Eigen::MatrixXd JacobiPropagator::value_at(double t) const {
  const std::size_t i = interval(t);
  const double h = times_[i + 1] - times_[i];
  return hermite<Mat>((t - times_[i]) / h, h, value_[i], value_[i + 1], derivative_[i],
                      derivative_[i + 1]);
}

Eigen::MatrixXd JacobiPropagator::derivative_at(double t) const {
  const std::size_t i = interval(t);
  const double h = times_[i + 1] - times_[i];
  const Mat a0 = -curvature_[i] * value_[i];
  const Mat a1 = -curvature_[i + 1] * value_[i + 1];
  return hermite<Mat>((t - times_[i]) / h, h, derivative_[i], derivative_[i + 1], a0, a1);
}

JacobiPropagator jacobi_solve(const CurvatureProfile& profile, const Eigen::MatrixXd& x0,
                              const Eigen::MatrixXd& xp0) {
  const auto n = static_cast<Eigen::Index>(profile.frame_dim());
  if (x0.rows() != n || xp0.rows() != n || x0.cols() != xp0.cols())
    throw ParameterError("initial data does not match the frame dimension");
  const auto ts = profile.times();
  const auto& k = profile.curvature;

  std::vector<Mat> value{x0};
  std::vector<Mat> derivative{xp0};
  value.reserve(ts.size());
  derivative.reserve(ts.size());
  Mat x = x0;
  Mat p = xp0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double h = ts[i + 1] - ts[i];
    const Mat km = interpolate_curvature(ts, k, i, ts[i] + 0.5 * h);
    const Mat k1x = p;
    const Mat k1p = -k[i] * x;
    const Mat k2x = p + 0.5 * h * k1p;
    const Mat k2p = -km * (x + 0.5 * h * k1x);
    const Mat k3x = p + 0.5 * h * k2p;
    const Mat k3p = -km * (x + 0.5 * h * k2x);
    const Mat k4x = p + h * k3p;
    const Mat k4p = -k[i + 1] * (x + h * k3x);
    x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    p += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    value.push_back(x);
    derivative.push_back(p);
  }
  return JacobiPropagator(std::vector<double>(ts.begin(), ts.end()), std::move(value),
                          std::move(derivative), k);
}

JacobiPropagator jacobi_propagate(const CurvatureProfile& profile) {
  const auto n = static_cast<Eigen::Index>(profile.frame_dim());
  return jacobi_solve(profile, Mat::Zero(n, n), Mat::Identity(n, n));
}

std::vector<double> smallest_singular_values(const JacobiPropagator& propagator) {
  std::vector<double> out(propagator.size());
  for (std::size_t i = 0; i < propagator.size(); ++i) out[i] = smallest_sv(propagator.M(i));
  return out;
}

std::vector<ConjugateEvent> conjugate_points(const JacobiPropagator& propagator, double t0,
                                             double t1, double rank_tol) {
  if (!(t1 > t0)) throw ParameterError("empty conjugate-point window");
  if (!(rank_tol > 0.0)) throw ParameterError("rank tolerance must be positive");
  const double slack = 1e-12 * std::max(1.0, std::abs(propagator.end()));
  if (t0 < propagator.start() - slack || t1 > propagator.end() + slack)
    throw ParameterError("window outside the propagator domain");

  const auto ts = propagator.times();
  const std::size_t n = ts.size();
  const std::vector<double> sigma = smallest_singular_values(propagator);
  const int frame_dim = static_cast<int>(propagator.M(0).cols());

  std::vector<ConjugateEvent> events;
  for (std::size_t i = 1; i < n; ++i) {
    if (ts[i] <= t0 - (ts[i] - ts[i - 1]) || ts[i] > t1 + (i + 1 < n ? ts[i + 1] - ts[i] : 0.0))
      continue;
    const double left = sigma[i - 1];
    const double right = i + 1 < n ? sigma[i + 1] : std::numeric_limits<double>::infinity();
    if (!(sigma[i] < left && sigma[i] <= right)) continue;
    const double h = std::max(ts[i] - ts[i - 1], i + 1 < n ? ts[i + 1] - ts[i] : 0.0);
    if (sigma[i] > 4.0 * h * largest_sv(propagator.Mp(i))) continue;

    const double a = ts[i - 1];
    const double b = i + 1 < n ? ts[i + 1] : ts[i];
    const double t = detail::golden_section_minimize(
        [&](double s) { return smallest_sv(propagator.value_at(s)); }, a, b, 1e-8);
    if (t <= t0 || t > t1) continue;

    Eigen::JacobiSVD<Mat> svd(propagator.value_at(t));
    const double scale = largest_sv(propagator.derivative_at(t));
    int multiplicity = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
      if (svd.singularValues()(k) < rank_tol * scale) ++multiplicity;
    if (multiplicity > 0) events.push_back({t, multiplicity});
  }

  std::sort(events.begin(), events.end(),
            [](const ConjugateEvent& x, const ConjugateEvent& y) { return x.time < y.time; });
  std::vector<ConjugateEvent> merged;
  for (const auto& e : events) {
    if (!merged.empty() && e.time - merged.back().time < kEventMergeGap) {
      merged.back().multiplicity = std::min(frame_dim, merged.back().multiplicity + e.multiplicity);
    } else {
      merged.push_back(e);
    }
  }
  return merged;
}

int fixed_endpoint_index(const JacobiPropagator& propagator, double length, double rank_tol) {
  if (!(length > propagator.start()) || length > propagator.end() + 1e-12)
    throw ParameterError("segment length outside the propagator domain");
  const double reach = std::min(propagator.end(), length + 1e-3);
  int index = 0;
  for (const auto& e : conjugate_points(propagator, propagator.start(), reach, rank_tol)) {
    if (std::abs(e.time - length) <= 1e-6)
      throw AmbiguousEndpointError("segment endpoint is a conjugate point");
    if (e.time < length) index += e.multiplicity;
  }
  return index;
}

std::optional<SphericalFieldCertificate> spherical_field(const CurvatureProfile& profile,
                                                         double tol) {
  const auto n = static_cast<Eigen::Index>(profile.frame_dim());
  if (n == 0 || profile.size() == 0) return std::nullopt;
  const Mat k0 = 0.5 * (profile.curvature[0] + profile.curvature[0].transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(k0);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index a = 0; a < n; ++a)
    if (std::abs(eig.eigenvalues()(a) - 1.0) <= tol) keep.push_back(a);
  if (keep.empty()) return std::nullopt;

  Mat basis(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    basis.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]);

  // With sec <= 1, I - K(t) is positive semi-definite, so the direction of the
  // eigenspace that is least curved away from 1 over the whole geodesic is the
  // bottom eigenvector of the accumulated defect.
  Mat defect = Mat::Zero(basis.cols(), basis.cols());
  for (const Mat& k : profile.curvature)
    defect += basis.transpose() * (Mat::Identity(n, n) - 0.5 * (k + k.transpose())) * basis;
  Eigen::SelfAdjointEigenSolver<Mat> reduced(defect);
  Vec e = basis * reduced.eigenvectors().col(0);
  e.normalize();

  double deviation = 0.0;
  for (const Mat& k : profile.curvature)
    deviation = std::max(deviation, std::abs(e.dot(k * e) - 1.0));
  if (deviation > tol) return std::nullopt;

  SphericalFieldCertificate cert;
  cert.coefficients = e;
  cert.deviation = deviation;
  cert.field.trajectory = profile.trajectory;
  cert.field.vectors.reserve(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    Vec v = Vec::Zero(profile.frame[0].vectors[i].components.size());
    for (Eigen::Index a = 0; a < n; ++a)
      v += e[a] * profile.frame[static_cast<std::size_t>(a)].vectors[i].components;
    cert.field.vectors.push_back(Tangent{profile.trajectory.state(i).point, v});
  }
  return cert;
}

std::vector<Eigen::VectorXd> frame_coefficients(const CurvatureProfile& profile,
                                                const std::vector<Tangent>& field) {
  if (field.size() != profile.size()) throw DomainError("field is not sampled on the profile");
  const ManifoldModel& m = profile.trajectory.model();
  const auto n = static_cast<Eigen::Index>(profile.frame_dim());
  std::vector<Vec> out(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    out[i].resize(n);
    for (Eigen::Index a = 0; a < n; ++a)
      out[i][a] = detail::inner(m, field[i].components,
                                profile.frame[static_cast<std::size_t>(a)].vectors[i].components);
  }
  return out;
}

double jacobi_residual(const CurvatureProfile& profile, const std::vector<Eigen::VectorXd>& field) {
  if (field.size() != profile.size()) throw DomainError("field is not sampled on the profile");
  const auto ts = profile.times();
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < field.size(); ++i) {
    const double h1 = ts[i] - ts[i - 1];
    const double h2 = ts[i + 1] - ts[i];
    const Vec second = 2.0 * ((field[i + 1] - field[i]) / h2 - (field[i] - field[i - 1]) / h1) /
                       (h1 + h2);
    worst = std::max(worst, (second + profile.curvature[i] * field[i]).norm());
  }
  return worst;
}

SturmCheck verify_sturm_bound(const CurvatureProfile& profile, const Tangent& x0, double horizon,
                              double tol, const std::optional<Tangent>& transverse) {
  if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
  if (horizon > std::numbers::pi / 2 + 1e-12)
    throw ParameterError("comparison only holds on [0, pi/2]");
  if (profile.trajectory.horizon() < horizon - 1e-12)
    throw ParameterError("profile is shorter than the requested horizon");

  const ManifoldModel& m = profile.trajectory.model();
  const GeodesicState& start = profile.trajectory.state(0);
  validate_tangent(m, x0);
  if ((x0.base.coords - start.point.coords).lpNorm<Eigen::Infinity>() > kPointTolerance)
    throw DomainError("initial vector is not based at the trajectory start");
  const Vec& v = start.velocity.components;
  const double speed = std::sqrt(detail::inner(m, v, v));
  if (std::abs(std::sqrt(detail::inner(m, x0.components, x0.components)) - 1.0) > 1e-8)
    throw ParameterError("initial vector must be unit");
  if (std::abs(detail::inner(m, x0.components, v)) > 1e-8 * speed)
    throw ParameterError("initial vector must be normal to the geodesic");

  const auto n = static_cast<Eigen::Index>(profile.frame_dim());
  auto coeffs = [&](const Vec& c) {
    Vec out(n);
    for (Eigen::Index a = 0; a < n; ++a)
      out[a] = detail::inner(m, c, profile.frame[static_cast<std::size_t>(a)].vectors[0].components);
    return out;
  };
  const Vec c0 = coeffs(x0.components);
  Vec d = Vec::Zero(n);
  if (transverse) {
    validate_tangent(m, *transverse);
    const double dn = std::sqrt(detail::inner(m, transverse->components, transverse->components));
    if (std::abs(detail::inner(m, transverse->components, x0.components)) > 1e-10 * std::max(1.0, dn))
      throw ParameterError("initial derivative must be orthogonal to the initial vector");
    if (std::abs(detail::inner(m, transverse->components, v)) > 1e-8 * std::max(1.0, dn) * speed)
      throw ParameterError("initial derivative must be normal to the geodesic");
    d = coeffs(transverse->components);
  }

  const JacobiPropagator sol = jacobi_solve(profile, c0, d);
  const auto ts = profile.times();
  std::size_t last = 0;
  while (last + 1 < ts.size() && ts[last + 1] <= horizon + 1e-12) ++last;

  std::vector<double> norm(last + 1);
  for (std::size_t i = 0; i <= last; ++i) norm[i] = sol.M(i).norm();

  SturmCheck out;
  out.holds = true;
  out.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= last; ++i) {
    const double gap = norm[i] - std::cos(ts[i]);
    out.margin = std::min(out.margin, gap);
    if (gap < -tol) out.holds = false;
  }

  out.min_norm_residual = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 <= last; ++i) {
    if (norm[i - 1] <= 1e-6 || norm[i] <= 1e-6 || norm[i + 1] <= 1e-6) {
      ++out.skipped;
      continue;
    }
    const double f2 = second_difference(norm[i - 1], norm[i], norm[i + 1], ts[i] - ts[i - 1],
                                        ts[i + 1] - ts[i]);
    out.min_norm_residual = std::min(out.min_norm_residual, f2 + norm[i]);
  }
  const double h = profile.trajectory.step();
  out.convexity_holds = out.min_norm_residual >= -10.0 * h * h;
  return out;
}

}  // namespace sprank
