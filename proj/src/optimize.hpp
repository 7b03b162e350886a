#pragma once

#include <functional>

#include <Eigen/Dense>

namespace sprank::detail {

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
};

/// Nelder-Mead descent (GSL nmsimplex2) capped at max_evals objective calls.
SimplexResult simplex_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& x0, double step, int max_evals,
                               double size_tol = 1e-12);

/// Golden-section search for a minimiser of a unimodal f on [a, b].
double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tol);

}  // namespace sprank::detail
