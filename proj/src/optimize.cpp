#include "optimize.hpp"

#include <cmath>
#include <limits>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace sprank::detail {

namespace {

struct Objective {
  const std::function<double(const Eigen::VectorXd&)>* f;
  Eigen::VectorXd x;
  int evaluations = 0;
};

double trampoline(const gsl_vector* v, void* params) {
  auto* obj = static_cast<Objective*>(params);
  for (Eigen::Index k = 0; k < obj->x.size(); ++k) obj->x[k] = gsl_vector_get(v, static_cast<std::size_t>(k));
  ++obj->evaluations;
  const double value = (*obj->f)(obj->x);
  return std::isfinite(value) ? value : std::numeric_limits<double>::max();
}

}  // namespace

SimplexResult simplex_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& x0, double step, int max_evals,
                               double size_tol) {
  const auto n = static_cast<std::size_t>(x0.size());
  Objective obj{&f, x0, 0};

  gsl_multimin_function fn;
  fn.n = n;
  fn.f = &trampoline;
  fn.params = &obj;

  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* steps = gsl_vector_alloc(n);
  for (std::size_t k = 0; k < n; ++k) {
    gsl_vector_set(x, k, x0[static_cast<Eigen::Index>(k)]);
    gsl_vector_set(steps, k, step);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &fn, x, steps);

  while (obj.evaluations < max_evals) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), size_tol) == GSL_SUCCESS) break;
  }

  SimplexResult result;
  result.x.resize(x0.size());
  for (std::size_t k = 0; k < n; ++k)
    result.x[static_cast<Eigen::Index>(k)] = gsl_vector_get(s->x, k);
  result.value = s->fval;
  result.evaluations = obj.evaluations;

  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(steps);
  gsl_vector_free(x);
  return result;
}

double golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                               double tol) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

}  // namespace sprank::detail
