#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <boost/random/sobol.hpp>

namespace sprank {

/// Sobol sequence with a seeded random digital shift: the same (dim, seed)
/// always yields the same stream, and distinct seeds yield decorrelated ones.
class SobolStream {
 public:
  SobolStream(int dim, std::uint64_t seed);

  int dim() const { return dim_; }
  /// Next point of (0, 1)^dim.
  Eigen::VectorXd next_uniform();
  /// Next point mapped through the standard normal quantile.
  Eigen::VectorXd next_gaussian();

 private:
  int dim_;
  boost::random::sobol_engine<std::uint32_t, 32> engine_;
  std::vector<std::uint32_t> shift_;
};

}  // namespace sprank
