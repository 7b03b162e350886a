#include "sprank/sampling.hpp"

#include <random>

#include <boost/math/distributions/normal.hpp>

namespace sprank {

SobolStream::SobolStream(int dim, std::uint64_t seed)
    : dim_(dim), engine_(static_cast<std::size_t>(dim)), shift_(static_cast<std::size_t>(dim)) {
  std::mt19937_64 rng(seed);
  for (auto& s : shift_) s = static_cast<std::uint32_t>(rng() >> 32);
}

Eigen::VectorXd SobolStream::next_uniform() {
  Eigen::VectorXd u(dim_);
  for (int d = 0; d < dim_; ++d) {
    const std::uint32_t x = engine_() ^ shift_[static_cast<std::size_t>(d)];
    u[d] = (static_cast<double>(x) + 0.5) / 4294967296.0;
  }
  return u;
}

Eigen::VectorXd SobolStream::next_gaussian() {
  static const boost::math::normal_distribution<double> normal;
  Eigen::VectorXd g = next_uniform();
  for (int d = 0; d < dim_; ++d) g[d] = boost::math::quantile(normal, g[d]);
  return g;
}

}  // namespace sprank
