// Copyright (c) the qomega authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef QOMEGA_COMMON_HPP
#define QOMEGA_COMMON_HPP

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qomega {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

enum class ErrorKind {
  invalid_parameter,
  unsupported_shape,
  assembly,
  partial_result,
  bracket,
  convergence,
  line_search,
  singular_jacobian,
  insufficient_window,
  unsupported_model,
  axis_undetermined,
  config,
  unknown_key,
  parse,
  io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

/// Volume of the unit ball in R^N.
inline double unit_ball_volume(int dim) {
  return std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

/// Surface measure of the unit sphere S^{N-1}.
inline double unit_sphere_area(int dim) { return dim * unit_ball_volume(dim); }

/// 2N/(N-2).
inline double critical_exponent(int dim) { return 2.0 * dim / (dim - 2.0); }

/// (2N-2)/(N-2), where the decay of positive solutions picks up a log factor.
inline double serrin_exponent(int dim) { return (2.0 * dim - 2.0) / (dim - 2.0); }

/// Deterministic counter-based generator: every (seed, stream, counter)
/// triple maps to a fixed 64-bit value, independent of call order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() { return mix(seed_ ^ mix(stream_ + 0x9e3779b97f4a7c15ULL * ++counter_)); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  VectorXd normal_vector(Index n) {
    VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace qomega

#endif  // QOMEGA_COMMON_HPP
