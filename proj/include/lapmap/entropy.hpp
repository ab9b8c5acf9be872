#pragma once

#include "lapmap/interval_map.hpp"

#include <cstddef>
#include <vector>

namespace lapmap {

template <class Scalar>
struct EntropyRow {
  std::size_t n;
  std::size_t laps;        // l(f^n), exact
  double log_laps_over_n;  // n^-1 log l(f^n)
  Scalar variation;        // Var(f^n), exact for rational maps
  double log_var_over_n;   // n^-1 log Var(f^n)
};

/// Lap-count and variation columns for f^1..f^N with the derived estimates.
template <class Scalar>
struct EntropySequence {
  std::vector<EntropyRow<Scalar>> rows;
  /// min over rows of n^-1 log l(f^n): an upper bound on h(f) (subadditivity).
  double h_upper = 0;
  /// log(l(f^N) / l(f^(N-1))), or N^-1 log l(f^N) when the ratio is unusable.
  double h_point = 0;
  /// log(Var(f^N) / Var(f^(N-1))); exact for uniformly piecewise linear maps.
  double h_variation = 0;
  double beta = 1;  // exp(h_point)
  double r = 1;     // exp(-h_point)
  /// Variation keeps growing exponentially (h_variation above 1e-9).
  bool variation_growth = false;
  /// Iterate cap reached before max_n; rows hold the completed prefix.
  bool truncated = false;
  std::size_t requested_n = 0;
};

/// Builds f^1..f^max_n exactly and tabulates laps and variation.
template <class Scalar>
EntropySequence<Scalar> entropy_scan(const PiecewiseLinearMap<Scalar>& f, std::size_t max_n,
                                     const IterateLimits& limits = IterateLimits::from_environment());

/// h of a uniformly piecewise linear map with slope beta: log(beta) if beta > 1, else 0.
double entropy_of_uniform_pl(double beta);

}  // namespace lapmap
