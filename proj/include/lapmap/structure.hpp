#pragma once

#include "lapmap/interval_map.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lapmap {

/// Tent slope beta = q^(1/2^k) with q a positive rational. Squaring stays exact,
/// so the renormalization ladder beta -> beta^2 -> ... ends on a rational.
class TentSlope {
 public:
  explicit TentSlope(Rational radicand, unsigned root_depth = 0);

  /// "3/2", "1.3", "sqrt(2)", "sqrt(sqrt(3))".
  static TentSlope parse(std::string_view text);

  const Rational& radicand() const noexcept { return radicand_; }
  unsigned root_depth() const noexcept { return depth_; }
  bool is_rational() const noexcept { return depth_ == 0; }
  std::optional<Rational> rational() const;

  TentSlope squared() const;
  /// Sign of beta - x, decided exactly.
  int compare(const Rational& x) const;

  /// Value at the current Real precision, or exactly for Rational.
  template <class Scalar>
  Scalar value() const;
  double approx() const;

  std::string to_string() const;

 private:
  Rational radicand_;
  unsigned depth_;
};

template <>
Rational TentSlope::value<Rational>() const;
template <>
Real TentSlope::value<Real>() const;

/// u_beta(x) = beta x on [0,1/2], beta - beta x on [1/2,1].
template <class Scalar>
PiecewiseLinearMap<Scalar> tent(const Scalar& beta);

/// Smallest p >= 0 with beta^(2^(p+1)) > 2, decided exactly; beta must lie in (1,2].
std::size_t cycle_period_exponent(const TentSlope& beta);
/// Same, from 2^(p+1) log beta > log 2 in double precision.
std::size_t cycle_period_exponent(double beta);

/// Closed intervals B_0..B_(m-1) with f(B_(k-1)) inside B_k and f(B_(m-1)) inside B_0.
template <class Scalar>
struct Cycle {
  std::vector<Interval<Scalar>> components;
  std::size_t period() const noexcept { return components.size(); }
  bool contains(const Scalar& x) const;
};

template <class Scalar>
struct CycleCheck {
  bool valid = false;
  /// Some components meet at an endpoint (interiors still disjoint).
  bool touching = false;
  std::string failure;
};

/// Checks non-overlap and f(B_(k-1)) inside B_k on the exact images; `tol`
/// loosens the comparisons for floating scalars.
template <class Scalar>
CycleCheck<Scalar> validate_cycle(const PiecewiseLinearMap<Scalar>& f, const Cycle<Scalar>& C,
                                  const Scalar& tol = Scalar(0));

/// Transitive cycle of u_beta, beta in (1,2]. Scalar = Rational needs a rational beta.
/// Throws InvariantError if the constructed cycle fails validation.
template <class Scalar>
Cycle<Scalar> transitive_cycle(const TentSlope& beta);

/// u_beta^2 on [c,d] is conjugate to u_(beta^2) by h(x) = (d - x) / (d - c).
template <class Scalar>
struct Renormalization {
  Scalar beta;
  Scalar c;
  Scalar d;
  Scalar new_beta;
  Scalar rescale(const Scalar& x) const { return (d - x) / (d - c); }
  Scalar unscale(const Scalar& y) const { return d - (d - c) * y; }
  /// max over samples of |h(u_beta^2(x)) - u_(beta^2)(h(x))|.
  double defect = 0;
  std::size_t samples = 0;
};

/// beta must lie in (1, sqrt 2].
template <class Scalar>
Renormalization<Scalar> renormalize(const TentSlope& beta, std::size_t samples = 1001);

template <class Scalar>
struct PeriodicPoint {
  Scalar point;
  std::size_t period;  // minimal
};

template <class Scalar>
struct PeriodicSet {
  std::vector<PeriodicPoint<Scalar>> points;
  /// Laps of f^n lying on the diagonal: every point there is fixed by f^n.
  std::vector<Interval<Scalar>> fixed_intervals;
};

/// Fixed points of f^n by per-segment linear solves, with minimal periods.
template <class Scalar>
PeriodicSet<Scalar> periodic_points(const PiecewiseLinearMap<Scalar>& f, std::size_t n,
                                    const IterateLimits& limits = IterateLimits::from_environment());

/// Fraction of the grid a + (b-a) i/(G-1) whose orbit meets the cycle within max_steps.
template <class Scalar>
double escape_fraction(const PiecewiseLinearMap<Scalar>& f, const Cycle<Scalar>& C,
                       std::size_t grid_size = 10'000, std::size_t max_steps = 200);

}  // namespace lapmap
