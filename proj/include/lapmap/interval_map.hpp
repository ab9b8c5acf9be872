#pragma once

#include "lapmap/errors.hpp"
#include "lapmap/scalar.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace lapmap {

/// Non-trivial closed interval [lo, hi].
template <class Scalar>
class Interval {
 public:
  Interval(Scalar lo, Scalar hi);

  const Scalar& lo() const noexcept { return lo_; }
  const Scalar& hi() const noexcept { return hi_; }
  Scalar width() const { return hi_ - lo_; }
  bool contains(const Scalar& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& other) const { return lo_ <= other.lo_ && other.hi_ <= hi_; }
  bool interior_contains(const Scalar& x) const { return lo_ < x && x < hi_; }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  Scalar lo_;
  Scalar hi_;
};

/// Budget for exact iterates: the total number of knots a single iterate may hold.
struct IterateLimits {
  std::size_t max_knots = 10'000'000;

  /// Default cap, overridden by the LAPMAP_MEM_CAP environment variable.
  static IterateLimits from_environment();
};

/// Continuous piecewise linear self-map of [a,b], stored as knots and values.
///
/// Knots x_0 = a < x_1 < ... < x_K = b carry values f(x_k) in [a,b]; the map
/// interpolates linearly between them. Every segment has non-zero slope and no
/// interior knot is redundant (adjacent segments are never collinear), so the
/// knot list is canonical. Turning points are the knots at which the slope
/// changes sign; the monotone pieces between them are the laps.
template <class Scalar>
class PiecewiseLinearMap {
 public:
  using scalar_type = Scalar;

  /// Validating constructor. Throws InvariantError naming the first violated invariant.
  PiecewiseLinearMap(std::vector<Scalar> knots, std::vector<Scalar> values);

  /// Like the validating constructor, but silently merges collinear neighbours first.
  static PiecewiseLinearMap canonical(std::vector<Scalar> knots, std::vector<Scalar> values);

  static PiecewiseLinearMap identity(const Scalar& a, const Scalar& b);

  const Scalar& a() const noexcept { return knots_.front(); }
  const Scalar& b() const noexcept { return knots_.back(); }
  Interval<Scalar> domain() const { return {a(), b()}; }

  std::span<const Scalar> knots() const noexcept { return knots_; }
  std::span<const Scalar> values() const noexcept { return values_; }
  std::size_t segment_count() const noexcept { return knots_.size() - 1; }

  /// Interior knots where the direction of monotonicity switches, increasing.
  std::span<const Scalar> turning_points() const noexcept { return turning_; }
  /// +1 / -1 per lap, left to right; signs alternate.
  std::span<const int> lap_signs() const noexcept { return lap_signs_; }
  std::size_t lap_count() const noexcept { return lap_signs_.size(); }

  /// Number of turning points strictly below x, i.e. the lap whose interior
  /// contains x or whose right end is x.
  std::size_t lap_index(const Scalar& x) const;
  bool is_turning_point(const Scalar& x) const;

  Scalar eval(const Scalar& x) const;
  Scalar slope(std::size_t segment) const;

  /// Exact f(J) for a closed subinterval J of [a,b].
  Interval<Scalar> image(const Interval<Scalar>& J) const;

  /// Total variation: sum of |f(x_{k+1}) - f(x_k)| over segments.
  Scalar variation() const;

  /// The common |slope| when every segment has the same slope magnitude.
  std::optional<Scalar> uniform_slope() const;

  friend bool operator==(const PiecewiseLinearMap& lhs, const PiecewiseLinearMap& rhs) {
    return lhs.knots_ == rhs.knots_ && lhs.values_ == rhs.values_;
  }

 private:
  struct Trusted {};
  PiecewiseLinearMap(Trusted, std::vector<Scalar> knots, std::vector<Scalar> values);
  void index_laps();
  std::size_t segment_of(const Scalar& x) const;

  std::vector<Scalar> knots_;
  std::vector<Scalar> values_;
  std::vector<Scalar> turning_;
  std::vector<int> lap_signs_;
};

using RationalMap = PiecewiseLinearMap<Rational>;
using RealMap = PiecewiseLinearMap<Real>;

/// g o f. Both maps must live on the same interval.
template <class Scalar>
PiecewiseLinearMap<Scalar> compose(const PiecewiseLinearMap<Scalar>& g,
                                   const PiecewiseLinearMap<Scalar>& f,
                                   const IterateLimits& limits = IterateLimits::from_environment());

/// Knot count g o f would have before collinear merging; cheap upper bound used for the cap.
template <class Scalar>
std::size_t composed_knot_bound(const PiecewiseLinearMap<Scalar>& g,
                                const PiecewiseLinearMap<Scalar>& f);

/// f^n; f^0 is the identity on [a,b]. Throws ResourceError naming the first n over the cap.
template <class Scalar>
PiecewiseLinearMap<Scalar> iterate(const PiecewiseLinearMap<Scalar>& f, std::size_t n,
                                   const IterateLimits& limits = IterateLimits::from_environment());

/// f^0, f^1, ..., f^n. Stops early (returning the completed prefix) if the cap
/// is hit and `truncated` is non-null; otherwise rethrows.
template <class Scalar>
std::vector<PiecewiseLinearMap<Scalar>> iterate_chain(
    const PiecewiseLinearMap<Scalar>& f, std::size_t n,
    const IterateLimits& limits = IterateLimits::from_environment(), bool* truncated = nullptr);

/// Inverse of an increasing piecewise linear homeomorphism of [a,b].
template <class Scalar>
PiecewiseLinearMap<Scalar> inverse_homeomorphism(const PiecewiseLinearMap<Scalar>& phi);

template <class Scalar>
Scalar eval(const PiecewiseLinearMap<Scalar>& f, const Scalar& x) {
  return f.eval(x);
}

template <class Scalar>
std::size_t lap_count(const PiecewiseLinearMap<Scalar>& f) {
  return f.lap_count();
}

/// Laps of f meeting the interior of J: #(T(f) inside (lo,hi)) + 1.
template <class Scalar>
std::size_t lap_count_on(const PiecewiseLinearMap<Scalar>& f, const Interval<Scalar>& J);

template <class Scalar>
Scalar variation(const PiecewiseLinearMap<Scalar>& f) {
  return f.variation();
}

template <class Scalar>
std::vector<Scalar> turning_points(const PiecewiseLinearMap<Scalar>& f) {
  auto tp = f.turning_points();
  return {tp.begin(), tp.end()};
}

/// Double-precision evaluation of a map, for residual checks on sampled data.
template <class Scalar>
double eval_approx(const PiecewiseLinearMap<Scalar>& f, double x);

}  // namespace lapmap
