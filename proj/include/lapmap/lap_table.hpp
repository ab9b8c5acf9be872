#pragma once

#include "lapmap/interval_map.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lapmap {

/// Forward orbit y_0, y_1, ... of a point under f, computed exactly on demand.
///
/// Only the symbolic data the lap counter needs is kept per step: the lap
/// index, whether the point is the left endpoint a, whether it lies in (a,b),
/// and whether it is a turning point of f.
template <class Scalar>
class Orbit {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Orbit(const PiecewiseLinearMap<Scalar>& f, Scalar start);

  /// Makes y_0..y_index available.
  void extend_to(std::size_t index);
  std::size_t length() const noexcept { return laps_.size(); }

  const Scalar& start() const noexcept { return start_; }
  std::uint32_t lap(std::size_t k) const { return laps_[k]; }
  bool at_left_end(std::size_t k) const { return (flags_[k] & kLeftEnd) != 0; }
  bool interior(std::size_t k) const { return (flags_[k] & kInterior) != 0; }

  /// Least i >= 0 with y_{k+i} a turning point, among computed points; npos if none seen.
  std::size_t hit_time(std::size_t k) const;

 private:
  static constexpr std::uint8_t kLeftEnd = 1;
  static constexpr std::uint8_t kInterior = 2;
  void push(const Scalar& y);

  const PiecewiseLinearMap<Scalar>* f_;
  Scalar start_;
  Scalar current_;
  std::vector<std::uint32_t> laps_;
  std::vector<std::uint8_t> flags_;
  std::vector<std::size_t> hits_;
};

/// Lap counts of high iterates without building them.
///
/// Write F_m(y) = #(T(f^m) inside (a,y)). Splitting [a,y] at the turning points
/// of f and pushing each monotone piece forward gives
///
///   F_m(y) = j + s_j F_{m-1}(f(y)) - [s_j < 0] tau_{m-1}(f(y)) + K_{m-1}(j),
///
/// where j is the lap of y, s_j its orientation, tau_k(u) = [u in T(f^k)], and
/// K_k(j) depends only on F_k and tau_k at the turning values f(a), f(d_i).
/// Unrolling along the orbit of y turns every count into a signed sum whose
/// depth-k terms are damped by l(f^(m-k)) / l(f^m); the table therefore stores
/// the turning-value counts and K_m(j) normalised by l(f^m), together with
/// log l(f^m), so orders in the thousands stay within double range.
template <class Scalar>
class LapTable {
 public:
  explicit LapTable(const PiecewiseLinearMap<Scalar>& f);

  /// Ensures rows 0..max_order exist.
  void extend(std::size_t max_order);
  std::size_t max_order() const noexcept { return log_laps_.size() - 1; }

  const PiecewiseLinearMap<Scalar>& map() const noexcept { return *f_; }
  std::size_t turning_count() const noexcept { return f_->turning_points().size(); }

  double log_laps(std::size_t m) const { return log_laps_[m]; }
  /// K_m(j) / l(f^m).
  double constant(std::size_t m, std::size_t j) const { return constants_[m * (turning_count() + 1) + j]; }

  /// F_m(y_offset) for an orbit point, as a double (exact while below 2^53).
  double count_below(Orbit<Scalar>& orbit, std::size_t offset, std::size_t m) const;

 private:
  // F_m(y_offset) / l(f^(m-1)).
  double unrolled(Orbit<Scalar>& orbit, std::size_t offset, std::size_t m) const;
  void add_row();

  const PiecewiseLinearMap<Scalar>* f_;
  mutable std::vector<Orbit<Scalar>> tracked_;  // f(a), f(d_1), ..., f(d_p), then b
  std::vector<double> log_laps_;
  std::vector<double> constants_;
  std::size_t exact_rows_ = 0;  // rows below 2^60 laps: orbits followed to full depth
};

/// Truncated generating functions L_N(J,t) = sum_{n<=N} l(f^n|J) t^n for one t.
template <class Scalar>
class LapSeries {
 public:
  /// `table` must hold at least `terms` rows and outlive the series.
  LapSeries(const LapTable<Scalar>& table, double t, std::size_t terms);

  double t() const noexcept { return t_; }
  std::size_t terms() const noexcept { return terms_; }

  /// sum_{n<=N} t^n.
  double geometric() const { return geo_.back(); }
  /// L_N(I,t).
  double whole() const noexcept { return whole_; }

  /// L_N([a,y],t) with y the orbit point at `offset`; y must exceed a.
  double prefix(Orbit<Scalar>& orbit, std::size_t offset = 0) const;
  /// L_N([lo,hi],t) with both ends given as orbit points.
  double between(Orbit<Scalar>& lo, std::size_t lo_offset, Orbit<Scalar>& hi,
                 std::size_t hi_offset) const;
  double of(const Interval<Scalar>& J) const;

  /// (beta t)^(N+1) / (1 - beta t), scaled up by l(f^N) / beta^N when that exceeds one.
  double tail_bound(double beta) const;

 private:
  double counting(Orbit<Scalar>& orbit, std::size_t offset) const;
  double tau_sum(Orbit<Scalar>& orbit, std::size_t k, std::size_t max_order) const;

  const LapTable<Scalar>* table_;
  double t_;
  std::size_t terms_;
  std::size_t depth_limit_;
  std::vector<double> geo_;
  std::vector<double> prefix_constants_;  // (N+1) x (p+1), sum_{m<=M} t^m K_m(j)
  double whole_ = 0;
};

}  // namespace lapmap
