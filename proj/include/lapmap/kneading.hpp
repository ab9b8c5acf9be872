#pragma once

#include "lapmap/interval_map.hpp"
#include "lapmap/lap_table.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lapmap {

/// Exponential growth rate of lap counts: h, beta = e^h, r = e^-h.
struct GrowthRate {
  double h = 0;
  double beta = 1;
  double r = 1;
  /// True when read off a uniform slope rather than estimated from lap counts.
  bool exact = false;
};

struct SeriesConfig {
  /// Truncation order N; unset picks the smallest N meeting the tail tolerance at each t.
  std::optional<std::size_t> terms;
  /// Increasing values in (0, r); empty means t_k = r (1 - 2^-k), k = 1..schedule_length.
  std::vector<double> t_schedule;
  double tail_tolerance = 1e-6;
  std::size_t schedule_length = 8;
  /// Largest N the automatic choice may reach.
  std::size_t max_terms = 200'000;
  /// Rows used to estimate h when f is not uniformly piecewise linear.
  std::size_t growth_horizon = 4096;

  /// Throws ConfigError on out-of-range knobs; checks the schedule against r.
  void validate(double r) const;
  std::vector<double> schedule(double r) const;
};

/// One truncated series value with its absolute tail bound.
struct SeriesValue {
  double value = 0;
  double tail = 0;
};

struct RatioValue {
  double value = 0;     // clamped to [0,1]
  double raw = 0;       // L_N(J,t) / L_N(I,t) before clamping
  double tail_rel = 0;  // tail bound / L_N(I,t)
};

/// Lap table plus growth rate for one map; the entry point for series work.
template <class Scalar>
class Kneading {
 public:
  /// f must outlive this object.
  explicit Kneading(const PiecewiseLinearMap<Scalar>& f, std::size_t growth_horizon = 4096);

  const PiecewiseLinearMap<Scalar>& map() const noexcept { return *f_; }
  const GrowthRate& growth();
  LapTable<Scalar>& table() noexcept { return table_; }

  /// Throws DomainError unless 0 < t < r.
  LapSeries<Scalar> series(double t, std::size_t terms);
  /// Smallest N (after a log-scale guess) with tail / L_N(I,t) <= tolerance.
  std::size_t auto_terms(double t, double tolerance, std::size_t max_terms);

 private:
  const PiecewiseLinearMap<Scalar>* f_;
  LapTable<Scalar> table_;
  std::size_t horizon_;
  std::optional<GrowthRate> growth_;
};

/// Growth rate from the uniform slope when there is one, else from lap counts
/// over a long horizon H: (log l(f^H) - log l(f^(H/2))) / (H/2).
template <class Scalar>
GrowthRate estimate_growth(const PiecewiseLinearMap<Scalar>& f, LapTable<Scalar>& table,
                           std::size_t horizon = 4096);

/// Partial sum sum_{n<=N} l(f^n|J) t^n with the bound on the omitted terms.
template <class Scalar>
SeriesValue series_L(const PiecewiseLinearMap<Scalar>& f, const Interval<Scalar>& J, double t,
                     std::size_t terms);

/// L_N(J,t) / L_N(I,t).
template <class Scalar>
RatioValue lambda_ratio(const PiecewiseLinearMap<Scalar>& f, const Interval<Scalar>& J, double t,
                        std::size_t terms);

/// Samples of the increasing surjection pi : [a,b] -> [0,1].
struct PiSamples {
  std::vector<double> x;
  /// Extrapolated to t = r along the schedule, then clamped (cumulative max, [0,1]).
  std::vector<double> pi;
  /// pi at f(x), same extrapolation and clamping to [0,1].
  std::vector<double> pi_image;
  /// Ratio at the last scheduled t, unclamped.
  std::vector<double> last_t;
  /// Largest decrease removed by the cumulative max, plus any excursion outside [0,1].
  double violation = 0;
  double tail_rel = 0;  // worst relative tail over the schedule
  std::vector<double> schedule;
  std::vector<std::size_t> terms;
  GrowthRate growth;
};

/// Ratios at each scheduled t are extrapolated linearly in 1/L_N(I,t), the
/// leading behaviour of L(J,t)/L(I,t) as t approaches r.
template <class Scalar>
PiSamples build_pi(const PiecewiseLinearMap<Scalar>& f, const std::vector<Scalar>& grid,
                   const SeriesConfig& cfg = {});

struct Plateau {
  double lo = 0;
  double hi = 0;
  std::size_t first = 0;  // grid indices
  std::size_t last = 0;
};

/// Maximal runs of at least three grid points over which psi rises by at most tol.
std::vector<Plateau> detect_plateaus(const std::vector<double>& x, const std::vector<double>& psi,
                                     double tol);
/// Default tolerance: a tenth of the grid spacing of [lo,hi].
double default_plateau_tolerance(double lo, double hi, std::size_t grid_size);

struct Reduction {
  std::vector<double> x;
  std::vector<double> psi;  // gamma(pi(x)), gamma(t) = a + (b-a) t
  /// Turning data of f pushed through psi, rounded to 12 digits.
  RationalMap g = RationalMap::identity(Rational(0), Rational(1));
  GrowthRate growth;
  double residual = 0;  // max over the grid of |psi(f(x)) - g(psi(x))|
  /// |pi(f(d_k+1)) - pi(f(d_k))| - beta |pi(d_k+1) - pi(d_k)| per lap of f.
  std::vector<double> slope_defects;
  std::size_t collapsed_laps = 0;
  std::vector<Plateau> plateaus;
  double violation = 0;
  double tail_rel = 0;
  std::vector<double> schedule;
  std::vector<std::size_t> terms;
};

template <class Scalar>
Reduction build_reduction(const PiecewiseLinearMap<Scalar>& f, const std::vector<Scalar>& grid,
                          const SeriesConfig& cfg = {});

/// x_i = a + (b-a) i / (n-1), i = 0..n-1.
template <class Scalar>
std::vector<Scalar> uniform_grid(const Scalar& a, const Scalar& b, std::size_t n);

}  // namespace lapmap
