#include "lapmap/lap_table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lapmap {

template <class Scalar>
Orbit<Scalar>::Orbit(const PiecewiseLinearMap<Scalar>& f, Scalar start)
    : f_(&f), start_(std::move(start)), current_(start_) {
  if (!f.domain().contains(start_)) throw DomainError("orbit start outside the map's interval");
  push(current_);
}

template <class Scalar>
void Orbit<Scalar>::push(const Scalar& y) {
  std::uint8_t flags = 0;
  if (y == f_->a()) flags |= kLeftEnd;
  if (f_->domain().interior_contains(y)) flags |= kInterior;
  if (f_->is_turning_point(y)) hits_.push_back(laps_.size());
  laps_.push_back(static_cast<std::uint32_t>(f_->lap_index(y)));
  flags_.push_back(flags);
}

template <class Scalar>
void Orbit<Scalar>::extend_to(std::size_t index) {
  while (laps_.size() <= index) {
    current_ = f_->eval(current_);
    push(current_);
  }
}

template <class Scalar>
std::size_t Orbit<Scalar>::hit_time(std::size_t k) const {
  auto it = std::lower_bound(hits_.begin(), hits_.end(), k);
  return it == hits_.end() ? npos : *it - k;
}

namespace {

template <class Scalar>
bool hits_before(const Orbit<Scalar>& o, std::size_t k, std::size_t order) {
  if (!o.interior(k)) return false;
  const auto h = o.hit_time(k);
  return h != Orbit<Scalar>::npos && h < order;
}

constexpr double kRowCutoff = 1e-18;
constexpr double kSeriesCutoff = 1e-17;

}  // namespace

template <class Scalar>
LapTable<Scalar>::LapTable(const PiecewiseLinearMap<Scalar>& f) : f_(&f) {
  tracked_.emplace_back(f, f.eval(f.a()));
  for (const auto& d : f.turning_points()) tracked_.emplace_back(f, f.eval(d));
  tracked_.emplace_back(f, f.b());
  log_laps_.push_back(0.0);
  constants_.assign(turning_count() + 1, 0.0);
}

template <class Scalar>
double LapTable<Scalar>::unrolled(Orbit<Scalar>& orbit, std::size_t offset, std::size_t m) const {
  const auto signs = f_->lap_signs();
  const std::size_t p1 = turning_count() + 1;
  const double top = log_laps_[m - 1];
  const double unit = std::exp(-top);
  const double scale = static_cast<double>(m) * static_cast<double>(p1 + 2);
  if (m <= exact_rows_) orbit.extend_to(offset + m);
  double value = 0;
  int sign = 1;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t idx = offset + k;
    orbit.extend_to(idx + 1);
    if (orbit.at_left_end(idx)) break;
    const std::size_t j = orbit.lap(idx);
    const int s = signs[j];
    const std::size_t rest = m - k - 1;
    const double damp = std::exp(log_laps_[rest] - top);
    double term = static_cast<double>(j) * unit + constants_[rest * p1 + j] * damp;
    if (s < 0 && hits_before(orbit, idx + 1, rest)) term -= unit;
    value += sign * term;
    sign *= s;
    if (damp * scale < kRowCutoff) break;
  }
  return value;
}

template <class Scalar>
double LapTable<Scalar>::count_below(Orbit<Scalar>& orbit, std::size_t offset,
                                     std::size_t m) const {
  if (m == 0) return 0;
  return unrolled(orbit, offset, m) * std::exp(log_laps_[m - 1]);
}

template <class Scalar>
void LapTable<Scalar>::add_row() {
  const std::size_t m = log_laps_.size();
  const std::size_t p = turning_count();
  const auto signs = f_->lap_signs();
  const double unit = std::exp(-log_laps_[m - 1]);

  std::vector<double> counts(p + 2);
  for (std::size_t i = 0; i < tracked_.size(); ++i) counts[i] = unrolled(tracked_[i], 0, m);
  const double growth = counts[p + 1] + unit;  // l(f^m) / l(f^(m-1))
  log_laps_.push_back(log_laps_[m - 1] + std::log(growth));
  for (auto& c : counts) c /= growth;
  const double unit_m = unit / growth;

  auto tau = [&](std::size_t i) {
    tracked_[i].extend_to(m);
    return hits_before(tracked_[i], 0, m) ? 1.0 : 0.0;
  };
  std::vector<double> hit(p + 1);
  for (std::size_t i = 0; i <= p; ++i) hit[i] = tau(i);

  double flow = -signs[0] * counts[0];
  double hit_sum = 0;
  for (std::size_t j = 0; j <= p; ++j) {
    if (j > 0) {
      flow += (signs[j - 1] - signs[j]) * counts[j];
      const std::size_t lower = signs[j - 1] > 0 ? j - 1 : j;
      hit_sum += hit[lower];
    }
    const double own = signs[j] > 0 ? hit[j] : 0.0;
    constants_.push_back(flow - unit_m * (hit_sum + own));
  }
  if (log_laps_.back() < 60 * std::log(2.0)) exact_rows_ = m;
}

template <class Scalar>
void LapTable<Scalar>::extend(std::size_t max_order) {
  while (log_laps_.size() <= max_order) add_row();
}

template <class Scalar>
LapSeries<Scalar>::LapSeries(const LapTable<Scalar>& table, double t, std::size_t terms)
    : table_(&table), t_(t), terms_(terms) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("series variable must lie in (0,1)");
  if (terms > table.max_order()) throw DomainError("lap table holds too few rows for the series");
  const std::size_t p1 = table.turning_count() + 1;
  const double log_t = std::log(t);
  depth_limit_ = std::min<std::size_t>(
      terms, static_cast<std::size_t>(std::ceil(std::log(kSeriesCutoff * (1 - t)) / log_t)) + 2);

  geo_.resize(terms + 1);
  prefix_constants_.resize((terms + 1) * p1);
  double power = 1;
  double acc = 0;
  std::vector<double> running(p1, 0.0);
  for (std::size_t m = 0; m <= terms; ++m) {
    acc += power;
    geo_[m] = acc;
    const double weight = std::exp(static_cast<double>(m) * log_t + table.log_laps(m));
    for (std::size_t j = 0; j < p1; ++j) {
      running[j] += weight * table.constant(m, j);
      prefix_constants_[m * p1 + j] = running[j];
    }
    power *= t;
  }
  Orbit<Scalar> right(table.map(), table.map().b());
  whole_ = prefix(right, 0);
}

template <class Scalar>
double LapSeries<Scalar>::tau_sum(Orbit<Scalar>& orbit, std::size_t k,
                                  std::size_t max_order) const {
  if (!orbit.interior(k)) return 0;
  const auto h = orbit.hit_time(k);
  if (h == Orbit<Scalar>::npos || h >= max_order) return 0;
  return geo_[max_order] - geo_[h];
}

template <class Scalar>
double LapSeries<Scalar>::counting(Orbit<Scalar>& orbit, std::size_t offset) const {
  const auto signs = table_->map().lap_signs();
  const std::size_t p1 = table_->turning_count() + 1;
  orbit.extend_to(offset + std::min(terms_, depth_limit_ + 1));
  double value = 0;
  double power = t_;
  int sign = 1;
  for (std::size_t k = 0; k < terms_ && k <= depth_limit_; ++k) {
    const std::size_t idx = offset + k;
    orbit.extend_to(idx + 1);
    if (orbit.at_left_end(idx)) break;
    const std::size_t j = orbit.lap(idx);
    const int s = signs[j];
    const std::size_t rest = terms_ - k - 1;
    double term = static_cast<double>(j) * geo_[rest] + prefix_constants_[rest * p1 + j];
    if (s < 0) term -= tau_sum(orbit, idx + 1, rest);
    value += sign * power * term;
    sign *= s;
    power *= t_;
  }
  return value;
}

template <class Scalar>
double LapSeries<Scalar>::prefix(Orbit<Scalar>& orbit, std::size_t offset) const {
  orbit.extend_to(offset);
  if (orbit.at_left_end(offset)) throw DomainError("prefix interval [a,a] is degenerate");
  return geo_.back() + counting(orbit, offset);
}

template <class Scalar>
double LapSeries<Scalar>::between(Orbit<Scalar>& lo, std::size_t lo_offset, Orbit<Scalar>& hi,
                                  std::size_t hi_offset) const {
  lo.extend_to(lo_offset);
  hi.extend_to(hi_offset);
  return geo_.back() + counting(hi, hi_offset) - counting(lo, lo_offset) -
         tau_sum(lo, lo_offset, terms_);
}

template <class Scalar>
double LapSeries<Scalar>::of(const Interval<Scalar>& J) const {
  Orbit<Scalar> lo(table_->map(), J.lo());
  Orbit<Scalar> hi(table_->map(), J.hi());
  return between(lo, 0, hi, 0);
}

template <class Scalar>
double LapSeries<Scalar>::tail_bound(double beta) const {
  const double bt = beta * t_;
  if (!(bt < 1.0)) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(terms_);
  const double log_c = std::max(0.0, table_->log_laps(terms_) - n * std::log(beta));
  return std::exp(log_c + (n + 1) * std::log(bt)) / (1 - bt);
}

template class Orbit<Rational>;
template class Orbit<Real>;
template class LapTable<Rational>;
template class LapTable<Real>;
template class LapSeries<Rational>;
template class LapSeries<Real>;

}  // namespace lapmap
