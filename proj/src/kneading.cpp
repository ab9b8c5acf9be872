#include "lapmap/kneading.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lapmap {

namespace {

// Below this the lap counts grow too slowly for the series to separate points.
constexpr double kMinEntropy = 1e-2;

}  // namespace

void SeriesConfig::validate(double r) const {
  if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0)) {
    throw ConfigError("tail tolerance must lie in (0,1)");
  }
  if (terms && *terms == 0) throw ConfigError("terms must be positive");
  if (t_schedule.empty() && (schedule_length == 0 || schedule_length > 52)) {
    throw ConfigError("schedule length must lie in 1..52");
  }
  if (growth_horizon < 16) throw ConfigError("growth horizon must be at least 16");
  double prev = 0;
  for (double t : t_schedule) {
    if (!(t > prev && t < r)) {
      throw ConfigError("t schedule must increase strictly inside (0, r)");
    }
    prev = t;
  }
}

std::vector<double> SeriesConfig::schedule(double r) const {
  if (!t_schedule.empty()) return t_schedule;
  std::vector<double> ts;
  for (std::size_t k = 1; k <= schedule_length; ++k) {
    ts.push_back(r * (1.0 - std::ldexp(1.0, -static_cast<int>(k))));
  }
  return ts;
}

template <class Scalar>
GrowthRate estimate_growth(const PiecewiseLinearMap<Scalar>& f, LapTable<Scalar>& table,
                           std::size_t horizon) {
  GrowthRate g;
  if (auto s = f.uniform_slope()) {
    g.exact = true;
    g.beta = std::max(1.0, to_double(*s));
    g.h = std::log(g.beta);
  } else {
    const std::size_t half = horizon / 2;
    table.extend(horizon);
    g.h = std::max(0.0, (table.log_laps(horizon) - table.log_laps(half)) /
                            static_cast<double>(horizon - half));
    g.beta = std::exp(g.h);
  }
  g.r = std::exp(-g.h);
  return g;
}

template <class Scalar>
Kneading<Scalar>::Kneading(const PiecewiseLinearMap<Scalar>& f, std::size_t growth_horizon)
    : f_(&f), table_(f), horizon_(growth_horizon) {}

template <class Scalar>
const GrowthRate& Kneading<Scalar>::growth() {
  if (!growth_) growth_ = estimate_growth(*f_, table_, horizon_);
  return *growth_;
}

template <class Scalar>
LapSeries<Scalar> Kneading<Scalar>::series(double t, std::size_t terms) {
  const double r = growth().r;
  if (!(t > 0.0 && t < r)) {
    throw DomainError("t = " + format_decimal(t) + " must lie in (0, r) with r = " +
                      format_decimal(r));
  }
  table_.extend(terms);
  return LapSeries<Scalar>(table_, t, terms);
}

template <class Scalar>
std::size_t Kneading<Scalar>::auto_terms(double t, double tolerance, std::size_t max_terms) {
  const double beta = growth().beta;
  const double bt = beta * t;
  std::size_t n = 16;
  if (bt > 0 && bt < 1) {
    const double guess = std::log(tolerance * (1 - bt)) / std::log(bt);
    if (std::isfinite(guess) && guess > 16) n = static_cast<std::size_t>(guess);
  }
  while (true) {
    if (n > max_terms) {
      throw ResourceError(n, "truncation order needed for tail tolerance " +
                                 format_decimal(tolerance) + " exceeds the limit");
    }
    auto s = series(t, n);
    if (s.tail_bound(beta) / s.whole() <= tolerance) return n;
    n += n / 4 + 8;
  }
}

template <class Scalar>
SeriesValue series_L(const PiecewiseLinearMap<Scalar>& f, const Interval<Scalar>& J, double t,
                     std::size_t terms) {
  if (!f.domain().contains(J)) throw DomainError("interval is not inside the map's domain");
  Kneading<Scalar> kn(f);
  auto s = kn.series(t, terms);
  return {s.of(J), s.tail_bound(kn.growth().beta)};
}

template <class Scalar>
RatioValue lambda_ratio(const PiecewiseLinearMap<Scalar>& f, const Interval<Scalar>& J, double t,
                        std::size_t terms) {
  if (!f.domain().contains(J)) throw DomainError("interval is not inside the map's domain");
  Kneading<Scalar> kn(f);
  auto s = kn.series(t, terms);
  RatioValue out;
  out.raw = J == f.domain() ? 1.0 : s.of(J) / s.whole();
  out.value = std::clamp(out.raw, 0.0, 1.0);
  out.tail_rel = s.tail_bound(kn.growth().beta) / s.whole();
  return out;
}

namespace {

struct PiEvaluation {
  std::vector<double> at;     // extrapolated pi(x), unclamped
  std::vector<double> image;  // extrapolated pi(f(x)), unclamped
  std::vector<double> last_t;
  double tail_rel = 0;
  std::vector<double> schedule;
  std::vector<std::size_t> terms;
  GrowthRate growth;
};

template <class Scalar>
double ratio_at(const LapSeries<Scalar>& s, Orbit<Scalar>& orbit, std::size_t offset) {
  orbit.extend_to(offset);
  if (orbit.at_left_end(offset)) return 0.0;
  return s.prefix(orbit, offset) / s.whole();
}

// Linear in s = 1/L_N(I,t) through the last two schedule points, evaluated at s = 0.
double extrapolate(double prev, double last, double s_prev, double s_last) {
  const double gap = s_prev - s_last;
  if (!(gap > 0)) return last;
  return last + (last - prev) * s_last / gap;
}

template <class Scalar>
PiEvaluation evaluate_pi(const PiecewiseLinearMap<Scalar>& f, const std::vector<Scalar>& points,
                         const SeriesConfig& cfg) {
  Kneading<Scalar> kn(f, cfg.growth_horizon);
  PiEvaluation out;
  out.growth = kn.growth();
  if (out.growth.h < kMinEntropy) {
    throw UnsupportedMapError("entropy estimate " + format_decimal(out.growth.h) +
                              " is too small; the map needs positive entropy");
  }
  cfg.validate(out.growth.r);
  out.schedule = cfg.schedule(out.growth.r);

  std::vector<Orbit<Scalar>> orbits;
  orbits.reserve(points.size());
  for (const auto& x : points) orbits.emplace_back(f, x);

  std::vector<double> prev_at;
  std::vector<double> prev_image;
  std::vector<double> at(points.size());
  std::vector<double> image(points.size());
  double prev_s = 0;
  double last_s = 0;
  for (std::size_t k = 0; k < out.schedule.size(); ++k) {
    const double t = out.schedule[k];
    const std::size_t n =
        cfg.terms ? *cfg.terms : kn.auto_terms(t, cfg.tail_tolerance, cfg.max_terms);
    auto s = kn.series(t, n);
    const double tail_rel = s.tail_bound(out.growth.beta) / s.whole();
    if (cfg.terms && tail_rel > cfg.tail_tolerance) {
      throw ConfigError("terms = " + std::to_string(n) + " leaves relative tail " +
                        format_decimal(tail_rel) + " at t = " + format_decimal(t) +
                        ", above the tolerance");
    }
    out.tail_rel = std::max(out.tail_rel, tail_rel);
    out.terms.push_back(n);
    prev_at.swap(at);
    prev_image.swap(image);
    at.assign(points.size(), 0.0);
    image.assign(points.size(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      at[i] = ratio_at(s, orbits[i], 0);
      image[i] = ratio_at(s, orbits[i], 1);
    }
    prev_s = last_s;
    last_s = 1.0 / s.whole();
  }
  out.last_t = at;
  out.at = at;
  out.image = image;
  if (out.schedule.size() >= 2) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      out.at[i] = extrapolate(prev_at[i], at[i], prev_s, last_s);
      out.image[i] = extrapolate(prev_image[i], image[i], prev_s, last_s);
    }
  }
  return out;
}

template <class Scalar>
void check_grid(const PiecewiseLinearMap<Scalar>& f, const std::vector<Scalar>& grid) {
  if (grid.size() < 2) throw DomainError("grid needs at least two points");
  if (grid.front() != f.a() || grid.back() != f.b()) {
    throw DomainError("grid must start at a and end at b");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i - 1] < grid[i])) throw DomainError("grid must be strictly increasing");
  }
}

PiSamples finish_pi(PiEvaluation&& ev, std::vector<double> x, std::size_t count) {
  PiSamples out;
  out.x = std::move(x);
  out.pi.assign(ev.at.begin(), ev.at.begin() + static_cast<std::ptrdiff_t>(count));
  out.pi_image.assign(ev.image.begin(), ev.image.begin() + static_cast<std::ptrdiff_t>(count));
  out.last_t.assign(ev.last_t.begin(), ev.last_t.begin() + static_cast<std::ptrdiff_t>(count));
  double run = 0;
  for (auto& v : out.pi) {
    out.violation = std::max({out.violation, run - v, v - 1.0, -v});
    run = std::max(run, v);
    v = std::clamp(run, 0.0, 1.0);
  }
  out.pi.front() = 0.0;
  out.pi.back() = 1.0;
  for (auto& v : out.pi_image) v = std::clamp(v, 0.0, 1.0);
  out.tail_rel = ev.tail_rel;
  out.schedule = std::move(ev.schedule);
  out.terms = std::move(ev.terms);
  out.growth = ev.growth;
  return out;
}

}  // namespace

template <class Scalar>
PiSamples build_pi(const PiecewiseLinearMap<Scalar>& f, const std::vector<Scalar>& grid,
                   const SeriesConfig& cfg) {
  check_grid(f, grid);
  std::vector<double> x;
  for (const auto& g : grid) x.push_back(to_double(g));
  return finish_pi(evaluate_pi(f, grid, cfg), std::move(x), grid.size());
}

double default_plateau_tolerance(double lo, double hi, std::size_t grid_size) {
  if (grid_size < 2) return 0;
  return 0.1 * (hi - lo) / static_cast<double>(grid_size - 1);
}

std::vector<Plateau> detect_plateaus(const std::vector<double>& x, const std::vector<double>& psi,
                                     double tol) {
  if (x.size() != psi.size()) throw DomainError("grid and samples differ in length");
  std::vector<Plateau> out;
  std::size_t i = 0;
  while (i < psi.size()) {
    std::size_t j = i;
    while (j + 1 < psi.size() && psi[j + 1] - psi[i] <= tol) ++j;
    if (j - i + 1 >= 3) {
      out.push_back({x[i], x[j], i, j});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return out;
}

template <class Scalar>
Reduction build_reduction(const PiecewiseLinearMap<Scalar>& f, const std::vector<Scalar>& grid,
                          const SeriesConfig& cfg) {
  check_grid(f, grid);
  // Turning data rides along with the grid: a, d_1..d_p, b.
  std::vector<Scalar> points = grid;
  std::vector<Scalar> edges{f.a()};
  for (const auto& d : f.turning_points()) edges.push_back(d);
  edges.push_back(f.b());
  points.insert(points.end(), edges.begin(), edges.end());

  std::vector<double> x;
  for (const auto& g : grid) x.push_back(to_double(g));
  auto ev = evaluate_pi(f, points, cfg);
  std::vector<double> edge_pi(ev.at.begin() + static_cast<std::ptrdiff_t>(grid.size()), ev.at.end());
  std::vector<double> edge_image(ev.image.begin() + static_cast<std::ptrdiff_t>(grid.size()),
                                 ev.image.end());
  auto pi = finish_pi(std::move(ev), std::move(x), grid.size());

  const double a = to_double(f.a());
  const double b = to_double(f.b());
  const double beta = pi.growth.beta;
  auto gamma = [&](double t) { return a + (b - a) * t; };

  Reduction red;
  red.x = pi.x;
  red.growth = pi.growth;
  red.violation = pi.violation;
  red.tail_rel = pi.tail_rel;
  red.schedule = pi.schedule;
  red.terms = pi.terms;
  for (double v : pi.pi) red.psi.push_back(gamma(v));

  edge_pi.front() = 0.0;
  edge_pi.back() = 1.0;
  for (auto& v : edge_pi) v = std::clamp(v, 0.0, 1.0);
  for (auto& v : edge_image) v = std::clamp(v, 0.0, 1.0);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    red.slope_defects.push_back(std::fabs(edge_image[k + 1] - edge_image[k]) -
                                beta * std::fabs(edge_pi[k + 1] - edge_pi[k]));
  }

  const Rational ra = round_decimal(a);
  const Rational rb = round_decimal(b);
  auto to_model = [&](double t) { return std::clamp(round_decimal(gamma(t)), ra, rb); };
  std::vector<Rational> knots;
  std::vector<Rational> values;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    knots.push_back(k == 0 ? ra : k + 1 == edges.size() ? rb : to_model(edge_pi[k]));
    values.push_back(to_model(edge_image[k]));
  }
  // Laps squeezed to a point, or carried onto a single value, disappear from the model.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 1; k < knots.size(); ++k) {
      if (knots[k] == knots[k - 1] || values[k] == values[k - 1]) {
        const std::size_t drop = k + 1 == knots.size() ? k - 1 : k;
        if (drop == 0) throw UnsupportedMapError("model map degenerates to a point");
        knots.erase(knots.begin() + static_cast<std::ptrdiff_t>(drop));
        values.erase(values.begin() + static_cast<std::ptrdiff_t>(drop));
        ++red.collapsed_laps;
        changed = true;
        break;
      }
    }
  }
  if (knots.size() < 2) throw UnsupportedMapError("model map degenerates to a point");
  red.g = RationalMap::canonical(std::move(knots), std::move(values));

  for (std::size_t i = 0; i < red.x.size(); ++i) {
    const double lhs = gamma(pi.pi_image[i]);
    const double rhs = eval_approx(red.g, std::clamp(red.psi[i], to_double(ra), to_double(rb)));
    red.residual = std::max(red.residual, std::fabs(lhs - rhs));
  }
  red.plateaus =
      detect_plateaus(red.x, red.psi, default_plateau_tolerance(a, b, red.x.size()));
  return red;
}

template <class Scalar>
std::vector<Scalar> uniform_grid(const Scalar& a, const Scalar& b, std::size_t n) {
  if (n < 2) throw DomainError("grid needs at least two points");
  if (!(a < b)) throw DomainError("grid needs a < b");
  std::vector<Scalar> out;
  out.reserve(n);
  const Scalar width = b - a;
  const Scalar steps(static_cast<long>(n - 1));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out.push_back(a + width * Scalar(static_cast<long>(i)) / steps);
  }
  out.push_back(b);
  return out;
}

#define LAPMAP_INSTANTIATE(S)                                                                  \
  template GrowthRate estimate_growth(const PiecewiseLinearMap<S>&, LapTable<S>&, std::size_t); \
  template class Kneading<S>;                                                                  \
  template SeriesValue series_L(const PiecewiseLinearMap<S>&, const Interval<S>&, double,      \
                                std::size_t);                                                  \
  template RatioValue lambda_ratio(const PiecewiseLinearMap<S>&, const Interval<S>&, double,   \
                                   std::size_t);                                               \
  template PiSamples build_pi(const PiecewiseLinearMap<S>&, const std::vector<S>&,             \
                              const SeriesConfig&);                                            \
  template Reduction build_reduction(const PiecewiseLinearMap<S>&, const std::vector<S>&,      \
                                     const SeriesConfig&);                                     \
  template std::vector<S> uniform_grid(const S&, const S&, std::size_t);

LAPMAP_INSTANTIATE(Rational)
LAPMAP_INSTANTIATE(Real)

}  // namespace lapmap
