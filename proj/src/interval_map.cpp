#include "lapmap/interval_map.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace lapmap {

namespace {

template <class Scalar>
std::string show(const Scalar& v) {
  return ScalarTraits<Scalar>::to_string(v);
}

// (x0,v0), (x1,v1), (x2,v2) on one line.
template <class Scalar>
bool collinear(const Scalar& x0, const Scalar& v0, const Scalar& x1, const Scalar& v1,
               const Scalar& x2, const Scalar& v2) {
  Scalar lhs = (v1 - v0) * (x2 - x1);
  Scalar rhs = (v2 - v1) * (x1 - x0);
  if constexpr (ScalarTraits<Scalar>::exact) {
    return lhs == rhs;
  } else {
    Scalar scale = abs_value(lhs) + abs_value(rhs);
    return abs_value(Scalar(lhs - rhs)) <= ScalarTraits<Scalar>::tolerance() * scale;
  }
}

template <class Scalar>
int sign_of(const Scalar& v) {
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

}  // namespace

template <class Scalar>
Interval<Scalar>::Interval(Scalar lo, Scalar hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (!(lo_ < hi_)) {
    throw DomainError("interval [" + show(lo_) + ", " + show(hi_) + "] is trivial or reversed");
  }
}

IterateLimits IterateLimits::from_environment() {
  IterateLimits limits;
  if (const char* env = std::getenv("LAPMAP_MEM_CAP"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    unsigned long long cap = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || cap < 2) {
      throw ConfigError("LAPMAP_MEM_CAP must be an integer >= 2, got '" + std::string(env) + "'");
    }
    limits.max_knots = static_cast<std::size_t>(cap);
  }
  return limits;
}

template <class Scalar>
PiecewiseLinearMap<Scalar>::PiecewiseLinearMap(std::vector<Scalar> knots,
                                               std::vector<Scalar> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() < 2) {
    throw InvariantError("shape", "a map needs at least the two endpoints a and b");
  }
  if (knots_.size() != values_.size()) {
    throw InvariantError("shape", "got " + std::to_string(knots_.size()) + " breakpoints but " +
                                      std::to_string(values_.size()) + " values");
  }
  for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
    if (!(knots_[k] < knots_[k + 1])) {
      throw InvariantError("increasing-breakpoints", "breakpoint " + show(knots_[k + 1]) +
                                                         " does not exceed " + show(knots_[k]));
    }
  }
  for (const Scalar& v : values_) {
    if (v < a() || v > b()) {
      throw InvariantError("values-in-interval", "value " + show(v) + " lies outside [" +
                                                     show(a()) + ", " + show(b()) + "]");
    }
  }
  for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
    if (values_[k] == values_[k + 1]) {
      throw InvariantError("nonzero-slope", "segment [" + show(knots_[k]) + ", " +
                                                show(knots_[k + 1]) + "] is constant");
    }
  }
  for (std::size_t k = 1; k + 1 < knots_.size(); ++k) {
    if (collinear(knots_[k - 1], values_[k - 1], knots_[k], values_[k], knots_[k + 1],
                  values_[k + 1])) {
      throw InvariantError("minimality",
                           "breakpoint " + show(knots_[k]) + " joins two collinear segments");
    }
  }
  index_laps();
}

template <class Scalar>
PiecewiseLinearMap<Scalar>::PiecewiseLinearMap(Trusted, std::vector<Scalar> knots,
                                               std::vector<Scalar> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  index_laps();
}

template <class Scalar>
PiecewiseLinearMap<Scalar> PiecewiseLinearMap<Scalar>::canonical(std::vector<Scalar> knots,
                                                                 std::vector<Scalar> values) {
  if (knots.size() != values.size() || knots.size() < 2) {
    return PiecewiseLinearMap(std::move(knots), std::move(values));  // reports the shape error
  }
  std::vector<Scalar> xs;
  std::vector<Scalar> vs;
  xs.reserve(knots.size());
  vs.reserve(knots.size());
  for (std::size_t k = 0; k < knots.size(); ++k) {
    while (xs.size() >= 2 &&
           collinear(xs[xs.size() - 2], vs[vs.size() - 2], xs.back(), vs.back(), knots[k],
                     values[k])) {
      xs.pop_back();
      vs.pop_back();
    }
    xs.push_back(std::move(knots[k]));
    vs.push_back(std::move(values[k]));
  }
  return PiecewiseLinearMap(std::move(xs), std::move(vs));
}

template <class Scalar>
PiecewiseLinearMap<Scalar> PiecewiseLinearMap<Scalar>::identity(const Scalar& a, const Scalar& b) {
  return PiecewiseLinearMap({a, b}, {a, b});
}

template <class Scalar>
void PiecewiseLinearMap<Scalar>::index_laps() {
  turning_.clear();
  lap_signs_.clear();
  for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
    int s = sign_of(Scalar(values_[k + 1] - values_[k]));
    if (!lap_signs_.empty() && lap_signs_.back() != s) turning_.push_back(knots_[k]);
    if (lap_signs_.empty() || lap_signs_.back() != s) lap_signs_.push_back(s);
  }
}

template <class Scalar>
std::size_t PiecewiseLinearMap<Scalar>::segment_of(const Scalar& x) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, knots_.size() - 2);
}

template <class Scalar>
std::size_t PiecewiseLinearMap<Scalar>::lap_index(const Scalar& x) const {
  return static_cast<std::size_t>(std::lower_bound(turning_.begin(), turning_.end(), x) -
                                  turning_.begin());
}

template <class Scalar>
bool PiecewiseLinearMap<Scalar>::is_turning_point(const Scalar& x) const {
  return std::binary_search(turning_.begin(), turning_.end(), x);
}

template <class Scalar>
Scalar PiecewiseLinearMap<Scalar>::eval(const Scalar& x) const {
  if (x < a() || x > b()) {
    throw DomainError("x = " + show(x) + " lies outside [" + show(a()) + ", " + show(b()) + "]");
  }
  std::size_t i = segment_of(x);
  if (x == knots_[i]) return values_[i];
  if (x == knots_[i + 1]) return values_[i + 1];
  return values_[i] + (values_[i + 1] - values_[i]) * (x - knots_[i]) / (knots_[i + 1] - knots_[i]);
}

template <class Scalar>
Scalar PiecewiseLinearMap<Scalar>::slope(std::size_t segment) const {
  return (values_[segment + 1] - values_[segment]) / (knots_[segment + 1] - knots_[segment]);
}

template <class Scalar>
Interval<Scalar> PiecewiseLinearMap<Scalar>::image(const Interval<Scalar>& J) const {
  if (!domain().contains(J)) throw DomainError("interval is not inside the domain of the map");
  Scalar lo = eval(J.lo());
  Scalar hi = lo;
  auto widen = [&](const Scalar& v) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  };
  widen(eval(J.hi()));
  auto first = std::upper_bound(knots_.begin(), knots_.end(), J.lo());
  for (auto it = first; it != knots_.end() && *it < J.hi(); ++it) {
    widen(values_[static_cast<std::size_t>(it - knots_.begin())]);
  }
  return {lo, hi};
}

template <class Scalar>
Scalar PiecewiseLinearMap<Scalar>::variation() const {
  Scalar total(0);
  for (std::size_t k = 0; k + 1 < values_.size(); ++k) {
    total += abs_value(Scalar(values_[k + 1] - values_[k]));
  }
  return total;
}

template <class Scalar>
std::optional<Scalar> PiecewiseLinearMap<Scalar>::uniform_slope() const {
  Scalar first = abs_value(slope(0));
  for (std::size_t k = 1; k < segment_count(); ++k) {
    Scalar s = abs_value(slope(k));
    if constexpr (ScalarTraits<Scalar>::exact) {
      if (s != first) return std::nullopt;
    } else {
      if (abs_value(Scalar(s - first)) > ScalarTraits<Scalar>::tolerance() * first) {
        return std::nullopt;
      }
    }
  }
  return first;
}

template <class Scalar>
std::size_t composed_knot_bound(const PiecewiseLinearMap<Scalar>& g,
                                const PiecewiseLinearMap<Scalar>& f) {
  auto gk = g.knots();
  auto xs = f.values();
  std::size_t total = f.knots().size();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const Scalar& lo = xs[i] < xs[i + 1] ? xs[i] : xs[i + 1];
    const Scalar& hi = xs[i] < xs[i + 1] ? xs[i + 1] : xs[i];
    auto first = std::upper_bound(gk.begin(), gk.end(), lo);
    auto last = std::lower_bound(gk.begin(), gk.end(), hi);
    if (last > first) total += static_cast<std::size_t>(last - first);
  }
  return total;
}

namespace {

template <class Scalar>
PiecewiseLinearMap<Scalar> compose_checked(const PiecewiseLinearMap<Scalar>& g,
                                           const PiecewiseLinearMap<Scalar>& f,
                                           const IterateLimits& limits, std::size_t n) {
  if (g.a() != f.a() || g.b() != f.b()) {
    throw DomainError("compose: maps live on different intervals");
  }
  const std::size_t bound = composed_knot_bound(g, f);
  if (bound > limits.max_knots) {
    throw ResourceError(n, "iterate " + std::to_string(n) + " needs " + std::to_string(bound) +
                               " breakpoints, above the cap of " +
                               std::to_string(limits.max_knots));
  }
  auto fx = f.knots();
  auto fv = f.values();
  auto gk = g.knots();
  auto gv = g.values();
  std::vector<Scalar> knots;
  std::vector<Scalar> values;
  knots.reserve(bound);
  values.reserve(bound);
  knots.push_back(fx[0]);
  values.push_back(g.eval(fv[0]));
  for (std::size_t i = 0; i + 1 < fx.size(); ++i) {
    const Scalar& x0 = fx[i];
    const Scalar& x1 = fx[i + 1];
    const Scalar& v0 = fv[i];
    const Scalar& v1 = fv[i + 1];
    const bool rising = v0 < v1;
    auto first = std::upper_bound(gk.begin(), gk.end(), rising ? v0 : v1);
    auto last = std::lower_bound(gk.begin(), gk.end(), rising ? v1 : v0);
    if (last > first) {
      const Scalar run = (x1 - x0) / (v1 - v0);
      auto emit = [&](std::size_t k) {
        knots.push_back(x0 + (gk[k] - v0) * run);
        values.push_back(gv[k]);
      };
      const auto lo = static_cast<std::size_t>(first - gk.begin());
      const auto hi = static_cast<std::size_t>(last - gk.begin());
      if (rising) {
        for (std::size_t k = lo; k < hi; ++k) emit(k);
      } else {
        for (std::size_t k = hi; k-- > lo;) emit(k);
      }
    }
    knots.push_back(x1);
    values.push_back(g.eval(v1));
  }
  return PiecewiseLinearMap<Scalar>::canonical(std::move(knots), std::move(values));
}

}  // namespace

template <class Scalar>
PiecewiseLinearMap<Scalar> compose(const PiecewiseLinearMap<Scalar>& g,
                                   const PiecewiseLinearMap<Scalar>& f,
                                   const IterateLimits& limits) {
  return compose_checked(g, f, limits, 2);
}

template <class Scalar>
PiecewiseLinearMap<Scalar> iterate(const PiecewiseLinearMap<Scalar>& f, std::size_t n,
                                   const IterateLimits& limits) {
  auto result = PiecewiseLinearMap<Scalar>::identity(f.a(), f.b());
  for (std::size_t k = 1; k <= n; ++k) result = compose_checked(f, result, limits, k);
  return result;
}

template <class Scalar>
std::vector<PiecewiseLinearMap<Scalar>> iterate_chain(const PiecewiseLinearMap<Scalar>& f,
                                                      std::size_t n, const IterateLimits& limits,
                                                      bool* truncated) {
  std::vector<PiecewiseLinearMap<Scalar>> chain;
  chain.reserve(n + 1);
  chain.push_back(PiecewiseLinearMap<Scalar>::identity(f.a(), f.b()));
  if (truncated != nullptr) *truncated = false;
  for (std::size_t k = 1; k <= n; ++k) {
    try {
      chain.push_back(compose_checked(f, chain.back(), limits, k));
    } catch (const ResourceError&) {
      if (truncated == nullptr) throw;
      *truncated = true;
      break;
    }
  }
  return chain;
}

template <class Scalar>
PiecewiseLinearMap<Scalar> inverse_homeomorphism(const PiecewiseLinearMap<Scalar>& phi) {
  if (phi.lap_count() != 1 || phi.lap_signs()[0] != 1 || phi.values().front() != phi.a() ||
      phi.values().back() != phi.b()) {
    throw DomainError("only increasing homeomorphisms of [a,b] can be inverted");
  }
  auto xs = phi.knots();
  auto vs = phi.values();
  return PiecewiseLinearMap<Scalar>({vs.begin(), vs.end()}, {xs.begin(), xs.end()});
}

template <class Scalar>
std::size_t lap_count_on(const PiecewiseLinearMap<Scalar>& f, const Interval<Scalar>& J) {
  auto tp = f.turning_points();
  auto first = std::upper_bound(tp.begin(), tp.end(), J.lo());
  auto last = std::lower_bound(tp.begin(), tp.end(), J.hi());
  return (last > first ? static_cast<std::size_t>(last - first) : 0) + 1;
}

template <class Scalar>
double eval_approx(const PiecewiseLinearMap<Scalar>& f, double x) {
  auto xs = f.knots();
  auto vs = f.values();
  const double a = to_double(xs.front());
  const double b = to_double(xs.back());
  if (x <= a) return to_double(vs.front());
  if (x >= b) return to_double(vs.back());
  std::size_t lo = 0;
  std::size_t hi = xs.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (to_double(xs[mid]) <= x) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x0 = to_double(xs[lo]);
  const double x1 = to_double(xs[hi]);
  const double v0 = to_double(vs[lo]);
  const double v1 = to_double(vs[hi]);
  return v0 + (v1 - v0) * (x - x0) / (x1 - x0);
}

#define LAPMAP_INSTANTIATE(S)                                                                 \
  template class Interval<S>;                                                                 \
  template class PiecewiseLinearMap<S>;                                                       \
  template PiecewiseLinearMap<S> compose(const PiecewiseLinearMap<S>&,                        \
                                         const PiecewiseLinearMap<S>&, const IterateLimits&); \
  template std::size_t composed_knot_bound(const PiecewiseLinearMap<S>&,                      \
                                           const PiecewiseLinearMap<S>&);                     \
  template PiecewiseLinearMap<S> iterate(const PiecewiseLinearMap<S>&, std::size_t,           \
                                         const IterateLimits&);                               \
  template std::vector<PiecewiseLinearMap<S>> iterate_chain(                                  \
      const PiecewiseLinearMap<S>&, std::size_t, const IterateLimits&, bool*);                \
  template PiecewiseLinearMap<S> inverse_homeomorphism(const PiecewiseLinearMap<S>&);         \
  template std::size_t lap_count_on(const PiecewiseLinearMap<S>&, const Interval<S>&);        \
  template double eval_approx(const PiecewiseLinearMap<S>&, double);

LAPMAP_INSTANTIATE(Rational)
LAPMAP_INSTANTIATE(Real)

#undef LAPMAP_INSTANTIATE

}  // namespace lapmap
