#include "lapmap/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lapmap {

namespace {

using boost::multiprecision::mpz_int;

std::optional<mpz_int> exact_sqrt(const mpz_int& z) {
  if (z < 0) return std::nullopt;
  mpz_int root = boost::multiprecision::sqrt(z);
  if (root * root != z) return std::nullopt;
  return root;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Squaring doubles the radicand's size; stop well before memory is at risk.
constexpr std::size_t kMaxRadicandBits = std::size_t{1} << 24;

std::size_t bit_size(const Rational& q) {
  return boost::multiprecision::msb(boost::multiprecision::numerator(q)) +
         boost::multiprecision::msb(boost::multiprecision::denominator(q)) + 2;
}

void require_unit_to_two(const TentSlope& beta) {
  if (beta.compare(Rational(1)) <= 0) {
    throw DomainError("beta = " + beta.to_string() +
                      " is at most 1; u_beta has no transitive cycle");
  }
  if (beta.compare(Rational(2)) > 0) {
    throw DomainError("beta = " + beta.to_string() + " exceeds 2; u_beta leaves [0,1]");
  }
}

template <class Scalar>
bool within(const Scalar& x, const Scalar& lo, const Scalar& hi, const Scalar& tol) {
  return lo - tol <= x && x <= hi + tol;
}

}  // namespace

TentSlope::TentSlope(Rational radicand, unsigned root_depth)
    : radicand_(std::move(radicand)), depth_(root_depth) {
  if (radicand_ <= 0) throw DomainError("tent slope must be positive");
  while (depth_ > 0) {
    auto num = exact_sqrt(boost::multiprecision::numerator(radicand_));
    auto den = exact_sqrt(boost::multiprecision::denominator(radicand_));
    if (!num || !den) break;
    radicand_ = Rational(*num, *den);
    --depth_;
  }
}

TentSlope TentSlope::parse(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.starts_with("sqrt(")) {
    if (!s.ends_with(")")) throw ParseError("unbalanced parentheses in '" + std::string(s) + "'");
    auto inner = parse(s.substr(5, s.size() - 6));
    return TentSlope(inner.radicand_, inner.depth_ + 1);
  }
  return TentSlope(parse_rational(s));
}

std::optional<Rational> TentSlope::rational() const {
  if (depth_ != 0) return std::nullopt;
  return radicand_;
}

TentSlope TentSlope::squared() const {
  if (depth_ > 0) return TentSlope(radicand_, depth_ - 1);
  if (bit_size(radicand_) > kMaxRadicandBits) {
    throw ResourceError(0, "tent slope power too large to square exactly");
  }
  return TentSlope(radicand_ * radicand_);
}

int TentSlope::compare(const Rational& x) const {
  if (x <= 0) return 1;
  Rational power = x;
  for (unsigned k = 0; k < depth_; ++k) power *= power;
  return radicand_ < power ? -1 : radicand_ > power ? 1 : 0;
}

template <>
Rational TentSlope::value<Rational>() const {
  if (depth_ != 0) throw DomainError("slope " + to_string() + " is irrational");
  return radicand_;
}

template <>
Real TentSlope::value<Real>() const {
  Real v = ScalarTraits<Real>::from_rational(radicand_);
  for (unsigned k = 0; k < depth_; ++k) v = boost::multiprecision::sqrt(v);
  return v;
}

double TentSlope::approx() const { return value<Real>().convert_to<double>(); }

std::string TentSlope::to_string() const {
  std::string out = lapmap::to_string(radicand_);
  for (unsigned k = 0; k < depth_; ++k) out = "sqrt(" + out + ")";
  return out;
}

template <class Scalar>
PiecewiseLinearMap<Scalar> tent(const Scalar& beta) {
  if (!(beta > 0 && beta <= 2)) throw DomainError("tent slope must lie in (0,2]");
  const Scalar half = Scalar(1) / 2;
  return PiecewiseLinearMap<Scalar>({Scalar(0), half, Scalar(1)}, {Scalar(0), beta * half, Scalar(0)});
}

std::size_t cycle_period_exponent(const TentSlope& beta) {
  require_unit_to_two(beta);
  std::size_t p = 0;
  for (TentSlope power = beta.squared(); power.compare(Rational(2)) <= 0; power = power.squared()) {
    ++p;
  }
  return p;
}

std::size_t cycle_period_exponent(double beta) {
  if (!(beta > 1.0)) throw DomainError("beta is at most 1; u_beta has no transitive cycle");
  if (!(beta <= 2.0)) throw DomainError("beta exceeds 2; u_beta leaves [0,1]");
  std::size_t p = 0;
  while (std::ldexp(std::log(beta), static_cast<int>(p + 1)) <= std::log(2.0)) ++p;
  return p;
}

template <class Scalar>
bool Cycle<Scalar>::contains(const Scalar& x) const {
  return std::any_of(components.begin(), components.end(),
                     [&](const Interval<Scalar>& B) { return B.contains(x); });
}

template <class Scalar>
CycleCheck<Scalar> validate_cycle(const PiecewiseLinearMap<Scalar>& f, const Cycle<Scalar>& C,
                                  const Scalar& tol) {
  CycleCheck<Scalar> out;
  const auto m = C.period();
  if (m == 0) {
    out.failure = "cycle has no components";
    return out;
  }
  for (std::size_t k = 0; k < m; ++k) {
    const auto& B = C.components[k];
    if (!within(B.lo(), f.a(), f.b(), tol) || !within(B.hi(), f.a(), f.b(), tol)) {
      out.failure = "component " + std::to_string(k) + " leaves the interval";
      return out;
    }
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return C.components[i].lo() < C.components[j].lo();
  });
  for (std::size_t i = 1; i < m; ++i) {
    const auto& left = C.components[order[i - 1]];
    const auto& right = C.components[order[i]];
    if (left.hi() > right.lo() + tol) {
      out.failure = "components " + std::to_string(order[i - 1]) + " and " +
                    std::to_string(order[i]) + " overlap";
      return out;
    }
    if (abs_value<Scalar>(left.hi() - right.lo()) <= tol) out.touching = true;
  }
  for (std::size_t k = 0; k < m; ++k) {
    const auto& B = C.components[k];
    const auto& next = C.components[(k + 1) % m];
    const Scalar lo = std::clamp(B.lo(), f.a(), f.b());
    const Scalar hi = std::clamp(B.hi(), f.a(), f.b());
    const auto image = f.image(Interval<Scalar>(lo, hi));
    if (image.lo() < next.lo() - tol || image.hi() > next.hi() + tol) {
      out.failure = "image of component " + std::to_string(k) + " is not inside component " +
                    std::to_string((k + 1) % m);
      return out;
    }
  }
  out.valid = true;
  return out;
}

namespace {

template <class Scalar>
std::vector<Interval<Scalar>> cycle_components(const TentSlope& beta) {
  const Scalar b = beta.value<Scalar>();
  const TentSlope square = beta.squared();
  if (square.compare(Rational(2)) > 0) {
    // J = [u^2(1/2), u(1/2)] with u(1/2) = beta/2 and u^2(1/2) = beta - beta^2/2.
    const Scalar b2 = square.value<Scalar>();
    return {Interval<Scalar>(b - b2 / 2, b / 2)};
  }
  const auto inner = cycle_components<Scalar>(square);
  const Scalar d = b / (1 + b);
  const Scalar c = 1 - d;
  const auto u = tent(b);
  std::vector<Interval<Scalar>> out;
  for (const auto& B : inner) {
    Interval<Scalar> even(d - (d - c) * B.hi(), d - (d - c) * B.lo());
    auto odd = u.image(even);
    out.push_back(std::move(even));
    out.push_back(std::move(odd));
  }
  return out;
}

}  // namespace

template <class Scalar>
Cycle<Scalar> transitive_cycle(const TentSlope& beta) {
  require_unit_to_two(beta);
  Cycle<Scalar> C{cycle_components<Scalar>(beta)};
  const Scalar tol = ScalarTraits<Scalar>::tolerance();
  const auto check = validate_cycle(tent(beta.value<Scalar>()), C, tol);
  if (!check.valid) {
    throw InvariantError("cycle", "constructed cycle for beta = " + beta.to_string() +
                                      " is invalid: " + check.failure);
  }
  return C;
}

template <class Scalar>
Renormalization<Scalar> renormalize(const TentSlope& beta, std::size_t samples) {
  if (beta.compare(Rational(1)) <= 0) throw DomainError("beta must exceed 1");
  const TentSlope square = beta.squared();
  if (square.compare(Rational(2)) > 0) {
    throw DomainError("beta = " + beta.to_string() + " exceeds sqrt(2); u_beta^2 has no [c,d] renormalization");
  }
  if (samples < 2) throw DomainError("renormalization check needs at least two samples");
  Renormalization<Scalar> out{beta.value<Scalar>(), Scalar(0), Scalar(0), square.value<Scalar>()};
  out.d = out.beta / (1 + out.beta);
  out.c = 1 - out.d;
  out.samples = samples;
  const auto u = tent(out.beta);
  const auto u2 = tent(out.new_beta);
  const Scalar steps(static_cast<long>(samples - 1));
  for (std::size_t i = 0; i < samples; ++i) {
    const Scalar x = out.c + (out.d - out.c) * Scalar(static_cast<long>(i)) / steps;
    const Scalar lhs = out.rescale(u.eval(u.eval(x)));
    const Scalar rhs = u2.eval(out.rescale(x));
    out.defect = std::max(out.defect, to_double(abs_value<Scalar>(lhs - rhs)));
  }
  return out;
}

template <class Scalar>
PeriodicSet<Scalar> periodic_points(const PiecewiseLinearMap<Scalar>& f, std::size_t n,
                                    const IterateLimits& limits) {
  if (n == 0) throw DomainError("period must be positive");
  const auto F = iterate(f, n, limits);
  const Scalar tol = ScalarTraits<Scalar>::tolerance();
  const auto xs = F.knots();
  const auto vs = F.values();
  PeriodicSet<Scalar> out;
  std::vector<Scalar> roots;
  auto in_fixed = [&](const Scalar& x) {
    return std::any_of(out.fixed_intervals.begin(), out.fixed_intervals.end(),
                       [&](const Interval<Scalar>& J) { return within(x, J.lo(), J.hi(), tol); });
  };
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const Scalar s = (vs[k + 1] - vs[k]) / (xs[k + 1] - xs[k]);
    if (abs_value<Scalar>(s - 1) <= tol) {
      if (abs_value<Scalar>(vs[k] - xs[k]) <= tol) {
        if (!out.fixed_intervals.empty() && out.fixed_intervals.back().hi() == xs[k]) {
          out.fixed_intervals.back() = Interval<Scalar>(out.fixed_intervals.back().lo(), xs[k + 1]);
        } else {
          out.fixed_intervals.emplace_back(xs[k], xs[k + 1]);
        }
      }
      continue;
    }
    Scalar root = (vs[k] - s * xs[k]) / (1 - s);
    if (!within(root, xs[k], xs[k + 1], tol)) continue;
    root = std::clamp(root, xs[k], xs[k + 1]);
    if (!roots.empty() && abs_value<Scalar>(root - roots.back()) <= tol) continue;
    roots.push_back(root);
  }
  for (const auto& x : roots) {
    if (in_fixed(x)) continue;
    std::size_t period = n;
    for (std::size_t m = 1; m < n; ++m) {
      if (n % m != 0) continue;
      Scalar y = x;
      for (std::size_t i = 0; i < m; ++i) y = f.eval(y);
      if (abs_value<Scalar>(y - x) <= tol) {
        period = m;
        break;
      }
    }
    out.points.push_back({x, period});
  }
  return out;
}

template <class Scalar>
double escape_fraction(const PiecewiseLinearMap<Scalar>& f, const Cycle<Scalar>& C,
                       std::size_t grid_size, std::size_t max_steps) {
  if (grid_size < 2) throw DomainError("grid needs at least two points");
  if (C.period() == 0) throw DomainError("cycle has no components");
  std::vector<Interval<Scalar>> parts = C.components;
  std::sort(parts.begin(), parts.end(),
            [](const Interval<Scalar>& l, const Interval<Scalar>& r) { return l.lo() < r.lo(); });
  auto inside = [&](const Scalar& x) {
    auto it = std::upper_bound(parts.begin(), parts.end(), x,
                               [](const Scalar& v, const Interval<Scalar>& B) { return v < B.lo(); });
    return it != parts.begin() && std::prev(it)->contains(x);
  };
  const Scalar width = f.b() - f.a();
  const Scalar steps(static_cast<long>(grid_size - 1));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < grid_size; ++i) {
    Scalar x = i + 1 == grid_size ? f.b() : f.a() + width * Scalar(static_cast<long>(i)) / steps;
    for (std::size_t step = 0; step <= max_steps; ++step) {
      if (inside(x)) {
        ++hits;
        break;
      }
      if (step < max_steps) x = f.eval(x);
    }
  }
  return static_cast<double>(hits) / static_cast<double>(grid_size);
}

#define LAPMAP_INSTANTIATE(S)                                                                   \
  template PiecewiseLinearMap<S> tent(const S&);                                                \
  template struct Cycle<S>;                                                                     \
  template CycleCheck<S> validate_cycle(const PiecewiseLinearMap<S>&, const Cycle<S>&, const S&); \
  template Cycle<S> transitive_cycle(const TentSlope&);                                         \
  template Renormalization<S> renormalize(const TentSlope&, std::size_t);                       \
  template PeriodicSet<S> periodic_points(const PiecewiseLinearMap<S>&, std::size_t,            \
                                          const IterateLimits&);                                \
  template double escape_fraction(const PiecewiseLinearMap<S>&, const Cycle<S>&, std::size_t,   \
                                  std::size_t);

LAPMAP_INSTANTIATE(Rational)
LAPMAP_INSTANTIATE(Real)

}  // namespace lapmap
