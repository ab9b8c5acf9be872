#pragma once

// Independent reference computations for the test suite. None of these use
// composition or the lap table; they work from first principles on small inputs.

#include "lapmap/interval_map.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace lapmap::oracle {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(LAPMAP_FIXTURES_DIR) / name;
}

inline Rational q(long p, long d = 1) { return Rational(p, d); }

inline RationalMap tent(const Rational& beta) {
  return RationalMap({q(0), q(1, 2), q(1)}, {q(0), beta / 2, q(0)});
}

/// All x in [a,b] with f(x) = y, by solving on every segment.
inline std::set<Rational> preimages(const RationalMap& f, const Rational& y) {
  std::set<Rational> out;
  auto xs = f.knots();
  auto vs = f.values();
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const Rational lo = std::min(vs[k], vs[k + 1]);
    const Rational hi = std::max(vs[k], vs[k + 1]);
    if (y < lo || y > hi) continue;
    out.insert(xs[k] + (y - vs[k]) * (xs[k + 1] - xs[k]) / (vs[k + 1] - vs[k]));
  }
  return out;
}

/// T(f^n) by the recursion T(f^k) = T(f) u f^-1(T(f^(k-1))), inside (a,b).
inline std::set<Rational> turning_points_of_iterate(const RationalMap& f, std::size_t n) {
  std::set<Rational> level(f.turning_points().begin(), f.turning_points().end());
  std::set<Rational> all;
  for (std::size_t k = 0; k < n; ++k) {
    for (const auto& x : level) {
      if (f.a() < x && x < f.b()) all.insert(x);
    }
    if (k + 1 == n) break;
    std::set<Rational> next;
    for (const auto& y : level) {
      if (!(f.a() < y && y < f.b())) continue;
      auto pre = preimages(f, y);
      next.insert(pre.begin(), pre.end());
    }
    level.swap(next);
  }
  return all;
}

/// l(f^n|J) from the turning-point oracle.
inline std::size_t laps_on(const std::set<Rational>& turning, const Rational& lo, const Rational& hi) {
  std::size_t count = 1;
  for (const auto& x : turning) count += (lo < x && x < hi) ? 1 : 0;
  return count;
}

/// f^n(x) by repeated evaluation.
inline Rational orbit_point(const RationalMap& f, Rational x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x = f.eval(x);
  return x;
}

/// Fixed points of u_beta^n by enumerating all 2^n left/right itineraries:
/// solve the affine branch composition exactly, keep solutions whose orbit
/// actually follows the itinerary.
inline std::set<Rational> tent_fixed_points(const Rational& beta, std::size_t n) {
  const Rational half = q(1, 2);
  std::set<Rational> out;
  for (std::uint64_t word = 0; word < (std::uint64_t{1} << n); ++word) {
    Rational s = 1;
    Rational c = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((word >> i) & 1) {
        s = -beta * s;
        c = beta - beta * c;
      } else {
        s = beta * s;
        c = beta * c;
      }
    }
    if (s == 1) continue;
    const Rational x = c / (1 - s);
    if (x < 0 || x > 1) continue;
    Rational y = x;
    bool follows = true;
    for (std::size_t i = 0; i < n && follows; ++i) {
      const bool right = (word >> i) & 1;
      follows = right ? y >= half : y <= half;
      y = right ? Rational(beta - beta * y) : Rational(beta * y);
    }
    if (follows && y == x) out.insert(x);
  }
  return out;
}

/// Random continuous PL self-map of [0,1] with 2..max_segments segments.
inline RationalMap random_map(std::mt19937_64& rng, std::size_t max_segments = 5, long den = 12) {
  std::uniform_int_distribution<std::size_t> seg_dist(2, max_segments);
  const std::size_t segments = seg_dist(rng);
  std::set<long> cuts;
  std::uniform_int_distribution<long> cut_dist(1, den - 1);
  while (cuts.size() + 1 < segments) cuts.insert(cut_dist(rng));
  std::vector<Rational> knots{q(0)};
  for (long c : cuts) knots.push_back(q(c, den));
  knots.push_back(q(1));
  std::uniform_int_distribution<long> val_dist(0, den);
  std::vector<Rational> values;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    Rational v;
    do {
      v = q(val_dist(rng), den);
    } while (!values.empty() && v == values.back());
    values.push_back(v);
  }
  return RationalMap::canonical(std::move(knots), std::move(values));
}

}  // namespace lapmap::oracle
