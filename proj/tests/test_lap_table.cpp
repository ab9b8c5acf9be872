#include "lapmap/lap_table.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace lapmap;
using oracle::q;

namespace {

// Direct partial sum from exact iterates.
double direct_series(const std::vector<RationalMap>& chain, const Interval<Rational>& J, double t) {
  double total = 0;
  double power = 1;
  for (const auto& fn : chain) {
    total += power * static_cast<double>(lap_count_on(fn, J));
    power *= t;
  }
  return total;
}

}  // namespace

TEST_CASE("orbits record laps, left-end visits and turning-point hits") {
  const auto u2 = oracle::tent(q(2));
  Orbit<Rational> o(u2, q(1, 8));  // 1/8 -> 1/4 -> 1/2 -> 1 -> 0 -> 0
  o.extend_to(5);
  CHECK(o.lap(0) == 0);
  CHECK(o.hit_time(0) == 2);
  CHECK(o.hit_time(2) == 0);
  CHECK(o.hit_time(3) == Orbit<Rational>::npos);
  CHECK(o.interior(3) == false);
  CHECK(o.at_left_end(4));
  CHECK(o.lap(3) == 1);
  CHECK_THROWS_AS(Orbit<Rational>(u2, q(2)), DomainError);
}

TEST_CASE("lap counts of tents match exact iterates") {
  for (const auto& beta : {q(2), q(3, 2), q(13, 10), q(6, 5), q(1, 2)}) {
    const auto u = oracle::tent(beta);
    LapTable<Rational> table(u);
    table.extend(12);
    const auto chain = iterate_chain(u, 12);
    for (std::size_t m = 0; m <= 12; ++m) {
      CHECK(std::exp(table.log_laps(m)) == doctest::Approx(static_cast<double>(chain[m].lap_count())).epsilon(1e-12));
    }
  }
}

TEST_CASE("random maps: counts below points match exact iterates") {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<long> num(1, 59);
  for (int trial = 0; trial < 30; ++trial) {
    CAPTURE(trial);
    const auto f = oracle::random_map(rng, 5, 12);
    const auto chain = iterate_chain(f, 7);
    LapTable<Rational> table(f);
    table.extend(7);
    for (std::size_t m = 0; m <= 7; ++m) {
      CHECK(std::exp(table.log_laps(m)) == doctest::Approx(static_cast<double>(chain[m].lap_count())).epsilon(1e-12));
    }
    // Points on a coarse grid often land on turning points of iterates; both kinds are covered.
    for (int i = 0; i < 12; ++i) {
      const Rational y = i < 6 ? q(num(rng), 60) : q(i, 12);
      for (std::size_t m = 1; m <= 7; ++m) {
        Orbit<Rational> o(f, y);
        const auto expected = lap_count_on(chain[m], Interval<Rational>(q(0), y)) - 1;
        CHECK(table.count_below(o, 0, m) == doctest::Approx(static_cast<double>(expected)));
      }
    }
  }
}

TEST_CASE("random maps: series over intervals match direct sums") {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<long> num(0, 48);
  for (int trial = 0; trial < 30; ++trial) {
    CAPTURE(trial);
    const auto f = oracle::random_map(rng, 5, 12);
    const std::size_t n = 7;
    const auto chain = iterate_chain(f, n);
    LapTable<Rational> table(f);
    table.extend(n);
    for (double t : {0.1, 0.3, 0.45}) {
      LapSeries<Rational> s(table, t, n);
      CHECK(s.whole() == doctest::Approx(direct_series(chain, f.domain(), t)).epsilon(1e-12));
      for (int k = 0; k < 8; ++k) {
        long lo = num(rng);
        long hi = num(rng);
        if (lo == hi) continue;
        if (lo > hi) std::swap(lo, hi);
        const Interval<Rational> J(q(lo, 48), q(hi, 48));
        CHECK(s.of(J) == doctest::Approx(direct_series(chain, J, t)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("u_2 closed form: l(u_2^n | [0,x]) = ceil(2^n x)") {
  const auto u2 = oracle::tent(q(2));
  LapTable<Rational> table(u2);
  const std::size_t n = 40;
  table.extend(n);
  const double t = 0.3;
  LapSeries<Rational> s(table, t, n);
  for (long k : {1L, 37L, 500L, 999L, 1000L}) {
    const Rational x = q(k, 1000);
    double expected = 0;
    double power = 1;
    for (std::size_t m = 0; m <= n; ++m) {
      Rational scaled = x * Rational(boost::multiprecision::mpz_int(1) << m);
      boost::multiprecision::mpz_int c = boost::multiprecision::numerator(scaled) /
                                         boost::multiprecision::denominator(scaled);
      if (Rational(c) != scaled) c += 1;
      expected += power * c.convert_to<double>();
      power *= t;
    }
    Orbit<Rational> o(u2, x);
    CHECK(s.prefix(o) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("long series stay accurate: u_2 with thousands of terms") {
  const auto u2 = oracle::tent(q(2));
  LapTable<Rational> table(u2);
  const std::size_t n = 4000;
  table.extend(n);
  CHECK(table.log_laps(n) == doctest::Approx(static_cast<double>(n) * std::log(2.0)).epsilon(1e-12));
  const double t = 0.4995;
  LapSeries<Rational> s(table, t, n);
  const double bt = 2 * t;
  CHECK(s.whole() == doctest::Approx((1 - std::pow(bt, n + 1)) / (1 - bt)).epsilon(1e-10));
  // l(u_2^n | [0,1/2]) = 2^(n-1) for n >= 1.
  const double half = 1 + t * (1 - std::pow(bt, n)) / (1 - bt);
  CHECK(s.of(Interval<Rational>(q(0), q(1, 2))) == doctest::Approx(half).epsilon(1e-10));
}

TEST_CASE("tail bound") {
  const auto u2 = oracle::tent(q(2));
  LapTable<Rational> table(u2);
  table.extend(20);
  LapSeries<Rational> s(table, 0.25, 20);
  CHECK(s.tail_bound(2.0) == doctest::Approx(std::pow(0.5, 21) / 0.5));
  CHECK(std::isinf(s.tail_bound(4.0)));
  CHECK_THROWS_AS(LapSeries<Rational>(table, 1.5, 10), DomainError);
  CHECK_THROWS_AS(LapSeries<Rational>(table, 0.25, 30), DomainError);
}
