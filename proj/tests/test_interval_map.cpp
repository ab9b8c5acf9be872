#include "lapmap/interval_map.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace lapmap;
using oracle::q;

TEST_CASE("eval on the tent family") {
  CHECK(oracle::tent(q(2)).eval(q(1, 2)) == q(1));
  CHECK(oracle::tent(q(2)).eval(q(1, 4)) == q(1, 2));
  CHECK(oracle::tent(q(3, 2)).eval(q(3, 4)) == q(3, 8));
  CHECK_THROWS_AS(oracle::tent(q(2)).eval(q(-1, 10)), DomainError);
  CHECK_THROWS_AS(oracle::tent(q(2)).eval(q(11, 10)), DomainError);
}

TEST_CASE("intervals must be non-trivial") {
  CHECK_THROWS_AS(Interval<Rational>(q(1), q(1)), DomainError);
  CHECK_THROWS_AS(Interval<Rational>(q(1), q(0)), DomainError);
}

TEST_CASE("compose") {
  const auto u2 = oracle::tent(q(2));
  const auto id = RationalMap::identity(q(0), q(1));
  CHECK(compose(id, u2) == u2);
  CHECK(compose(u2, id) == u2);
  const auto uu = compose(u2, u2);
  CHECK(uu.lap_count() == 4);
  CHECK(turning_points(uu) == std::vector<Rational>{q(1, 4), q(1, 2), q(3, 4)});

  const RationalMap other({q(0), q(2)}, {q(0), q(2)});
  CHECK_THROWS_AS(compose(other, u2), DomainError);
}

TEST_CASE("iterate") {
  const auto u2 = oracle::tent(q(2));
  const auto u3 = iterate(u2, 3);
  CHECK(u3.lap_count() == 8);
  std::vector<Rational> expected;
  for (int k = 1; k <= 7; ++k) expected.push_back(q(k, 8));
  CHECK(turning_points(u3) == expected);
  CHECK(iterate(u2, 0) == RationalMap::identity(q(0), q(1)));
  const auto u = oracle::tent(q(3, 2));
  CHECK(iterate(u, 2) == compose(u, u));
  for (std::size_t n = 1; n <= 12; ++n) CHECK(lap_count(iterate(u2, n)) == (std::size_t{1} << n));
}

TEST_CASE("iterate reports the first n over the knot cap") {
  const auto u2 = oracle::tent(q(2));
  IterateLimits small{100};
  bool truncated = false;
  auto chain = iterate_chain(u2, 10, small, &truncated);
  CHECK(truncated);
  REQUIRE(chain.size() >= 2);
  CHECK(chain.back().knots().size() <= 100);
  try {
    iterate(u2, 10, small);
    FAIL("expected a resource error");
  } catch (const ResourceError& e) {
    CHECK(e.iterate() == chain.size());
    CHECK(std::string(e.what()).find(std::to_string(chain.size())) != std::string::npos);
  }
}

TEST_CASE("lap counts and turning points") {
  CHECK(lap_count(oracle::tent(q(1, 2))) == 2);
  CHECK(lap_count(oracle::tent(q(2))) == 2);
  CHECK(lap_count(RationalMap::identity(q(0), q(1))) == 1);
  CHECK(turning_points(oracle::tent(q(7, 5))) == std::vector<Rational>{q(1, 2)});
  CHECK(turning_points(RationalMap::identity(q(0), q(1))).empty());

  const auto uu = iterate(oracle::tent(q(2)), 2);
  CHECK(lap_count_on(uu, Interval<Rational>(q(0), q(1))) == lap_count(uu));
  CHECK(lap_count_on(uu, Interval<Rational>(q(0), q(1, 2))) == 2);
  CHECK(lap_count_on(uu, Interval<Rational>(q(1, 3), q(2, 5))) == 1);
}

TEST_CASE("laps may contain kinks that are not turning points") {
  const RationalMap f({q(0), q(1, 4), q(1, 2), q(1)}, {q(0), q(1, 4), q(1), q(0)});
  CHECK(f.lap_count() == 2);
  CHECK(turning_points(f) == std::vector<Rational>{q(1, 2)});
  CHECK(f.segment_count() == 3);
  const auto c = RationalMap::canonical({q(0), q(1, 4), q(1, 2), q(1)}, {q(0), q(1, 4), q(1, 2), q(0)});
  CHECK(c.segment_count() == 2);
}

TEST_CASE("variation") {
  CHECK(variation(oracle::tent(q(3, 2))) == q(3, 2));
  CHECK(variation(RationalMap::identity(q(0), q(1))) == q(1));
  CHECK(variation(iterate(oracle::tent(q(3, 2)), 4)) == q(81, 16));
  for (const auto& beta : {q(6, 5), q(3, 2), q(19, 10), q(2)}) {
    const auto u = oracle::tent(beta);
    Rational power = 1;
    for (std::size_t n = 1; n <= 8; ++n) {
      power *= beta;
      CHECK(variation(iterate(u, n)) == power);
    }
  }
}

TEST_CASE("inverse homeomorphism") {
  const auto phi = RationalMap({q(0), q(3, 10), q(7, 10), q(1)}, {q(0), q(2, 5), q(3, 5), q(1)});
  const auto inv = inverse_homeomorphism(phi);
  CHECK(compose(inv, phi) == RationalMap::identity(q(0), q(1)));
  CHECK(compose(phi, inv) == RationalMap::identity(q(0), q(1)));
  CHECK_THROWS_AS(inverse_homeomorphism(oracle::tent(q(2))), DomainError);
}

TEST_CASE("random maps: composition laws against the preimage oracle") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<long> num(0, 997);
  for (int trial = 0; trial < 100; ++trial) {
    CAPTURE(trial);
    const auto f = oracle::random_map(rng);
    const auto g = oracle::random_map(rng);
    const auto gf = compose(g, f);

    CHECK(gf.lap_count() <= f.lap_count() * g.lap_count());

    std::set<Rational> expected(f.turning_points().begin(), f.turning_points().end());
    for (const auto& d : g.turning_points()) {
      for (const auto& x : oracle::preimages(f, d)) {
        if (f.a() < x && x < f.b()) expected.insert(x);
      }
    }
    CHECK(turning_points(gf) == std::vector<Rational>(expected.begin(), expected.end()));

    // Minimality: adjacent segments never collinear, slopes never zero.
    for (std::size_t k = 0; k < gf.segment_count(); ++k) CHECK(gf.slope(k) != 0);
    for (std::size_t k = 1; k < gf.segment_count(); ++k) CHECK(gf.slope(k - 1) != gf.slope(k));

    const Rational x = q(num(rng), 997);
    CHECK(gf.eval(x) == g.eval(f.eval(x)));
  }
}

TEST_CASE("random maps: iterate additivity and turning points of iterates") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<long> num(0, 1009);
  for (int trial = 0; trial < 25; ++trial) {
    CAPTURE(trial);
    const auto f = oracle::random_map(rng, 4, 10);
    const auto chain = iterate_chain(f, 5);
    for (std::size_t m = 0; m <= 2; ++m) {
      for (std::size_t n = 0; n + m <= 5; ++n) {
        const Rational x = q(num(rng), 1009);
        CHECK(chain[m + n].eval(x) == chain[m].eval(chain[n].eval(x)));
        CHECK(chain[m + n].lap_count() <= chain[m].lap_count() * chain[n].lap_count());
      }
    }
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto expected = oracle::turning_points_of_iterate(f, n);
      CHECK(turning_points(chain[n]) == std::vector<Rational>(expected.begin(), expected.end()));
    }
  }
}

TEST_CASE("real scalars follow the same rules") {
  const Real beta = boost::multiprecision::sqrt(Real(2));
  const RealMap u({Real(0), Real(1) / 2, Real(1)}, {Real(0), beta / 2, Real(0)});
  CHECK(u.lap_count() == 2);
  const auto uu = compose(u, u);
  CHECK(uu.lap_count() == 4);
  CHECK(abs_value<Real>(uu.variation() - 2) < ScalarTraits<Real>::tolerance());
  CHECK(eval_approx(u, 0.25) == doctest::Approx(std::sqrt(2.0) / 4));
}
