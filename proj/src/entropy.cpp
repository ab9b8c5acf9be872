#include "lapmap/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lapmap {

namespace {

template <class Scalar>
double log_of(const Scalar& v) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    // Split numerator and denominator so huge variations do not overflow a double.
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    auto log_int = [](const boost::multiprecision::mpz_int& z) {
      const auto bits = boost::multiprecision::msb(z);
      if (bits < 1000) return std::log(z.convert_to<double>());
      const auto shift = bits - 60;
      boost::multiprecision::mpz_int top = z >> shift;
      return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
    };
    return log_int(numerator(v)) - log_int(denominator(v));
  } else {
    return boost::multiprecision::log(v).template convert_to<double>();
  }
}

}  // namespace

template <class Scalar>
EntropySequence<Scalar> entropy_scan(const PiecewiseLinearMap<Scalar>& f, std::size_t max_n,
                                     const IterateLimits& limits) {
  if (max_n < 2) throw DomainError("entropy_scan needs max_n >= 2");
  EntropySequence<Scalar> seq;
  seq.requested_n = max_n;
  bool truncated = false;
  auto chain = iterate_chain(f, max_n, limits, &truncated);
  seq.truncated = truncated;
  if (chain.size() < 2) {
    throw ResourceError(1, "the first iterate already exceeds the breakpoint cap");
  }
  seq.h_upper = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < chain.size(); ++n) {
    const auto& fn = chain[n];
    EntropyRow<Scalar> row{n, fn.lap_count(), 0.0, fn.variation(), 0.0};
    const double dn = static_cast<double>(n);
    row.log_laps_over_n = std::log(static_cast<double>(row.laps)) / dn;
    row.log_var_over_n = log_of(row.variation) / dn;
    seq.h_upper = std::min(seq.h_upper, row.log_laps_over_n);
    seq.rows.push_back(std::move(row));
  }

  const auto& last = seq.rows.back();
  seq.h_point = last.log_laps_over_n;
  if (seq.rows.size() >= 2) {
    const auto& prev = seq.rows[seq.rows.size() - 2];
    const double ratio = static_cast<double>(last.laps) / static_cast<double>(prev.laps);
    if (std::isfinite(ratio) && ratio >= 1.0) seq.h_point = std::log(ratio);
    seq.h_variation = log_of(last.variation) - log_of(prev.variation);
  } else {
    seq.h_variation = last.log_var_over_n;
  }
  seq.h_point = std::max(seq.h_point, 0.0);
  seq.variation_growth = seq.h_variation > 1e-9;
  seq.beta = std::exp(seq.h_point);
  seq.r = std::exp(-seq.h_point);
  return seq;
}

double entropy_of_uniform_pl(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw DomainError("slope must be a positive finite number");
  }
  return beta > 1.0 ? std::log(beta) : 0.0;
}

template EntropySequence<Rational> entropy_scan(const RationalMap&, std::size_t,
                                                const IterateLimits&);
template EntropySequence<Real> entropy_scan(const RealMap&, std::size_t, const IterateLimits&);

}  // namespace lapmap
