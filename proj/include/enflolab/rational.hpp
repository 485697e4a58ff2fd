#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace enflolab {

/// Exact rational scalar. All structural identities (pairings, traces,
/// telescoping) are evaluated in this type; floating point enters only
/// where a p-th power or root forces it.
using Rational = mpq_class;

inline std::string fraction_str(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational parse_fraction(const std::string& text) {
  try {
    Rational q(text, 10);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not a rational literal: " + text);
  }
}

/// 2^exponent as an exact rational; exponent may be negative.
inline Rational pow2_rational(int exponent) {
  mpz_class num = 1, den = 1;
  if (exponent >= 0)
    num <<= exponent;
  else
    den <<= -exponent;
  return Rational(num, den);
}

/// Deterministic 64-bit generator with the small helpers the lab needs.
/// Every randomized sweep takes an explicit seed; reports are reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double prob) { return unit() < prob; }

  /// Random rational with numerator and denominator bounded by 2^16.
  Rational rational() {
    mpz_class num(static_cast<long>(range(-65536, 65536)));
    mpz_class den(static_cast<long>(range(1, 65536)));
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace enflolab
