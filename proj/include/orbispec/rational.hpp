#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace orbispec {

/// Arbitrary-precision rational used by every exact computation.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1)
{
  if (den == 0)
    throw std::invalid_argument("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

/// r is an integer plus one half.
inline bool is_half_odd(const Rational& r)
{
  Rational twice = 2 * r;
  return is_integer(twice) && !is_integer(r);
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

/// Floor of a rational as a rational integer.
inline Rational floor(const Rational& r)
{
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return Rational(q);
}

/// Representative of r modulo 1 in [0,1).
inline Rational frac(const Rational& r) { return r - floor(r); }

/**
 * Parses "p/q", a signed integer, or a finite decimal ("0.25", "-1.5e-1")
 * into an exact rational. Decimals are converted digit-exactly, never
 * through a binary float.
 */
inline Rational parse_rational(std::string_view text)
{
  std::string s(text);
  if (s.empty())
    throw std::invalid_argument("empty rational literal");

  if (auto slash = s.find('/'); slash != std::string::npos) {
    mpz_class num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0)
      throw std::invalid_argument("malformed rational literal: " + s);
    if (den == 0)
      throw std::invalid_argument("zero denominator: " + s);
    Rational r(num, den);
    r.canonicalize();
    return r;
  }

  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    try {
      std::size_t used = 0;
      exponent = std::stol(s.substr(e + 1), &used);
      if (used != s.size() - e - 1)
        throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed exponent: " + s);
    }
    s.resize(e);
  }

  bool negative = false;
  std::size_t pos = 0;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    negative = s[pos] == '-';
    ++pos;
  }
  std::string digits;
  long scale = 0;
  bool seen_point = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point)
        ++scale;
    } else {
      throw std::invalid_argument("malformed number: " + std::string(text));
    }
  }
  if (digits.empty())
    throw std::invalid_argument("malformed number: " + std::string(text));

  mpz_class num(digits, 10);
  if (negative)
    num = -num;
  long shift = exponent - scale;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational r = shift < 0 ? Rational(num, pow10) : Rational(num * pow10);
  r.canonicalize();
  return r;
}

/**
 * Small-height random rationals for property checks. Numerators are drawn
 * from [-max_num, max_num], denominators from [1, max_den].
 */
class RationalSampler {
public:
  explicit RationalSampler(std::uint64_t seed, long max_num = 24, long max_den = 12)
    : rng_(seed), num_(-max_num, max_num), den_(1, max_den)
  {}

  Rational operator()() { return make_rational(num_(rng_), den_(rng_)); }

  long integer(long lo, long hi)
  {
    std::uniform_int_distribution<long> d(lo, hi);
    return d(rng_);
  }

  std::mt19937_64& engine() { return rng_; }

private:
  std::mt19937_64 rng_;
  std::uniform_int_distribution<long> num_;
  std::uniform_int_distribution<long> den_;
};

} // namespace orbispec
