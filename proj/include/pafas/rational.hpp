#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "pafas/errors.hpp"

namespace pafas {

// Exact rational on int64 with gcd-normalized state; comparisons and
// arithmetic go through __int128 so cycle means of large graphs stay exact.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  Rational() = default;
  Rational(int64_t n) : num(n), den(1) {}
  Rational(int64_t n, int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw InternalError("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    if (num == 0) den = 1;
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den;
    __int128 d = static_cast<__int128>(a.den) * b.den;
    return make_checked(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den;
    __int128 d = static_cast<__int128>(a.den) * b.den;
    return make_checked(n, d);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return make_checked(static_cast<__int128>(a.num) * b.num,
                        static_cast<__int128>(a.den) * b.den);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) throw InternalError("rational division by zero");
    return make_checked(static_cast<__int128>(a.num) * b.den,
                        static_cast<__int128>(a.den) * b.num);
  }

  Rational inverse() const {
    if (num == 0) throw InternalError("rational division by zero");
    return Rational(den, num);
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  std::string str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
  }

 private:
  static Rational make_checked(__int128 n, __int128 d) {
    if (d < 0) { n = -n; d = -d; }
    __int128 an = n < 0 ? -n : n;
    // reduce in 128 bits before narrowing
    __int128 a = an, b = d;
    while (b) { __int128 t = a % b; a = b; b = t; }
    if (a > 1) { n /= a; d /= a; }
    if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
      throw InternalError("rational overflow");
    Rational r;
    r.num = static_cast<int64_t>(n);
    r.den = static_cast<int64_t>(d);
    if (r.num == 0) r.den = 1;
    return r;
  }
};

}  // namespace pafas
