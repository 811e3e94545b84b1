// Copyright 2026 The matchaudit Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <gmpxx.h>

#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace matchaudit {

// Exact rational number: arbitrary precision, kept in lowest terms with a
// strictly positive denominator. Every decision made by this library rests on
// exact comparisons of these values; no floating point is used anywhere.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(int n) : v_(n) {}    // NOLINT(google-explicit-constructor)
  Rational(long n) : v_(n) {}   // NOLINT(google-explicit-constructor)
  Rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }

  // Parses "num/den" or a bare integer "num" (optional leading '-', base 10,
  // no whitespace). Throws std::invalid_argument on malformed input or a zero
  // denominator.
  static Rational parse(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) {
      return Rational(parse_integer(text), mpz_class(1));
    }
    mpz_class num = parse_integer(text.substr(0, slash));
    mpz_class den = parse_integer(text.substr(slash + 1));
    if (den == 0) {
      throw std::invalid_argument("Rational: zero denominator in '" + text +
                                  "'");
    }
    return Rational(std::move(num), std::move(den));
  }

  // Canonical form "num/den" in lowest terms with den >= 1, e.g. "2/3",
  // "-1/3", "0/1", "5/1". parse(str()) round-trips exactly.
  std::string str() const {
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  int sign() const { return sgn(v_); }
  bool is_zero() const { return sgn(v_) == 0; }

  Rational& operator+=(const Rational& o) {
    v_ += o.v_;
    return *this;
  }
  Rational& operator-=(const Rational& o) {
    v_ -= o.v_;
    return *this;
  }
  Rational& operator*=(const Rational& o) {
    v_ *= o.v_;
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::invalid_argument("Rational: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) {
    return cmp(a.v_, b.v_) == 0;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return cmp(a.v_, b.v_) != 0;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return cmp(a.v_, b.v_) < 0;
  }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return cmp(a.v_, b.v_) <= 0;
  }
  friend bool operator>(const Rational& a, const Rational& b) {
    return cmp(a.v_, b.v_) > 0;
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return cmp(a.v_, b.v_) >= 0;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.str();
  }

 private:
  explicit Rational(mpq_class v) : v_(std::move(v)) {}
  Rational(mpz_class num, mpz_class den) {
    v_ = mpq_class(std::move(num), std::move(den));
    v_.canonicalize();
  }

  static mpz_class parse_integer(const std::string& s) {
    bool ok = !s.empty();
    for (std::size_t i = 0; ok && i < s.size(); ++i) {
      char c = s[i];
      ok = (c >= '0' && c <= '9') || (c == '-' && i == 0 && s.size() > 1);
    }
    if (!ok) {
      throw std::invalid_argument("Rational: malformed integer '" + s + "'");
    }
    return mpz_class(s, 10);
  }

  mpq_class v_;
};

}  // namespace matchaudit
