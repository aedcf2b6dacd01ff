//
// Copyright 2026 The privlens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Numeric plumbing shared by every module. All kernels are templated on a
// scalar type that is either `double` or the exact `Rational`.

#ifndef PRIVLENS_SCALAR_H_
#define PRIVLENS_SCALAR_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include <boost/multiprecision/cpp_int.hpp>

#define PRIVLENS_CONCAT_INNER_(a, b) a##b
#define PRIVLENS_CONCAT_(a, b) PRIVLENS_CONCAT_INNER_(a, b)

#define PRIVLENS_RETURN_IF_ERROR(expr)      \
  do {                                      \
    if (absl::Status _st = (expr); !_st.ok()) \
      return _st;                           \
  } while (0)

#define PRIVLENS_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                    \
  if (!tmp.ok()) return std::move(tmp).status();        \
  lhs = std::move(tmp).value()

#define PRIVLENS_ASSIGN_OR_RETURN(lhs, expr) \
  PRIVLENS_ASSIGN_OR_RETURN_IMPL_(           \
      PRIVLENS_CONCAT_(_statusor_, __LINE__), lhs, expr)

namespace privlens {

using Rational = boost::multiprecision::cpp_rational;

// Absolute tolerance used for normalization checks and verdicts.
inline constexpr double kTolerance = 1e-9;

template <typename T>
concept Scalar = std::is_same_v<T, double> || std::is_same_v<T, Rational>;

template <Scalar T>
inline constexpr bool kIsExact = std::is_same_v<T, Rational>;

inline double ToDouble(double x) { return x; }
inline double ToDouble(const Rational& x) { return x.convert_to<double>(); }

inline std::string ScalarToString(double x) { return absl::StrCat(x); }
inline std::string ScalarToString(const Rational& x) { return x.str(); }

template <Scalar T>
bool IsZero(const T& x) {
  return x == T(0);
}

template <Scalar T>
bool IsPositive(const T& x) {
  return x > T(0);
}

// Parses "p/q", integers and plain or scientific decimals into an exact
// rational. Decimal input is converted digit by digit, so "0.1" is 1/10.
inline absl::StatusOr<Rational> ParseRational(absl::string_view raw) {
  absl::string_view text = absl::StripAsciiWhitespace(raw);
  if (text.empty()) return absl::InvalidArgumentError("empty number");
  if (size_t slash = text.find('/'); slash != absl::string_view::npos) {
    auto num = ParseRational(text.substr(0, slash));
    auto den = ParseRational(text.substr(slash + 1));
    if (!num.ok() || !den.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed rational '", text, "'"));
    }
    if (*den == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("zero denominator in '", text, "'"));
    }
    return *num / *den;
  }
  bool negative = false;
  size_t pos = 0;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  boost::multiprecision::cpp_int digits = 0;
  int64_t scale = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    char ch = text[pos];
    if (ch >= '0' && ch <= '9') {
      digits = digits * 10 + (ch - '0');
      if (seen_point) --scale;
      seen_digit = true;
    } else if (ch == '.' && !seen_point) {
      seen_point = true;
    } else if (ch == 'e' || ch == 'E') {
      int64_t exponent = 0;
      if (!absl::SimpleAtoi(text.substr(pos + 1), &exponent) ||
          std::abs(exponent) > 4096) {
        return absl::InvalidArgumentError(
            absl::StrCat("malformed exponent in '", text, "'"));
      }
      scale += exponent;
      pos = text.size();
      break;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed number '", text, "'"));
    }
  }
  if (!seen_digit) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed number '", text, "'"));
  }
  Rational value(digits);
  boost::multiprecision::cpp_int ten_power =
      boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                 static_cast<unsigned>(std::abs(scale)));
  if (scale > 0) value *= Rational(ten_power);
  if (scale < 0) value /= Rational(ten_power);
  return negative ? Rational(-value) : value;
}

// A nonnegative ratio that may be +inf. The rational path keeps the finite
// value exact; `infinite` carries the pos/0 convention.
template <Scalar T>
struct ExtendedRatio {
  T value = T(0);
  bool infinite = false;

  static ExtendedRatio Infinity() { return {T(0), true}; }
  static ExtendedRatio Finite(T v) { return {std::move(v), false}; }

  double AsDouble() const {
    return infinite ? std::numeric_limits<double>::infinity()
                    : ToDouble(value);
  }
  // Natural log of the ratio, +inf for infinite ratios.
  double Nats() const {
    return infinite ? std::numeric_limits<double>::infinity()
                    : std::log(ToDouble(value));
  }
  std::string ExactString() const {
    return infinite ? std::string("inf") : ScalarToString(value);
  }

  friend bool operator<(const ExtendedRatio& a, const ExtendedRatio& b) {
    if (a.infinite) return false;
    if (b.infinite) return true;
    return a.value < b.value;
  }
  friend bool operator>(const ExtendedRatio& a, const ExtendedRatio& b) {
    return b < a;
  }
  friend bool operator==(const ExtendedRatio& a, const ExtendedRatio& b) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite;
    return a.value == b.value;
  }
};

// Ratio num/den with the conventions 0/0 -> excluded (nullopt-like flag via
// the return bool), pos/0 -> +inf.
template <Scalar T>
bool MakeRatio(const T& num, const T& den, ExtendedRatio<T>* out) {
  if (IsZero(den)) {
    if (IsZero(num)) return false;
    *out = ExtendedRatio<T>::Infinity();
    return true;
  }
  *out = ExtendedRatio<T>::Finite(num / den);
  return true;
}

// Human and JSON friendly rendering of extended reals.
inline std::string FormatExtended(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return absl::StrCat(x);
}

}  // namespace privlens

#endif  // PRIVLENS_SCALAR_H_
