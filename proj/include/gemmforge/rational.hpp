#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "gemmforge/errors.hpp"

namespace gemmforge {

// Exact rational on int64. Cycle counts and buffer depths are integral for
// conforming designs; a handful of published design points are not, and those
// must still evaluate exactly.
class Rat64 {
 public:
  constexpr Rat64() = default;
  constexpr Rat64(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rat64(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
    if (den_ == 0) throw DomainError("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }

  std::int64_t as_int() const {
    if (!is_integer()) throw DomainError("rational " + str() + " is not an integer");
    return num_;
  }

  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  std::int64_t ceil() const {
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
  }

  std::string str() const {
    if (is_integer()) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend Rat64 operator+(const Rat64& a, const Rat64& b) {
    return Rat64(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rat64 operator-(const Rat64& a, const Rat64& b) {
    return Rat64(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rat64 operator*(const Rat64& a, const Rat64& b) {
    return Rat64(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rat64 operator/(const Rat64& a, const Rat64& b) {
    if (b.num_ == 0) throw DomainError("rational division by zero");
    return Rat64(a.num_ * b.den_, a.den_ * b.num_);
  }

  friend bool operator==(const Rat64& a, const Rat64& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat64& a, const Rat64& b) { return !(a == b); }
  friend bool operator<(const Rat64& a, const Rat64& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator<=(const Rat64& a, const Rat64& b) { return !(b < a); }
  friend bool operator>(const Rat64& a, const Rat64& b) { return b < a; }
  friend bool operator>=(const Rat64& a, const Rat64& b) { return !(a < b); }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

// ceil(value / q) for q >= 1.
inline std::int64_t ceil_div(const Rat64& value, std::int64_t q) {
  return (value / Rat64(q)).ceil();
}

inline std::int64_t ceil_div(std::int64_t value, std::int64_t q) {
  return (value + q - 1) / q;
}

// Smallest multiple of `unit` that is >= value.
inline std::int64_t round_up_multiple(std::int64_t value, std::int64_t unit) {
  return ceil_div(value, unit) * unit;
}

}  // namespace gemmforge
