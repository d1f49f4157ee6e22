#pragma once

#include <cmath>
#include <string>

namespace gibbstv {

// A real number or one of the two infinities. Infinite Ising fields are
// carried in this type so hot loops never do arithmetic on IEEE infinities.
class ExtendedReal {
 public:
  enum class Kind { finite, pos_inf, neg_inf };

  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT implicit

  static constexpr ExtendedReal pos_infinity() { return {Kind::pos_inf}; }
  static constexpr ExtendedReal neg_infinity() { return {Kind::neg_inf}; }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::finite; }
  // +1 for +inf, -1 for -inf, 0 when finite
  constexpr int infinite_sign() const {
    return kind_ == Kind::pos_inf ? 1 : kind_ == Kind::neg_inf ? -1 : 0;
  }
  // Only meaningful when finite.
  constexpr double value() const { return value_; }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::finite || a.value_ == b.value_);
  }

  std::string to_string() const;

 private:
  constexpr ExtendedReal(Kind k) : kind_(k) {}
  Kind kind_ = Kind::finite;
  double value_ = 0.0;
};

}  // namespace gibbstv
