#pragma once

#include <cstdint>
#include <compare>
#include <string>
#include <string_view>

namespace corridor {

// Traffic volume in passenger car units, stored as an exact integer at a
// fixed scale of 1e5. All simulation arithmetic stays in this type; there is
// no rounding anywhere. Overflow throws instead of wrapping, since any value
// large enough to overflow a signed 64-bit accumulator indicates corrupt
// input rather than a plausible corridor state.
class Pcu {
 public:
  static constexpr std::int64_t kScale = 100000;

  constexpr Pcu() = default;

  static constexpr Pcu from_raw(std::int64_t raw) { return Pcu(raw); }

  constexpr std::int64_t raw() const { return raw_; }

  Pcu operator+(Pcu other) const;
  Pcu operator-(Pcu other) const;
  Pcu& operator+=(Pcu other);
  Pcu& operator-=(Pcu other);
  Pcu operator-() const;

  // Checked multiply by a plain integer (seconds, scaling factors).
  Pcu times(std::int64_t factor) const;

  constexpr bool is_zero() const { return raw_ == 0; }

  friend constexpr auto operator<=>(Pcu, Pcu) = default;

  // Decimal rendering always carries exactly five fractional digits,
  // e.g. raw 35000000 -> "350.00000", raw -50000 -> "-0.50000".
  std::string to_decimal() const;

 private:
  constexpr explicit Pcu(std::int64_t raw) : raw_(raw) {}

  std::int64_t raw_ = 0;
};

// Parses a decimal string ("350", "0.5", "-1.25") into a Pcu. At most five
// fractional digits are accepted; anything finer would silently lose
// precision, so it is rejected. Throws std::invalid_argument on malformed
// input and std::overflow_error when the value does not fit.
Pcu pcu_from_decimal(std::string_view text);

}  // namespace corridor
