#include "corridor/pcu.hpp"

#include <cctype>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace corridor {

namespace {

[[noreturn]] void overflow(const char* op) {
  throw std::overflow_error(std::string("pcu arithmetic overflow during ") +
                            op);
}

std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* op) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) overflow(op);
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* op) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) overflow(op);
  return out;
}

}  // namespace

Pcu Pcu::operator+(Pcu other) const {
  return Pcu(checked_add(raw_, other.raw_, "addition"));
}

Pcu Pcu::operator-(Pcu other) const {
  std::int64_t out = 0;
  if (__builtin_sub_overflow(raw_, other.raw_, &out)) overflow("subtraction");
  return Pcu(out);
}

Pcu& Pcu::operator+=(Pcu other) { return *this = *this + other; }

Pcu& Pcu::operator-=(Pcu other) { return *this = *this - other; }

Pcu Pcu::operator-() const {
  if (raw_ == std::numeric_limits<std::int64_t>::min()) overflow("negation");
  return Pcu(-raw_);
}

Pcu Pcu::times(std::int64_t factor) const {
  return Pcu(checked_mul(raw_, factor, "multiplication"));
}

std::string Pcu::to_decimal() const {
  std::int64_t whole = raw_ / kScale;
  std::int64_t frac = raw_ % kScale;
  const bool negative = raw_ < 0;
  if (negative) {
    whole = -whole;
    frac = -frac;
  }
  std::string out;
  if (negative) out.push_back('-');
  out += std::to_string(whole);
  out.push_back('.');
  std::string digits = std::to_string(frac);
  out.append(5 - digits.size(), '0');
  out += digits;
  return out;
}

Pcu pcu_from_decimal(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    negative = text[pos] == '-';
    ++pos;
  }
  std::size_t digits_begin = pos;
  std::int64_t whole = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(whole, std::int64_t{10}, &out) ||
        __builtin_add_overflow(out, std::int64_t{text[pos] - '0'}, &whole)) {
      throw std::overflow_error("pcu value out of range: " + std::string(text));
    }
    ++pos;
  }
  if (pos == digits_begin) {
    throw std::invalid_argument("malformed pcu decimal: " + std::string(text));
  }

  std::int64_t frac = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t frac_begin = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    const std::size_t frac_digits = pos - frac_begin;
    if (frac_digits == 0) {
      throw std::invalid_argument("malformed pcu decimal: " + std::string(text));
    }
    if (frac_digits > 5) {
      throw std::invalid_argument("pcu precision is five fractional digits, got " +
                                  std::to_string(frac_digits) + " in: " + std::string(text));
    }
    for (std::size_t i = frac_begin; i < pos; ++i) frac = frac * 10 + (text[i] - '0');
    for (std::size_t i = frac_digits; i < 5; ++i) frac *= 10;
  }
  if (pos != text.size()) {
    throw std::invalid_argument("malformed pcu decimal: " + std::string(text));
  }

  std::int64_t raw = 0;
  if (__builtin_mul_overflow(whole, Pcu::kScale, &raw) ||
      __builtin_add_overflow(raw, frac, &raw)) {
    throw std::overflow_error("pcu value out of range: " + std::string(text));
  }
  if (negative) raw = -raw;
  return Pcu::from_raw(raw);
}

}  // namespace corridor
