#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace polyround::formats {

// A target representation: a small IEEE-style FP layout or a posit layout.
// All arithmetic inside the library happens in binary64 (the working
// representation); these formats only encode, decode, round and enumerate.
enum class Kind { ieee_fp, posit };

struct FormatDescriptor {
  Kind kind = Kind::ieee_fp;
  int total_bits = 0;
  // |E| for ieee_fp; es for posit.
  int exponent_bits = 0;

  static FormatDescriptor ieee(int n, int exponent_bits);
  static FormatDescriptor posit(int n, int es);

  static FormatDescriptor fp5() { return ieee(5, 2); }
  static FormatDescriptor bfloat16() { return ieee(16, 8); }
  static FormatDescriptor binary32() { return ieee(32, 8); }
  static FormatDescriptor posit16() { return posit(16, 1); }

  // ieee_fp helpers.
  int fraction_bits() const { return total_bits - 1 - exponent_bits; }
  int bias() const { return (1 << (exponent_bits - 1)) - 1; }

  std::uint64_t pattern_mask() const;           // low total_bits ones
  std::uint64_t pattern_count() const;          // 2^n
  std::uint64_t canonical_nan_bits() const;     // ieee quiet NaN / posit NaR

  std::string name() const;                     // "bfloat16", "ieee_fp(6,3)", ...
  bool operator==(const FormatDescriptor&) const = default;
};

// Parses "fp5", "bfloat16", "binary32", "posit16", "ieee_fp(n,e)", "posit(n,es)".
std::optional<FormatDescriptor> format_by_name(const std::string& name);

enum class ValueClass { finite, pos_inf, neg_inf, nan, nar };

struct TValue {
  FormatDescriptor format;
  std::uint64_t bits = 0;
  bool operator==(const TValue&) const = default;
};

struct Decoded {
  ValueClass cls = ValueClass::finite;
  double value = 0.0;  // meaningful only when cls == finite; exact for all supported formats
};

ValueClass classify(const TValue& v);
bool is_finite(const TValue& v);

// Exact value of a bit pattern. Total: special patterns come back as tags.
// All supported formats decode exactly into binary64 (checked at
// construction: significand and exponent range fit).
Decoded decode(const TValue& v);
inline Decoded decode(const FormatDescriptor& f, std::uint64_t bits) {
  return decode(TValue{f, bits});
}

// Round an exact binary64 value to the format, round-to-nearest with ties to
// the even bit pattern. ieee_fp overflows to +/-inf at the midpoint past the
// largest finite value; posit saturates (a nonzero value never becomes 0 or
// NaR). Zero results and NaN results are canonicalized to a single pattern
// each so bit-exact comparisons are reproducible.
TValue round_to_format(const FormatDescriptor& f, double x);

// The finite values of a format sorted by value ("the ladder"). For ieee_fp
// the ladder carries one zero (-0 aliases +0); for posit it is every pattern
// except NaR. Indices are 0-based.
std::uint64_t ladder_size(const FormatDescriptor& f);
TValue ladder_value(const FormatDescriptor& f, std::uint64_t index);
std::uint64_t ladder_index(const TValue& v);  // v must be finite

// Adjacent finite value by value order; nullopt at the extremes.
std::optional<TValue> next_up(const TValue& v);
std::optional<TValue> next_down(const TValue& v);

// Exact (a+b)/2 in binary64 for two ladder-adjacent finite values.
// Rejects formats whose values cannot guarantee an exact midpoint.
double midpoint_h(const TValue& a, const TValue& b);

// True when every finite value of the format (and every midpoint of
// neighbors) is exactly a binary64 value.
bool exact_in_binary64(const FormatDescriptor& f);

// ieee_fp only: the binary64 value halfway between the largest finite value
// and the next would-be value; |x| >= this rounds to infinity under RNE.
double overflow_midpoint(const FormatDescriptor& f);

// Largest finite value / smallest positive value, as binary64.
double max_finite_value(const FormatDescriptor& f);
double min_positive_value(const FormatDescriptor& f);

// Visit every bit pattern of the format exactly once, in pattern order
// (specials included; filter with the predicate).
template <class Pred, class Fn>
void enumerate(const FormatDescriptor& f, Pred&& pred, Fn&& fn) {
  const std::uint64_t n = f.pattern_count();
  for (std::uint64_t p = 0; p < n; ++p) {
    TValue v{f, p};
    if (pred(v)) fn(v);
  }
}

template <class Pred>
std::uint64_t count_values(const FormatDescriptor& f, Pred&& pred) {
  std::uint64_t n = 0;
  enumerate(f, pred, [&](const TValue&) { ++n; });
  return n;
}

// Fixed-width hex of the bit pattern, e.g. bfloat16 0x3F80.
std::string to_hex(const TValue& v);

}  // namespace polyround::formats
