#include "polyround/formats.hpp"

#include <cassert>
#include <cfloat>
#include <cmath>
#include <stdexcept>

#include "polyround/util.hpp"

namespace polyround::formats {

namespace {

std::uint64_t low_ones(int n) {
  return n >= 64 ? ~0ull : ((1ull << n) - 1);
}

// --- ieee_fp layout helpers -------------------------------------------------

struct IeeeLayout {
  int fbits;
  int ebits;
  std::uint64_t sign_mask;
  std::uint64_t mag_mask;       // exponent+fraction field
  std::uint64_t exp_all_ones;
  int bias;
  int emin;                      // exponent of the smallest normal value
  int emax;                      // exponent of the largest normal value

  explicit IeeeLayout(const FormatDescriptor& f)
      : fbits(f.fraction_bits()),
        ebits(f.exponent_bits),
        sign_mask(1ull << (f.total_bits - 1)),
        mag_mask(low_ones(f.total_bits - 1)),
        exp_all_ones(low_ones(f.exponent_bits)),
        bias(f.bias()),
        emin(1 - f.bias()),
        emax((1 << f.exponent_bits) - 2 - f.bias()) {}

  // Count of finite magnitude patterns (0 .. max finite), i.e. the first
  // magnitude with E = all ones.
  std::uint64_t finite_mag_count() const { return exp_all_ones << fbits; }
};

double decode_ieee_magnitude(const IeeeLayout& L, std::uint64_t mag) {
  const std::uint64_t efield = mag >> L.fbits;
  const std::uint64_t frac = mag & low_ones(L.fbits);
  if (efield == 0)
    return std::ldexp(static_cast<double>(frac), L.emin - L.fbits);
  return std::ldexp(static_cast<double>(frac + (1ull << L.fbits)),
                    static_cast<int>(efield) - L.bias - L.fbits);
}

// --- posit layout helpers ---------------------------------------------------

struct PositLayout {
  int n;
  int es;
  std::uint64_t sign_mask;
  std::uint64_t nar_bits;
  std::uint64_t mask;

  explicit PositLayout(const FormatDescriptor& f)
      : n(f.total_bits),
        es(f.exponent_bits),
        sign_mask(1ull << (f.total_bits - 1)),
        nar_bits(1ull << (f.total_bits - 1)),
        mask(low_ones(f.total_bits)) {}
};

// Value of a positive posit pattern (0 < p < 2^(n-1)).
double decode_posit_positive(const PositLayout& L, std::uint64_t p) {
  // Regime: run of identical bits after the sign, terminated by the guard
  // bit or the end of the word.
  int pos = L.n - 2;  // index of the first regime bit
  const int lead = (p >> pos) & 1;
  int run = 0;
  while (pos >= 0 && ((p >> pos) & 1) == static_cast<std::uint64_t>(lead)) {
    ++run;
    --pos;
  }
  if (pos >= 0) --pos;  // skip the regime guard bit
  const int r = lead ? run - 1 : -run;

  // Up to es exponent bits, padded with zeros on the right when truncated.
  int e = 0;
  int ebits_avail = std::min(L.es, pos + 1);
  for (int i = 0; i < ebits_avail; ++i) {
    e = (e << 1) | static_cast<int>((p >> pos) & 1);
    --pos;
  }
  e <<= (L.es - ebits_avail);

  const int fbits = pos + 1;
  const std::uint64_t frac = fbits > 0 ? (p & low_ones(fbits)) : 0;
  const int scale = (r << L.es) + e;
  // (1 + frac/2^fbits) * 2^scale, assembled exactly.
  return std::ldexp(static_cast<double>(frac + (1ull << fbits)), scale - fbits);
}

std::uint64_t posit_negate(const PositLayout& L, std::uint64_t p) {
  return (~p + 1) & L.mask;
}

}  // namespace

FormatDescriptor FormatDescriptor::ieee(int n, int exponent_bits) {
  if (exponent_bits < 2 || exponent_bits > n - 2 || n > 64)
    throw std::invalid_argument("ieee_fp format: need 2 <= |E| <= n-2");
  return FormatDescriptor{Kind::ieee_fp, n, exponent_bits};
}

FormatDescriptor FormatDescriptor::posit(int n, int es) {
  if (n < 3 || es < 0 || n > 64)
    throw std::invalid_argument("posit format: need n >= 3, es >= 0");
  return FormatDescriptor{Kind::posit, n, es};
}

std::uint64_t FormatDescriptor::pattern_mask() const { return low_ones(total_bits); }
std::uint64_t FormatDescriptor::pattern_count() const { return 1ull << total_bits; }

std::uint64_t FormatDescriptor::canonical_nan_bits() const {
  if (kind == Kind::posit) return 1ull << (total_bits - 1);
  // Quiet NaN: exponent all ones, top fraction bit set.
  IeeeLayout L{*this};
  return (L.exp_all_ones << L.fbits) | (1ull << (L.fbits - 1));
}

std::string FormatDescriptor::name() const {
  if (*this == fp5()) return "fp5";
  if (*this == bfloat16()) return "bfloat16";
  if (*this == binary32()) return "binary32";
  if (*this == posit16()) return "posit16";
  const char* k = kind == Kind::ieee_fp ? "ieee_fp" : "posit";
  return std::string(k) + "(" + std::to_string(total_bits) + "," +
         std::to_string(exponent_bits) + ")";
}

std::optional<FormatDescriptor> format_by_name(const std::string& name) {
  if (name == "fp5") return FormatDescriptor::fp5();
  if (name == "bfloat16") return FormatDescriptor::bfloat16();
  if (name == "binary32") return FormatDescriptor::binary32();
  if (name == "posit16") return FormatDescriptor::posit16();
  for (const char* kind : {"ieee_fp", "posit"}) {
    const std::string prefix = std::string(kind) + "(";
    if (name.rfind(prefix, 0) == 0 && name.back() == ')') {
      const auto comma = name.find(',', prefix.size());
      if (comma == std::string::npos) return std::nullopt;
      try {
        int n = std::stoi(name.substr(prefix.size(), comma - prefix.size()));
        int e = std::stoi(name.substr(comma + 1, name.size() - comma - 2));
        return kind[0] == 'i' ? FormatDescriptor::ieee(n, e)
                              : FormatDescriptor::posit(n, e);
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

ValueClass classify(const TValue& v) {
  const FormatDescriptor& f = v.format;
  const std::uint64_t bits = v.bits & f.pattern_mask();
  if (f.kind == Kind::posit)
    return bits == (1ull << (f.total_bits - 1)) ? ValueClass::nar : ValueClass::finite;
  IeeeLayout L{f};
  const std::uint64_t mag = bits & L.mag_mask;
  if ((mag >> L.fbits) != L.exp_all_ones) return ValueClass::finite;
  if ((mag & low_ones(L.fbits)) != 0) return ValueClass::nan;
  return (bits & L.sign_mask) ? ValueClass::neg_inf : ValueClass::pos_inf;
}

bool is_finite(const TValue& v) { return classify(v) == ValueClass::finite; }

Decoded decode(const TValue& v) {
  const FormatDescriptor& f = v.format;
  const std::uint64_t bits = v.bits & f.pattern_mask();
  const ValueClass cls = classify(v);
  if (cls != ValueClass::finite) return Decoded{cls, 0.0};

  if (f.kind == Kind::posit) {
    PositLayout L{f};
    if (bits == 0) return Decoded{ValueClass::finite, 0.0};
    if (bits & L.sign_mask)
      return Decoded{ValueClass::finite,
                     -decode_posit_positive(L, posit_negate(L, bits))};
    return Decoded{ValueClass::finite, decode_posit_positive(L, bits)};
  }

  IeeeLayout L{f};
  const double mag = decode_ieee_magnitude(L, bits & L.mag_mask);
  return Decoded{ValueClass::finite, (bits & L.sign_mask) ? -mag : mag};
}

bool exact_in_binary64(const FormatDescriptor& f) {
  if (f.kind == Kind::ieee_fp) {
    IeeeLayout L{f};
    // Midpoints need significand+2 bits; exponents must stay well inside
    // binary64's normal range.
    return L.fbits + 2 <= 52 && L.emax <= 1000 && L.emin - L.fbits >= -1000;
  }
  PositLayout L{f};
  const int max_scale = (1 << L.es) * (L.n - 2);
  return L.n - 3 - L.es + 2 <= 52 && max_scale + L.n <= 1000;
}

double max_finite_value(const FormatDescriptor& f) {
  if (f.kind == Kind::posit) {
    PositLayout L{f};
    return decode_posit_positive(L, low_ones(f.total_bits - 1));
  }
  IeeeLayout L{f};
  return decode_ieee_magnitude(L, L.finite_mag_count() - 1);
}

double min_positive_value(const FormatDescriptor& f) {
  if (f.kind == Kind::posit) {
    PositLayout L{f};
    return decode_posit_positive(L, 1);
  }
  IeeeLayout L{f};
  return decode_ieee_magnitude(L, 1);
}

double overflow_midpoint(const FormatDescriptor& f) {
  if (f.kind != Kind::ieee_fp)
    throw std::logic_error("overflow_midpoint: ieee_fp only");
  IeeeLayout L{f};
  // Midpoint of the largest finite value and the next would-be value 2^(emax+1).
  return std::ldexp(2.0 - std::ldexp(1.0, -(L.fbits + 1)), L.emax);
}

std::uint64_t ladder_size(const FormatDescriptor& f) {
  if (f.kind == Kind::posit) return f.pattern_count() - 1;
  IeeeLayout L{f};
  return 2 * L.finite_mag_count() - 1;  // one shared zero
}

TValue ladder_value(const FormatDescriptor& f, std::uint64_t index) {
  if (index >= ladder_size(f)) throw std::out_of_range("ladder_value");
  if (f.kind == Kind::posit) {
    // Finite posits sorted by value are exactly the patterns sorted as
    // two's-complement integers, NaR excluded.
    const std::int64_t half = static_cast<std::int64_t>(1ull << (f.total_bits - 1));
    const std::int64_t signed_bits = static_cast<std::int64_t>(index) - (half - 1);
    return TValue{f, static_cast<std::uint64_t>(signed_bits) & f.pattern_mask()};
  }
  IeeeLayout L{f};
  const std::uint64_t M = L.finite_mag_count();
  if (index < M - 1) return TValue{f, L.sign_mask | (M - 1 - index)};
  return TValue{f, index - (M - 1)};
}

std::uint64_t ladder_index(const TValue& v) {
  if (!is_finite(v)) throw std::invalid_argument("ladder_index: finite values only");
  const FormatDescriptor& f = v.format;
  const std::uint64_t bits = v.bits & f.pattern_mask();
  if (f.kind == Kind::posit) {
    const std::int64_t half = static_cast<std::int64_t>(1ull << (f.total_bits - 1));
    std::int64_t signed_bits = static_cast<std::int64_t>(bits);
    if (bits & (1ull << (f.total_bits - 1))) signed_bits -= 2 * half;
    return static_cast<std::uint64_t>(signed_bits + (half - 1));
  }
  IeeeLayout L{f};
  const std::uint64_t M = L.finite_mag_count();
  const std::uint64_t mag = bits & L.mag_mask;
  if ((bits & L.sign_mask) && mag != 0) return M - 1 - mag;
  return M - 1 + mag;  // -0 aliases +0
}

std::optional<TValue> next_up(const TValue& v) {
  const std::uint64_t i = ladder_index(v);
  if (i + 1 >= ladder_size(v.format)) return std::nullopt;
  return ladder_value(v.format, i + 1);
}

std::optional<TValue> next_down(const TValue& v) {
  const std::uint64_t i = ladder_index(v);
  if (i == 0) return std::nullopt;
  return ladder_value(v.format, i - 1);
}

double midpoint_h(const TValue& a, const TValue& b) {
  if (a.format != b.format) throw std::invalid_argument("midpoint_h: mixed formats");
  if (!exact_in_binary64(a.format))
    throw std::invalid_argument("midpoint_h: format midpoints not exact in binary64");
  const std::uint64_t ia = ladder_index(a), ib = ladder_index(b);
  if (ia + 1 != ib && ib + 1 != ia)
    throw std::invalid_argument("midpoint_h: values not adjacent");
  // Sum of two adjacent values fits in significand+2 bits: exact.
  return (decode(a).value + decode(b).value) / 2.0;
}

namespace {

TValue round_ieee(const FormatDescriptor& f, double x) {
  IeeeLayout L{f};
  if (std::isnan(x)) return TValue{f, f.canonical_nan_bits()};
  const bool neg = std::signbit(x);
  const std::uint64_t sign = neg ? L.sign_mask : 0;
  if (std::isinf(x)) return TValue{f, sign | (L.exp_all_ones << L.fbits)};
  double a = std::fabs(x);
  if (a == 0.0) return TValue{f, 0};  // canonical zero
  if (a >= overflow_midpoint(f))      // the midpoint itself ties to even = inf
    return TValue{f, sign | (L.exp_all_ones << L.fbits)};

  int e = std::ilogb(a);
  const int qexp = (e < L.emin ? L.emin : e) - L.fbits;
  // a/2^qexp is exact: the quotient is a normal binary64 below 2^(fbits+1).
  const double k = std::ldexp(a, -qexp);
  // nearbyint under the default rounding mode: nearest, ties to the even
  // integer, which is exactly the even-bit-pattern rule here.
  const std::uint64_t r = static_cast<std::uint64_t>(std::nearbyint(k));
  std::uint64_t mag;
  if (e < L.emin) {
    mag = r;  // r == 2^fbits carries into the smallest normal
  } else {
    // r in [2^fbits, 2^(fbits+1)]; the +2^fbits overflow carries the
    // exponent field automatically.
    mag = (static_cast<std::uint64_t>(e - L.emin + 1) << L.fbits) +
          (r - (1ull << L.fbits));
  }
  if (mag == 0) return TValue{f, 0};  // rounded to zero: canonical +0
  return TValue{f, sign | mag};
}

TValue round_posit(const FormatDescriptor& f, double x) {
  PositLayout L{f};
  if (std::isnan(x)) return TValue{f, L.nar_bits};
  if (x == 0.0) return TValue{f, 0};
  const bool neg = x < 0.0;
  const double a = std::fabs(x);
  const std::uint64_t pos_max = low_ones(f.total_bits - 1);
  std::uint64_t p;
  if (a >= decode_posit_positive(L, pos_max)) {
    p = pos_max;                       // saturate: never overflow to NaR
  } else if (a <= decode_posit_positive(L, 1)) {
    p = 1;                             // saturate: never underflow to 0
  } else {
    // Positive patterns are value-ordered; find lo with v(lo) <= a < v(lo+1).
    std::uint64_t lo = 1, hi = pos_max;
    while (lo + 1 < hi) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (decode_posit_positive(L, mid) <= a)
        lo = mid;
      else
        hi = mid;
    }
    const double vlo = decode_posit_positive(L, lo);
    const double vhi = decode_posit_positive(L, hi);
    const double mid = (vlo + vhi) / 2.0;  // exact, see midpoint_h
    if (a < mid)
      p = lo;
    else if (a > mid)
      p = hi;
    else
      p = (lo % 2 == 0) ? lo : hi;  // tie: even bit pattern (parity survives negation)
  }
  return TValue{f, neg ? posit_negate(L, p) : p};
}

}  // namespace

TValue round_to_format(const FormatDescriptor& f, double x) {
  if (!exact_in_binary64(f))
    throw std::invalid_argument("round_to_format: format not exact in binary64");
  return f.kind == Kind::posit ? round_posit(f, x) : round_ieee(f, x);
}

std::string to_hex(const TValue& v) {
  return polyround::to_hex(v.bits & v.format.pattern_mask(),
                           (v.format.total_bits + 3) / 4);
}

}  // namespace polyround::formats
