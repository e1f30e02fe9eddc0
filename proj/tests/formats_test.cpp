#include "polyround/formats.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cfloat>
#include <cmath>
#include <random>
#include <vector>

#include "polyround/util.hpp"

using namespace polyround;
using formats::FormatDescriptor;
using formats::TValue;
using formats::ValueClass;

namespace {

TValue tv(const FormatDescriptor& f, double x) {
  const TValue v = formats::round_to_format(f, x);
  EXPECT_EQ(formats::decode(v).value, x) << "value not representable: " << x;
  return v;
}

// Independent RNE reference: scan every finite value for the nearest one,
// ties to the even bit pattern, with the posit saturation rules and the ieee
// overflow rule applied. Decoded tables are precomputed per format.
struct BruteRounder {
  FormatDescriptor fmt;
  std::vector<std::uint64_t> patterns;
  std::vector<double> values;

  explicit BruteRounder(const FormatDescriptor& f) : fmt(f) {
    formats::enumerate(
        f, [](const TValue& v) { return formats::is_finite(v); },
        [&](const TValue& v) {
          patterns.push_back(v.bits);
          values.push_back(formats::decode(v).value);
        });
  }

  std::uint64_t round(double x) const {
    if (fmt.kind == formats::Kind::posit) {
      if (x == 0.0) return 0;
      if (std::isnan(x)) return fmt.canonical_nan_bits();
      std::uint64_t best = 0;
      double best_err = HUGE_VAL;
      bool have = false;
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == 0.0) continue;  // nonzero never rounds to zero
        const double err = std::fabs(values[i] - x);
        if (!have || err < best_err) {
          best = patterns[i];
          best_err = err;
          have = true;
        } else if (err == best_err && best % 2 != 0 && patterns[i] % 2 == 0) {
          best = patterns[i];  // tie: even pattern wins
        }
      }
      return best;
    }
    if (std::isnan(x)) return fmt.canonical_nan_bits();
    const std::uint64_t inf = inf_mag();
    const std::uint64_t sign = std::signbit(x) ? (1ull << (fmt.total_bits - 1)) : 0;
    if (std::isinf(x)) return sign | inf;
    if (std::fabs(x) >= formats::overflow_midpoint(fmt)) return sign | inf;
    std::uint64_t best = 0;
    double best_err = HUGE_VAL;
    bool have = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double err = std::fabs(values[i] - x);
      if (!have || err < best_err) {
        best = patterns[i];
        best_err = err;
        have = true;
      } else if (err == best_err && best % 2 != 0 && patterns[i] % 2 == 0) {
        best = patterns[i];
      }
    }
    if (formats::decode(fmt, best).value == 0.0) return 0;  // canonical zero
    return best;
  }

  std::uint64_t inf_mag() const {
    return ((1ull << fmt.exponent_bits) - 1) << fmt.fraction_bits();
  }
};

}  // namespace

TEST(Formats, DecodePositPaperExample) {
  // 0000011011000000 represents 1.375 * 2^-7.
  const auto d = formats::decode(FormatDescriptor::posit16(), 0x06C0);
  EXPECT_EQ(d.cls, ValueClass::finite);
  EXPECT_EQ(d.value, 1.375 * std::ldexp(1.0, -7));
}

TEST(Formats, DecodeBfloatOne) {
  EXPECT_EQ(formats::decode(FormatDescriptor::bfloat16(), 0x3F80).value, 1.0);
}

TEST(Formats, Fp5PositiveValueSet) {
  const std::vector<double> expect = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5,
                                      1.75, 2.0, 2.5,  3.0, 3.5};
  std::vector<double> got;
  formats::enumerate(
      FormatDescriptor::fp5(),
      [](const TValue& v) {
        return formats::is_finite(v) && formats::decode(v).value > 0.0;
      },
      [&](const TValue& v) { got.push_back(formats::decode(v).value); });
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, expect);
}

TEST(Formats, EnumerateCounts) {
  EXPECT_EQ(formats::count_values(FormatDescriptor::bfloat16(),
                                  [](const TValue&) { return true; }),
            65536u);
  // binary32 values in [1,2): one exponent, every mantissa pattern
  const auto b32 = FormatDescriptor::binary32();
  EXPECT_EQ(formats::ladder_index(TValue{b32, 0x40000000}) -
                formats::ladder_index(TValue{b32, 0x3F800000}),
            1ull << 23);
}

TEST(Formats, RoundTripAllFinite16Bit) {
  for (const auto& fmt : {FormatDescriptor::fp5(), FormatDescriptor::bfloat16(),
                          FormatDescriptor::posit16()}) {
    formats::enumerate(
        fmt, [](const TValue& v) { return formats::is_finite(v); },
        [&](const TValue& v) {
          const double x = formats::decode(v).value;
          const TValue back = formats::round_to_format(fmt, x);
          if (x == 0.0) {
            EXPECT_EQ(back.bits, 0u);  // zeros canonicalize
          } else {
            EXPECT_EQ(back.bits, v.bits) << fmt.name() << " " << formats::to_hex(v);
          }
        });
  }
}

TEST(Formats, LadderMonotone) {
  for (const auto& fmt : {FormatDescriptor::fp5(), FormatDescriptor::bfloat16(),
                          FormatDescriptor::posit16()}) {
    double prev = -HUGE_VAL;
    const std::uint64_t n = formats::ladder_size(fmt);
    for (std::uint64_t i = 0; i < n; ++i) {
      const double v = formats::decode(formats::ladder_value(fmt, i)).value;
      EXPECT_LT(prev, v) << fmt.name() << " at ladder index " << i;
      prev = v;
    }
  }
  // binary32: sampled adjacent pairs
  const auto b32 = FormatDescriptor::binary32();
  const std::uint64_t n = formats::ladder_size(b32);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20000; ++t) {
    const std::uint64_t i = rng() % (n - 1);
    EXPECT_LT(formats::decode(formats::ladder_value(b32, i)).value,
              formats::decode(formats::ladder_value(b32, i + 1)).value);
  }
}

TEST(Formats, NextUpDownExamples) {
  const auto fp5 = FormatDescriptor::fp5();
  EXPECT_EQ(formats::decode(*formats::next_down(tv(fp5, 1.0))).value, 0.75);
  EXPECT_EQ(formats::decode(*formats::next_up(tv(fp5, 1.0))).value, 1.25);
  const auto bf16 = FormatDescriptor::bfloat16();
  EXPECT_EQ(formats::decode(*formats::next_up(tv(bf16, 0.95703125))).value, 0.9609375);
  EXPECT_FALSE(formats::next_up(tv(fp5, 3.5)).has_value());
  EXPECT_FALSE(formats::next_down(tv(fp5, -3.5)).has_value());
}

TEST(Formats, NextUpDownInverse) {
  for (const auto& fmt : {FormatDescriptor::fp5(), FormatDescriptor::bfloat16(),
                          FormatDescriptor::posit16()}) {
    const std::uint64_t n = formats::ladder_size(fmt);
    for (std::uint64_t i = 1; i + 1 < n; ++i) {
      const TValue v = formats::ladder_value(fmt, i);
      EXPECT_EQ(formats::next_up(*formats::next_down(v))->bits, v.bits);
    }
  }
}

TEST(Formats, MidpointExamples) {
  const auto fp5 = FormatDescriptor::fp5();
  EXPECT_EQ(formats::midpoint_h(tv(fp5, 0.75), tv(fp5, 1.0)), 0.875);
  EXPECT_EQ(formats::midpoint_h(tv(fp5, 1.0), tv(fp5, 1.25)), 1.125);
  const auto bf16 = FormatDescriptor::bfloat16();
  EXPECT_EQ(formats::midpoint_h(tv(bf16, 0.26953125), tv(bf16, 0.271484375)),
            0.2705078125);
}

TEST(Formats, MidpointBitExact) {
  // 2*midpoint == a+b exactly, across every adjacent pair.
  for (const auto& fmt : {FormatDescriptor::fp5(), FormatDescriptor::bfloat16(),
                          FormatDescriptor::posit16()}) {
    const std::uint64_t n = formats::ladder_size(fmt);
    for (std::uint64_t i = 0; i + 1 < n; ++i) {
      const TValue a = formats::ladder_value(fmt, i);
      const TValue b = formats::ladder_value(fmt, i + 1);
      const double mid = formats::midpoint_h(a, b);
      ASSERT_EQ(2.0 * mid, formats::decode(a).value + formats::decode(b).value);
    }
  }
}

TEST(Formats, RoundExamples) {
  const auto bf16 = FormatDescriptor::bfloat16();
  // The exact ln-oracle value 0.95898435797... rounds to 0.95703125.
  EXPECT_EQ(formats::decode(formats::round_to_format(bf16, 0.95898435797)).value,
            0.95703125);
  const auto fp5 = FormatDescriptor::fp5();
  EXPECT_EQ(formats::decode(formats::round_to_format(fp5, 1.0)).value, 1.0);
  // posit16 saturates instead of overflowing or underflowing.
  const auto p16 = FormatDescriptor::posit16();
  const TValue huge = formats::round_to_format(p16, std::ldexp(1.0, 300));
  EXPECT_EQ(formats::decode(huge).value, std::ldexp(1.0, 28));  // maxpos
  EXPECT_EQ(huge.bits, 0x7FFFu);
  EXPECT_EQ(formats::decode(formats::round_to_format(p16, 1e-300)).value,
            std::ldexp(1.0, -28));  // minpos
}

TEST(Formats, RneMatchesBruteForce16Bit) {
  std::mt19937_64 rng(42);
  for (const auto& fmt : {FormatDescriptor::fp5(), FormatDescriptor::bfloat16(),
                          FormatDescriptor::posit16()}) {
    const BruteRounder brute(fmt);
    const double span = formats::max_finite_value(fmt) * 2.5;
    std::uniform_real_distribution<double> wide(-span, span);
    std::uniform_real_distribution<double> narrow(-4.0, 4.0);
    std::uniform_int_distribution<int> mode(0, 2);
    for (int t = 0; t < 10000; ++t) {
      double x;
      switch (mode(rng)) {
        case 0: x = wide(rng); break;
        case 1: x = narrow(rng); break;
        default: {
          // exact midpoints and grid values: the tie cases
          const std::uint64_t i = rng() % (formats::ladder_size(fmt) - 1);
          const TValue a = formats::ladder_value(fmt, i);
          const TValue b = formats::ladder_value(fmt, i + 1);
          x = (rng() & 1) ? formats::midpoint_h(a, b) : formats::decode(a).value;
          break;
        }
      }
      ASSERT_EQ(formats::round_to_format(fmt, x).bits, brute.round(x))
          << fmt.name() << " x=" << hex64(x);
    }
  }
}

TEST(Formats, RneMatchesHardwareCastBinary32) {
  // The hardware double->float conversion is RNE: an independent oracle.
  const auto b32 = FormatDescriptor::binary32();
  std::mt19937_64 rng(43);
  for (int t = 0; t < 200000; ++t) {
    const double x = double_of_bits(rng());
    if (std::isnan(x)) continue;
    const float f = static_cast<float>(x);
    std::uint32_t expect = std::bit_cast<std::uint32_t>(f);
    if (f == 0.0f) expect = 0;  // zero canonicalization
    ASSERT_EQ(formats::round_to_format(b32, x).bits, expect) << hex64(x);
  }
}

TEST(Formats, PositNeverRoundsNonzeroToZeroOrNar) {
  const auto p16 = FormatDescriptor::posit16();
  std::mt19937_64 rng(44);
  for (int t = 0; t < 20000; ++t) {
    double x = double_of_bits(rng());
    if (std::isnan(x) || x == 0.0) continue;
    const TValue v = formats::round_to_format(p16, x);
    EXPECT_NE(v.bits, 0u);
    EXPECT_NE(v.bits, 0x8000u);
  }
}

TEST(Formats, ZeroAndNanCanonicalization) {
  const auto bf16 = FormatDescriptor::bfloat16();
  EXPECT_EQ(formats::round_to_format(bf16, -0.0).bits, 0u);
  EXPECT_EQ(formats::round_to_format(bf16, std::nan("")).bits,
            bf16.canonical_nan_bits());
  EXPECT_EQ(formats::round_to_format(FormatDescriptor::posit16(), std::nan("")).bits,
            0x8000u);
}

TEST(Formats, HexFormatting) {
  EXPECT_EQ(formats::to_hex(TValue{FormatDescriptor::bfloat16(), 0x3F80}), "0x3F80");
  EXPECT_EQ(formats::to_hex(TValue{FormatDescriptor::fp5(), 0x08}), "0x08");
}

TEST(Formats, ExactDecimal) {
  EXPECT_EQ(exact_decimal(1.5), "1.5");
  EXPECT_EQ(exact_decimal(-0.1015625), "-0.1015625");
  EXPECT_EQ(exact_decimal(3.0), "3.0");
  EXPECT_EQ(exact_decimal(0.1),
            "0.1000000000000000055511151231257827021181583404541015625");
  EXPECT_EQ(std::strtod(exact_decimal(0x1.fffffffffffffp+1023).c_str(), nullptr),
            0x1.fffffffffffffp+1023);
}

TEST(Formats, FormatNames) {
  EXPECT_EQ(FormatDescriptor::bfloat16().name(), "bfloat16");
  EXPECT_EQ(*formats::format_by_name("posit16"), FormatDescriptor::posit16());
  EXPECT_EQ(*formats::format_by_name("ieee_fp(6,3)"), FormatDescriptor::ieee(6, 3));
  EXPECT_FALSE(formats::format_by_name("nonsense").has_value());
}
