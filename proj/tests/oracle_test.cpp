#include "polyround/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "polyround/util.hpp"

using namespace polyround;
using formats::FormatDescriptor;
using formats::TValue;
using oracle::Func;
using oracle::OracleConfig;

namespace {

TValue tv(const FormatDescriptor& f, double x) {
  const TValue v = formats::round_to_format(f, x);
  EXPECT_EQ(formats::decode(v).value, x);
  return v;
}

double oracle_value(Func f, const FormatDescriptor& fmt, double x) {
  const TValue r = oracle::oracle_round(OracleConfig{f, 2000}, tv(fmt, x), fmt);
  return formats::decode(r).value;
}

}  // namespace

TEST(Oracle, PaperExamples) {
  const auto bf16 = FormatDescriptor::bfloat16();
  // exp10(-0.0181884765625) rounds to 0.95703125, not the binary32-closest
  // 0.958984375.
  EXPECT_EQ(oracle_value(Func::exp10, bf16, -0.0181884765625), 0.95703125);
  EXPECT_EQ(oracle_value(Func::log10, bf16, 1.8671875), 0.271484375);
  EXPECT_EQ(oracle_value(Func::sqrt, bf16, 1.0), 1.0);
  EXPECT_EQ(oracle_value(Func::sqrt, bf16, 4.0), 2.0);
}

TEST(Oracle, Determinism) {
  const auto p16 = FormatDescriptor::posit16();
  const TValue x = tv(p16, 1.375 * std::ldexp(1.0, -7));
  const OracleConfig cfg{Func::ln, 2000};
  const TValue a = oracle::oracle_round(cfg, x, p16);
  const TValue b = oracle::oracle_round(cfg, x, p16);
  EXPECT_EQ(a.bits, b.bits);
}

TEST(Oracle, Log2PowerOfTwoIdentity) {
  for (const auto& fmt : {FormatDescriptor::bfloat16(), FormatDescriptor::posit16(),
                          FormatDescriptor::binary32()}) {
    for (int k : {-8, -3, -1, 0, 1, 2, 7, 12}) {
      const double x = std::ldexp(1.0, k);
      EXPECT_EQ(oracle_value(Func::log2, fmt, x), static_cast<double>(k))
          << fmt.name() << " k=" << k;
    }
  }
}

TEST(Oracle, MonotoneSanity) {
  // For monotone f, oracle outputs are monotone over value-ordered inputs.
  const auto bf16 = FormatDescriptor::bfloat16();
  const OracleConfig cfg{Func::ln, 2000};
  double prev = -HUGE_VAL;
  for (std::uint64_t i = formats::ladder_index(tv(bf16, 0.25));
       i <= formats::ladder_index(tv(bf16, 8.0)); ++i) {
    const TValue x = formats::ladder_value(bf16, i);
    const double y = formats::decode(oracle::oracle_round(cfg, x, bf16)).value;
    EXPECT_LE(prev, y);
    prev = y;
  }
}

TEST(Oracle, DomainErrors) {
  const auto bf16 = FormatDescriptor::bfloat16();
  const OracleConfig ln{Func::ln, 2000};
  EXPECT_THROW(oracle::oracle_round(ln, tv(bf16, -1.0), bf16), oracle::DomainError);
  EXPECT_THROW(oracle::oracle_round(ln, tv(bf16, 0.0), bf16), oracle::DomainError);
  EXPECT_THROW(oracle::oracle_round(ln, TValue{bf16, bf16.canonical_nan_bits()}, bf16),
               oracle::DomainError);
  const OracleConfig sq{Func::sqrt, 2000};
  EXPECT_THROW(oracle::oracle_round(sq, tv(bf16, -2.0), bf16), oracle::DomainError);
  EXPECT_NO_THROW(oracle::oracle_round(sq, tv(bf16, 0.0), bf16));
}

TEST(Oracle, ExactTrigValues) {
  const auto p16 = FormatDescriptor::posit16();
  // Integers: sin(pi x) is exactly 0 (not a tiny residue that posit
  // saturation would turn into minpos), cos(pi x) exactly +/-1.
  EXPECT_EQ(oracle::oracle_round({Func::sinpi, 2000}, tv(p16, 129.0), p16).bits, 0u);
  EXPECT_EQ(oracle_value(Func::sinpi, p16, std::ldexp(1.0, 28)), 0.0);
  EXPECT_EQ(oracle_value(Func::cospi, p16, 4.0), 1.0);
  EXPECT_EQ(oracle_value(Func::cospi, p16, 5.0), -1.0);
  // Half-integers.
  EXPECT_EQ(oracle_value(Func::sinpi, p16, 2.5), 1.0);
  EXPECT_EQ(oracle_value(Func::sinpi, p16, -2.5), -1.0);
  EXPECT_EQ(oracle_value(Func::sinpi, p16, 1.5), -1.0);
  EXPECT_EQ(oracle_value(Func::cospi, p16, 1.5), 0.0);
  const auto bf16 = FormatDescriptor::bfloat16();
  EXPECT_EQ(oracle::oracle_round({Func::sinpi, 2000}, tv(bf16, 144.0), bf16).bits, 0u);
}

TEST(Oracle, StabilityCheckTrivialAndSampled) {
  const auto bf16 = FormatDescriptor::bfloat16();
  EXPECT_TRUE(oracle::oracle_stability_check({Func::sqrt, 2000}, tv(bf16, 4.0), bf16));
  // Sampled sweep over bfloat16 ln (the full exhaustive sweep runs in the
  // acceptance suite).
  const OracleConfig cfg{Func::ln, 2000};
  for (std::uint64_t bits = 0x0001; bits < 0x7F80; bits += 97)
    EXPECT_TRUE(oracle::oracle_stability_check(cfg, TValue{bf16, bits}, bf16))
        << to_hex(bits, 4);
}

TEST(Oracle, PrecisionFloorEnforced) {
  const auto bf16 = FormatDescriptor::bfloat16();
  EXPECT_THROW(oracle::oracle_round({Func::ln, 64}, tv(bf16, 2.0), bf16),
               std::invalid_argument);
}
