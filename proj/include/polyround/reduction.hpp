#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polyround/formats.hpp"
#include "polyround/oracle.hpp"

namespace polyround::reduction {

using oracle::Func;

// Per-family payload produced by range reduction and consumed by output
// compensation.
struct ReductionContext {
  int m = 0;            // log/sqrt/cbrt scaling exponent (sqrt: even, cbrt: multiple of 3)
  long long i = 0;      // exponentials: floor(x*log2(a)); trig: floor(|x|)
  int sign = 1;         // cbrt/sinpi input sign
  bool mirrored = false;  // trig: the exact 1-t fold was applied (0.5 < t < 1)
};

enum class Monotone { increasing, decreasing };

struct ReducedDomain {
  double lo = 0.0;
  double hi = 0.0;
  bool hi_closed = false;
  bool contains(double x) const { return x >= lo && (hi_closed ? x <= hi : x < hi); }
};

enum class Family {
  log_cody_waite,   // x = t*2^m, x' = (t-1)/(t+1) in [0,1/3), OC = (y'+m)/log2(b)
  log_mantissa,     // x = t*2^m, x' = t in [1,2),           OC = (y'+m)/log2(b)
  exp_pow2,         // w = x*log2(a), x' = w - floor(w) in [0,1), OC = y'*2^i
  sqrt_even,        // x = x'*2^m, m even, x' in [1,4),      OC = y'*2^(m/2)
  cbrt_triple,      // x = s*x'*2^m, 3|m, x' in [1,8),       OC = s*y'*2^(m/3)
  sinpi_fold,       // |x| = i+t, fold t>0.5 to 1-t, x' in [0,0.5]
  cospi_fold,
};

// One row of a special-case table. Rules are checked in order; the first
// match wins. Value comparisons apply to finite inputs only.
struct SpecialRule {
  enum class When { is_nan, is_nar, is_pos_inf, is_neg_inf, is_inf, is_zero, lt_zero, le, ge, in_range };
  enum class Out { value, pos_inf, neg_inf, nan, nar };
  When when;
  Out out;
  double a = 0.0;  // le/ge threshold or in_range lower bound
  double b = 0.0;  // in_range upper bound
  double out_value = 0.0;
};

// Special-case classification, range reduction, output compensation, its
// algebraic inverse, and monotonicity metadata for one elementary function
// on one format. RR/OC/inverse all evaluate in binary64; the shipped library
// and the generator share these exact code paths.
struct FunctionRecipe {
  std::string id;
  Func function = Func::ln;
  Family family = Family::log_cody_waite;
  formats::FormatDescriptor format;
  double log2_base = 1.0;  // log families: log2(b); exp families: log2(a)
  std::vector<SpecialRule> specials;
  ReducedDomain reduced_domain;

  // Mandated output for special inputs, or nullopt for the polynomial path.
  std::optional<formats::TValue> classify_special(const formats::TValue& x) const;

  std::pair<double, ReductionContext> reduce(double x) const;
  double compensate(double y_reduced, const ReductionContext& ctx) const;
  double compensate_inverse(double y, const ReductionContext& ctx) const;
  // Direction of compensate in y' for a fixed context (cbrt and the trig
  // folds flip with the sign payload).
  Monotone direction(const ReductionContext& ctx) const;
};

// Registered recipe for (function, format); the pairs with published tables:
// every ieee format gets the log family plus sqrt/cbrt, bfloat16 adds
// exp/exp2/exp10/sinpi/cospi, posit16 gets log family, sqrt, sinpi, cospi.
// fp5 ln defaults to the mantissa recipe; "ln" selects Cody-Waite.
const FunctionRecipe& recipe_for(Func f, const formats::FormatDescriptor& fmt);
const FunctionRecipe& recipe_for(Func f, const formats::FormatDescriptor& fmt,
                                 const std::string& recipe_id);
bool has_recipe(Func f, const formats::FormatDescriptor& fmt);

// The binary64 constants shared by generation and the shipped library.
inline constexpr double kLog2E = 1.4426950408889634073599246810018921374;
inline constexpr double kLog2Ten = 3.3219280948873623478703194294893901759;

}  // namespace polyround::reduction
