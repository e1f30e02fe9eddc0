#include "polyround/reduction.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace polyround::reduction {

using formats::FormatDescriptor;
using formats::Kind;
using formats::TValue;
using formats::ValueClass;

namespace {

// x = t * 2^(m) with t in [1,2); exact for any finite nonzero |x|.
std::pair<double, int> split_mantissa(double x) {
  int e = 0;
  const double t = std::frexp(x, &e);  // t in [0.5,1)
  return {2.0 * t, e - 1};
}

TValue materialize(const FormatDescriptor& fmt, const SpecialRule& r) {
  switch (r.out) {
    case SpecialRule::Out::value: return formats::round_to_format(fmt, r.out_value);
    case SpecialRule::Out::pos_inf: return formats::round_to_format(fmt, HUGE_VAL);
    case SpecialRule::Out::neg_inf: return formats::round_to_format(fmt, -HUGE_VAL);
    case SpecialRule::Out::nan: return TValue{fmt, fmt.canonical_nan_bits()};
    case SpecialRule::Out::nar: return TValue{fmt, fmt.canonical_nan_bits()};
  }
  return TValue{fmt, fmt.canonical_nan_bits()};
}

}  // namespace

std::optional<TValue> FunctionRecipe::classify_special(const TValue& x) const {
  const formats::Decoded d = formats::decode(x);
  for (const SpecialRule& r : specials) {
    bool hit = false;
    switch (r.when) {
      case SpecialRule::When::is_nan: hit = d.cls == ValueClass::nan; break;
      case SpecialRule::When::is_nar: hit = d.cls == ValueClass::nar; break;
      case SpecialRule::When::is_pos_inf: hit = d.cls == ValueClass::pos_inf; break;
      case SpecialRule::When::is_neg_inf: hit = d.cls == ValueClass::neg_inf; break;
      case SpecialRule::When::is_inf:
        hit = d.cls == ValueClass::pos_inf || d.cls == ValueClass::neg_inf;
        break;
      case SpecialRule::When::is_zero:
        hit = d.cls == ValueClass::finite && d.value == 0.0;
        break;
      case SpecialRule::When::lt_zero:
        hit = d.cls == ValueClass::finite && d.value < 0.0;
        break;
      case SpecialRule::When::le:
        hit = d.cls == ValueClass::finite && d.value <= r.a;
        break;
      case SpecialRule::When::ge:
        hit = d.cls == ValueClass::finite && d.value >= r.a;
        break;
      case SpecialRule::When::in_range:
        hit = d.cls == ValueClass::finite && d.value >= r.a && d.value <= r.b;
        break;
    }
    if (hit) return materialize(format, r);
  }
  return std::nullopt;
}

std::pair<double, ReductionContext> FunctionRecipe::reduce(double x) const {
  ReductionContext ctx;
  switch (family) {
    case Family::log_cody_waite: {
      const auto [t, m] = split_mantissa(x);
      ctx.m = m;
      return {(t - 1.0) / (t + 1.0), ctx};
    }
    case Family::log_mantissa: {
      const auto [t, m] = split_mantissa(x);
      ctx.m = m;
      return {t, ctx};
    }
    case Family::exp_pow2: {
      const double w = log2_base == 1.0 ? x : x * log2_base;
      const double fi = std::floor(w);
      ctx.i = static_cast<long long>(fi);
      return {w - fi, ctx};  // exact: integer-part subtraction
    }
    case Family::sqrt_even: {
      auto [t, m] = split_mantissa(x);
      if (m % 2 != 0) {
        t *= 2.0;
        m -= 1;
      }
      ctx.m = m;
      return {t, ctx};
    }
    case Family::cbrt_triple: {
      ctx.sign = std::signbit(x) ? -1 : 1;
      auto [t, m] = split_mantissa(std::fabs(x));
      const int k = ((m % 3) + 3) % 3;
      ctx.m = m - k;
      return {std::ldexp(t, k), ctx};
    }
    case Family::sinpi_fold:
    case Family::cospi_fold: {
      ctx.sign = std::signbit(x) ? -1 : 1;
      const double a = std::fabs(x);
      const double fi = std::floor(a);
      ctx.i = static_cast<long long>(fi);
      const double t = a - fi;  // exact
      if (t > 0.5 && t < 1.0) {
        ctx.mirrored = true;
        return {1.0 - t, ctx};  // exact by Sterbenz
      }
      return {t, ctx};
    }
  }
  throw std::logic_error("reduce: unknown family");
}

namespace {

// +1/-1 factor applied by the trig output compensations.
double trig_factor(Family family, const ReductionContext& ctx) {
  if (family == Family::sinpi_fold) {
    double s = static_cast<double>(ctx.sign);
    return (ctx.i & 1) ? -s : s;
  }
  double s = (ctx.i & 1) ? -1.0 : 1.0;
  return ctx.mirrored ? -s : s;
}

}  // namespace

double FunctionRecipe::compensate(double y_reduced, const ReductionContext& ctx) const {
  switch (family) {
    case Family::log_cody_waite:
    case Family::log_mantissa: {
      const double num = y_reduced + static_cast<double>(ctx.m);
      return log2_base == 1.0 ? num : num / log2_base;
    }
    case Family::exp_pow2:
      return std::ldexp(y_reduced, static_cast<int>(ctx.i));
    case Family::sqrt_even:
      return std::ldexp(y_reduced, ctx.m / 2);
    case Family::cbrt_triple: {
      const double r = std::ldexp(y_reduced, ctx.m / 3);
      return ctx.sign < 0 ? -r : r;
    }
    case Family::sinpi_fold:
    case Family::cospi_fold:
      return trig_factor(family, ctx) * y_reduced;
  }
  throw std::logic_error("compensate: unknown family");
}

double FunctionRecipe::compensate_inverse(double y, const ReductionContext& ctx) const {
  switch (family) {
    case Family::log_cody_waite:
    case Family::log_mantissa: {
      const double w = log2_base == 1.0 ? y : y * log2_base;
      return w - static_cast<double>(ctx.m);
    }
    case Family::exp_pow2:
      return std::ldexp(y, -static_cast<int>(ctx.i));
    case Family::sqrt_even:
      return std::ldexp(y, -(ctx.m / 2));
    case Family::cbrt_triple:
      return std::ldexp(ctx.sign < 0 ? -y : y, -(ctx.m / 3));
    case Family::sinpi_fold:
    case Family::cospi_fold:
      return trig_factor(family, ctx) * y;
  }
  throw std::logic_error("compensate_inverse: unknown family");
}

Monotone FunctionRecipe::direction(const ReductionContext& ctx) const {
  switch (family) {
    case Family::log_cody_waite:
    case Family::log_mantissa:
    case Family::exp_pow2:
    case Family::sqrt_even:
      return Monotone::increasing;
    case Family::cbrt_triple:
      return ctx.sign < 0 ? Monotone::decreasing : Monotone::increasing;
    case Family::sinpi_fold:
    case Family::cospi_fold:
      return trig_factor(family, ctx) < 0 ? Monotone::decreasing : Monotone::increasing;
  }
  throw std::logic_error("direction: unknown family");
}

namespace {

using When = SpecialRule::When;
using Out = SpecialRule::Out;

std::vector<SpecialRule> ieee_log_specials() {
  return {
      {When::is_nan, Out::nan},
      {When::is_neg_inf, Out::nan},
      {When::is_pos_inf, Out::pos_inf},
      {When::is_zero, Out::neg_inf},
      {When::lt_zero, Out::nan},
  };
}

std::vector<SpecialRule> posit_log_specials() {
  return {
      {When::is_nar, Out::nar},
      {When::le, Out::nar, 0.0},
  };
}

std::vector<SpecialRule> ieee_sqrt_specials() {
  return {
      {When::is_nan, Out::nan},
      {When::is_neg_inf, Out::nan},
      {When::is_pos_inf, Out::pos_inf},
      {When::is_zero, Out::value, 0, 0, 0.0},
      {When::lt_zero, Out::nan},
  };
}

std::vector<SpecialRule> posit_sqrt_specials() {
  return {
      {When::is_nar, Out::nar},
      {When::is_zero, Out::value, 0, 0, 0.0},
      {When::lt_zero, Out::nar},
  };
}

std::vector<SpecialRule> ieee_cbrt_specials() {
  return {
      {When::is_nan, Out::nan},
      {When::is_neg_inf, Out::neg_inf},
      {When::is_pos_inf, Out::pos_inf},
      {When::is_zero, Out::value, 0, 0, 0.0},
  };
}

// Bfloat16 exponential tables; thresholds are the exact bfloat16 boundary
// values for the ranges whose result is a constant 0, 1 or infinity.
std::vector<SpecialRule> bf16_exp_specials() {
  return {
      {When::is_nan, Out::nan},
      {When::is_neg_inf, Out::value, 0, 0, 0.0},
      {When::is_pos_inf, Out::pos_inf},
      {When::le, Out::value, -93.0, 0, 0.0},
      {When::in_range, Out::value, -0x1p-9, 0x1.FEp-9, 1.0},
      {When::ge, Out::pos_inf, 89.0},
  };
}

std::vector<SpecialRule> bf16_exp2_specials() {
  return {
      {When::is_nan, Out::nan},
      {When::is_neg_inf, Out::value, 0, 0, 0.0},
      {When::is_pos_inf, Out::pos_inf},
      {When::le, Out::value, -134.0, 0, 0.0},
      {When::in_range, Out::value, -2.8076171875e-3, 2.8076171875e-3, 1.0},
      {When::ge, Out::pos_inf, 128.0},
  };
}

std::vector<SpecialRule> bf16_exp10_specials() {
  return {
      {When::is_nan, Out::nan},
      {When::is_neg_inf, Out::value, 0, 0, 0.0},
      {When::is_pos_inf, Out::pos_inf},
      {When::le, Out::value, -40.5, 0, 0.0},
      {When::in_range, Out::value, -8.4686279296875e-4, 1.68609619140625e-3, 1.0},
      {When::ge, Out::pos_inf, 38.75},
  };
}

std::vector<SpecialRule> bf16_sinpi_specials() {
  return {
      {When::is_nan, Out::nan},
      {When::is_inf, Out::nan},
      {When::ge, Out::value, 256.0, 0, 0.0},
      {When::le, Out::value, -256.0, 0, 0.0},
  };
}

std::vector<SpecialRule> bf16_cospi_specials() {
  return {
      {When::is_nan, Out::nan},
      {When::is_inf, Out::nan},
      {When::ge, Out::value, 256.0, 0, 1.0},
      {When::le, Out::value, -256.0, 0, 1.0},
  };
}

std::vector<SpecialRule> posit_trig_specials() {
  return {{When::is_nar, Out::nar}};
}

constexpr double kThird = 1.0 / 3.0;

std::optional<FunctionRecipe> build_recipe(Func f, const FormatDescriptor& fmt,
                                           const std::string& id) {
  const bool is_posit = fmt.kind == Kind::posit;
  const bool is_bf16 = fmt == FormatDescriptor::bfloat16();
  FunctionRecipe r;
  r.id = id;
  r.function = f;
  r.format = fmt;

  if (id == "ln_mantissa") {
    if (f != Func::ln || is_posit) return std::nullopt;
    r.family = Family::log_mantissa;
    r.log2_base = kLog2E;
    r.specials = ieee_log_specials();
    r.reduced_domain = {1.0, 2.0, false};
    return r;
  }
  if (id != oracle::func_name(f)) return std::nullopt;

  switch (f) {
    case Func::ln:
    case Func::log2:
    case Func::log10:
      r.family = Family::log_cody_waite;
      r.log2_base = f == Func::ln ? kLog2E : (f == Func::log10 ? kLog2Ten : 1.0);
      r.specials = is_posit ? posit_log_specials() : ieee_log_specials();
      r.reduced_domain = {0.0, kThird, true};
      return r;
    case Func::exp:
    case Func::exp2:
    case Func::exp10:
      if (!is_bf16) return std::nullopt;  // thresholds below are bfloat16-specific
      r.family = Family::exp_pow2;
      r.log2_base = f == Func::exp ? kLog2E : (f == Func::exp10 ? kLog2Ten : 1.0);
      r.specials = f == Func::exp ? bf16_exp_specials()
                   : f == Func::exp2 ? bf16_exp2_specials()
                                     : bf16_exp10_specials();
      r.reduced_domain = {0.0, 1.0, false};
      return r;
    case Func::sqrt:
      r.family = Family::sqrt_even;
      r.specials = is_posit ? posit_sqrt_specials() : ieee_sqrt_specials();
      r.reduced_domain = {1.0, 4.0, false};
      return r;
    case Func::cbrt:
      if (is_posit) return std::nullopt;
      r.family = Family::cbrt_triple;
      r.specials = ieee_cbrt_specials();
      r.reduced_domain = {1.0, 8.0, false};
      return r;
    case Func::sinpi:
    case Func::cospi:
      if (!is_posit && !is_bf16) return std::nullopt;  // |x|>=256 bound is bfloat16's
      r.family = f == Func::sinpi ? Family::sinpi_fold : Family::cospi_fold;
      r.specials = is_posit
                       ? posit_trig_specials()
                       : (f == Func::sinpi ? bf16_sinpi_specials() : bf16_cospi_specials());
      r.reduced_domain = {0.0, 0.5, true};
      return r;
  }
  return std::nullopt;
}

std::string default_recipe_id(Func f, const FormatDescriptor& fmt) {
  if (f == Func::ln && fmt == FormatDescriptor::fp5()) return "ln_mantissa";
  return oracle::func_name(f);
}

const FunctionRecipe& cached_recipe(Func f, const FormatDescriptor& fmt,
                                    const std::string& id) {
  struct Key {
    Func f;
    Kind kind;
    int n, e;
    std::string id;
    bool operator<(const Key& o) const {
      return std::tie(f, kind, n, e, id) < std::tie(o.f, o.kind, o.n, o.e, o.id);
    }
  };
  static std::map<Key, FunctionRecipe> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  Key key{f, fmt.kind, fmt.total_bits, fmt.exponent_bits, id};
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto built = build_recipe(f, fmt, id);
    if (!built)
      throw std::invalid_argument(std::string("no recipe '") + id + "' for " +
                                  oracle::func_name(f) + " on " + fmt.name());
    it = cache.emplace(key, std::move(*built)).first;
  }
  return it->second;
}

}  // namespace

const FunctionRecipe& recipe_for(Func f, const FormatDescriptor& fmt) {
  return cached_recipe(f, fmt, default_recipe_id(f, fmt));
}

const FunctionRecipe& recipe_for(Func f, const FormatDescriptor& fmt,
                                 const std::string& recipe_id) {
  return cached_recipe(f, fmt, recipe_id);
}

bool has_recipe(Func f, const formats::FormatDescriptor& fmt) {
  try {
    recipe_for(f, fmt);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

}  // namespace polyround::reduction
