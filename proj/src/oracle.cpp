#include "polyround/oracle.hpp"

#include <mpfr.h>

#include <cmath>

#include "polyround/util.hpp"

namespace polyround::oracle {

using formats::FormatDescriptor;
using formats::Kind;
using formats::TValue;

const char* func_name(Func f) {
  switch (f) {
    case Func::ln: return "ln";
    case Func::log2: return "log2";
    case Func::log10: return "log10";
    case Func::exp: return "exp";
    case Func::exp2: return "exp2";
    case Func::exp10: return "exp10";
    case Func::sqrt: return "sqrt";
    case Func::cbrt: return "cbrt";
    case Func::sinpi: return "sinpi";
    case Func::cospi: return "cospi";
  }
  return "?";
}

std::optional<Func> func_by_name(const std::string& name) {
  for (Func f : {Func::ln, Func::log2, Func::log10, Func::exp, Func::exp2,
                 Func::exp10, Func::sqrt, Func::cbrt, Func::sinpi, Func::cospi})
    if (name == func_name(f)) return f;
  return std::nullopt;
}

bool in_domain(Func f, double x) {
  switch (f) {
    case Func::ln:
    case Func::log2:
    case Func::log10: return x > 0.0;
    case Func::sqrt: return x >= 0.0;
    default: return true;
  }
}

namespace {

struct Mpfr {
  mpfr_t v;
  explicit Mpfr(int prec) { mpfr_init2(v, prec); }
  ~Mpfr() { mpfr_clear(v); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
};

void eval_function(mpfr_ptr out, Func f, double x, int prec) {
  Mpfr in(prec);
  mpfr_set_d(in.v, x, MPFR_RNDN);  // exact: binary64 into >=128 bits
  switch (f) {
    case Func::ln: mpfr_log(out, in.v, MPFR_RNDN); break;
    case Func::log2: mpfr_log2(out, in.v, MPFR_RNDN); break;
    case Func::log10: mpfr_log10(out, in.v, MPFR_RNDN); break;
    case Func::exp: mpfr_exp(out, in.v, MPFR_RNDN); break;
    case Func::exp2: mpfr_exp2(out, in.v, MPFR_RNDN); break;
    case Func::exp10: mpfr_exp10(out, in.v, MPFR_RNDN); break;
    case Func::sqrt: mpfr_sqrt(out, in.v, MPFR_RNDN); break;
    case Func::cbrt: mpfr_cbrt(out, in.v, MPFR_RNDN); break;
    case Func::sinpi:
    case Func::cospi: {
      Mpfr pi(prec);
      mpfr_const_pi(pi.v, MPFR_RNDN);
      mpfr_mul(in.v, in.v, pi.v, MPFR_RNDN);
      if (f == Func::sinpi)
        mpfr_sin(out, in.v, MPFR_RNDN);
      else
        mpfr_cos(out, in.v, MPFR_RNDN);
      break;
    }
  }
}

// Exact results of sin(pi x)/cos(pi x) at integers and half-integers. The
// series route leaves a ~2^-prec residue where the true value is 0, which
// posit rounding would saturate to minpos instead of 0.
std::optional<double> exact_trig(Func f, double x) {
  if (f != Func::sinpi && f != Func::cospi) return std::nullopt;
  const double a = std::fabs(x);
  const double i = std::floor(a);
  const double t = a - i;  // exact for |a| within any supported format
  const bool odd = std::fmod(i, 2.0) != 0.0;
  if (t == 0.0) {
    if (f == Func::sinpi) return 0.0;
    return odd ? -1.0 : 1.0;
  }
  if (t == 0.5) {
    if (f == Func::cospi) return 0.0;
    const double mag = odd ? -1.0 : 1.0;
    return x < 0.0 ? -mag : mag;
  }
  return std::nullopt;
}

// Round the magnitude of v onto the nonnegative value ladder of the format
// (pattern-ordered for both kinds), using exact comparisons against binary64
// grid values. Overflow/saturation must be handled by the caller.
std::uint64_t round_magnitude_pattern(const FormatDescriptor& f, mpfr_srcptr v,
                                      bool neg, std::uint64_t hi_pattern) {
  const auto val = [&](std::uint64_t p) { return formats::decode(f, p).value; };
  // cmp(d) = sign of (|v| - d), exact.
  const auto cmp = [&](double d) {
    return neg ? -mpfr_cmp_d(v, -d) : mpfr_cmp_d(v, d);
  };
  std::uint64_t lo = 0, hi = hi_pattern;
  // Invariant: val(lo) <= |v| < val(hi) once established by the caller's
  // range checks; find the bracketing pair.
  while (lo + 1 < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (cmp(val(mid)) >= 0)
      lo = mid;
    else
      hi = mid;
  }
  const double midpoint = (val(lo) + val(hi)) / 2.0;  // exact
  const int c = cmp(midpoint);
  if (c < 0) return lo;
  if (c > 0) return hi;
  return (lo % 2 == 0) ? lo : hi;  // tie: even bit pattern
}

TValue round_mpfr(const FormatDescriptor& f, mpfr_srcptr v) {
  const int sgn = mpfr_sgn(v);
  if (sgn == 0) return TValue{f, 0};
  const bool neg = sgn < 0;
  const auto cmp = [&](double d) {
    return neg ? -mpfr_cmp_d(v, -d) : mpfr_cmp_d(v, d);
  };

  if (f.kind == Kind::posit) {
    const std::uint64_t pos_max = (1ull << (f.total_bits - 1)) - 1;
    std::uint64_t p;
    if (cmp(formats::max_finite_value(f)) >= 0)
      p = pos_max;
    else if (cmp(formats::min_positive_value(f)) <= 0)
      p = 1;
    else
      p = round_magnitude_pattern(f, v, neg, pos_max);
    if (!neg) return TValue{f, p};
    return TValue{f, (~p + 1) & f.pattern_mask()};
  }

  const std::uint64_t inf_mag =
      ((f.pattern_count() >> 1) - 1) ^ ((1ull << f.fraction_bits()) - 1);
  const std::uint64_t sign_mask = neg ? (1ull << (f.total_bits - 1)) : 0;
  if (cmp(formats::overflow_midpoint(f)) >= 0)
    return TValue{f, sign_mask | inf_mag};
  const std::uint64_t mag = round_magnitude_pattern(f, v, neg, inf_mag - 1);
  if (mag == 0) return TValue{f, 0};  // canonical zero
  return TValue{f, sign_mask | mag};
}

TValue oracle_round_at(Func func, int prec, const TValue& x,
                       const FormatDescriptor& out_format) {
  const formats::Decoded d = formats::decode(x);
  if (d.cls != formats::ValueClass::finite)
    throw DomainError(std::string(func_name(func)) + ": non-finite oracle input");
  if (!in_domain(func, d.value))
    throw DomainError(std::string(func_name(func)) + " domain error at " +
                      exact_decimal(d.value));
  if (const auto exact = exact_trig(func, d.value))
    return formats::round_to_format(out_format, *exact);
  Mpfr result(prec);
  eval_function(result.v, func, d.value, prec);
  return round_mpfr(out_format, result.v);
}

}  // namespace

TValue oracle_round(const OracleConfig& cfg, const TValue& x,
                    const FormatDescriptor& out_format) {
  if (cfg.precision_bits < 128)
    throw std::invalid_argument("oracle: precision_bits >= 128 required");
  return oracle_round_at(cfg.function, cfg.precision_bits, x, out_format);
}

bool oracle_stability_check(const OracleConfig& cfg, const TValue& x,
                            const FormatDescriptor& out_format) {
  const TValue full = oracle_round_at(cfg.function, cfg.precision_bits, x, out_format);
  const TValue quarter =
      oracle_round_at(cfg.function, cfg.precision_bits / 4, x, out_format);
  return full.bits == quarter.bits;
}

}  // namespace polyround::oracle
