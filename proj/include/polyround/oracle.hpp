#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "polyround/formats.hpp"

namespace polyround::oracle {

enum class Func { ln, log2, log10, exp, exp2, exp10, sqrt, cbrt, sinpi, cospi };

const char* func_name(Func f);
std::optional<Func> func_by_name(const std::string& name);

// Input outside the mathematical domain of the function (e.g. ln of a
// negative value). Domain violations are the caller's special cases; the
// oracle never produces a silent NaN.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleConfig {
  Func function = Func::ln;
  int precision_bits = 2000;
};

// f(decode(x)) evaluated to precision_bits, rounded once to out_format
// (round-to-nearest, ties to even bit pattern; posit saturation).
// Deterministic for a fixed configuration. sinpi/cospi are evaluated as
// sin(pi*x)/cos(pi*x) with pi carried at working precision; inputs whose
// exact result is 0 or +/-1 short-circuit so the sign/zero semantics are
// exact rather than residue-of-pi artifacts.
formats::TValue oracle_round(const OracleConfig& cfg, const formats::TValue& x,
                             const formats::FormatDescriptor& out_format);

// True iff rounding at precision_bits and at precision_bits/4 agree.
// A desk-scale stand-in for a table-maker's-dilemma bound.
bool oracle_stability_check(const OracleConfig& cfg, const formats::TValue& x,
                            const formats::FormatDescriptor& out_format);

// True when decode(x) is in the mathematical domain of the function.
bool in_domain(Func f, double x);

}  // namespace polyround::oracle
