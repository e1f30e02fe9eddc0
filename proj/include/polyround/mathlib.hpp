#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "polyround/polygen.hpp"

namespace polyround::mathlib {

// A shipped correctly-rounded function: special-case check, range reduction,
// Horner evaluation, output compensation, one rounding.
struct CompiledFunction {
  oracle::Func function = oracle::Func::ln;
  reduction::FunctionRecipe recipe;
  polygen::CoefficientSet coeffs;
  formats::FormatDescriptor in_format;
  formats::FormatDescriptor out_format;
};

// Pure function of the input bits; total over bit patterns.
formats::TValue evaluate(const CompiledFunction& cf, const formats::TValue& x);

// The oracle reference over the full bit-pattern domain: mathematical
// edge semantics (NaN/NaR propagation, limits at +/-inf, domain errors) plus
// the high-precision oracle for finite in-domain inputs. Independent of the
// recipe's special-case table, so validation genuinely exercises it.
formats::TValue reference_result(const oracle::OracleConfig& cfg, const formats::TValue& x,
                                 const formats::FormatDescriptor& out_format);

// Raw bit-pattern range [begin, end) of inputs to validate or bench.
struct PatternRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
  std::uint64_t size() const { return end - begin; }
};
PatternRange full_range(const formats::FormatDescriptor& fmt);
// binary32 patterns in [1,2): the domain the published log2 set guarantees.
PatternRange binary32_unit_range();

struct Mismatch {
  std::uint64_t input_bits = 0;
  std::uint64_t got_bits = 0;
  std::uint64_t expected_bits = 0;
};

struct ValidationReport {
  std::uint64_t total = 0;
  std::uint64_t mismatch_count = 0;
  std::vector<Mismatch> mismatches;  // first kMaxStoredMismatches, sorted by input
  static constexpr std::uint64_t kMaxStoredMismatches = 10000;
};

// Compare evaluate() against the reference for every pattern in the range.
// `expected_bits`, when given, must hold reference_result bits per pattern
// offset (lets callers reuse one oracle sweep across runs).
ValidationReport validate_exhaustive(const CompiledFunction& cf, const PatternRange& range,
                                     int jobs = 1, const std::uint32_t* expected_bits = nullptr);
ValidationReport validate_exhaustive(const CompiledFunction& cf, int jobs = 1);

// One reference sweep, reusable across validations (bits per pattern offset).
std::vector<std::uint32_t> reference_sweep(const oracle::OracleConfig& cfg,
                                           const formats::FormatDescriptor& fmt,
                                           const PatternRange& range, int jobs);

void write_report(std::ostream& os, const CompiledFunction& cf, const ValidationReport& r);

// Wall-clock cost per input over the exhaustive input set. Machine-dependent,
// informational only.
struct BenchReport {
  std::uint64_t inputs = 0;
  int iterations = 0;
  double mean_ns_per_input = 0.0;
  double min_ns_per_input = 0.0;
};
BenchReport bench(const CompiledFunction& cf, const PatternRange& range, int iterations);

// Functions shipped with coefficients from the published tables:
// bfloat16 {ln,log2,log10,exp,exp2,exp10,sqrt,cbrt,sinpi,cospi},
// posit16 {ln,log2,log10,sqrt,sinpi,cospi}, binary32 {log2 on [1,2)}.
std::optional<CompiledFunction> published_function(oracle::Func f,
                                                   const formats::FormatDescriptor& fmt);
std::vector<std::pair<oracle::Func, formats::FormatDescriptor>> published_set();

// Build a CompiledFunction around generated or loaded coefficients.
CompiledFunction compile(oracle::Func f, const formats::FormatDescriptor& fmt,
                         const reduction::FunctionRecipe& recipe,
                         polygen::CoefficientSet coeffs);

// Every embedded coefficient decimal string (exposed for the lossless
// decimal<->binary64 round-trip check).
std::vector<const char*> published_coefficient_strings();

}  // namespace polyround::mathlib
