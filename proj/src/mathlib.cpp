#include "polyround/mathlib.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "polyround/util.hpp"

namespace polyround::mathlib {

using formats::FormatDescriptor;
using formats::Kind;
using formats::TValue;
using formats::ValueClass;
using oracle::Func;

TValue evaluate(const CompiledFunction& cf, const TValue& x) {
  return polygen::pipeline_eval(cf.recipe, cf.coeffs, cf.out_format, x);
}

namespace {

TValue nan_or_nar(const FormatDescriptor& fmt) {
  return TValue{fmt, fmt.canonical_nan_bits()};
}

TValue signed_inf(const FormatDescriptor& fmt, bool neg) {
  return formats::round_to_format(fmt, neg ? -HUGE_VAL : HUGE_VAL);
}

}  // namespace

TValue reference_result(const oracle::OracleConfig& cfg, const TValue& x,
                        const FormatDescriptor& out) {
  const formats::Decoded d = formats::decode(x);
  const bool posit_out = out.kind == Kind::posit;

  switch (d.cls) {
    case ValueClass::nan:
    case ValueClass::nar:
      return nan_or_nar(out);
    case ValueClass::pos_inf:
      switch (cfg.function) {
        case Func::ln: case Func::log2: case Func::log10:
        case Func::exp: case Func::exp2: case Func::exp10:
        case Func::sqrt: case Func::cbrt:
          return signed_inf(out, false);
        case Func::sinpi: case Func::cospi:
          return nan_or_nar(out);
      }
      break;
    case ValueClass::neg_inf:
      switch (cfg.function) {
        case Func::exp: case Func::exp2: case Func::exp10:
          return formats::round_to_format(out, 0.0);
        case Func::cbrt:
          return signed_inf(out, true);
        default:
          return nan_or_nar(out);
      }
      break;
    case ValueClass::finite:
      break;
  }

  switch (cfg.function) {
    case Func::ln: case Func::log2: case Func::log10:
      if (d.value == 0.0) return posit_out ? nan_or_nar(out) : signed_inf(out, true);
      if (d.value < 0.0) return nan_or_nar(out);
      break;
    case Func::sqrt:
      if (d.value < 0.0) return nan_or_nar(out);
      break;
    default:
      break;
  }
  return oracle::oracle_round(cfg, x, out);
}

PatternRange full_range(const FormatDescriptor& fmt) {
  return PatternRange{0, fmt.pattern_count()};
}

PatternRange binary32_unit_range() {
  return PatternRange{0x3F800000ull, 0x40000000ull};
}

std::vector<std::uint32_t> reference_sweep(const oracle::OracleConfig& cfg,
                                           const FormatDescriptor& fmt,
                                           const PatternRange& range, int jobs) {
  std::vector<std::uint32_t> out(range.size());
  parallel_chunks(range.size(), jobs, [&](int, std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t off = b; off < e; ++off) {
      const TValue x{fmt, range.begin + off};
      out[off] = static_cast<std::uint32_t>(reference_result(cfg, x, fmt).bits);
    }
  });
  return out;
}

ValidationReport validate_exhaustive(const CompiledFunction& cf, const PatternRange& range,
                                     int jobs, const std::uint32_t* expected_bits) {
  if (cf.in_format.total_bits > 32)
    throw std::invalid_argument("validate_exhaustive: formats beyond 32 bits not enumerable");
  const oracle::OracleConfig cfg{cf.function, 2000};

  std::vector<std::uint32_t> computed;
  if (!expected_bits) {
    computed = reference_sweep(cfg, cf.in_format, range, jobs);
    expected_bits = computed.data();
  }

  const int chunks = std::max(1, jobs);
  std::vector<std::vector<Mismatch>> found(chunks);
  parallel_chunks(range.size(), jobs, [&](int chunk, std::uint64_t b, std::uint64_t e) {
    auto& local = found[chunk];
    for (std::uint64_t off = b; off < e; ++off) {
      const TValue x{cf.in_format, range.begin + off};
      const TValue got = evaluate(cf, x);
      if (static_cast<std::uint32_t>(got.bits) != expected_bits[off])
        local.push_back(Mismatch{x.bits, got.bits, expected_bits[off]});
    }
  });

  ValidationReport report;
  report.total = range.size();
  for (const auto& local : found) {
    report.mismatch_count += local.size();
    for (const Mismatch& m : local)
      if (report.mismatches.size() < ValidationReport::kMaxStoredMismatches)
        report.mismatches.push_back(m);
  }
  return report;
}

ValidationReport validate_exhaustive(const CompiledFunction& cf, int jobs) {
  return validate_exhaustive(cf, full_range(cf.in_format), jobs, nullptr);
}

void write_report(std::ostream& os, const CompiledFunction& cf, const ValidationReport& r) {
  os << "# validation report\n";
  os << "function " << oracle::func_name(cf.function) << "\n";
  os << "format " << cf.in_format.name() << "\n";
  os << "total " << r.total << "\n";
  os << "mismatches " << r.mismatch_count << "\n";
  if (r.mismatch_count > r.mismatches.size())
    os << "# list truncated to " << r.mismatches.size() << " entries\n";
  const int nib = (cf.in_format.total_bits + 3) / 4;
  for (const Mismatch& m : r.mismatches)
    os << to_hex(m.input_bits, nib) << " got " << to_hex(m.got_bits, nib) << " expected "
       << to_hex(m.expected_bits, nib) << "\n";
}

BenchReport bench(const CompiledFunction& cf, const PatternRange& range, int iterations) {
  using clock = std::chrono::steady_clock;
  BenchReport report;
  report.inputs = range.size();
  report.iterations = iterations;
  report.min_ns_per_input = HUGE_VAL;
  std::uint64_t sink = 0;
  double total_ns = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const auto t0 = clock::now();
    for (std::uint64_t p = range.begin; p < range.end; ++p)
      sink += evaluate(cf, TValue{cf.in_format, p}).bits;
    const auto t1 = clock::now();
    const double ns = std::chrono::duration<double, std::nano>(t1 - t0).count() /
                      static_cast<double>(range.size());
    total_ns += ns;
    report.min_ns_per_input = std::min(report.min_ns_per_input, ns);
  }
  report.mean_ns_per_input = total_ns / iterations;
  // keep the loop alive under optimization
  if (sink == 0x5a5a5a5a5a5a5a5aull) report.mean_ns_per_input += 0.0;
  return report;
}

CompiledFunction compile(Func f, const FormatDescriptor& fmt,
                         const reduction::FunctionRecipe& recipe,
                         polygen::CoefficientSet coeffs) {
  CompiledFunction cf;
  cf.function = f;
  cf.recipe = recipe;
  cf.coeffs = std::move(coeffs);
  cf.in_format = fmt;
  cf.out_format = fmt;
  return cf;
}

}  // namespace polyround::mathlib
