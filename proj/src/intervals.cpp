#include "polyround/intervals.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "polyround/util.hpp"

namespace polyround::intervals {

using formats::FormatDescriptor;
using formats::Kind;
using formats::TValue;

Interval rounding_interval(const TValue& y) {
  const FormatDescriptor& fmt = y.format;
  const formats::Decoded d = formats::decode(y);
  if (d.cls != formats::ValueClass::finite)
    throw std::invalid_argument("rounding_interval: finite outputs only");
  const bool is_posit = fmt.kind == Kind::posit;

  if (is_posit && d.value == 0.0) return Interval{0.0, 0.0};

  // Even output bit patterns own their midpoints (ties go to them); odd
  // patterns get the midpoint moved one binary64 ulp inward.
  const bool even = (y.bits & 1) == 0;
  const auto prev = formats::next_down(y);
  const auto next = formats::next_up(y);

  double lo, hi;
  bool lo_capped = false, hi_capped = false;

  if (is_posit && prev && formats::decode(*prev).value == 0.0) {
    lo = DBL_TRUE_MIN;  // everything below minpos still rounds to minpos
    lo_capped = true;
  } else if (!prev) {
    lo = is_posit ? -DBL_MAX : -formats::overflow_midpoint(fmt);
    lo_capped = is_posit;
  } else {
    lo = formats::midpoint_h(*prev, y);
  }

  if (is_posit && next && formats::decode(*next).value == 0.0) {
    hi = -DBL_TRUE_MIN;
    hi_capped = true;
  } else if (!next) {
    hi = is_posit ? DBL_MAX : formats::overflow_midpoint(fmt);
    hi_capped = is_posit;
  } else {
    hi = formats::midpoint_h(y, *next);
  }

  if (!even) {
    if (!lo_capped) lo = std::nextafter(lo, HUGE_VAL);
    if (!hi_capped) hi = std::nextafter(hi, -HUGE_VAL);
  }
  return Interval{lo, hi};
}

std::vector<Constraint> calc_rounding_intervals(const oracle::OracleConfig& cfg,
                                                const FormatDescriptor& out_format,
                                                std::span<const TValue> inputs) {
  std::vector<Constraint> out;
  out.reserve(inputs.size());
  for (const TValue& x : inputs) {
    const TValue y = oracle::oracle_round(cfg, x, out_format);
    out.push_back(Constraint{x, rounding_interval(y)});
  }
  return out;
}

ReducedConstraint reduce_constraint(const Constraint& c,
                                    const reduction::FunctionRecipe& recipe) {
  const double raw = formats::decode(c.x).value;
  auto [xr, ctx] = recipe.reduce(raw);

  double a = recipe.compensate_inverse(c.iv.lo, ctx);
  double b = recipe.compensate_inverse(c.iv.hi, ctx);
  if (recipe.direction(ctx) == reduction::Monotone::decreasing) std::swap(a, b);

  // Verify-and-shrink: walk each bound inward until its compensated value
  // lands inside the source interval.
  constexpr int kShrinkCap = 4096;
  int steps = 0;
  while (!c.iv.contains(recipe.compensate(a, ctx))) {
    if (a > b || ++steps > kShrinkCap)
      break;
    a = std::nextafter(a, HUGE_VAL);
  }
  while (a <= b && !c.iv.contains(recipe.compensate(b, ctx))) {
    if (++steps > kShrinkCap) break;
    b = std::nextafter(b, -HUGE_VAL);
  }
  if (steps > kShrinkCap)
    throw ResourceLimitError("reduce_constraint: shrink cap exceeded at input " +
                             formats::to_hex(c.x));
  if (a > b)
    throw InfeasibleError("no reduced interval can compensate into the rounding "
                          "interval of input " + formats::to_hex(c.x));
  return ReducedConstraint{xr, Interval{a, b}, ctx};
}

std::vector<ReducedConstraint> calc_reduced_intervals(std::span<const Constraint> constraints,
                                                      const reduction::FunctionRecipe& recipe) {
  std::vector<ReducedConstraint> out;
  out.reserve(constraints.size());
  for (const Constraint& c : constraints) out.push_back(reduce_constraint(c, recipe));
  return out;
}

std::vector<MergedConstraint> combine_reduced_intervals(std::span<const ReducedConstraint> reduced) {
  // Group by the exact bit pattern of the reduced input; values differing in
  // the last ulp are distinct inputs to the polynomial.
  std::map<std::uint64_t, Interval> merged;
  for (const ReducedConstraint& rc : reduced) {
    auto [it, fresh] = merged.emplace(bits_of(rc.x_reduced), rc.iv);
    if (!fresh) {
      it->second.lo = std::max(it->second.lo, rc.iv.lo);
      it->second.hi = std::min(it->second.hi, rc.iv.hi);
      if (it->second.lo > it->second.hi)
        throw InfeasibleError("empty interval intersection at reduced input " +
                              hex64(rc.x_reduced));
    }
  }
  std::vector<MergedConstraint> out;
  out.reserve(merged.size());
  for (const auto& [bits, iv] : merged)
    out.push_back(MergedConstraint{double_of_bits(bits), iv});
  std::sort(out.begin(), out.end(), [](const MergedConstraint& l, const MergedConstraint& r) {
    return l.x_reduced < r.x_reduced;
  });
  return out;
}

void dump_merged(std::ostream& os, std::span<const MergedConstraint> merged,
                 const std::string& header) {
  os << "# reduced constraints v1\n";
  if (!header.empty()) os << "# " << header << "\n";
  os << "# count " << merged.size() << "\n";
  for (const MergedConstraint& m : merged)
    os << hex64(m.x_reduced) << " " << hex64(m.iv.lo) << " " << hex64(m.iv.hi) << "\n";
}

std::vector<MergedConstraint> load_merged(std::istream& is) {
  std::vector<MergedConstraint> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string x, lo, hi;
    if (!(ls >> x >> lo >> hi)) throw std::runtime_error("bad constraint line: " + line);
    out.push_back(MergedConstraint{double_of_bits(parse_hex(x)),
                                   Interval{double_of_bits(parse_hex(lo)),
                                            double_of_bits(parse_hex(hi))}});
  }
  return out;
}

}  // namespace polyround::intervals
