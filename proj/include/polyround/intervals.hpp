#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "polyround/formats.hpp"
#include "polyround/oracle.hpp"
#include "polyround/reduction.hpp"

namespace polyround::intervals {

// Closed interval of binary64 values. Open rounding-interval endpoints are
// realized as closed bounds moved one binary64 ulp inward.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// (input, rounding interval): every binary64 in the interval rounds to the
// oracle result for x.
struct Constraint {
  formats::TValue x;
  Interval iv;
};

// (reduced input, reduced interval): compensating any value in the interval
// lands inside the originating rounding interval.
struct ReducedConstraint {
  double x_reduced = 0.0;
  Interval iv;
  reduction::ReductionContext ctx;
};

// One merged constraint per distinct reduced-input bit pattern.
struct MergedConstraint {
  double x_reduced = 0.0;
  Interval iv;
};

// All binary64 values rounding to the finite value y. Extreme outputs are
// capped so the interval stays bounded: ieee tops out one ulp inside the
// overflow midpoint, posit maxpos extends to the largest finite binary64 and
// minpos down to the smallest positive one; posit zero is the point {0}.
Interval rounding_interval(const formats::TValue& y);

// List L: the output constraint per input, via the oracle.
std::vector<Constraint> calc_rounding_intervals(const oracle::OracleConfig& cfg,
                                                const formats::FormatDescriptor& out_format,
                                                std::span<const formats::TValue> inputs);

// List L': candidate interval from the inverse compensation, then shrink one
// binary64 ulp at a time until both compensated endpoints land inside the
// source interval. Throws InfeasibleError when the bounds cross.
std::vector<ReducedConstraint> calc_reduced_intervals(std::span<const Constraint> constraints,
                                                      const reduction::FunctionRecipe& recipe);
ReducedConstraint reduce_constraint(const Constraint& c,
                                    const reduction::FunctionRecipe& recipe);

// List Lambda: group by exact reduced-input bit pattern, intersect, sort.
// Throws InfeasibleError on an empty intersection.
std::vector<MergedConstraint> combine_reduced_intervals(std::span<const ReducedConstraint> reduced);

// Structured text dump of a merged constraint list (hex binary64 bits), for
// offline LP debugging; load parses the same format.
void dump_merged(std::ostream& os, std::span<const MergedConstraint> merged,
                 const std::string& header);
std::vector<MergedConstraint> load_merged(std::istream& is);

}  // namespace polyround::intervals
