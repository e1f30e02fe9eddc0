#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyround/intervals.hpp"
#include "polyround/rational_lp.hpp"

namespace polyround::polygen {

// One piece of a (possibly piecewise) polynomial: a half-open domain in the
// reduced input space and the term degrees present.
struct Piece {
  double lo = 0.0;
  double hi = 0.0;  // [lo, hi)
  std::vector<int> degrees;
};

struct PolynomialSpec {
  std::vector<Piece> pieces;
};

// The exact binary64 expression used to evaluate a piece. Verification during
// generation and the shipped evaluation must agree bit for bit, so the shape
// is part of the coefficient set.
enum class EvalShape {
  dense,         // contiguous degrees from 0: classic Horner
  odd_compact,   // odd degrees only: x * Q(x^2), Q by Horner
  even_compact,  // even degrees only: Q(x^2)
  sparse,        // descending degrees with explicit power gap steps
};

EvalShape shape_for(const std::vector<int>& degrees);
const char* shape_name(EvalShape s);
std::optional<EvalShape> shape_by_name(const std::string& s);

struct PieceCoefficients {
  Piece piece;
  EvalShape shape = EvalShape::dense;
  std::vector<double> coeffs;  // aligned with piece.degrees
};

struct GenerationMeta {
  std::uint64_t seed = 0;
  std::uint64_t constraint_count = 0;
  int lp_solves = 0;
  int refinement_steps = 0;
  int sampling_rounds = 0;
};

struct CoefficientSet {
  std::string function;
  std::string format;
  std::string recipe_id;
  std::vector<PieceCoefficients> pieces;
  GenerationMeta meta;
};

// Bit-deterministic binary64 evaluation of one piece at x.
double horner_eval(const PieceCoefficients& pc, double x);

// Piece dispatch (lo <= x < hi) then horner_eval.
const PieceCoefficients& piece_for(const CoefficientSet& cs, double x);
double evaluate_polynomial(const CoefficientSet& cs, double x);

// The full shipped pipeline on one input: special case, else
// round(compensate(P(reduce(x)))). Generation validates through this exact
// path.
formats::TValue pipeline_eval(const reduction::FunctionRecipe& recipe,
                              const CoefficientSet& cs,
                              const formats::FormatDescriptor& out_format,
                              const formats::TValue& x);

// True when horner_eval satisfies every merged constraint (used by the
// generator's inner loop and re-asserted independently by tests).
bool satisfies(const CoefficientSet& cs,
               std::span<const intervals::MergedConstraint> merged);

// A one-piece spec spanning the recipe's full reduced domain.
PolynomialSpec single_piece_spec(const reduction::FunctionRecipe& recipe,
                                 std::vector<int> degrees);

// Search-and-refine: solve the exact LP, round coefficients to binary64,
// verify under the shipped expression, tighten violated bounds by one
// binary64 ulp and repeat. nullopt when the LP proves infeasibility (the
// caller should raise the degree or change recipe/splits).
std::optional<CoefficientSet> refine_and_generate(
    std::span<const intervals::MergedConstraint> merged, const PolynomialSpec& spec);

struct SamplingConfig {
  std::uint64_t sample_size = 5000;
  std::uint64_t seed = 42;
  int max_rounds = 64;
  int jobs = 1;
  int shrink_reports = 0;  // unused hook for verbose CLI output
};

// Sample-validate-augment over a ladder range of inputs: build constraints
// over a deterministic sample, generate, exhaustively validate through
// pipeline_eval against the oracle, add every counterexample's constraint and
// repeat until clean. `expected_bits`, when provided, must hold the oracle
// result (special cases applied) for each ladder index in [begin, end).
std::optional<CoefficientSet> generate_with_sampling(
    const oracle::OracleConfig& cfg, const reduction::FunctionRecipe& recipe,
    const formats::FormatDescriptor& fmt, std::uint64_t ladder_begin,
    std::uint64_t ladder_end, const PolynomialSpec& spec, const SamplingConfig& sampling,
    const std::uint32_t* expected_bits = nullptr);

// Coefficient artifact file (structured text, byte-reproducible).
void save_artifact(std::ostream& os, const CoefficientSet& cs);
CoefficientSet load_artifact(std::istream& is);

}  // namespace polyround::polygen
