#include "polyround/polygen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "polyround/util.hpp"

namespace polyround::polygen {

using formats::FormatDescriptor;
using formats::TValue;
using intervals::Interval;
using intervals::MergedConstraint;

EvalShape shape_for(const std::vector<int>& degrees) {
  if (degrees.empty()) throw std::invalid_argument("shape_for: no terms");
  bool dense = true, odd = true, even = true;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (degrees[i] != static_cast<int>(i)) dense = false;
    if (degrees[i] % 2 == 0) odd = false;
    if (degrees[i] % 2 == 1) even = false;
  }
  if (dense) return EvalShape::dense;
  if (odd) return EvalShape::odd_compact;
  if (even) return EvalShape::even_compact;
  return EvalShape::sparse;
}

const char* shape_name(EvalShape s) {
  switch (s) {
    case EvalShape::dense: return "dense";
    case EvalShape::odd_compact: return "odd_compact";
    case EvalShape::even_compact: return "even_compact";
    case EvalShape::sparse: return "sparse";
  }
  return "?";
}

std::optional<EvalShape> shape_by_name(const std::string& s) {
  for (EvalShape e : {EvalShape::dense, EvalShape::odd_compact, EvalShape::even_compact,
                      EvalShape::sparse})
    if (s == shape_name(e)) return e;
  return std::nullopt;
}

double horner_eval(const PieceCoefficients& pc, double x) {
  const auto& d = pc.piece.degrees;
  const auto& c = pc.coeffs;
  switch (pc.shape) {
    case EvalShape::dense: {
      double acc = c.back();
      for (std::size_t i = c.size() - 1; i-- > 0;) acc = acc * x + c[i];
      return acc;
    }
    case EvalShape::odd_compact: {
      const double s = x * x;
      double acc = c.back();
      for (std::size_t i = c.size() - 1; i-- > 0;) acc = acc * s + c[i];
      return acc * x;
    }
    case EvalShape::even_compact: {
      const double s = x * x;
      double acc = c.back();
      for (std::size_t i = c.size() - 1; i-- > 0;) acc = acc * s + c[i];
      return acc;
    }
    case EvalShape::sparse: {
      double acc = c.back();
      for (std::size_t i = c.size() - 1; i-- > 0;) {
        for (int g = d[i + 1] - d[i]; g-- > 0;) acc *= x;
        acc += c[i];
      }
      for (int g = d.front(); g-- > 0;) acc *= x;
      return acc;
    }
  }
  throw std::logic_error("horner_eval: unknown shape");
}

const PieceCoefficients& piece_for(const CoefficientSet& cs, double x) {
  for (const PieceCoefficients& pc : cs.pieces)
    if (x >= pc.piece.lo && x < pc.piece.hi) return pc;
  throw std::out_of_range("piece_for: reduced input " + exact_decimal(x) +
                          " outside every piece domain");
}

double evaluate_polynomial(const CoefficientSet& cs, double x) {
  return horner_eval(piece_for(cs, x), x);
}

TValue pipeline_eval(const reduction::FunctionRecipe& recipe, const CoefficientSet& cs,
                     const FormatDescriptor& out_format, const TValue& x) {
  if (const auto special = recipe.classify_special(x)) return *special;
  const double raw = formats::decode(x).value;
  const auto [xr, ctx] = recipe.reduce(raw);
  const double yr = evaluate_polynomial(cs, xr);
  return formats::round_to_format(out_format, recipe.compensate(yr, ctx));
}

bool satisfies(const CoefficientSet& cs, std::span<const MergedConstraint> merged) {
  for (const MergedConstraint& m : merged) {
    const double y = evaluate_polynomial(cs, m.x_reduced);
    if (!m.iv.contains(y)) return false;
  }
  return true;
}

namespace {

// Generate one piece with the search-and-refine loop. `lambda` holds the
// authoritative constraints; `working` the refined copy handed to the LP.
std::optional<PieceCoefficients> generate_piece(const Piece& piece,
                                                std::span<const MergedConstraint> lambda,
                                                GenerationMeta& meta) {
  PieceCoefficients pc;
  pc.piece = piece;
  pc.shape = shape_for(piece.degrees);

  std::vector<Interval> working(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) working[i] = lambda[i].iv;

  RationalLPProblem problem;
  problem.degrees = piece.degrees;
  problem.rows.resize(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i)
    problem.rows[i].x = rational_of_double(lambda[i].x_reduced);

  constexpr int kRefineCap = 2000;
  for (int round = 0;; ++round) {
    if (round > kRefineCap)
      throw ResourceLimitError("refine_and_generate: refinement cap exceeded");

    for (std::size_t i = 0; i < lambda.size(); ++i) {
      problem.rows[i].lo = rational_of_double(working[i].lo);
      problem.rows[i].hi = rational_of_double(working[i].hi);
    }
    ++meta.lp_solves;
    const auto solution = solve_lp(problem);
    if (!solution) return std::nullopt;

    pc.coeffs.resize(solution->size());
    for (std::size_t t = 0; t < solution->size(); ++t)
      pc.coeffs[t] = double_of_rational_rne((*solution)[t]);

    // Verify under the shipped binary64 expression against the original
    // constraints; tighten the working copy one ulp where it falls out.
    bool ok = true;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      const double y = horner_eval(pc, lambda[i].x_reduced);
      if (y < lambda[i].iv.lo) {
        working[i].lo = std::nextafter(working[i].lo, HUGE_VAL);
        ok = false;
        ++meta.refinement_steps;
      } else if (y > lambda[i].iv.hi) {
        working[i].hi = std::nextafter(working[i].hi, -HUGE_VAL);
        ok = false;
        ++meta.refinement_steps;
      }
    }
    if (ok) return pc;
  }
}

}  // namespace

PolynomialSpec single_piece_spec(const reduction::FunctionRecipe& recipe,
                                 std::vector<int> degrees) {
  const auto& rd = recipe.reduced_domain;
  Piece piece;
  piece.lo = rd.lo;
  piece.hi = rd.hi_closed ? std::nextafter(rd.hi, HUGE_VAL) : rd.hi;
  piece.degrees = std::move(degrees);
  return PolynomialSpec{{piece}};
}

std::optional<CoefficientSet> refine_and_generate(std::span<const MergedConstraint> merged,
                                                  const PolynomialSpec& spec) {
  if (spec.pieces.empty()) throw std::invalid_argument("refine_and_generate: no pieces");
  CoefficientSet cs;
  cs.meta.constraint_count = merged.size();

  // Partition by piece domain; every constraint must land in exactly one piece.
  std::vector<std::vector<MergedConstraint>> parts(spec.pieces.size());
  for (const MergedConstraint& m : merged) {
    bool placed = false;
    for (std::size_t p = 0; p < spec.pieces.size(); ++p) {
      if (m.x_reduced >= spec.pieces[p].lo && m.x_reduced < spec.pieces[p].hi) {
        parts[p].push_back(m);
        placed = true;
        break;
      }
    }
    if (!placed)
      throw std::invalid_argument("refine_and_generate: reduced input " +
                                  exact_decimal(m.x_reduced) + " outside all pieces");
  }

  for (std::size_t p = 0; p < spec.pieces.size(); ++p) {
    auto pc = generate_piece(spec.pieces[p], parts[p], cs.meta);
    if (!pc) return std::nullopt;
    cs.pieces.push_back(std::move(*pc));
  }
  return cs;
}

std::optional<CoefficientSet> generate_with_sampling(
    const oracle::OracleConfig& cfg, const reduction::FunctionRecipe& recipe,
    const FormatDescriptor& fmt, std::uint64_t ladder_begin, std::uint64_t ladder_end,
    const PolynomialSpec& spec, const SamplingConfig& sampling,
    const std::uint32_t* expected_bits) {
  if (ladder_end <= ladder_begin)
    throw std::invalid_argument("generate_with_sampling: empty ladder range");
  const std::uint64_t range = ladder_end - ladder_begin;

  // Inputs the polynomial path must serve: finite, non-special, in-domain.
  const auto is_candidate = [&](std::uint64_t ladder) {
    const TValue x = formats::ladder_value(fmt, ladder);
    if (recipe.classify_special(x)) return false;
    return oracle::in_domain(cfg.function, formats::decode(x).value);
  };

  std::vector<std::uint32_t> candidates;
  candidates.reserve(range);
  for (std::uint64_t off = 0; off < range; ++off)
    if (is_candidate(ladder_begin + off)) candidates.push_back(static_cast<std::uint32_t>(off));

  // Deterministic uniform sample of reduced constraints (inputs map 1:1 or
  // many:1 onto them; duplicates merge by intersection).
  std::vector<std::uint32_t> sample;
  if (sampling.sample_size >= candidates.size()) {
    sample = candidates;  // degenerates to exhaustive generation
  } else {
    std::mt19937_64 rng(sampling.seed);
    sample.reserve(sampling.sample_size);
    std::sample(candidates.begin(), candidates.end(), std::back_inserter(sample),
                static_cast<long>(sampling.sample_size), rng);
  }

  // Expected outputs for validation (candidate slots only), computed once if
  // not supplied.
  std::vector<std::uint32_t> computed_expected;
  if (!expected_bits) {
    computed_expected.resize(range);
    parallel_chunks(candidates.size(), sampling.jobs,
                    [&](int, std::uint64_t b, std::uint64_t e) {
                      for (std::uint64_t i = b; i < e; ++i) {
                        const std::uint64_t off = candidates[i];
                        const TValue x = formats::ladder_value(fmt, ladder_begin + off);
                        const TValue y = oracle::oracle_round(cfg, x, fmt);
                        computed_expected[off] = static_cast<std::uint32_t>(y.bits);
                      }
                    });
    expected_bits = computed_expected.data();
  }

  std::map<std::uint64_t, Interval> constraint_map;  // keyed by x' bits
  const auto add_constraint = [&](std::uint64_t ladder) {
    const TValue x = formats::ladder_value(fmt, ladder);
    const TValue y{fmt, expected_bits[ladder - ladder_begin]};
    const intervals::Constraint c{x, intervals::rounding_interval(y)};
    const auto rc = intervals::reduce_constraint(c, recipe);
    auto [it, fresh] = constraint_map.emplace(bits_of(rc.x_reduced), rc.iv);
    if (!fresh) {
      it->second.lo = std::max(it->second.lo, rc.iv.lo);
      it->second.hi = std::min(it->second.hi, rc.iv.hi);
      if (it->second.lo > it->second.hi)
        throw InfeasibleError("generate_with_sampling: empty intersection at " +
                              hex64(rc.x_reduced));
    }
  };
  for (std::uint32_t off : sample) add_constraint(ladder_begin + off);

  GenerationMeta meta;
  meta.seed = sampling.seed;
  for (int round = 1; round <= sampling.max_rounds; ++round) {
    std::vector<MergedConstraint> lambda;
    lambda.reserve(constraint_map.size());
    for (const auto& [bits, iv] : constraint_map)
      lambda.push_back(MergedConstraint{double_of_bits(bits), iv});
    std::sort(lambda.begin(), lambda.end(),
              [](const MergedConstraint& l, const MergedConstraint& r) {
                return l.x_reduced < r.x_reduced;
              });

    auto cs = refine_and_generate(lambda, spec);
    if (!cs) return std::nullopt;
    meta.lp_solves += cs->meta.lp_solves;
    meta.refinement_steps += cs->meta.refinement_steps;
    meta.sampling_rounds = round;
    meta.constraint_count = lambda.size();

    // Exhaustive validation through the shipped pipeline; counterexamples
    // are collected per chunk and merged in chunk order (deterministic).
    std::vector<std::vector<std::uint32_t>> chunk_bad(
        std::max(1, sampling.jobs));
    parallel_chunks(candidates.size(), sampling.jobs,
                    [&](int chunk, std::uint64_t b, std::uint64_t e) {
                      auto& bad = chunk_bad[chunk];
                      for (std::uint64_t i = b; i < e; ++i) {
                        const std::uint64_t off = candidates[i];
                        const TValue x = formats::ladder_value(fmt, ladder_begin + off);
                        const TValue got = pipeline_eval(recipe, *cs, fmt, x);
                        if (static_cast<std::uint32_t>(got.bits) != expected_bits[off])
                          bad.push_back(off);
                      }
                    });
    std::size_t bad_total = 0;
    for (const auto& bad : chunk_bad) bad_total += bad.size();
    if (bad_total == 0) {
      cs->meta = meta;
      cs->function = oracle::func_name(cfg.function);
      cs->format = fmt.name();
      cs->recipe_id = recipe.id;
      return cs;
    }
    for (const auto& bad : chunk_bad)
      for (std::uint32_t off : bad) add_constraint(ladder_begin + off);
  }
  throw ResourceLimitError("generate_with_sampling: round cap exceeded");
}

void save_artifact(std::ostream& os, const CoefficientSet& cs) {
  os << "# polyround coefficient artifact v1\n";
  os << "function " << cs.function << "\n";
  os << "format " << cs.format << "\n";
  os << "recipe " << cs.recipe_id << "\n";
  os << "meta seed " << cs.meta.seed << "\n";
  os << "meta constraints " << cs.meta.constraint_count << "\n";
  os << "meta lp_solves " << cs.meta.lp_solves << "\n";
  os << "meta refinement_steps " << cs.meta.refinement_steps << "\n";
  os << "meta sampling_rounds " << cs.meta.sampling_rounds << "\n";
  for (const PieceCoefficients& pc : cs.pieces) {
    os << "piece " << shape_name(pc.shape) << " domain " << hex64(pc.piece.lo) << " "
       << hex64(pc.piece.hi) << "\n";
    for (std::size_t t = 0; t < pc.coeffs.size(); ++t)
      os << "  term " << pc.piece.degrees[t] << " " << hex64(pc.coeffs[t]) << " "
         << exact_decimal(pc.coeffs[t]) << "\n";
  }
}

CoefficientSet load_artifact(std::istream& is) {
  CoefficientSet cs;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "function") {
      ls >> cs.function;
    } else if (word == "format") {
      ls >> cs.format;
    } else if (word == "recipe") {
      ls >> cs.recipe_id;
    } else if (word == "meta") {
      std::string key;
      ls >> key;
      if (key == "seed") ls >> cs.meta.seed;
      else if (key == "constraints") ls >> cs.meta.constraint_count;
      else if (key == "lp_solves") ls >> cs.meta.lp_solves;
      else if (key == "refinement_steps") ls >> cs.meta.refinement_steps;
      else if (key == "sampling_rounds") ls >> cs.meta.sampling_rounds;
    } else if (word == "piece") {
      std::string shape, domain_kw, lo, hi;
      ls >> shape >> domain_kw >> lo >> hi;
      PieceCoefficients pc;
      const auto sh = shape_by_name(shape);
      if (!sh || domain_kw != "domain")
        throw std::runtime_error("bad artifact piece line: " + line);
      pc.shape = *sh;
      pc.piece.lo = double_of_bits(parse_hex(lo));
      pc.piece.hi = double_of_bits(parse_hex(hi));
      cs.pieces.push_back(std::move(pc));
    } else if (word == "term") {
      if (cs.pieces.empty()) throw std::runtime_error("artifact term before piece");
      int degree = 0;
      std::string hex, decimal;
      ls >> degree >> hex >> decimal;
      cs.pieces.back().piece.degrees.push_back(degree);
      cs.pieces.back().coeffs.push_back(double_of_bits(parse_hex(hex)));
    } else {
      throw std::runtime_error("bad artifact line: " + line);
    }
  }
  if (cs.pieces.empty()) throw std::runtime_error("artifact has no pieces");
  return cs;
}

}  // namespace polyround::polygen
