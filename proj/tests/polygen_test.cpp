#include "polyround/polygen.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "polyround/mathlib.hpp"
#include "polyround/util.hpp"

using namespace polyround;
using formats::FormatDescriptor;
using formats::TValue;
using intervals::Interval;
using intervals::MergedConstraint;
using oracle::Func;
using oracle::OracleConfig;
using polygen::CoefficientSet;
using polygen::EvalShape;
using polygen::PieceCoefficients;
using polygen::RationalLPProblem;

namespace {

RationalLPProblem problem_of(std::vector<int> degrees,
                             std::vector<std::array<double, 3>> rows) {
  RationalLPProblem p;
  p.degrees = std::move(degrees);
  for (const auto& [x, lo, hi] : rows)
    p.rows.push_back({polygen::rational_of_double(x), polygen::rational_of_double(lo),
                      polygen::rational_of_double(hi)});
  return p;
}

std::vector<MergedConstraint> fp5_ln_lambda() {
  const auto fp5 = FormatDescriptor::fp5();
  const auto& recipe = reduction::recipe_for(Func::ln, fp5);
  std::vector<TValue> inputs;
  formats::enumerate(
      fp5,
      [](const TValue& v) {
        return formats::is_finite(v) && formats::decode(v).value > 0.0;
      },
      [&](const TValue& v) { inputs.push_back(v); });
  const auto L = intervals::calc_rounding_intervals({Func::ln, 2000}, fp5, inputs);
  const auto Lp = intervals::calc_reduced_intervals(L, recipe);
  return intervals::combine_reduced_intervals(Lp);
}

}  // namespace

TEST(RationalLp, TwoPointLineIsFeasible) {
  const auto p = problem_of({0, 1}, {{0.0, 1.0, 2.0}, {1.0, 3.0, 4.0}});
  const auto sol = polygen::solve_lp(p);
  ASSERT_TRUE(sol.has_value());
  ASSERT_EQ(sol->size(), 2u);
  // Any feasible point is acceptable; verify by substitution.
  const mpq_class at0 = (*sol)[0];
  const mpq_class at1 = (*sol)[0] + (*sol)[1];
  EXPECT_GE(at0, 1);
  EXPECT_LE(at0, 2);
  EXPECT_GE(at1, 3);
  EXPECT_LE(at1, 4);
}

TEST(RationalLp, ContradictoryBoundsInfeasible) {
  const auto p = problem_of({0, 1}, {{0.0, 1.0, 2.0}, {0.0, 3.0, 4.0}});
  EXPECT_FALSE(polygen::solve_lp(p).has_value());
}

TEST(RationalLp, DegenerateWidthZero) {
  const auto p = problem_of({0}, {{0.5, 2.0, 2.0}});
  const auto sol = polygen::solve_lp(p);
  ASSERT_TRUE(sol.has_value());
  EXPECT_EQ((*sol)[0], 2);
}

TEST(RationalLp, MatchesBruteForceGridScan) {
  // Randomized 2-variable instances with <=5 rows over a coarse rational
  // grid. Grid feasibility implies LP feasibility; LP infeasibility implies
  // no feasible grid point.
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> xi(-4, 4), wi(0, 6), lo_i(-12, 8);
  int feasible_count = 0, infeasible_count = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int nrows = 1 + static_cast<int>(rng() % 5);
    RationalLPProblem p;
    p.degrees = {0, 1};
    std::vector<std::array<mpq_class, 3>> grid_rows;
    for (int r = 0; r < nrows; ++r) {
      const mpq_class x(xi(rng), 2);
      const mpq_class lo(lo_i(rng), 4);
      const mpq_class hi = lo + mpq_class(wi(rng), 4);
      p.rows.push_back({x, lo, hi});
      grid_rows.push_back({x, lo, hi});
    }
    bool grid_feasible = false;
    for (int a = -16; a <= 16 && !grid_feasible; ++a) {
      for (int b = -16; b <= 16 && !grid_feasible; ++b) {
        const mpq_class c0(a, 4), c1(b, 4);
        bool ok = true;
        for (const auto& [x, lo, hi] : grid_rows) {
          const mpq_class v = c0 + c1 * x;
          if (v < lo || v > hi) {
            ok = false;
            break;
          }
        }
        grid_feasible = ok;
      }
    }
    const auto sol = polygen::solve_lp(p);
    if (grid_feasible) {
      ASSERT_TRUE(sol.has_value()) << "trial " << trial;
    }
    if (!sol.has_value()) {
      ASSERT_FALSE(grid_feasible) << "trial " << trial;
      ++infeasible_count;
    } else {
      // substitution re-check in exact arithmetic
      for (const auto& row : p.rows) {
        const mpq_class v = (*sol)[0] + (*sol)[1] * row.x;
        ASSERT_GE(v, row.lo);
        ASSERT_LE(v, row.hi);
      }
      ++feasible_count;
    }
  }
  // the generator should exercise both outcomes
  EXPECT_GT(feasible_count, 20);
  EXPECT_GT(infeasible_count, 20);
}

TEST(RationalLp, ConversionsAreLossless) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100000; ++t) {
    const double x = double_of_bits(rng());
    if (!std::isfinite(x)) continue;
    const mpq_class q = polygen::rational_of_double(x);
    const double back = polygen::double_of_rational_rne(q);
    if (x == 0.0) {
      EXPECT_EQ(back, 0.0);
    } else {
      ASSERT_EQ(bits_of(back), bits_of(x)) << hex64(x);
    }
  }
}

TEST(Horner, Examples) {
  PieceCoefficients odd;
  odd.piece = {0.0, 1.0, {1}};
  odd.shape = EvalShape::odd_compact;
  odd.coeffs = {2.0};
  EXPECT_EQ(polygen::horner_eval(odd, 0.0), 0.0);

  PieceCoefficients line;
  line.piece = {0.0, 2.0, {0, 1}};
  line.shape = EvalShape::dense;
  line.coeffs = {1.5, 2.0};
  EXPECT_EQ(polygen::horner_eval(line, 1.0), 3.5);
}

TEST(Horner, ShapeSelection) {
  EXPECT_EQ(polygen::shape_for({0, 1, 2, 3}), EvalShape::dense);
  EXPECT_EQ(polygen::shape_for({1, 3, 5, 7}), EvalShape::odd_compact);
  EXPECT_EQ(polygen::shape_for({0, 2, 4}), EvalShape::even_compact);
  EXPECT_EQ(polygen::shape_for({0, 1, 4}), EvalShape::sparse);
  EXPECT_EQ(polygen::shape_for({0}), EvalShape::dense);
  EXPECT_EQ(polygen::shape_for({1}), EvalShape::odd_compact);
}

TEST(Horner, SparseGapEvaluation) {
  // c0 + c1 x + c4 x^4 with explicit power steps.
  PieceCoefficients pc;
  pc.piece = {0.0, 2.0, {0, 1, 4}};
  pc.shape = EvalShape::sparse;
  pc.coeffs = {1.0, 2.0, 3.0};
  EXPECT_EQ(polygen::horner_eval(pc, 1.0), 6.0);
  EXPECT_EQ(polygen::horner_eval(pc, 2.0), 1.0 + 4.0 + 48.0);
  // odd-compact evaluates as x * Q(x*x), bit-deterministically
  PieceCoefficients oc;
  oc.piece = {0.0, 1.0, {1, 3}};
  oc.shape = EvalShape::odd_compact;
  oc.coeffs = {0.1, 0.2};
  const double x = 0.37;
  EXPECT_EQ(polygen::horner_eval(oc, x), (0.2 * (x * x) + 0.1) * x);
}

TEST(Polygen, Fp5LnDegreeOneEndToEnd) {
  const auto lambda = fp5_ln_lambda();
  ASSERT_EQ(lambda.size(), 4u);
  const auto fp5 = FormatDescriptor::fp5();
  const auto& recipe = reduction::recipe_for(Func::ln, fp5);
  const auto spec = polygen::single_piece_spec(recipe, {0, 1});
  const auto cs = polygen::refine_and_generate(lambda, spec);
  ASSERT_TRUE(cs.has_value());
  EXPECT_TRUE(polygen::satisfies(*cs, lambda));

  // All 11 fp5 inputs produce the correctly rounded ln through the pipeline.
  const OracleConfig cfg{Func::ln, 2000};
  formats::enumerate(
      fp5,
      [](const TValue& v) {
        return formats::is_finite(v) && formats::decode(v).value > 0.0;
      },
      [&](const TValue& v) {
        const TValue got = polygen::pipeline_eval(recipe, *cs, fp5, v);
        const TValue want = oracle::oracle_round(cfg, v, fp5);
        EXPECT_EQ(got.bits, want.bits) << formats::to_hex(v);
      });
}

TEST(Polygen, RefinementTriggersAndConverges) {
  // Hunt for a tight synthetic system whose exact-rational solution rounds
  // outside a few-ulp-wide interval: the refine loop must tighten the bound
  // and succeed in a later round.
  std::mt19937_64 rng(77);
  int refined_successes = 0;
  for (int trial = 0; trial < 3000 && refined_successes < 5; ++trial) {
    const double x1 = 1.0 / 3.0;
    const double x2 = double_of_bits(bits_of(0.7) + (rng() % 1000));
    const double t1 = std::sin(0.1 + 1e-4 * static_cast<double>(rng() % 10000));
    const double t2 = std::sin(1.0 + 1e-4 * static_cast<double>(rng() % 10000));
    const auto win = [](double v, int ulps) {
      double hi = v;
      for (int i = 0; i < ulps; ++i) hi = std::nextafter(hi, HUGE_VAL);
      return Interval{v, hi};
    };
    std::vector<MergedConstraint> lambda = {{x1, win(t1, 1)}, {x2, win(t2, 1)}};
    polygen::PolynomialSpec spec{{{0.0, 1.0, {0, 1}}}};
    std::optional<CoefficientSet> cs;
    try {
      cs = polygen::refine_and_generate(lambda, spec);
    } catch (const ResourceLimitError&) {
      continue;
    }
    if (!cs) continue;
    EXPECT_TRUE(polygen::satisfies(*cs, lambda));
    if (cs->meta.refinement_steps > 0) {
      ++refined_successes;
      EXPECT_GT(cs->meta.lp_solves, 1);
    }
  }
  EXPECT_GE(refined_successes, 1)
      << "no synthetic case exercised the refinement path";
}

TEST(Polygen, SamplingDegeneratesToExhaustive) {
  // sample_size >= |domain|: one round, identical to refine_and_generate on
  // the full constraint list.
  const auto fp5 = FormatDescriptor::fp5();
  const auto& recipe = reduction::recipe_for(Func::ln, fp5);
  const auto spec = polygen::single_piece_spec(recipe, {0, 1});
  const OracleConfig cfg{Func::ln, 2000};
  polygen::SamplingConfig sampling;
  sampling.sample_size = 1 << 20;
  sampling.seed = 9;
  const auto sampled = polygen::generate_with_sampling(
      cfg, recipe, fp5, 0, formats::ladder_size(fp5), spec, sampling);
  ASSERT_TRUE(sampled.has_value());
  EXPECT_EQ(sampled->meta.sampling_rounds, 1);

  const auto direct = polygen::refine_and_generate(fp5_ln_lambda(), spec);
  ASSERT_TRUE(direct.has_value());
  ASSERT_EQ(sampled->pieces.size(), direct->pieces.size());
  for (std::size_t p = 0; p < direct->pieces.size(); ++p)
    for (std::size_t t = 0; t < direct->pieces[p].coeffs.size(); ++t)
      EXPECT_EQ(bits_of(sampled->pieces[p].coeffs[t]),
                bits_of(direct->pieces[p].coeffs[t]));
}

TEST(Polygen, SamplingSeedChangeStillValidates) {
  // Different seeds may land on different polynomials; both must pass the
  // exhaustive check that the sampling loop enforces before returning.
  const auto bf16 = FormatDescriptor::bfloat16();
  const auto& recipe = reduction::recipe_for(Func::log2, bf16);
  const auto spec = polygen::single_piece_spec(recipe, {1, 3, 5});
  const OracleConfig cfg{Func::log2, 2000};
  for (std::uint64_t seed : {1ull, 2ull}) {
    polygen::SamplingConfig sampling;
    sampling.sample_size = 40;
    sampling.seed = seed;
    const auto cs = polygen::generate_with_sampling(cfg, recipe, bf16, 0,
                                                    formats::ladder_size(bf16), spec,
                                                    sampling);
    ASSERT_TRUE(cs.has_value()) << "seed " << seed;
    const auto cf = mathlib::compile(Func::log2, bf16, recipe, *cs);
    const auto report = mathlib::validate_exhaustive(cf);
    EXPECT_EQ(report.mismatch_count, 0u) << "seed " << seed;
  }
}

TEST(Polygen, PiecewiseGenerationPositSqrt) {
  // Two degree-6 pieces around the published split point, generated from
  // scratch and validated over every posit16 pattern.
  const auto p16 = FormatDescriptor::posit16();
  const auto& recipe = reduction::recipe_for(Func::sqrt, p16);
  std::vector<TValue> inputs;
  formats::enumerate(
      p16, [](const TValue& v) { return formats::is_finite(v); },
      [&](const TValue& v) {
        if (recipe.classify_special(v)) return;
        if (formats::decode(v).value < 0.0) return;
        inputs.push_back(v);
      });
  const auto L = intervals::calc_rounding_intervals({Func::sqrt, 2000}, p16, inputs);
  const auto Lp = intervals::calc_reduced_intervals(L, recipe);
  const auto lambda = intervals::combine_reduced_intervals(Lp);
  EXPECT_GT(lambda.size(), 4000u);

  const double split_hi = std::nextafter(2.14599609375, 8.0);
  polygen::PolynomialSpec spec{{{1.0, split_hi, {0, 1, 2, 3, 4, 5, 6}},
                                {split_hi, 4.0, {0, 1, 2, 3, 4, 5, 6}}}};
  const auto cs = polygen::refine_and_generate(lambda, spec);
  ASSERT_TRUE(cs.has_value());
  ASSERT_EQ(cs->pieces.size(), 2u);
  EXPECT_TRUE(polygen::satisfies(*cs, lambda));

  const auto cf = mathlib::compile(Func::sqrt, p16, recipe, *cs);
  const auto report = mathlib::validate_exhaustive(cf);
  EXPECT_EQ(report.mismatch_count, 0u);
}

TEST(Polygen, ArtifactRoundTrip) {
  const auto lambda = fp5_ln_lambda();
  const auto fp5 = FormatDescriptor::fp5();
  const auto& recipe = reduction::recipe_for(Func::ln, fp5);
  auto cs = *polygen::refine_and_generate(lambda, polygen::single_piece_spec(recipe, {0, 1}));
  cs.function = "ln";
  cs.format = "fp5";
  cs.recipe_id = recipe.id;
  cs.meta.seed = 42;

  std::stringstream ss;
  polygen::save_artifact(ss, cs);
  const std::string first = ss.str();
  const auto loaded = polygen::load_artifact(ss);
  std::stringstream again;
  polygen::save_artifact(again, loaded);
  EXPECT_EQ(first, again.str());  // byte-identical re-save
  ASSERT_EQ(loaded.pieces.size(), cs.pieces.size());
  for (std::size_t t = 0; t < cs.pieces[0].coeffs.size(); ++t)
    EXPECT_EQ(bits_of(loaded.pieces[0].coeffs[t]), bits_of(cs.pieces[0].coeffs[t]));
  EXPECT_EQ(loaded.meta.seed, 42u);
}
