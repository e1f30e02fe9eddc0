// Command-line front end: generate coefficient artifacts, validate them
// exhaustively against the oracle, benchmark, and dump constraint lists.
//
// Exit codes: 0 success, 2 usage/configuration error, 3 validation found
// mismatches, 4 generation infeasible, 5 resource limit hit.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

#include "polyround/mathlib.hpp"
#include "polyround/util.hpp"

using namespace polyround;
using formats::FormatDescriptor;
using formats::TValue;
using oracle::Func;
using oracle::OracleConfig;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitResourceLimit = 5;

struct JobConfig {
  std::string function;
  std::string format;
  std::string recipe;               // empty: the default recipe for (function, format)
  std::string coeffs = "appendix";  // "appendix" or an artifact path
  std::string terms;                // e.g. "0,1" or "1,3,5,7"
  std::string spec_file;  // piecewise spec, one "piece <lo> <hi> <degrees>" per line
  std::string domain;     // "all" (default) or "unit" for [1,2)
  std::string output;
  std::string dump_lambda;
  int precision = 2000;
  std::uint64_t sample = 0;  // 0: exhaustive constraint build
  std::uint64_t seed = 42;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  int iterations = 3;
};

Func parse_function(const std::string& name) {
  const auto f = oracle::func_by_name(name);
  if (!f) throw CLI::ValidationError("--function", "unknown function '" + name + "'");
  return *f;
}

FormatDescriptor parse_format(const std::string& name) {
  const auto f = formats::format_by_name(name);
  if (!f) throw CLI::ValidationError("--format", "unknown format '" + name + "'");
  return *f;
}

const reduction::FunctionRecipe& resolve_recipe(const JobConfig& job, Func f,
                                                const FormatDescriptor& fmt) {
  if (job.recipe.empty()) return reduction::recipe_for(f, fmt);
  return reduction::recipe_for(f, fmt, job.recipe);
}

std::vector<int> parse_degrees(const std::string& s) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stoi(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw CLI::ValidationError("--terms", "no degrees given");
  return out;
}

polygen::PolynomialSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--spec-file", "cannot read '" + path + "'");
  polygen::PolynomialSpec spec;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kw, degrees;
    polygen::Piece piece;
    if (!(ls >> kw >> piece.lo >> piece.hi >> degrees) || kw != "piece")
      throw CLI::ValidationError("--spec-file", "bad line: " + line);
    piece.degrees = parse_degrees(degrees);
    spec.pieces.push_back(std::move(piece));
  }
  if (spec.pieces.empty()) throw CLI::ValidationError("--spec-file", "no pieces");
  return spec;
}

// Ladder index range of the requested input domain.
std::pair<std::uint64_t, std::uint64_t> ladder_domain(const JobConfig& job,
                                                      const FormatDescriptor& fmt) {
  if (job.domain == "unit" ||
      (job.domain.empty() && fmt == FormatDescriptor::binary32())) {
    const TValue one = formats::round_to_format(fmt, 1.0);
    const TValue two = formats::round_to_format(fmt, 2.0);
    return {formats::ladder_index(one), formats::ladder_index(two)};
  }
  return {0, formats::ladder_size(fmt)};
}

mathlib::PatternRange pattern_domain(const JobConfig& job, const FormatDescriptor& fmt) {
  if (job.domain == "unit" ||
      (job.domain.empty() && fmt == FormatDescriptor::binary32()))
    return fmt == FormatDescriptor::binary32()
               ? mathlib::binary32_unit_range()
               : mathlib::PatternRange{formats::round_to_format(fmt, 1.0).bits,
                                       formats::round_to_format(fmt, 2.0).bits};
  if (fmt.total_bits > 24)
    throw CLI::ValidationError("--domain",
                               "full-domain runs need a format of at most 24 bits; "
                               "use --domain unit");
  return mathlib::full_range(fmt);
}

std::vector<intervals::MergedConstraint> build_lambda(
    const OracleConfig& cfg, const reduction::FunctionRecipe& recipe,
    const FormatDescriptor& fmt, std::uint64_t lo, std::uint64_t hi) {
  std::vector<TValue> inputs;
  for (std::uint64_t i = lo; i < hi; ++i) {
    const TValue x = formats::ladder_value(fmt, i);
    if (recipe.classify_special(x)) continue;
    if (!oracle::in_domain(cfg.function, formats::decode(x).value)) continue;
    inputs.push_back(x);
  }
  const auto L = intervals::calc_rounding_intervals(cfg, fmt, inputs);
  const auto Lp = intervals::calc_reduced_intervals(L, recipe);
  return intervals::combine_reduced_intervals(Lp);
}

int run_generate(const JobConfig& job) {
  const Func f = parse_function(job.function);
  const FormatDescriptor fmt = parse_format(job.format);
  const auto& recipe = resolve_recipe(job, f, fmt);
  const OracleConfig cfg{f, job.precision};

  polygen::PolynomialSpec spec;
  if (!job.spec_file.empty())
    spec = load_spec_file(job.spec_file);
  else if (!job.terms.empty())
    spec = polygen::single_piece_spec(recipe, parse_degrees(job.terms));
  else
    throw CLI::ValidationError("--terms", "generate needs --terms or --spec-file");

  const auto [lo, hi] = ladder_domain(job, fmt);

  std::optional<polygen::CoefficientSet> cs;
  if (job.sample > 0) {
    polygen::SamplingConfig sampling;
    sampling.sample_size = job.sample;
    sampling.seed = job.seed;
    sampling.jobs = std::max(1, job.jobs);
    cs = polygen::generate_with_sampling(cfg, recipe, fmt, lo, hi, spec, sampling);
  } else {
    if (hi - lo > (1ull << 24))
      throw CLI::ValidationError("--sample", "domains beyond 2^24 inputs need --sample");
    auto lambda = build_lambda(cfg, recipe, fmt, lo, hi);
    if (!job.dump_lambda.empty()) {
      std::ofstream out(job.dump_lambda);
      intervals::dump_merged(out, lambda,
                             "function " + job.function + " format " + job.format +
                                 " recipe " + recipe.id);
    }
    cs = polygen::refine_and_generate(lambda, spec);
    if (cs) {
      cs->meta.seed = job.seed;
      cs->function = job.function;
      cs->format = fmt.name();
      cs->recipe_id = recipe.id;
    }
  }

  if (!cs) {
    std::cout << "infeasible: no polynomial of the requested shape satisfies the "
                 "constraints (raise the degree or change the recipe/splits)\n";
    return kExitInfeasible;
  }
  std::cout << "feasible: " << cs->meta.constraint_count << " constraints, "
            << cs->meta.lp_solves << " LP solves, " << cs->meta.refinement_steps
            << " refinement steps";
  if (cs->meta.sampling_rounds > 0)
    std::cout << ", " << cs->meta.sampling_rounds << " sampling rounds";
  std::cout << "\n";
  if (!job.output.empty()) {
    std::ofstream out(job.output);
    if (!out) throw CLI::ValidationError("--output", "cannot write " + job.output);
    polygen::save_artifact(out, *cs);
    std::cout << "artifact written to " << job.output << "\n";
  } else {
    polygen::save_artifact(std::cout, *cs);
  }
  return 0;
}

mathlib::CompiledFunction resolve_compiled(const JobConfig& job, Func f,
                                           const FormatDescriptor& fmt) {
  if (job.coeffs == "appendix") {
    const auto cf = mathlib::published_function(f, fmt);
    if (!cf)
      throw CLI::ValidationError("--coeffs", "no published table for " + job.function +
                                                 " on " + job.format);
    return *cf;
  }
  std::ifstream in(job.coeffs);
  if (!in) throw CLI::ValidationError("--coeffs", "cannot read " + job.coeffs);
  auto coeffs = polygen::load_artifact(in);
  const auto& recipe = job.recipe.empty()
                           ? reduction::recipe_for(f, fmt, coeffs.recipe_id)
                           : reduction::recipe_for(f, fmt, job.recipe);
  return mathlib::compile(f, fmt, recipe, std::move(coeffs));
}

int run_validate(const JobConfig& job) {
  const Func f = parse_function(job.function);
  const FormatDescriptor fmt = parse_format(job.format);
  const auto cf = resolve_compiled(job, f, fmt);
  const auto range = pattern_domain(job, fmt);
  const auto report =
      mathlib::validate_exhaustive(cf, range, std::max(1, job.jobs), nullptr);
  std::cout << (report.total - report.mismatch_count) << "/" << report.total
            << " correct\n";
  if (!job.output.empty()) {
    std::ofstream out(job.output);
    mathlib::write_report(out, cf, report);
    std::cout << "report written to " << job.output << "\n";
  }
  return report.mismatch_count == 0 ? 0 : kExitMismatch;
}

int run_bench(const JobConfig& job) {
  const Func f = parse_function(job.function);
  const FormatDescriptor fmt = parse_format(job.format);
  const auto cf = resolve_compiled(job, f, fmt);
  const auto range = pattern_domain(job, fmt);
  const auto report = mathlib::bench(cf, range, job.iterations);
  std::cout << "inputs " << report.inputs << ", iterations " << report.iterations
            << ", mean " << report.mean_ns_per_input << " ns/input, min "
            << report.min_ns_per_input << " ns/input\n";
  return 0;
}

int run_dump_lambda(const JobConfig& job) {
  const Func f = parse_function(job.function);
  const FormatDescriptor fmt = parse_format(job.format);
  const auto& recipe = resolve_recipe(job, f, fmt);
  const OracleConfig cfg{f, job.precision};
  const auto [lo, hi] = ladder_domain(job, fmt);
  if (hi - lo > (1ull << 24))
    throw CLI::ValidationError("--domain", "constraint dump needs at most 2^24 inputs");
  const auto lambda = build_lambda(cfg, recipe, fmt, lo, hi);
  const std::string header = "function " + job.function + " format " + job.format +
                             " recipe " + recipe.id;
  if (!job.output.empty()) {
    std::ofstream out(job.output);
    intervals::dump_merged(out, lambda, header);
  } else {
    intervals::dump_merged(std::cout, lambda, header);
  }
  return 0;
}

void add_common(CLI::App* cmd, JobConfig& job) {
  cmd->add_option("--function", job.function,
                  "ln|log2|log10|exp|exp2|exp10|sqrt|cbrt|sinpi|cospi")
      ->required();
  cmd->add_option("--format", job.format,
                  "fp5|bfloat16|binary32|posit16|ieee_fp(n,e)|posit(n,es)")
      ->required();
  cmd->add_option("--recipe", job.recipe, "recipe id override (e.g. ln_mantissa)");
  cmd->add_option("--precision", job.precision, "oracle precision bits")
      ->check(CLI::Range(128, 100000));
  cmd->add_option("--jobs", job.jobs, "worker threads for validation");
  cmd->add_option("--domain", job.domain, "input domain: all (default) or unit for [1,2)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"correctly rounded math function generator and validator"};
  app.require_subcommand(1);
  // Options may come from a config file ([generate]/[validate]/... sections);
  // command-line flags override file values.
  app.set_config("--config", "", "read options from a config file (flags override)");
  JobConfig job;

  auto* gen = app.add_subcommand("generate", "synthesize polynomial coefficients");
  add_common(gen, job);
  gen->add_option("--terms", job.terms, "term degrees, e.g. 0,1 or 1,3,5,7");
  gen->add_option("--spec-file", job.spec_file, "piecewise spec file");
  gen->add_option("--sample", job.sample, "sample size (0: exhaustive constraints)");
  gen->add_option("--seed", job.seed, "sampling seed");
  gen->add_option("--output", job.output, "artifact output path");
  gen->add_option("--dump-lambda", job.dump_lambda, "write merged constraints here");

  auto* val = app.add_subcommand("validate", "exhaustive bit-exact validation");
  add_common(val, job);
  val->add_option("--coeffs", job.coeffs, "'appendix' or an artifact file");
  val->add_option("--output", job.output, "report output path");

  auto* ben = app.add_subcommand("bench", "wall-clock cost per input (informational)");
  add_common(ben, job);
  ben->add_option("--coeffs", job.coeffs, "'appendix' or an artifact file");
  ben->add_option("--iterations", job.iterations, "bench passes")
      ->check(CLI::Range(1, 1000));

  auto* dmp = app.add_subcommand("dump-lambda", "write the merged constraint list");
  add_common(dmp, job);
  dmp->add_option("--output", job.output, "constraint dump path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) return run_generate(job);
    if (val->parsed()) return run_validate(job);
    if (ben->parsed()) return run_bench(job);
    if (dmp->parsed()) return run_dump_lambda(job);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitResourceLimit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
