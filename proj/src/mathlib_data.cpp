#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>

#include "polyround/mathlib.hpp"

// Published coefficient sets for the shipped functions. Coefficients are
// stored as full exact-decimal strings and converted once via strtod (glibc
// parses correctly rounded; a test pins the conversion as lossless).
// Piecewise split points compare as "x' <= split", realized as half-open
// piece domains [lo, nextafter(split)) / [nextafter(split), hi).

namespace polyround::mathlib {

using formats::FormatDescriptor;
using oracle::Func;
using polygen::CoefficientSet;
using polygen::EvalShape;
using polygen::PieceCoefficients;

namespace {

// --- bfloat16 ---------------------------------------------------------------

const char* const kBf16Ln[] = {
    "2.885102725620722008414986703428439795970916748046875",
    "0.9749438269300123582894457285874523222446441650390625",
    "0.391172520217394070751737444879836402833461761474609375",
    "1.2722152807088404902202682933420874178409576416015625",
};

const char* const kBf16Log2[] = {
    "2.885725930059220178947043677908368408679962158203125",
    "0.9477394346709135941608792563783936202526092529296875",
    "0.7307375337145580740383365991874597966670989990234375",
};

const char* const kBf16Log10[] = {
    "2.88545942229525831379532974096946418285369873046875",
    "0.956484867363945223672772044665180146694183349609375",
    "0.6710954935542725596775426311069168150424957275390625",
};

const char* const kBf16Exp[] = {
    "1.0000095976211798021182630691328085958957672119140625",
    "0.69279247181322956006255253669223748147487640380859375",
    "0.242560224581628236517616414857911877334117889404296875",
    "5.014719237694532927296364732683287002146244049072265625e-2",
    "1.45139853027161404297462610202273936010897159576416015625e-2",
};

const char* const kBf16Exp2[] = {
    "1.0000091388165410766220020377659238874912261962890625",
    "0.69265463004053107187729665383812971413135528564453125",
    "0.2437159431324379121885925769674940966069698333740234375",
    "4.8046547014740259573528646797058172523975372314453125e-2",
    "1.557767964117490015751865684023869107477366924285888671875e-2",
};

const char* const kBf16Exp10[] = {
    "1.0000778485054981903346060789772309362888336181640625",
    "0.69179740083422547325397999884444288909435272216796875",
    "0.2459833280009494360651700617381720803678035736083984375",
    "4.5758952998196537886865797872815164737403392791748046875e-2",
    "1.63907658064124488184187811157244141213595867156982421875e-2",
};

const char* const kBf16Sqrt[] = {
    "0.37202139260816802224240973373525775969028472900390625",
    "0.7923315194006106398916244870633818209171295166015625",
    "-0.199230719933062794257949690290843136608600616455078125",
    "3.800384608453956369888970812098705209791660308837890625e-2",
    "-3.0848915765425755954043385287377532222308218479156494140625e-3",
};

const char* const kBf16Cbrt[] = {
    "0.56860957346246798760347473944420926272869110107421875",
    "0.5752913905623990853399618572439067065715789794921875",
    "-0.180364291120356845521399691278929822146892547607421875",
    "4.3868412288261666998057108912689727731049060821533203125e-2",
    "-6.5208421736825845915763721905022975988686084747314453125e-3",
    "5.241080546145838146843143334763226448558270931243896484375e-4",
    "-1.7372029717703960593165601888898663673899136483669281005859375e-5",
};

const char* const kBf16SinpiLinear[] = {
    "3.14159292035398163278614447335712611675262451171875",
};
const char* const kBf16SinpiOdd[] = {
    "3.141515487020253072358855206402949988842010498046875",
    "-5.16405991738943459523625278961844742298126220703125",
    "2.50692180297728217652775128954090178012847900390625",
    "-0.443008519856437021910977591687696985900402069091796875",
};

const char* const kBf16CospiFlat[] = {"1.00390625"};
const char* const kBf16CospiEven[] = {
    "0.99997996859304827399483883709763176739215850830078125",
    "-4.9324802047472200428046562592498958110809326171875",
    "4.02150995405109146219047033810056746006011962890625",
    "-1.1640167711700171171429474270553328096866607666015625",
};
const char* const kZero[] = {"0.0"};

// --- posit16 ----------------------------------------------------------------

const char* const kP16Ln[] = {
    "2.8853901812623536926594169926829636096954345703125",
    "0.96177728824005104257821585633791983127593994140625",
    "0.57802192858859535729010303839459083974361419677734375",
    "0.39449243216490248453709455134230665862560272216796875",
    "0.45254178489671204044242358577321283519268035888671875",
};

const char* const kP16Log2[] = {
    "2.88539115994917327867597123258747160434722900390625",
    "0.9616405555684151007511673014960251748561859130859375",
    "0.5827497609092706642996972732362337410449981689453125",
    "0.336729567454907396939489672149647958576679229736328125",
    "0.68022527114824737903830964569351635873317718505859375",
};

const char* const kP16Log10[] = {
    "2.885392110906054075059046226670034229755401611328125",
    "0.96158476800643521986700079651200212538242340087890625",
    "0.5837756666515827586039222296676598489284515380859375",
    "0.330016589138880600540204568460467271506786346435546875",
    "0.691650888349585102332639507949352264404296875",
};

const char* const kP16SqrtLow[] = {
    "0.269593592709484630720595532693550921976566314697265625",
    "1.129000996028148851024752730154432356357574462890625",
    "-0.64843843364755160418866353211342357099056243896484375",
    "0.3530868073027828568655195340397767722606658935546875",
    "-0.127171841275129426929169085269677452743053436279296875",
    "2.62819293630375920567399106175798806361854076385498046875e-2",
    "-2.3530402643644897538177662710268123191781342029571533203125e-3",
};
const char* const kP16SqrtHigh[] = {
    "0.409156298855834987815427439272752963006496429443359375",
    "0.74313621747255442784307888359762728214263916015625",
    "-0.1842527001546831189049413524116971530020236968994140625",
    "4.305139568476913647376846938641392625868320465087890625e-2",
    "-6.6014424010839810319506426594671211205422878265380859375e-3",
    "5.74776888286255573622118841825567869818769395351409912109375e-4",
    "-2.1374405303079146056961790112183052769978530704975128173828125e-5",
};

const char* const kP16SinpiLinear[] = {
    "3.141577060931899811890843920991756021976470947265625",
};
const char* const kP16SinpiOdd[] = {
    "3.141593069399674309494230328709818422794342041015625",
    "-5.1677486367595673044661452877335250377655029296875",
    "2.55098424541712009983029929571785032749176025390625",
    "-0.60547119473342603246379667325527407228946685791015625",
    "9.47599641221426869375221713198698125779628753662109375e-2",
};

const char* const kP16CospiFlat[] = {"1.0001220703125"};
const char* const kP16CospiEven[] = {
    "1.000000009410458634562246515997685492038726806640625",
    "-4.93479863229652071510145106003619730472564697265625",
    "4.05853647916781223869975292473100125789642333984375",
    "-1.3327362938689424343152722940430976450443267822265625",
    "0.2215338495769658688772096866159699857234954833984375",
};

// --- binary32 ---------------------------------------------------------------

const char* const kF32Log2[] = {
    "2.885390081777253090677959335152991116046905517578125",
    "0.9617966943187539197168689497630111873149871826171875",
    "0.57707795150992868826733683818019926548004150390625",
    "0.41220281933294511400589499316993169486522674560546875",
    "0.320462962813822971330779409981914795935153961181640625",
    "0.264665103135787116439558985803159885108470916748046875",
    "0.1996122250113066820542684354222728870809078216552734375",
    "0.298387164422755202242143468538415618240833282470703125",
};

// Piecewise split points, compared as "x' <= split".
const double kBf16SinpiSplit = 6.011962890625e-3;
const double kBf16CospiSplit = 1.98974609375e-2;
const double kP16SqrtSplit = 2.14599609375;
const double kP16SinpiSplit = 2.52532958984375e-3;
const double kP16CospiSplit = 3.509521484375e-3;

template <std::size_t N>
PieceCoefficients make_piece(double lo, double hi, std::vector<int> degrees,
                             const char* const (&strs)[N]) {
  PieceCoefficients pc;
  pc.piece.lo = lo;
  pc.piece.hi = hi;
  pc.piece.degrees = std::move(degrees);
  pc.shape = polygen::shape_for(pc.piece.degrees);
  for (const char* s : strs) pc.coeffs.push_back(std::strtod(s, nullptr));
  return pc;
}

double above(double split) { return std::nextafter(split, HUGE_VAL); }

CoefficientSet with_pieces(std::vector<PieceCoefficients> pieces) {
  CoefficientSet cs;
  cs.pieces = std::move(pieces);
  return cs;
}

const double kThird = 1.0 / 3.0;

std::optional<CoefficientSet> published_coeffs(Func f, const FormatDescriptor& fmt) {
  const bool bf16 = fmt == FormatDescriptor::bfloat16();
  const bool p16 = fmt == FormatDescriptor::posit16();
  const bool f32 = fmt == FormatDescriptor::binary32();
  const double log_hi = above(kThird);
  switch (f) {
    case Func::ln:
      if (bf16) return with_pieces({make_piece(0.0, log_hi, {1, 3, 5, 7}, kBf16Ln)});
      if (p16) return with_pieces({make_piece(0.0, log_hi, {1, 3, 5, 7, 9}, kP16Ln)});
      return std::nullopt;
    case Func::log2:
      if (bf16) return with_pieces({make_piece(0.0, log_hi, {1, 3, 5}, kBf16Log2)});
      if (p16) return with_pieces({make_piece(0.0, log_hi, {1, 3, 5, 7, 9}, kP16Log2)});
      if (f32)
        return with_pieces(
            {make_piece(0.0, log_hi, {1, 3, 5, 7, 9, 11, 13, 15}, kF32Log2)});
      return std::nullopt;
    case Func::log10:
      if (bf16) return with_pieces({make_piece(0.0, log_hi, {1, 3, 5}, kBf16Log10)});
      if (p16) return with_pieces({make_piece(0.0, log_hi, {1, 3, 5, 7, 9}, kP16Log10)});
      return std::nullopt;
    case Func::exp:
      if (bf16) return with_pieces({make_piece(0.0, 1.0, {0, 1, 2, 3, 4}, kBf16Exp)});
      return std::nullopt;
    case Func::exp2:
      if (bf16) return with_pieces({make_piece(0.0, 1.0, {0, 1, 2, 3, 4}, kBf16Exp2)});
      return std::nullopt;
    case Func::exp10:
      if (bf16) return with_pieces({make_piece(0.0, 1.0, {0, 1, 2, 3, 4}, kBf16Exp10)});
      return std::nullopt;
    case Func::sqrt:
      if (bf16) return with_pieces({make_piece(1.0, 4.0, {0, 1, 2, 3, 4}, kBf16Sqrt)});
      if (p16)
        return with_pieces(
            {make_piece(1.0, above(kP16SqrtSplit), {0, 1, 2, 3, 4, 5, 6}, kP16SqrtLow),
             make_piece(above(kP16SqrtSplit), 4.0, {0, 1, 2, 3, 4, 5, 6}, kP16SqrtHigh)});
      return std::nullopt;
    case Func::cbrt:
      if (bf16)
        return with_pieces({make_piece(1.0, 8.0, {0, 1, 2, 3, 4, 5, 6}, kBf16Cbrt)});
      return std::nullopt;
    case Func::sinpi:
      if (bf16)
        return with_pieces(
            {make_piece(0.0, above(kBf16SinpiSplit), {1}, kBf16SinpiLinear),
             make_piece(above(kBf16SinpiSplit), above(0.5), {1, 3, 5, 7}, kBf16SinpiOdd)});
      if (p16)
        return with_pieces(
            {make_piece(0.0, above(kP16SinpiSplit), {1}, kP16SinpiLinear),
             make_piece(above(kP16SinpiSplit), above(0.5), {1, 3, 5, 7, 9}, kP16SinpiOdd)});
      return std::nullopt;
    case Func::cospi:
      if (bf16)
        return with_pieces(
            {make_piece(0.0, above(kBf16CospiSplit), {0}, kBf16CospiFlat),
             make_piece(above(kBf16CospiSplit), 0.5, {0, 2, 4, 6}, kBf16CospiEven),
             make_piece(0.5, above(0.5), {0}, kZero)});
      if (p16)
        return with_pieces(
            {make_piece(0.0, above(kP16CospiSplit), {0}, kP16CospiFlat),
             make_piece(above(kP16CospiSplit), 0.5, {0, 2, 4, 6, 8}, kP16CospiEven),
             make_piece(0.5, above(0.5), {0}, kZero)});
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::optional<CompiledFunction> published_function(Func f, const FormatDescriptor& fmt) {
  auto coeffs = published_coeffs(f, fmt);
  if (!coeffs) return std::nullopt;
  coeffs->function = oracle::func_name(f);
  coeffs->format = fmt.name();
  const auto& recipe = reduction::recipe_for(f, fmt, oracle::func_name(f));
  coeffs->recipe_id = recipe.id;
  return compile(f, fmt, recipe, std::move(*coeffs));
}

std::vector<const char*> published_coefficient_strings() {
  std::vector<const char*> out;
  const auto add = [&out](const char* const* begin, std::size_t n) {
    out.insert(out.end(), begin, begin + n);
  };
#define POLYROUND_ADD(arr) add(arr, sizeof(arr) / sizeof(arr[0]))
  POLYROUND_ADD(kBf16Ln);
  POLYROUND_ADD(kBf16Log2);
  POLYROUND_ADD(kBf16Log10);
  POLYROUND_ADD(kBf16Exp);
  POLYROUND_ADD(kBf16Exp2);
  POLYROUND_ADD(kBf16Exp10);
  POLYROUND_ADD(kBf16Sqrt);
  POLYROUND_ADD(kBf16Cbrt);
  POLYROUND_ADD(kBf16SinpiLinear);
  POLYROUND_ADD(kBf16SinpiOdd);
  POLYROUND_ADD(kBf16CospiFlat);
  POLYROUND_ADD(kBf16CospiEven);
  POLYROUND_ADD(kP16Ln);
  POLYROUND_ADD(kP16Log2);
  POLYROUND_ADD(kP16Log10);
  POLYROUND_ADD(kP16SqrtLow);
  POLYROUND_ADD(kP16SqrtHigh);
  POLYROUND_ADD(kP16SinpiLinear);
  POLYROUND_ADD(kP16SinpiOdd);
  POLYROUND_ADD(kP16CospiFlat);
  POLYROUND_ADD(kP16CospiEven);
  POLYROUND_ADD(kF32Log2);
#undef POLYROUND_ADD
  return out;
}

std::vector<std::pair<Func, FormatDescriptor>> published_set() {
  std::vector<std::pair<Func, FormatDescriptor>> out;
  const auto bf16 = FormatDescriptor::bfloat16();
  for (Func f : {Func::ln, Func::log2, Func::log10, Func::exp, Func::exp2, Func::exp10,
                 Func::sqrt, Func::cbrt, Func::sinpi, Func::cospi})
    out.emplace_back(f, bf16);
  const auto p16 = FormatDescriptor::posit16();
  for (Func f : {Func::ln, Func::log2, Func::log10, Func::sqrt, Func::sinpi, Func::cospi})
    out.emplace_back(f, p16);
  out.emplace_back(Func::log2, FormatDescriptor::binary32());
  return out;
}

}  // namespace polyround::mathlib
