#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyround {

// Raised when a constraint system provably admits no solution
// (empty interval intersection, LP infeasibility, interval refinement
// crossing over). Infeasibility is a definitive answer, not a failure
// of the search.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an iteration or size cap is hit before an answer is known.
// Reported distinctly from infeasibility on purpose.
struct ResourceLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t bits_of(double x) { return std::bit_cast<std::uint64_t>(x); }
inline double double_of_bits(std::uint64_t b) { return std::bit_cast<double>(b); }

// Fixed-width uppercase hex with 0x prefix, width in nibbles.
std::string to_hex(std::uint64_t bits, int nibbles);
std::uint64_t parse_hex(const std::string& s);

// Hex of a binary64 bit pattern (16 nibbles).
inline std::string hex64(double x) { return to_hex(bits_of(x), 16); }

// Exact decimal expansion of a binary64 value (finite decimal; every
// double is a dyadic rational). "1.5", "-0.1015625", "3.0", ...
std::string exact_decimal(double x);

// Run fn(begin, end) over [0, n) split into `jobs` contiguous chunks.
// Results must be merged by the caller in chunk order so the outcome is
// independent of scheduling. jobs <= 1 runs inline.
void parallel_chunks(std::uint64_t n, int jobs,
                     const std::function<void(int chunk, std::uint64_t begin, std::uint64_t end)>& fn);

}  // namespace polyround
