#include "polyround/util.hpp"

#include <gmp.h>

#include <cmath>
#include <cstdio>
#include <thread>

namespace polyround {

std::string to_hex(std::uint64_t bits, int nibbles) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%0*llX", nibbles,
                static_cast<unsigned long long>(bits));
  return buf;
}

std::uint64_t parse_hex(const std::string& s) {
  return std::stoull(s, nullptr, 16);
}

std::string exact_decimal(double x) {
  if (x == 0.0) return "0.0";
  std::string out;
  if (std::signbit(x)) {
    out += '-';
    x = -x;
  }
  // x = frac * 2^e2 with integral frac of <= 53 bits.
  int e2 = 0;
  double frac = std::frexp(x, &e2);
  std::uint64_t mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  e2 -= 53;

  mpz_t num;
  mpz_init_set_ui(num, static_cast<unsigned long>(mant >> 32));
  mpz_mul_2exp(num, num, 32);
  mpz_add_ui(num, num, static_cast<unsigned long>(mant & 0xFFFFFFFFu));

  if (e2 >= 0) {
    mpz_mul_2exp(num, num, static_cast<unsigned long>(e2));
    char* s = mpz_get_str(nullptr, 10, num);
    out += s;
    out += ".0";
    std::free(s);
  } else {
    // num / 2^k = num * 5^k / 10^k: a finite decimal with k fraction digits.
    unsigned long k = static_cast<unsigned long>(-e2);
    mpz_t five;
    mpz_init_set_ui(five, 5);
    mpz_pow_ui(five, five, k);
    mpz_mul(num, num, five);
    char* s = mpz_get_str(nullptr, 10, num);
    std::string digits = s;
    std::free(s);
    mpz_clear(five);
    if (digits.size() <= k) digits.insert(0, k + 1 - digits.size(), '0');
    digits.insert(digits.size() - k, ".");
    // Trim trailing zeros but keep one fraction digit.
    std::size_t last = digits.find_last_not_of('0');
    if (digits[last] == '.') ++last;
    digits.erase(last + 1);
    out += digits;
  }
  mpz_clear(num);
  return out;
}

void parallel_chunks(std::uint64_t n, int jobs,
                     const std::function<void(int, std::uint64_t, std::uint64_t)>& fn) {
  if (jobs < 1) jobs = 1;
  if (n == 0) return;
  std::uint64_t chunks = std::min<std::uint64_t>(static_cast<std::uint64_t>(jobs), n);
  if (chunks == 1) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  for (std::uint64_t c = 0; c < chunks; ++c) {
    std::uint64_t begin = n * c / chunks;
    std::uint64_t end = n * (c + 1) / chunks;
    threads.emplace_back([&fn, c, begin, end] { fn(static_cast<int>(c), begin, end); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace polyround
