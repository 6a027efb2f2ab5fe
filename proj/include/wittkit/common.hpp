#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wittkit {

enum class errc {
  division_by_zero,
  params_mismatch,
  domain_error,
  precision_error,
  not_a_unit,
  truncation_too_short,
  not_a_basis,
  size_guard,
  overflow_guard,
  type_invalid,
  not_nilpotent,
  not_transversal,
  singular,
  not_in_parabolic,
  block_singular,
  hypothesis_violated,
  inconsistent,
  rank_deficit,
  unsupported_p,
  bad_input,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::division_by_zero: return "DivisionByZero";
    case errc::params_mismatch: return "ParamsMismatch";
    case errc::domain_error: return "DomainError";
    case errc::precision_error: return "PrecisionError";
    case errc::not_a_unit: return "NotAUnit";
    case errc::truncation_too_short: return "TruncationTooShort";
    case errc::not_a_basis: return "NotABasis";
    case errc::size_guard: return "SizeGuard";
    case errc::overflow_guard: return "OverflowGuard";
    case errc::type_invalid: return "TypeInvalid";
    case errc::not_nilpotent: return "NotNilpotent";
    case errc::not_transversal: return "NotTransversal";
    case errc::singular: return "Singular";
    case errc::not_in_parabolic: return "NotInParabolic";
    case errc::block_singular: return "BlockSingular";
    case errc::hypothesis_violated: return "HypothesisViolated";
    case errc::inconsistent: return "Inconsistent";
    case errc::rank_deficit: return "RankDeficit";
    case errc::unsupported_p: return "UnsupportedP";
    case errc::bad_input: return "BadInput";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

// Splittable deterministic PRNG (splitmix64 core). Module code receives
// generators, never raw seeds; split() derives an independent stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, n), n >= 1
  std::uint64_t uniform(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t lim = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
    for (;;) {
      std::uint64_t v = next();
      if (v < lim) return v % n;
    }
  }

  Rng split() {
    std::uint64_t a = next(), b = next();
    Rng child(a);
    child.state_ ^= b * 0xda942042e4dd58b5ull;
    return child;
  }

 private:
  std::uint64_t state_;
};

using int128 = __int128;

inline int128 checked_add(int128 a, int128 b) {
  int128 r;
  if (__builtin_add_overflow(a, b, &r)) fail(errc::overflow_guard, "integer add overflow");
  return r;
}

inline int128 checked_mul(int128 a, int128 b) {
  int128 r;
  if (__builtin_mul_overflow(a, b, &r)) fail(errc::overflow_guard, "integer mul overflow");
  return r;
}

inline std::string int128_to_string(int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? (unsigned __int128)(-v) : (unsigned __int128)v;
  std::string s;
  while (u) {
    s.push_back(char('0' + int(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  return std::string(s.rbegin(), s.rend());
}

inline std::int64_t ipow64(std::int64_t base, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (__builtin_mul_overflow(r, base, &r)) fail(errc::overflow_guard, "ipow64 overflow");
  }
  return r;
}

}  // namespace wittkit
