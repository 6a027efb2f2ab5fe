#pragma once

// Sparse multivariate polynomials: exact-integer coefficients (for the ghost
// recursion) and F_q coefficients (for formal additivity/relation checks).

#include <map>
#include <vector>

#include "common.hpp"
#include "gf.hpp"

namespace wittkit {

using Expo = std::vector<std::uint32_t>;  // exponent vector, fixed arity per polynomial

inline Expo expo_add(const Expo& a, const Expo& b) {
  Expo r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

// ---------------------------------------------------------------------------
// Exact integer polynomials (int128 coefficients, overflow-guarded).

class ZPoly {
 public:
  explicit ZPoly(int nvars) : nvars_(nvars) {}

  static ZPoly zero(int nvars) { return ZPoly(nvars); }
  static ZPoly constant(int nvars, int128 c) {
    ZPoly r(nvars);
    if (c != 0) r.terms_[Expo(nvars, 0)] = c;
    return r;
  }
  static ZPoly variable(int nvars, int idx, int exp = 1) {
    ZPoly r(nvars);
    Expo e(nvars, 0);
    e[idx] = exp;
    r.terms_[e] = 1;
    return r;
  }

  int nvars() const { return nvars_; }
  const std::map<Expo, int128>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const Expo& e, int128 c) {
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second = checked_add(it->second, c);
      if (it->second == 0) terms_.erase(it);
    }
  }

  ZPoly operator+(const ZPoly& o) const {
    ZPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }
  ZPoly operator-(const ZPoly& o) const {
    ZPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, checked_mul(c, -1));
    return r;
  }
  ZPoly operator*(const ZPoly& o) const {
    ZPoly r(nvars_);
    for (const auto& [e1, c1] : terms_)
      for (const auto& [e2, c2] : o.terms_) r.add_term(expo_add(e1, e2), checked_mul(c1, c2));
    return r;
  }

  ZPoly pow(long long e) const {
    ZPoly acc = constant(nvars_, 1);
    ZPoly base = *this;
    while (e > 0) {
      if (e & 1) acc = acc * base;
      base = (e > 1) ? base * base : base;
      e >>= 1;
    }
    return acc;
  }

  ZPoly scaled(int128 c) const {
    ZPoly r(nvars_);
    for (const auto& [e, cc] : terms_) r.add_term(e, checked_mul(cc, c));
    return r;
  }

  // exact division by an integer; PrecisionError if any coefficient resists
  ZPoly divided_exact(int128 d) const {
    ZPoly r(nvars_);
    for (const auto& [e, c] : terms_) {
      require(c % d == 0, errc::precision_error, "non-exact integer polynomial division");
      r.add_term(e, c / d);
    }
    return r;
  }

  bool operator==(const ZPoly& o) const { return terms_ == o.terms_; }

 private:
  int nvars_;
  std::map<Expo, int128> terms_;
};

// ---------------------------------------------------------------------------
// Polynomials over F_q.

class FqPoly {
 public:
  FqPoly(const FieldParams* F, int nvars) : F_(F), nvars_(nvars) {}

  static FqPoly zero(const FieldParams& F, int nvars) { return FqPoly(&F, nvars); }
  static FqPoly constant(const FieldParams& F, int nvars, fq_t c) {
    FqPoly r(&F, nvars);
    if (c != 0) r.terms_[Expo(nvars, 0)] = c;
    return r;
  }
  static FqPoly variable(const FieldParams& F, int nvars, int idx, std::uint32_t exp = 1) {
    FqPoly r(&F, nvars);
    Expo e(nvars, 0);
    e[idx] = exp;
    r.terms_[e] = 1;
    return r;
  }

  int nvars() const { return nvars_; }
  const FieldParams& field() const { return *F_; }
  const std::map<Expo, fq_t>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Expo& e, fq_t c) {
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second = F_->add(it->second, c);
      if (it->second == 0) terms_.erase(it);
    }
  }

  FqPoly operator+(const FqPoly& o) const {
    FqPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
  }
  FqPoly operator-(const FqPoly& o) const {
    FqPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, F_->neg(c));
    return r;
  }
  FqPoly operator*(const FqPoly& o) const {
    FqPoly r(F_, nvars_);
    for (const auto& [e1, c1] : terms_)
      for (const auto& [e2, c2] : o.terms_) r.add_term(expo_add(e1, e2), F_->mul(c1, c2));
    return r;
  }

  FqPoly pow(long long e) const {
    FqPoly acc = constant(*F_, nvars_, 1);
    FqPoly base = *this;
    while (e > 0) {
      if (e & 1) acc = acc * base;
      base = (e > 1) ? base * base : base;
      e >>= 1;
    }
    return acc;
  }

  FqPoly scaled(fq_t c) const {
    FqPoly r(F_, nvars_);
    for (const auto& [e, cc] : terms_) r.add_term(e, F_->mul(cc, c));
    return r;
  }

  fq_t evaluate(const std::vector<fq_t>& point) const {
    fq_t acc = 0;
    for (const auto& [e, c] : terms_) {
      fq_t t = c;
      for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i]) t = F_->mul(t, F_->pow(point[i], e[i]));
      acc = F_->add(acc, t);
    }
    return acc;
  }

  bool operator==(const FqPoly& o) const { return terms_ == o.terms_; }

 private:
  const FieldParams* F_;
  int nvars_;
  std::map<Expo, fq_t> terms_;
};

}  // namespace wittkit
