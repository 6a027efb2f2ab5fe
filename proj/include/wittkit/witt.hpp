#pragma once

// Truncated Witt rings W_s: structure polynomials generated by the ghost
// recursion over exact integers (generic-coefficient path), and the Galois
// ring Z[x]/(p^s, f) fast path for W_s(F_{p^m}), with Teichmuller digits,
// valuation, units and the p-adic logarithm.

#include <array>
#include <cmath>
#include <utility>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "common.hpp"
#include "gf.hpp"
#include "mpoly.hpp"
#include "ring.hpp"

namespace wittkit {

// ---------------------------------------------------------------------------
// Structure polynomials Phi_i (addition) and Psi_i (multiplication).
// Variables: x_0..x_{s-1} -> indices 0..s-1, y_0..y_{s-1} -> indices s..2s-1.

struct StructurePolynomialTable {
  struct Term {
    int coeff;  // in [1, p)
    Expo exps;  // length 2s
  };

  int p = 0, s = 0;
  std::vector<ZPoly> phi_exact, psi_exact;     // integer polynomials, pre mod-p
  std::vector<std::vector<Term>> phi, psi;     // mod-p term lists used in evaluation
};

// ghost w_n in the x-block (offset 0) or y-block (offset s)
inline ZPoly ghost_polynomial(int nvars, int offset, int p, int n) {
  ZPoly w = ZPoly::zero(nvars);
  int128 pi = 1;
  for (int i = 0; i <= n; ++i) {
    long long exp = 1;
    for (int k = 0; k < n - i; ++k) exp *= p;
    w = w + ZPoly::variable(nvars, offset + i, int(exp)).scaled(pi);
    pi = checked_mul(pi, p);
  }
  return w;
}

namespace detail {

inline std::vector<StructurePolynomialTable::Term> reduce_mod_p(const ZPoly& f, int p) {
  std::vector<StructurePolynomialTable::Term> out;
  for (const auto& [e, c] : f.terms()) {
    long long r = (long long)(c % p);
    if (r < 0) r += p;
    if (r) out.push_back({int(r), e});
  }
  return out;
}

}  // namespace detail

inline StructurePolynomialTable generate_structure_polynomials(int p, int s) {
  require(p >= 2, errc::bad_input, "p must be prime");
  require(s >= 1 && s <= 5, errc::bad_input, "truncation length out of range [1,5]");
  StructurePolynomialTable t;
  t.p = p;
  t.s = s;
  int nv = 2 * s;
  for (int n = 0; n < s; ++n) {
    ZPoly wx = ghost_polynomial(nv, 0, p, n);
    ZPoly wy = ghost_polynomial(nv, s, p, n);
    ZPoly rhs_add = wx + wy;
    ZPoly rhs_mul = wx * wy;
    int128 pi = 1;
    for (int i = 0; i < n; ++i) {
      long long exp = 1;
      for (int k = 0; k < n - i; ++k) exp *= p;
      rhs_add = rhs_add - t.phi_exact[i].pow(exp).scaled(pi);
      rhs_mul = rhs_mul - t.psi_exact[i].pow(exp).scaled(pi);
      pi = checked_mul(pi, p);
    }
    t.phi_exact.push_back(rhs_add.divided_exact(pi));
    t.psi_exact.push_back(rhs_mul.divided_exact(pi));
  }
  for (int n = 0; n < s; ++n) {
    t.phi.push_back(detail::reduce_mod_p(t.phi_exact[n], p));
    t.psi.push_back(detail::reduce_mod_p(t.psi_exact[n], p));
  }
  return t;
}

// memoized per (p, s); write-once shared cache
inline const StructurePolynomialTable& structure_table(int p, int s) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<StructurePolynomialTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(p, s);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<StructurePolynomialTable>(generate_structure_polynomials(p, s))).first;
  return *it->second;
}

// weight of a monomial: x_j and y_j both carry weight p^j; returns {x-weight, y-weight}
inline std::pair<long long, long long> monomial_weights(const Expo& e, int p, int s) {
  long long wx = 0, wy = 0;
  long long pj = 1;
  for (int j = 0; j < s; ++j) {
    wx += pj * e[j];
    wy += pj * e[s + j];
    pj *= p;
  }
  return {wx, wy};
}

// ---------------------------------------------------------------------------
// Witt vectors over a generic coefficient ring: digits are the standard Witt
// components a_0..a_{s-1}, identified with sum xi(a_i)^{p^-i} p^i.

template <class Ctx>
class WittRing {
 public:
  using elem = std::vector<typename Ctx::elem>;

  WittRing(Ctx coeff, int p, int s) : coeff_(std::move(coeff)), p_(p), s_(s), tab_(&structure_table(p, s)) {}

  const Ctx& coefficients() const { return coeff_; }
  int p() const { return p_; }
  int s() const { return s_; }

  elem zero() const { return elem(s_, coeff_.zero()); }
  elem one() const { return teichmuller(coeff_.one()); }
  elem teichmuller(typename Ctx::elem c) const {
    elem e(s_, coeff_.zero());
    e[0] = c;
    return e;
  }
  // digit c placed at position j: the vector xi(c)^{p^-j} p^j
  elem v_shift(typename Ctx::elem c, int j) const {
    require(j >= 0 && j < s_, errc::bad_input, "shift position out of range");
    elem e(s_, coeff_.zero());
    e[j] = c;
    return e;
  }

  elem add(const elem& a, const elem& b) const { return eval_table(tab_->phi, a, b); }
  elem mul(const elem& a, const elem& b) const { return eval_table(tab_->psi, a, b); }

  // digitwise solve of a + x = 0: Phi_i = x_i + y_i + (lower digits)
  elem neg(const elem& a) const {
    elem b = zero();
    for (int i = 0; i < s_; ++i) {
      elem t = add(a, b);
      b[i] = coeff_.add(b[i], coeff_.neg(t[i]));
    }
    return b;
  }
  elem sub(const elem& a, const elem& b) const { return add(a, neg(b)); }

  bool equal(const elem& a, const elem& b) const {
    for (int i = 0; i < s_; ++i)
      if (!coeff_.equal(a[i], b[i])) return false;
    return true;
  }
  bool is_zero(const elem& a) const { return equal(a, zero()); }

  elem sample(Rng& rng) const {
    elem e(s_);
    for (int i = 0; i < s_; ++i) e[i] = coeff_.sample(rng);
    return e;
  }

  elem scale_int(long long k, const elem& a) const {  // k * a by double-and-add
    long long r = k;
    elem acc = zero(), base = a;
    bool negate = r < 0;
    if (negate) r = -r;
    while (r) {
      if (r & 1) acc = add(acc, base);
      base = add(base, base);
      r >>= 1;
    }
    return negate ? neg(acc) : acc;
  }

 private:
  typename Ctx::elem eval_term(const StructurePolynomialTable::Term& t, const elem& a, const elem& b) const {
    typename Ctx::elem v = coeff_.one();
    for (int i = 0; i < s_; ++i) {
      if (t.exps[i]) v = coeff_.mul(v, pow_elem(a[i], t.exps[i]));
      if (t.exps[s_ + i]) v = coeff_.mul(v, pow_elem(b[i], t.exps[s_ + i]));
    }
    // scalar in [1, p): repeated addition by doubling
    typename Ctx::elem acc = coeff_.zero(), base = v;
    int k = t.coeff;
    while (k) {
      if (k & 1) acc = coeff_.add(acc, base);
      base = coeff_.add(base, base);
      k >>= 1;
    }
    return acc;
  }

  typename Ctx::elem pow_elem(typename Ctx::elem x, std::uint64_t e) const {
    typename Ctx::elem acc = coeff_.one();
    while (e) {
      if (e & 1) acc = coeff_.mul(acc, x);
      if (e > 1) x = coeff_.mul(x, x);
      e >>= 1;
    }
    return acc;
  }

  elem eval_table(const std::vector<std::vector<StructurePolynomialTable::Term>>& polys, const elem& a,
                  const elem& b) const {
    require(int(a.size()) == s_ && int(b.size()) == s_, errc::params_mismatch, "digit length mismatch");
    elem out(s_, coeff_.zero());
    for (int n = 0; n < s_; ++n) {
      typename Ctx::elem acc = coeff_.zero();
      for (const auto& t : polys[n]) acc = coeff_.add(acc, eval_term(t, a, b));
      out[n] = acc;
    }
    return out;
  }

  Ctx coeff_;
  int p_, s_;
  const StructurePolynomialTable* tab_;
};

// ---------------------------------------------------------------------------
// Galois ring GR = Z[x]/(p^s, f(x)) ~ W_s(F_{p^m}): the fast path.

struct GrElem {
  std::array<std::int64_t, 6> c{};  // integer coefficients mod p^s, entries >= m zero
  bool operator==(const GrElem& o) const { return c == o.c; }
  bool operator<(const GrElem& o) const { return c < o.c; }
};

class GaloisRing {
 public:
  using elem = GrElem;

  GaloisRing(FieldParams F, int s) : F_(std::move(F)), s_(s) {
    require(s >= 1, errc::bad_input, "truncation length must be >= 1");
    ps_ = ipow64(F.p(), s);
  }

  const FieldParams& field() const { return F_; }
  int p() const { return F_.p(); }
  int m() const { return F_.m(); }
  int s() const { return s_; }
  std::int64_t modulus_int() const { return ps_; }
  bool same(const GaloisRing& o) const { return F_.same(o.F_) && s_ == o.s_; }

  GaloisRing lifted(int extra) const { return GaloisRing(F_, s_ + extra); }
  GaloisRing truncated(int new_s) const { return GaloisRing(F_, new_s); }

  elem zero() const { return {}; }
  elem one() const {
    elem e;
    e.c[0] = 1;
    return e;
  }
  elem from_int(std::int64_t v) const {
    elem e;
    e.c[0] = mod(v);
    return e;
  }
  // natural (coefficientwise) lift of a residue-field element
  elem lift_residue(fq_t a) const {
    elem e;
    auto d = F_.digits(a);
    for (int i = 0; i < m(); ++i) e.c[i] = d[i];
    return e;
  }
  fq_t residue(const elem& a) const {
    std::vector<int> d(m());
    for (int i = 0; i < m(); ++i) d[i] = int(a.c[i] % p());
    return F_.from_digits(d);
  }

  elem add(const elem& a, const elem& b) const {
    elem r;
    for (int i = 0; i < m(); ++i) r.c[i] = mod(a.c[i] + b.c[i]);
    return r;
  }
  elem sub(const elem& a, const elem& b) const {
    elem r;
    for (int i = 0; i < m(); ++i) r.c[i] = mod(a.c[i] - b.c[i]);
    return r;
  }
  elem neg(const elem& a) const {
    elem r;
    for (int i = 0; i < m(); ++i) r.c[i] = mod(-a.c[i]);
    return r;
  }
  elem mul(const elem& a, const elem& b) const {
    std::array<int128, 12> prod{};
    int mm = m();
    for (int i = 0; i < mm; ++i) {
      if (!a.c[i]) continue;
      for (int j = 0; j < mm; ++j) prod[i + j] += int128(a.c[i]) * b.c[j];
    }
    // reduce degree by the monic modulus lift, then mod p^s
    const auto& f = F_.modulus();
    for (int d = 2 * mm - 2; d >= mm; --d) {
      int128 c = prod[d] % ps_;
      if (c == 0) {
        prod[d] = 0;
        continue;
      }
      for (int j = 0; j < mm; ++j) prod[d - mm + j] -= c * f[j];
      prod[d] = 0;
    }
    elem r;
    for (int i = 0; i < mm; ++i) {
      std::int64_t v = (std::int64_t)(prod[i] % ps_);
      r.c[i] = mod(v);
    }
    return r;
  }
  bool equal(const elem& a, const elem& b) const { return a == b; }
  elem sample(Rng& rng) const {
    elem r;
    for (int i = 0; i < m(); ++i) r.c[i] = std::int64_t(rng.uniform(std::uint64_t(ps_)));
    return r;
  }

  elem pow_u(elem a, std::uint64_t e) const {
    elem acc = one();
    while (e) {
      if (e & 1) acc = mul(acc, a);
      if (e > 1) a = mul(a, a);
      e >>= 1;
    }
    return acc;
  }

  // Teichmuller lift: the fixed point of z -> z^{p^m} over the residue
  elem teichmuller(fq_t a) const {
    elem z = lift_residue(a);
    for (int i = 0; i + 1 < s_; ++i) z = pow_u(z, std::uint64_t(F_.q()));
    return z;
  }

  // index of the first nonzero Teichmuller digit; s for zero (sentinel)
  int valuation(const elem& a) const {
    int v = s_;
    for (int i = 0; i < m(); ++i) {
      if (a.c[i] == 0) continue;
      int vi = 0;
      std::int64_t x = a.c[i];
      while (x % p() == 0) {
        x /= p();
        ++vi;
      }
      v = std::min(v, vi);
    }
    return v;
  }
  bool is_unit(const elem& a) const { return valuation(a) == 0; }

  elem inv(const elem& a) const {
    require(is_unit(a), errc::not_a_unit, "inverting a non-unit Witt vector");
    elem x = lift_residue(F_.inv(residue(a)));
    // Hensel: x <- x(2 - a x), doubling precision each step
    for (int k = 1; k < s_; k *= 2) x = mul(x, sub(from_int(2), mul(a, x)));
    require(mul(a, x) == one(), errc::precision_error, "unit inverse did not converge");
    return x;
  }

  // exact coefficient access for precision moves
  elem reinterpret(const elem& a) const {  // reduce coefficients into this ring
    elem r;
    for (int i = 0; i < m(); ++i) r.c[i] = mod(a.c[i]);
    return r;
  }

  std::int64_t mod(std::int64_t v) const {
    std::int64_t r = v % ps_;
    return r < 0 ? r + ps_ : r;
  }

 private:
  FieldParams F_;
  int s_;
  std::int64_t ps_;
};

// ---------------------------------------------------------------------------
// Digit bridges. Digits are standard Witt components a_i; the Teichmuller
// expansion g = sum xi(t_i) p^i carries t_i = a_i^{p^-i}.

using WittDigits = std::vector<fq_t>;

inline GrElem gr_from_digits(const GaloisRing& R, const WittDigits& digits) {
  require(int(digits.size()) == R.s(), errc::params_mismatch, "digit count != truncation length");
  GrElem acc = R.zero();
  std::int64_t pk = 1;
  for (int i = 0; i < R.s(); ++i) {
    fq_t t = R.field().frobenius(digits[i], -i);
    GrElem term = R.teichmuller(t);
    for (int j = 0; j < R.m(); ++j) term.c[j] = R.mod(term.c[j] * pk);
    acc = R.add(acc, term);
    pk *= R.p();
  }
  return acc;
}

inline WittDigits gr_to_digits(const GaloisRing& R, GrElem g) {
  WittDigits out(R.s());
  for (int j = 0; j < R.s(); ++j) {
    GaloisRing Rj = R.truncated(R.s() - j);
    g = Rj.reinterpret(g);
    fq_t t = Rj.residue(g);
    out[j] = R.field().frobenius(t, j);  // standard component from Teichmuller digit
    GrElem lift = Rj.teichmuller(t);
    GrElem diff = Rj.sub(g, lift);
    GrElem next{};
    for (int i = 0; i < R.m(); ++i) {
      require(diff.c[i] % R.p() == 0, errc::precision_error, "digit peel not divisible by p");
      next.c[i] = diff.c[i] / R.p();
    }
    g = next;
  }
  return out;
}

// divide by p^k using the inverse-Frobenius digit shift; valuation(g) >= k
inline GrElem gr_div_p_pow(const GaloisRing& R, const GrElem& g, int k) {
  require(k >= 0 && k <= R.s(), errc::bad_input, "bad p-power");
  require(R.valuation(g) >= k, errc::precision_error, "division by p^k needs valuation >= k");
  if (k == 0) return g;
  WittDigits d = gr_to_digits(R, g);
  GaloisRing Rlow = R.truncated(R.s() - k);
  WittDigits shifted(Rlow.s());
  for (int j = 0; j < Rlow.s(); ++j) shifted[j] = R.field().frobenius(d[j + k], -k);
  return gr_from_digits(Rlow, shifted);
}

// lift to a higher-precision ring (zero-extended integer coefficients)
inline GrElem gr_lift(const GaloisRing& /*from*/, const GaloisRing& to, const GrElem& g) { return to.reinterpret(g); }

// ---------------------------------------------------------------------------
// Witt-vector value ops over F_q in digit form (Galois-ring path inside).

struct WittOps {
  GaloisRing R;

  explicit WittOps(const FieldParams& F, int s) : R(F, s) {}

  WittDigits zero() const { return WittDigits(R.s(), 0); }
  WittDigits one() const {
    WittDigits d = zero();
    d[0] = 1;
    return d;
  }
  WittDigits add(const WittDigits& a, const WittDigits& b) const {
    return gr_to_digits(R, R.add(gr_from_digits(R, a), gr_from_digits(R, b)));
  }
  WittDigits mul(const WittDigits& a, const WittDigits& b) const {
    return gr_to_digits(R, R.mul(gr_from_digits(R, a), gr_from_digits(R, b)));
  }
  WittDigits neg(const WittDigits& a) const { return gr_to_digits(R, R.neg(gr_from_digits(R, a))); }
  int valuation(const WittDigits& a) const {
    for (int i = 0; i < R.s(); ++i)
      if (a[i]) return i;
    return R.s();
  }
  WittDigits invert_unit(const WittDigits& a) const {
    require(valuation(a) == 0, errc::not_a_unit, "invert_unit needs valuation 0");
    return gr_to_digits(R, R.inv(gr_from_digits(R, a)));
  }
};

// ---------------------------------------------------------------------------
// p-adic logarithm on U_1 = 1 + pW_s: finite truncated series with exact
// rational bookkeeping (division by j = p^v j' via digit shift + unit inverse).

inline std::int64_t modular_inverse_int(std::int64_t a, std::int64_t mod) {
  std::int64_t t = 0, nt = 1, r = mod, nr = a % mod;
  if (nr < 0) nr += mod;
  while (nr) {
    std::int64_t qq = r / nr;
    std::int64_t tmp = t - qq * nt;
    t = nt;
    nt = tmp;
    tmp = r - qq * nr;
    r = nr;
    nr = tmp;
  }
  require(r == 1, errc::not_a_unit, "integer not invertible modulo p^k");
  return t < 0 ? t + mod : t;
}

inline GrElem witt_log(const GaloisRing& R, const GrElem& u) {
  require(R.valuation(R.sub(u, R.one())) >= 1, errc::domain_error, "log requires u = 1 mod p");
  int s = R.s(), p = R.p();
  int J = 2 * s + 4;
  int extra = 0;
  for (long long pk = p; pk <= J; pk *= p) ++extra;
  ++extra;
  GaloisRing L = R.lifted(extra);
  GrElem z = L.sub(gr_lift(R, L, u), L.one());
  GrElem acc = L.zero();
  GrElem pw = L.one();
  for (int j = 1; j <= J; ++j) {
    pw = L.mul(pw, z);
    int v = 0;
    std::int64_t jj = j;
    while (jj % p == 0) {
      jj /= p;
      ++v;
    }
    // term = z^j / j, sign (-1)^{j-1}
    GrElem t = pw;
    if (v > 0) {
      GrElem shifted{};
      for (int i = 0; i < L.m(); ++i) {
        std::int64_t d = 1;
        for (int k2 = 0; k2 < v; ++k2) d *= p;
        require(t.c[i] % d == 0, errc::precision_error, "log term requires dividing by p beyond valuation");
        shifted.c[i] = t.c[i] / d;
      }
      t = shifted;
    }
    std::int64_t inv_jj = modular_inverse_int(jj % L.modulus_int(), L.modulus_int());
    GrElem scaled{};
    for (int i = 0; i < L.m(); ++i)
      scaled.c[i] = L.mod(std::int64_t((int128(t.c[i]) * inv_jj) % L.modulus_int()));
    if (j % 2 == 0) scaled = L.neg(scaled);
    acc = L.add(acc, scaled);
  }
  return R.reinterpret(acc);
}

inline WittDigits witt_log_digits(const WittOps& W, const WittDigits& u) {
  return gr_to_digits(W.R, witt_log(W.R, gr_from_digits(W.R, u)));
}

}  // namespace wittkit
