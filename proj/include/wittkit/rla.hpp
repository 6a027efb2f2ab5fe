#pragma once

// Restricted-Lie toolkit: Jacobson polynomials, the structure-constant model
// of Lie(SL(n, W_nr)), the beta map, canonical-weight arithmetic, and the
// parabolic factorization with its p-adic modular action.

#include <map>
#include <string>
#include <vector>

#include "common.hpp"
#include "gf.hpp"
#include "lattice.hpp"
#include "plin.hpp"

namespace wittkit {

// ---------------------------------------------------------------------------
// Jacobson polynomials: bracket words [z_1,[z_2,...,[z_k, x]...]] encoded as
// the letter prefix (0 = x, 1 = y), with x innermost.

using BracketWord = std::vector<std::uint8_t>;
using LiePoly = std::map<BracketWord, int>;  // coefficients mod p

struct JacobsonTable {
  int p = 0;
  std::vector<LiePoly> s;  // s[i] for i = 1..p-1 at index i-1
};

inline JacobsonTable jacobson_polynomials(int p) {
  require(p == 2 || p == 3 || p == 5 || p == 7, errc::unsupported_p, "p must be in {2,3,5,7}");
  // expand (ad(Tx+y))^{p-1}(x); a state maps (word, T-degree) -> coeff mod p
  std::map<std::pair<BracketWord, int>, int> state;
  state[{BracketWord{}, 0}] = 1;
  for (int step = 0; step < p - 1; ++step) {
    std::map<std::pair<BracketWord, int>, int> next;
    auto push = [&](BracketWord w, int td, int c) {
      // a word whose innermost letter is x wraps [x, x] = 0
      if (!w.empty() && w.back() == 0) return;
      auto& cell = next[{std::move(w), td}];
      cell = (cell + c) % p;
    };
    for (const auto& [key, c] : state) {
      const auto& [w, td] = key;
      BracketWord wx = w, wy = w;
      wx.insert(wx.begin(), 0);
      wy.insert(wy.begin(), 1);
      push(std::move(wx), td + 1, c);
      push(std::move(wy), td, c);
    }
    state = std::move(next);
  }
  // sum_{i=1}^{p-1} i s_i T^{i-1}: extract the T^{i-1} slice, divide by i mod p
  JacobsonTable t;
  t.p = p;
  t.s.assign(p - 1, {});
  for (const auto& [key, c] : state) {
    const auto& [w, td] = key;
    if (c % p == 0) continue;
    int i = td + 1;
    require(i >= 1 && i <= p - 1, errc::precision_error, "unexpected T-degree in Jacobson expansion");
    int inv = 1;
    for (int k = 1; k < p; ++k)
      if ((k * i) % p == 1) inv = k;
    int coeff = (c * inv) % p;
    if (coeff) t.s[i - 1][w] = coeff;
  }
  return t;
}

// evaluate a bracket word on matrices over F_q ([a,b] = ab - ba, x innermost)
inline FqMatrix bracket_word_eval(const FieldParams& F, const BracketWord& w, const FqMatrix& x,
                                  const FqMatrix& y) {
  FqMatrix acc = x;
  for (std::size_t k = w.size(); k-- > 0;) {
    const FqMatrix& z = w[k] ? y : x;
    FqMatrix ab = fq_mat_mul(F, z, acc), ba = fq_mat_mul(F, acc, z);
    for (std::size_t i = 0; i < ab.a.size(); ++i) ab.a[i] = F.sub(ab.a[i], ba.a[i]);
    acc = std::move(ab);
  }
  return acc;
}

inline FqMatrix lie_poly_eval(const FieldParams& F, const LiePoly& f, const FqMatrix& x, const FqMatrix& y) {
  FqMatrix acc(x.rows, x.cols);
  for (const auto& [w, c] : f) {
    FqMatrix t = bracket_word_eval(F, w, x, y);
    for (std::size_t i = 0; i < acc.a.size(); ++i)
      for (int k = 0; k < c; ++k) acc.a[i] = F.add(acc.a[i], t.a[i]);
  }
  return acc;
}

inline FqMatrix fq_mat_pow(const FieldParams& F, const FqMatrix& x, int e) {
  FqMatrix acc(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i) acc.at(i, i) = 1;
  for (int k = 0; k < e; ++k) acc = fq_mat_mul(F, acc, x);
  return acc;
}

// the Jacobson identity (x+y)^{[p]} = x^{[p]} + y^{[p]} + sum s_i(x, y) with
// [p] the honest matrix p-th power; validates the extraction convention
inline bool restricted_check(const FieldParams& F, int matrix_size, int trials, Rng& rng) {
  auto table = jacobson_polynomials(F.p());
  for (int it = 0; it < trials; ++it) {
    FqMatrix x(matrix_size, matrix_size), y(matrix_size, matrix_size);
    for (auto& v : x.a) v = F.sample(rng);
    for (auto& v : y.a) v = F.sample(rng);
    FqMatrix xy(matrix_size, matrix_size);
    for (std::size_t i = 0; i < xy.a.size(); ++i) xy.a[i] = F.add(x.a[i], y.a[i]);
    FqMatrix lhs = fq_mat_pow(F, xy, F.p());
    FqMatrix rhs = fq_mat_pow(F, x, F.p());
    FqMatrix yp = fq_mat_pow(F, y, F.p());
    for (std::size_t i = 0; i < rhs.a.size(); ++i) rhs.a[i] = F.add(rhs.a[i], yp.a[i]);
    for (const auto& s : table.s) {
      FqMatrix t = lie_poly_eval(F, s, x, y);
      for (std::size_t i = 0; i < rhs.a.size(); ++i) rhs.a[i] = F.add(rhs.a[i], t.a[i]);
    }
    if (lhs.a != rhs.a) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Structure-constant model of ws_r = Lie(SL(n, W_nr)), truncation depth J.
// Basis: h_alpha (alpha simple), X_alpha^{(j)} (alpha in Phi, 0 <= j < J),
// Y_{i,j} (1 <= i <= n-1, 1 <= j < J).

struct WsModel {
  FieldParams F;
  int n = 0, J = 0;
  struct Basis {
    enum Kind { H, X, Y } kind;
    int root_from = -1, root_to = -1;  // X: root (a, b) ~ E_{ab}
    int simple = -1;                   // H, Y: index
    int depth = 0;                     // X: j >= 0; Y: j >= 1
  };
  std::vector<Basis> basis;
  // bracket[{i, j}] with i < j: list of (coeff, basis index)
  std::map<std::pair<int, int>, std::vector<std::pair<fq_t, int>>> bracket_table;
  std::vector<std::vector<std::pair<fq_t, int>>> pmap_table;
  std::vector<std::vector<int>> weights;  // T_k-weight in eps-coordinates (length n, sum 0)

  using elem = std::vector<fq_t>;  // coefficients over F

  int dim() const { return int(basis.size()); }

  elem zero() const { return elem(basis.size(), 0); }
  elem unit(int idx) const {
    elem e = zero();
    e[idx] = 1;
    return e;
  }

  elem bracket(const elem& a, const elem& b) const {
    elem out = zero();
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i]) continue;
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (!b[j]) continue;
        if (i == j) continue;
        fq_t c = F.mul(a[i], b[j]);
        bool flip = i > j;
        auto key = flip ? std::make_pair(int(j), int(i)) : std::make_pair(int(i), int(j));
        auto it = bracket_table.find(key);
        if (it == bracket_table.end()) continue;
        for (const auto& [coef, k] : it->second) {
          fq_t v = F.mul(c, coef);
          out[k] = flip ? F.sub(out[k], v) : F.add(out[k], v);
        }
      }
    }
    return out;
  }

  // [p] of a basis multiple: (c b)^{[p]} = c^p b^{[p]}
  elem pmap_basis(int idx, fq_t c) const {
    elem out = zero();
    fq_t cp = F.frobenius(c, 1);
    for (const auto& [coef, k] : pmap_table[idx]) out[k] = F.add(out[k], F.mul(cp, coef));
    return out;
  }

  // [p] of a general element: fold the Jacobson sum over basis components
  elem pmap(const elem& x, const JacobsonTable& jac) const {
    elem acc = zero();       // running partial sum of components
    elem acc_p = zero();     // [p] of the running partial sum
    bool first = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!x[i]) continue;
      elem term = zero();
      term[i] = x[i];
      elem term_p = pmap_basis(int(i), x[i]);
      if (first) {
        acc = term;
        acc_p = term_p;
        first = false;
        continue;
      }
      // (acc + term)^{[p]} = acc^{[p]} + term^{[p]} + sum s_k(acc, term)
      elem next_p = acc_p;
      for (std::size_t c = 0; c < next_p.size(); ++c) next_p[c] = F.add(next_p[c], term_p[c]);
      for (const auto& s : jac.s) {
        elem corr = lie_poly_eval_model(s, acc, term);
        for (std::size_t c = 0; c < next_p.size(); ++c) next_p[c] = F.add(next_p[c], corr[c]);
      }
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c] = F.add(acc[c], term[c]);
      acc_p = next_p;
    }
    return acc_p;
  }

  elem lie_poly_eval_model(const LiePoly& f, const elem& x, const elem& y) const {
    elem out = zero();
    for (const auto& [w, c] : f) {
      elem t = x;
      for (std::size_t k = w.size(); k-- > 0;) t = bracket(w[k] ? y : x, t);
      for (std::size_t i = 0; i < out.size(); ++i)
        for (int rep = 0; rep < c; ++rep) out[i] = F.add(out[i], t[i]);
    }
    return out;
  }
};

namespace detail {

// decompose a trace-zero matrix into {E_ab (a != b), h_i = E_ii - E_{i+1,i+1}}
inline std::vector<std::pair<fq_t, int // basis idx in the model's depth-0 span
                             >>
sl_decompose(const WsModel& M, const FieldParams& F, const FqMatrix& X) {
  int n = M.n;
  std::vector<std::pair<fq_t, int>> out;
  // diagonal part: coefficients of h_i are the partial sums of the diagonal
  fq_t partial = 0;
  for (int i = 0; i < n - 1; ++i) {
    partial = F.add(partial, X.at(i, i));
    if (partial) out.push_back({partial, i});  // h_i sits at index i
  }
  for (std::size_t b = 0; b < M.basis.size(); ++b) {
    const auto& bs = M.basis[b];
    if (bs.kind != WsModel::Basis::X || bs.depth != 0) continue;
    fq_t c = X.at(bs.root_from, bs.root_to);
    if (c) out.push_back({c, int(b)});
  }
  return out;
}

}  // namespace detail

inline WsModel build_ws_model(const FieldParams& F, int n, int J) {
  require(F.p() > 2, errc::unsupported_p, "the model requires p > 2");
  require(n >= 2 && J >= 1, errc::bad_input, "need n >= 2 and J >= 1");
  WsModel M{F};
  M.n = n;
  M.J = J;
  for (int i = 0; i < n - 1; ++i) M.basis.push_back({WsModel::Basis::H, -1, -1, i, 0});
  for (int j = 0; j < J; ++j)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b) M.basis.push_back({WsModel::Basis::X, a, b, -1, j});
  for (int j = 1; j < J; ++j)
    for (int i = 1; i <= n - 1; ++i) M.basis.push_back({WsModel::Basis::Y, -1, -1, i, j});
  require(M.dim() == (n * n - 1) * J, errc::precision_error, "model dimension mismatch");

  auto idx_of = [&](const WsModel::Basis& want) -> int {
    for (std::size_t i = 0; i < M.basis.size(); ++i) {
      const auto& b = M.basis[i];
      if (b.kind != want.kind) continue;
      if (b.kind == WsModel::Basis::X && b.root_from == want.root_from && b.root_to == want.root_to &&
          b.depth == want.depth)
        return int(i);
      if (b.kind != WsModel::Basis::X && b.simple == want.simple && b.depth == want.depth) return int(i);
    }
    return -1;
  };

  // weights: eps-coordinates; X_{(a,b)}^{(j)} has weight p^j (eps_a - eps_b)
  for (const auto& b : M.basis) {
    std::vector<int> w(n, 0);
    if (b.kind == WsModel::Basis::X) {
      int pj = 1;
      for (int k = 0; k < b.depth; ++k) pj *= F.p();
      w[b.root_from] += pj;
      w[b.root_to] -= pj;
    }
    M.weights.push_back(w);
  }

  // depth-0 brackets from exact sl_n matrix commutators; everything touching
  // depth >= 1 is zero ([ws, gamma_j] = 0 for j >= 1)
  auto to_matrix = [&](int idx) {
    FqMatrix X(n, n);
    const auto& b = M.basis[idx];
    if (b.kind == WsModel::Basis::H) {
      X.at(b.simple, b.simple) = 1;
      X.at(b.simple + 1, b.simple + 1) = F.neg(F.one());
    } else {
      X.at(b.root_from, b.root_to) = 1;
    }
    return X;
  };
  auto depth0 = [&](int idx) {
    const auto& b = M.basis[idx];
    return b.kind == WsModel::Basis::H || (b.kind == WsModel::Basis::X && b.depth == 0);
  };
  for (int i = 0; i < M.dim(); ++i)
    for (int j = i + 1; j < M.dim(); ++j) {
      if (!depth0(i) || !depth0(j)) continue;
      FqMatrix A = to_matrix(i), B = to_matrix(j);
      FqMatrix C = fq_mat_mul(F, A, B), D = fq_mat_mul(F, B, A);
      for (std::size_t t = 0; t < C.a.size(); ++t) C.a[t] = F.sub(C.a[t], D.a[t]);
      auto dec = detail::sl_decompose(M, F, C);
      if (!dec.empty()) M.bracket_table[{i, j}] = dec;
    }

  // [p]-table
  M.pmap_table.resize(M.dim());
  for (int i = 0; i < M.dim(); ++i) {
    const auto& b = M.basis[i];
    if (b.kind == WsModel::Basis::H) {
      M.pmap_table[i] = {{F.one(), i}};
    } else if (b.kind == WsModel::Basis::X) {
      if (b.depth + 1 < J)
        M.pmap_table[i] = {{F.one(), idx_of({WsModel::Basis::X, b.root_from, b.root_to, -1, b.depth + 1})}};
    } else {
      if (b.depth + 1 < J)
        M.pmap_table[i] = {{F.one(), idx_of({WsModel::Basis::Y, -1, -1, b.simple, b.depth + 1})}};
    }
  }
  return M;
}

// beta(x) = x^{[p]} - sigma(pi(x)^{[p] classical}) on the depth-0 span
inline WsModel::elem beta_map(const WsModel& M, const JacobsonTable& jac, const WsModel::elem& x) {
  const FieldParams& F = M.F;
  WsModel::elem full = M.pmap(x, jac);
  // classical p-th power of the depth-0 matrix image, re-embedded by sigma
  FqMatrix X(M.n, M.n);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x[i]) continue;
    const auto& b = M.basis[i];
    if (b.kind == WsModel::Basis::H) {
      X.at(b.simple, b.simple) = F.add(X.at(b.simple, b.simple), x[i]);
      X.at(b.simple + 1, b.simple + 1) = F.sub(X.at(b.simple + 1, b.simple + 1), x[i]);
    } else if (b.kind == WsModel::Basis::X && b.depth == 0) {
      X.at(b.root_from, b.root_to) = F.add(X.at(b.root_from, b.root_to), x[i]);
    }
  }
  FqMatrix Xp = fq_mat_pow(F, X, F.p());
  auto dec = detail::sl_decompose(M, F, Xp);
  for (const auto& [c, k] : dec) full[k] = F.sub(full[k], c);
  return full;
}

// ---------------------------------------------------------------------------
// Canonical-bundle weight arithmetic (integer multiples of lambda_1).

struct CanonicalWeight {
  long long mixed = 0;       // -n (p^{nr} - 1)/(p - 1)
  long long equal_char = 0;  // -n
  std::vector<long long> filtration;  // -n p^j for j = 0..nr-1
};

inline CanonicalWeight canonical_weight(int n, int r, int p) {
  require(n >= 2 && r >= 1 && p >= 2, errc::bad_input, "need n >= 2, r >= 1, prime p");
  CanonicalWeight w;
  int nr = n * r;
  long long pj = 1, sum = 0;
  for (int j = 0; j < nr; ++j) {
    w.filtration.push_back(-(long long)n * pj);
    sum += w.filtration.back();
    if (__builtin_mul_overflow(pj, (long long)p, &pj)) fail(errc::overflow_guard, "weight overflow");
  }
  w.mixed = -(long long)n * ((pj - 1) / (p - 1));
  w.equal_char = -n;
  long long check = 0;
  for (long long v : w.filtration) check += v;
  require(check == w.mixed, errc::precision_error, "filtration must sum to the closed form");
  require(nr == 1 || w.mixed != w.equal_char, errc::precision_error,
          "mixed and equal-characteristic weights must differ for nr > 1");
  return w;
}

// ---------------------------------------------------------------------------
// Parabolic factorization in SL(n, W_nr) and the p-adic modular action.

struct ParabolicFactorization {
  GrMat unipotent, reductive;  // X = unipotent * reductive
};

inline ParabolicFactorization parabolic_factor(const GaloisRing& R, const GrMat& X) {
  int n = X.rows;
  require(n >= 2, errc::bad_input, "need n >= 2");
  require(R.is_unit(X.at(0, 0)), errc::not_in_parabolic, "upper-left entry must be a unit");
  for (int j = 1; j < n; ++j)
    require(R.valuation(X.at(0, j)) >= 1, errc::not_in_parabolic, "first row must be (a, p...)");
  GrMat X2(n - 1, n - 1, R.zero());
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) X2.at(i - 1, j - 1) = X.at(i, j);
  auto X2inv = gr_mat_inverse(R, X2);
  require(X2inv.has_value(), errc::block_singular, "lower-right block is singular");
  // row vector pa X_2^{-1}
  std::vector<GrElem> pa(n - 1);
  for (int j = 1; j < n; ++j) pa[j - 1] = X.at(0, j);
  std::vector<GrElem> top(n - 1, R.zero());
  for (int j = 0; j < n - 1; ++j)
    for (int i = 0; i < n - 1; ++i) top[j] = R.add(top[j], R.mul(pa[i], X2inv->at(i, j)));
  ParabolicFactorization f{gr_mat_zero(R, n), gr_mat_zero(R, n)};
  for (int i = 0; i < n; ++i) f.unipotent.at(i, i) = R.one();
  for (int j = 1; j < n; ++j) f.unipotent.at(0, j) = top[j - 1];
  // reductive part: first row (x11 - pa X2^{-1} X1, 0,...,0), rest copied
  GrElem corner = X.at(0, 0);
  for (int i = 1; i < n; ++i) corner = R.sub(corner, R.mul(top[i - 1], X.at(i, 0)));
  f.reductive.at(0, 0) = corner;
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < n; ++j) f.reductive.at(i, j) = X.at(i, j);
  auto prod = mat_mul(R, f.unipotent, f.reductive);
  require(prod.a == X.a, errc::precision_error, "parabolic factorization must reproduce X");
  return f;
}

// X . u = (x_{1,1} u + X_{1,2})(X_{2,1} u + X_{2,2})^{-1} on rows over pW
inline std::vector<GrElem> modular_action(const GaloisRing& R, const GrMat& X, const std::vector<GrElem>& u) {
  int n = X.rows;
  require(int(u.size()) == n - 1, errc::bad_input, "row length must be n-1");
  for (const auto& e : u) require(R.valuation(e) >= 1, errc::domain_error, "u must lie in pW");
  for (int j = 1; j < n; ++j)
    require(R.valuation(X.at(0, j)) >= 1, errc::not_in_parabolic, "X must lie in the parabolic");
  // numerator: x_{1,1} u + X_{1,2}
  std::vector<GrElem> num(n - 1);
  for (int j = 0; j < n - 1; ++j) num[j] = R.add(R.mul(X.at(0, 0), u[j]), X.at(0, j + 1));
  // denominator: X_{2,1} u + X_{2,2}
  GrMat den(n - 1, n - 1, R.zero());
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) den.at(i - 1, j - 1) = R.add(R.mul(X.at(i, 0), u[j - 1]), X.at(i, j));
  auto deninv = gr_mat_inverse(R, den);
  require(deninv.has_value(), errc::block_singular, "denominator block is singular");
  std::vector<GrElem> out(n - 1, R.zero());
  for (int j = 0; j < n - 1; ++j)
    for (int i = 0; i < n - 1; ++i) out[j] = R.add(out[j], R.mul(num[i], deninv->at(i, j)));
  for (const auto& e : out) require(R.valuation(e) >= 1, errc::precision_error, "action must stay in pW");
  return out;
}

}  // namespace wittkit
