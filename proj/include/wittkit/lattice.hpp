#pragma once

// Linear algebra over W_s: determinant digits, the scheme-of-bases and
// spanning-family equations, Smith forms and lattice types, enumeration over
// F_q, tangent computations on dual numbers, Hom dimensions, additive
// characters, and the explicit deformation families.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"
#include "gf.hpp"
#include "mpoly.hpp"
#include "ring.hpp"
#include "witt.hpp"

namespace wittkit {

// ---------------------------------------------------------------------------
// Generic square matrices over a ring context.

template <class Ctx>
struct Mat {
  int rows = 0, cols = 0;
  std::vector<typename Ctx::elem> a;

  Mat() = default;
  Mat(int r, int c, typename Ctx::elem fill) : rows(r), cols(c), a(std::size_t(r) * c, fill) {}
  typename Ctx::elem& at(int r, int c) { return a[std::size_t(r) * cols + c]; }
  const typename Ctx::elem& at(int r, int c) const { return a[std::size_t(r) * cols + c]; }
};

template <class Ctx>
Mat<Ctx> mat_identity(const Ctx& R, int n) {
  Mat<Ctx> I(n, n, R.zero());
  for (int i = 0; i < n; ++i) I.at(i, i) = R.one();
  return I;
}

template <class Ctx>
Mat<Ctx> mat_mul(const Ctx& R, const Mat<Ctx>& A, const Mat<Ctx>& B) {
  require(A.cols == B.rows, errc::params_mismatch, "matrix shape mismatch");
  Mat<Ctx> C(A.rows, B.cols, R.zero());
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k)
      for (int j = 0; j < B.cols; ++j) C.at(i, j) = R.add(C.at(i, j), R.mul(A.at(i, k), B.at(k, j)));
  return C;
}

template <class Ctx>
std::vector<typename Ctx::elem> mat_apply(const Ctx& R, const Mat<Ctx>& A,
                                          const std::vector<typename Ctx::elem>& x) {
  require(A.cols == int(x.size()), errc::params_mismatch, "matrix/vector shape mismatch");
  std::vector<typename Ctx::elem> y(A.rows, R.zero());
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) y[i] = R.add(y[i], R.mul(A.at(i, j), x[j]));
  return y;
}

namespace detail {

template <class Ctx>
typename Ctx::elem det_recurse(const Ctx& R, const Mat<Ctx>& M, std::vector<int>& cols, int row) {
  if (row == M.rows) return R.one();
  typename Ctx::elem acc = R.zero();
  for (std::size_t k = 0; k < cols.size(); ++k) {
    int c = cols[k];
    cols.erase(cols.begin() + k);
    typename Ctx::elem sub = det_recurse(R, M, cols, row + 1);
    typename Ctx::elem term = R.mul(M.at(row, c), sub);
    if (k % 2 == 1) term = R.neg(term);
    acc = R.add(acc, term);
    cols.insert(cols.begin() + k, c);
  }
  return acc;
}

}  // namespace detail

template <class Ctx>
typename Ctx::elem mat_det(const Ctx& R, const Mat<Ctx>& M) {
  require(M.rows == M.cols, errc::bad_input, "determinant of non-square matrix");
  std::vector<int> cols(M.cols);
  for (int i = 0; i < M.cols; ++i) cols[i] = i;
  return detail::det_recurse(R, M, cols, 0);
}

// ---------------------------------------------------------------------------
// Witt matrices over finite fields: Galois-ring entries.

using GrMat = Mat<GaloisRing>;

inline GrMat gr_mat_zero(const GaloisRing& R, int n) { return GrMat(n, n, R.zero()); }

inline std::string gr_mat_key(const GaloisRing& R, const GrMat& M) {
  std::string k;
  for (const auto& e : M.a)
    for (int i = 0; i < R.m(); ++i) {
      k += std::to_string(e.c[i]);
      k += ',';
    }
  return k;
}

inline GrMat gr_mat_random(const GaloisRing& R, int n, Rng& rng) {
  GrMat M = gr_mat_zero(R, n);
  for (auto& e : M.a) e = R.sample(rng);
  return M;
}

inline GrMat gr_mat_random_gl(const GaloisRing& R, int n, Rng& rng) {
  for (int tries = 0; tries < 4096; ++tries) {
    GrMat M = gr_mat_random(R, n, rng);
    if (R.is_unit(mat_det(R, M))) return M;
  }
  fail(errc::size_guard, "could not sample an invertible matrix");
}

inline std::optional<GrMat> gr_mat_inverse(const GaloisRing& R, GrMat M) {
  int n = M.rows;
  GrMat inv = mat_identity(R, n);
  for (int c = 0; c < n; ++c) {
    int pr = -1;
    for (int r = c; r < n; ++r)
      if (R.is_unit(M.at(r, c))) {
        pr = r;
        break;
      }
    if (pr < 0) return std::nullopt;
    for (int j = 0; j < n; ++j) {
      std::swap(M.at(c, j), M.at(pr, j));
      std::swap(inv.at(c, j), inv.at(pr, j));
    }
    GrElem s = R.inv(M.at(c, c));
    for (int j = 0; j < n; ++j) {
      M.at(c, j) = R.mul(s, M.at(c, j));
      inv.at(c, j) = R.mul(s, inv.at(c, j));
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      GrElem f = M.at(r, c);
      if (f == R.zero()) continue;
      for (int j = 0; j < n; ++j) {
        M.at(r, j) = R.sub(M.at(r, j), R.mul(f, M.at(c, j)));
        inv.at(r, j) = R.sub(inv.at(r, j), R.mul(f, inv.at(c, j)));
      }
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Determinant digits and the scheme-of-bases membership.

struct DeterminantDigits {
  WittDigits delta;                // digits of det(U)
  std::vector<WittDigits> eta;     // eta[j] = digits of the column-j replacement determinant
};

inline DeterminantDigits determinant_digits(const GaloisRing& R, const GrMat& U,
                                            const std::vector<GrElem>* v = nullptr) {
  DeterminantDigits out;
  out.delta = gr_to_digits(R, mat_det(R, U));
  if (v) {
    require(int(v->size()) == U.rows, errc::params_mismatch, "replacement column height mismatch");
    for (int j = 0; j < U.cols; ++j) {
      GrMat M = U;
      for (int i = 0; i < U.rows; ++i) M.at(i, j) = (*v)[i];
      out.eta.push_back(gr_to_digits(R, mat_det(R, M)));
    }
  }
  return out;
}

inline int digits_valuation(const WittDigits& d) {
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i]) return int(i);
  return int(d.size());
}

inline bool is_discriminant_basis(const GaloisRing& R, const GrMat& U, int nr) {
  require(R.s() >= nr + 1, errc::truncation_too_short, "need s >= nr + 1 to read the discriminant");
  WittDigits delta = gr_to_digits(R, mat_det(R, U));
  return digits_valuation(delta) == nr;
}

// Cramer with the inverse-Frobenius division of the paper's remark, run at
// lifted precision so that U x = v holds exactly in W_s.
inline std::optional<std::vector<GrElem>> membership_solve(const GaloisRing& R, const GrMat& U,
                                                           const std::vector<GrElem>& v, int nr) {
  require(is_discriminant_basis(R, U, nr), errc::not_a_basis, "U is not a basis of discriminant nr");
  GaloisRing R2 = R.lifted(nr);
  int n = U.rows;
  GrMat U2(n, n, R2.zero());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) U2.at(i, j) = R2.reinterpret(U.at(i, j));
  std::vector<GrElem> v2(n);
  for (int i = 0; i < n; ++i) v2[i] = R2.reinterpret(v[i]);

  GrElem det2 = mat_det(R2, U2);
  std::vector<GrElem> repl(n);
  for (int j = 0; j < n; ++j) {
    GrMat M = U2;
    for (int i = 0; i < n; ++i) M.at(i, j) = v2[i];
    repl[j] = mat_det(R2, M);
    if (R.valuation(R.reinterpret(repl[j])) < nr) return std::nullopt;
  }
  GrElem unit = gr_div_p_pow(R2, det2, nr);
  GrElem unit_inv = R.inv(R.reinterpret(unit));
  std::vector<GrElem> x(n);
  for (int j = 0; j < n; ++j) {
    GrElem y = gr_div_p_pow(R2, repl[j], nr);
    x[j] = R.mul(R.reinterpret(y), unit_inv);
  }
  // exact multiply-back is part of the contract
  for (int i = 0; i < n; ++i) {
    GrElem acc = R.zero();
    for (int j = 0; j < n; ++j) acc = R.add(acc, R.mul(U.at(i, j), x[j]));
    require(acc == v[i], errc::precision_error, "membership solution failed multiply-back");
  }
  return x;
}

// ---------------------------------------------------------------------------
// Open-cell sampling on D(gamma_0), s = nr + 1.

inline GrMat sample_open_cell(const FieldParams& F, int n, int nr, Rng& rng) {
  GaloisRing R(F, nr + 1);
  WittDigits tgt(R.s(), 0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    fq_t t = F.sample_nonzero(rng);
    tgt[nr] = F.frobenius(t, nr);  // standard component of xi(t)^{p^-nr} p^nr is t at slot nr
    GrElem target = gr_from_digits(R, tgt);
    if (n == 1) {
      GrMat U(1, 1, target);
      require(is_discriminant_basis(R, U, nr), errc::precision_error, "open-cell sample failed");
      return U;
    }
    GrMat U = gr_mat_random(R, n, rng);
    // lower-right (n-1)x(n-1) minor must be a unit
    GrMat LR(n - 1, n - 1, R.zero());
    for (int i = 1; i < n; ++i)
      for (int j = 1; j < n; ++j) LR.at(i - 1, j - 1) = U.at(i, j);
    GrElem gamma = mat_det(R, LR);
    if (!R.is_unit(gamma)) continue;
    // u_{0,0} = gamma^{-1} (target - sum_{j>=1} (-1)^j u_{0,j} d_{0,j}), row-0 Laplace minors
    GrElem acc = target;
    for (int j = 1; j < n; ++j) {
      GrMat Mj(n - 1, n - 1, R.zero());
      for (int i = 1; i < n; ++i) {
        int cc = 0;
        for (int c = 0; c < n; ++c) {
          if (c == j) continue;
          Mj.at(i - 1, cc++) = U.at(i, c);
        }
      }
      GrElem term = R.mul(U.at(0, j), mat_det(R, Mj));
      if (j % 2 == 1) term = R.neg(term);
      acc = R.sub(acc, term);
    }
    U.at(0, 0) = R.mul(R.inv(gamma), acc);
    require(mat_det(R, U) == target, errc::precision_error, "open-cell determinant mismatch");
    require(is_discriminant_basis(R, U, nr), errc::precision_error, "open-cell sample not a basis");
    return U;
  }
  fail(errc::size_guard, "open-cell sampling exhausted retries");
}

// ---------------------------------------------------------------------------
// Smith form over W_s (diagonal p^{d_i} up to units).

struct SmithResult {
  std::vector<int> type;  // nonincreasing divisor exponents, entries in [0, s]
  GrMat left, right;      // left * U * right = diag
  GrMat diag;
};

inline GrElem gr_quotient_lift(const GaloisRing& R, const GrElem& x, int d) {
  // any c with c * p^d = x (valuation(x) >= d)
  GrElem q{};
  std::int64_t pd = ipow64(R.p(), d);
  for (int i = 0; i < R.m(); ++i) {
    require(x.c[i] % pd == 0, errc::precision_error, "quotient lift needs divisibility");
    q.c[i] = x.c[i] / pd;
  }
  return q;
}

inline SmithResult smith_form(const GaloisRing& R, GrMat U) {
  int n = U.rows;
  SmithResult res;
  res.left = mat_identity(R, n);
  res.right = mat_identity(R, n);
  for (int k = 0; k < n; ++k) {
    int bi = -1, bj = -1, bv = R.s();
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j) {
        int v = R.valuation(U.at(i, j));
        if (v < bv) {
          bv = v;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) break;  // all remaining entries are zero: divisors s
    for (int j = 0; j < n; ++j) std::swap(U.at(k, j), U.at(bi, j));
    for (int j = 0; j < n; ++j) std::swap(res.left.at(k, j), res.left.at(bi, j));
    for (int i = 0; i < n; ++i) std::swap(U.at(i, k), U.at(i, bj));
    for (int i = 0; i < n; ++i) std::swap(res.right.at(i, k), res.right.at(i, bj));
    // normalize pivot to exactly p^bv
    GrElem unit = gr_quotient_lift(R, U.at(k, k), bv);
    GrElem unit_inv = R.inv(unit);
    for (int j = 0; j < n; ++j) U.at(k, j) = R.mul(unit_inv, U.at(k, j));
    for (int j = 0; j < n; ++j) res.left.at(k, j) = R.mul(unit_inv, res.left.at(k, j));
    // clear column k
    for (int i = 0; i < n; ++i) {
      if (i == k || U.at(i, k) == R.zero()) continue;
      GrElem c = gr_quotient_lift(R, U.at(i, k), bv);
      for (int j = 0; j < n; ++j) {
        U.at(i, j) = R.sub(U.at(i, j), R.mul(c, U.at(k, j)));
        res.left.at(i, j) = R.sub(res.left.at(i, j), R.mul(c, res.left.at(k, j)));
      }
    }
    // clear row k
    for (int j = 0; j < n; ++j) {
      if (j == k || U.at(k, j) == R.zero()) continue;
      GrElem c = gr_quotient_lift(R, U.at(k, j), bv);
      for (int i = 0; i < n; ++i) {
        U.at(i, j) = R.sub(U.at(i, j), R.mul(U.at(i, k), c));
        res.right.at(i, j) = R.sub(res.right.at(i, j), R.mul(res.right.at(i, k), c));
      }
    }
  }
  res.diag = U;
  res.type.resize(n);
  for (int i = 0; i < n; ++i) res.type[i] = R.valuation(U.at(i, i));
  std::sort(res.type.begin(), res.type.end(), std::greater<int>());
  return res;
}

// ---------------------------------------------------------------------------
// Canonical spanning form (p-adic Hermite normal form of span + p^s F).

struct Lattice {
  int n = 0;
  GrMat span;                   // upper triangular, pivot p^{d_i} in row i of column i
  std::vector<int> hnf_divisors;  // d_i in [0, s]
  std::vector<int> type;          // smith partition of F/L
  int colength = 0;
};

inline Lattice canonical_form(const GaloisRing& R, const GrMat& U) {
  int n = U.rows;
  std::vector<std::vector<GrElem>> cols(U.cols);
  for (int j = 0; j < U.cols; ++j) {
    cols[j].resize(n);
    for (int i = 0; i < n; ++i) cols[j][i] = U.at(i, j);
  }
  std::vector<std::vector<GrElem>> slot(n, std::vector<GrElem>(n, R.zero()));
  std::vector<int> divisors(n, R.s());
  std::vector<bool> used(cols.size(), false);
  for (int row = n - 1; row >= 0; --row) {
    int best = -1, bv = R.s();
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (used[c]) continue;
      int v = R.valuation(cols[c][row]);
      if (v < bv) {
        bv = v;
        best = int(c);
      }
    }
    if (best < 0 || bv >= R.s()) {
      divisors[row] = R.s();  // virtual p^s column
      continue;
    }
    used[best] = true;
    divisors[row] = bv;
    GrElem unit_inv = R.inv(gr_quotient_lift(R, cols[best][row], bv));
    for (int i = 0; i < n; ++i) cols[best][i] = R.mul(cols[best][i], unit_inv);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (used[c]) continue;
      if (cols[c][row] == R.zero()) continue;
      GrElem f = gr_quotient_lift(R, cols[c][row], bv);
      for (int i = 0; i < n; ++i) cols[c][i] = R.sub(cols[c][i], R.mul(f, cols[best][i]));
    }
    slot[row] = cols[best];
  }
  // off-diagonal reduction: entry (i, j), i < j, reduced mod p^{d_i}
  for (int j = 0; j < n; ++j) {
    for (int i = j - 1; i >= 0; --i) {
      if (divisors[i] >= R.s()) continue;
      std::int64_t pd = ipow64(R.p(), divisors[i]);
      GrElem cur = slot[j][i];
      GrElem rem{}, quot{};
      for (int t = 0; t < R.m(); ++t) {
        rem.c[t] = cur.c[t] % pd;
        quot.c[t] = (cur.c[t] - rem.c[t]) / pd;
      }
      if (quot == R.zero()) continue;
      for (int t2 = 0; t2 < n; ++t2) slot[j][t2] = R.sub(slot[j][t2], R.mul(quot, slot[i][t2]));
    }
  }
  Lattice L;
  L.n = n;
  L.hnf_divisors = divisors;
  L.colength = 0;
  for (int d : divisors) L.colength += d;
  L.span = gr_mat_zero(R, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) L.span.at(i, j) = slot[j][i];
  L.type = smith_form(R, L.span).type;
  return L;
}

inline bool lattice_equal(const Lattice& a, const Lattice& b) {
  return a.n == b.n && a.span.a == b.span.a;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration of W_s(F_q)-submodules of W_s^n with a colength.

inline std::int64_t enumeration_size_bound(const FieldParams& F, int n, int colength, int s) {
  // sum over divisor compositions of prod_i q^{d_i * (n - 1 - i)}
  std::int64_t total = 0;
  std::vector<int> d(n, 0);
  std::int64_t q = F.q();
  const std::int64_t cap = std::int64_t(1) << 40;
  auto rec = [&](auto&& self, int idx, int rem) -> void {
    if (idx == n) {
      if (rem) return;
      std::int64_t cnt = 1;
      for (int i = 0; i < n && cnt < cap; ++i)
        for (int k = 0; k < d[i] * (n - 1 - i) && cnt < cap; ++k) cnt *= q;
      total = std::min(cap, total + cnt);
      return;
    }
    for (int v = 0; v <= std::min(rem, s); ++v) {
      d[idx] = v;
      self(self, idx + 1, rem - v);
    }
  };
  rec(rec, 0, colength);
  return total;
}

inline std::vector<Lattice> enumerate_lattices(const FieldParams& F, int n, int colength, int s) {
  GaloisRing R(F, s);
  require(colength >= 0 && colength <= n * s, errc::bad_input, "colength out of range");
  require(enumeration_size_bound(F, n, colength, s) <= (std::int64_t(1) << 20), errc::size_guard,
          "enumeration exceeds the 2^20 state guard");
  std::vector<Lattice> out;
  std::set<std::string> seen;
  std::vector<int> d(n, 0);
  auto emit = [&]() {
    // off-diagonal entries (i, j), i < j, run over residues mod p^{d_i}
    std::vector<std::pair<int, int>> free_pos;
    std::vector<std::int64_t> radix;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        std::int64_t r = 1;
        for (int k = 0; k < d[i]; ++k) r *= F.p();
        if (r > 1) {
          free_pos.push_back({i, j});
          radix.push_back(r);
        }
      }
    std::vector<std::int64_t> counter(free_pos.size(), 0);
    for (;;) {
      GrMat T = gr_mat_zero(R, n);
      for (int i = 0; i < n; ++i)
        if (d[i] < R.s()) {
          GrElem piv{};
          piv.c[0] = ipow64(R.p(), d[i]);
          T.at(i, i) = piv;
        }
      for (std::size_t t = 0; t < free_pos.size(); ++t) {
        auto [i, j] = free_pos[t];
        // counter value -> m coefficients base p^{d_i}
        GrElem e{};
        std::int64_t v = counter[t];
        for (int c = 0; c < R.m(); ++c) {
          e.c[c] = v % radix[t];
          v /= radix[t];
        }
        T.at(i, j) = e;
      }
      Lattice L = canonical_form(R, T);
      if (L.colength == colength) {
        std::string key = gr_mat_key(R, L.span);
        if (seen.insert(key).second) out.push_back(std::move(L));
      }
      // increment mixed-radix counter (each digit ranges over radix^m values)
      std::size_t t = 0;
      for (; t < counter.size(); ++t) {
        std::int64_t lim = 1;
        for (int c = 0; c < R.m(); ++c) lim *= radix[t];
        if (++counter[t] < lim) break;
        counter[t] = 0;
      }
      if (t == counter.size()) break;
    }
  };
  auto rec = [&](auto&& self, int idx, int rem) -> void {
    if (idx == n) {
      if (rem == 0) emit();
      return;
    }
    for (int v = 0; v <= std::min(rem, s); ++v) {
      d[idx] = v;
      self(self, idx + 1, rem - v);
    }
  };
  rec(rec, 0, colength);
  return out;
}

inline std::map<std::vector<int>, std::int64_t> count_lattices_by_type(const FieldParams& F, int n,
                                                                       int colength, int s) {
  std::map<std::vector<int>, std::int64_t> counts;
  for (const auto& L : enumerate_lattices(F, n, colength, s)) counts[L.type]++;
  return counts;
}

// ---------------------------------------------------------------------------
// Lie algebra of a lattice: dual-number kernel of the eta equations.

struct TangentReport {
  std::vector<std::vector<fq_t>> basis;  // vectors in k^{n s}, coordinate (j, i) -> j*s + i
  bool theta_closed = false;
  int dim = 0;
};

// digitwise Frobenius shift on tangent coordinates, blockwise per entry
inline std::vector<fq_t> theta_shift(const FieldParams& F, const std::vector<fq_t>& v, int n, int s) {
  std::vector<fq_t> w(v.size(), 0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i + 1 < s; ++i) w[std::size_t(j) * s + i + 1] = F.frobenius(v[std::size_t(j) * s + i], 1);
  return w;
}

inline bool in_row_span(const FieldParams& F, const std::vector<std::vector<fq_t>>& basis,
                        const std::vector<fq_t>& v) {
  if (basis.empty()) {
    for (fq_t x : v)
      if (x) return false;
    return true;
  }
  FqMatrix M(int(basis.size()) + 1, int(v.size()));
  for (std::size_t r = 0; r < basis.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) M.at(int(r), int(c)) = basis[r][c];
  for (std::size_t c = 0; c < v.size(); ++c) M.at(int(basis.size()), int(c)) = v[c];
  FqMatrix Mb(int(basis.size()), int(v.size()));
  for (std::size_t r = 0; r < basis.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) Mb.at(int(r), int(c)) = basis[r][c];
  return fq_rank(F, M) == fq_rank(F, Mb);
}

inline TangentReport lie_algebra(const FieldParams& F, const Lattice& L, int s) {
  int n = L.n;
  int c = L.colength;
  require(c <= s, errc::truncation_too_short, "colength exceeds truncation: Lie algebra undefined");
  using Dual = DualRing<FieldParams>;
  Dual D(F, false);
  WittRing<Dual> W(D, F.p(), s);
  // lift the canonical spanning matrix to dual-number digit vectors
  GaloisRing R(F, s);
  Mat<WittRing<Dual>> U(n, n, W.zero());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      WittDigits d = gr_to_digits(R, L.span.at(i, j));
      typename WittRing<Dual>::elem e(s);
      for (int k = 0; k < s; ++k) e[k] = D.lift(d[k]);
      U.at(i, j) = e;
    }
  // Jacobian of the eta digits with respect to the n*s tangent coordinates
  int ncoords = n * s;
  int nrows = n * std::min(c, s);
  FqMatrix J(nrows, ncoords);
  for (int j0 = 0; j0 < n; ++j0)
    for (int i0 = 0; i0 < s; ++i0) {
      std::vector<typename WittRing<Dual>::elem> v(n, W.zero());
      v[j0][i0] = D.eps(F.one());
      for (int jc = 0; jc < n; ++jc) {
        Mat<WittRing<Dual>> M = U;
        for (int i = 0; i < n; ++i) M.at(i, jc) = v[i];
        auto det = mat_det(W, M);
        for (int i = 0; i < std::min(c, s); ++i) {
          require(det[i].a == 0, errc::precision_error, "eta must be infinitesimal");
          J.at(jc * std::min(c, s) + i, j0 * s + i0) = det[i].b;
        }
      }
    }
  TangentReport rep;
  rep.basis = fq_kernel(F, J);
  rep.dim = int(rep.basis.size());
  rep.theta_closed = true;
  for (const auto& b : rep.basis)
    if (!in_row_span(F, rep.basis, theta_shift(F, b, n, s))) rep.theta_closed = false;
  return rep;
}

// ---------------------------------------------------------------------------
// Hom dimension of the deformation space (weight matching over Frobenius
// orbits, solved through the semilinear machinery).

inline int hom_dimension(const FieldParams& F, const std::vector<int>& type, int nr) {
  int n = int(type.size());
  int sum = 0;
  for (int a : type) sum += a;
  require(sum == nr, errc::type_invalid, "type must have colength nr");
  int m = F.m();
  // unknowns: c_{l, (j,t), w} with l a source component (alpha_l < nr survives
  // truncation at s = nr), (j,t) a target coordinate (t < alpha_j), w in [0, m)
  struct Unk {
    int l, j, t, w;
  };
  std::vector<Unk> unks;
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int t = 0; t < type[j]; ++t)
        for (int w = 0; w < m; ++w) unks.push_back({l, j, t, w});
  std::vector<SemiEquation> eqs;
  for (std::size_t u = 0; u < unks.size(); ++u) {
    const auto& c = unks[u];
    bool killed = type[c.l] >= nr;  // p^{nr} f_l = 0: source component dies in F_{nr}
    bool weight_ok = ((type[c.l] + c.w) % m + m) % m == (c.t % m);
    if (killed || !weight_ok) {
      SemiEquation eq;
      eq.terms.push_back({F.one(), int(u), 0});
      eqs.push_back(eq);
      continue;
    }
    // equivariance against every scalar a0: (a0^{p^{alpha_l+w}} - a0^{p^t}) c = 0
    for (fq_t a0 = 0; a0 < F.q(); ++a0) {
      fq_t coef = F.sub(F.frobenius(a0, type[c.l] + c.w), F.frobenius(a0, c.t));
      if (coef == 0) continue;
      SemiEquation eq;
      eq.terms.push_back({coef, int(u), 0});
      eqs.push_back(eq);
    }
  }
  SemiSolution sol = solve_semilinear(F, int(unks.size()), eqs);
  require(sol.consistent, errc::inconsistent, "homogeneous system must be consistent");
  require(sol.fp_dimension() % m == 0, errc::precision_error, "solution space is not an F_q space");
  return sol.fp_dimension() / m;
}

// ---------------------------------------------------------------------------
// Additive characters of a module type (oracle-computed basis).

struct AdditiveCharacter {
  struct Term {
    int component, digit, frob;
    fq_t coeff;
  };
  std::vector<Term> terms;
  long long weight_exponent = 0;  // chi(a x) = a_0^{p^weight_exponent} chi(x)
};

inline std::vector<AdditiveCharacter> additive_characters(const FieldParams& F,
                                                          const std::vector<int>& divisors) {
  int m = F.m();
  int p = F.p();
  struct Cand {
    int l, j, w;
  };
  std::vector<Cand> cands;
  for (std::size_t l = 0; l < divisors.size(); ++l)
    for (int j = 0; j < divisors[l]; ++j)
      for (int w = 0; w < m; ++w) cands.push_back({int(l), j, w});
  // formal identities: additivity over x,y digit variables; semilinearity over a,x
  // per component; cross-component terms are independent so conditions separate.
  std::map<std::pair<int, Expo>, std::vector<std::pair<std::size_t, fq_t>>> add_rows, semi_rows;
  for (std::size_t ci = 0; ci < cands.size(); ++ci) {
    const auto& c = cands[ci];
    int sl = divisors[c.l];
    const auto& tab = structure_table(p, sl);
    long long pw = 1;
    for (int k = 0; k < c.w; ++k) pw *= p;
    {
      // additivity defect: Phi_j(x; y)^{p^w} - x_j^{p^w} - y_j^{p^w} over 2 sl vars
      FqPoly phi(&F, 2 * sl);
      for (const auto& t : tab.phi[c.j]) phi.add_term(t.exps, F.from_int(t.coeff));
      FqPoly defect = phi.pow(pw) - FqPoly::variable(F, 2 * sl, c.j, std::uint32_t(pw)) -
                      FqPoly::variable(F, 2 * sl, sl + c.j, std::uint32_t(pw));
      for (const auto& [e, coef] : defect.terms()) add_rows[{c.l, e}].push_back({ci, coef});
    }
    {
      // semilinearity defect: Psi_j(x; a)^{p^w} - a_0 x_j^{p^w}; vars x_0..x_{sl-1}, a_0..a_{sl-1}
      FqPoly psi(&F, 2 * sl);
      for (const auto& t : tab.psi[c.j]) psi.add_term(t.exps, F.from_int(t.coeff));
      FqPoly defect = psi.pow(pw) -
                      FqPoly::variable(F, 2 * sl, sl + 0, 1) * FqPoly::variable(F, 2 * sl, c.j, std::uint32_t(pw));
      for (const auto& [e, coef] : defect.terms()) semi_rows[{c.l, e}].push_back({ci, coef});
    }
  }
  std::vector<SemiEquation> eqs;
  for (const auto* rows : {&add_rows, &semi_rows})
    for (const auto& [key, terms] : *rows) {
      SemiEquation eq;
      for (const auto& [ci, coef] : terms) eq.terms.push_back({coef, int(ci), 0});
      eqs.push_back(eq);
    }
  SemiSolution sol = solve_semilinear(F, int(cands.size()), eqs);
  // the F_p-kernel here is F_q-stable (single-Frobenius-window, coefficientwise
  // conditions); collapse to an F_q-basis by echelonizing over F_q
  FqMatrix K(int(sol.kernel.size()), int(cands.size()));
  for (std::size_t r = 0; r < sol.kernel.size(); ++r)
    for (std::size_t c = 0; c < sol.kernel[r].size(); ++c) K.at(int(r), int(c)) = sol.kernel[r][c];
  fq_rref(F, K);
  std::vector<AdditiveCharacter> out;
  for (int r = 0; r < K.rows; ++r) {
    AdditiveCharacter ch;
    bool nonzero = false;
    for (int c = 0; c < K.cols; ++c) {
      if (K.at(r, c) == 0) continue;
      nonzero = true;
      const auto& cand = cands[c];
      ch.terms.push_back({cand.l, cand.j, cand.w, K.at(r, c)});
      ch.weight_exponent = cand.j + cand.w;
    }
    if (nonzero) out.push_back(std::move(ch));
  }
  return out;
}

// evaluate a character on a point of the module (digit lists per component)
inline fq_t character_eval(const FieldParams& F, const AdditiveCharacter& ch,
                           const std::vector<WittDigits>& point) {
  fq_t acc = 0;
  for (const auto& t : ch.terms) acc = F.add(acc, F.mul(t.coeff, F.frobenius(point[t.component][t.digit], t.frob)));
  return acc;
}

// ---------------------------------------------------------------------------
// Parametric families: the section-3 path (mended exponent) and the appendix
// deformation M(t); fibers verified through smith_form.

struct ParametricFamily {
  FieldParams F;
  int n = 0, s = 0;
  Mat<WittRing<PolyRing<FieldParams>>> symbolic;
  std::vector<int> generic_type, special_type;  // nonincreasing
  // the kernel relation data (appendix families): digit positions and twist
  int rel_row_q = -1, rel_row_s = -1, rel_dig_q = -1, rel_dig_s = -1, rel_twist = 0;
};

namespace detail {

inline WittRing<PolyRing<FieldParams>> family_ring(const FieldParams& F, int s) {
  return WittRing<PolyRing<FieldParams>>(PolyRing<FieldParams>(F, false), F.p(), s);
}

}  // namespace detail

inline GrMat family_evaluate(const ParametricFamily& fam, fq_t t) {
  GaloisRing R(fam.F, fam.s);
  PolyRing<FieldParams> P(fam.F, false);
  GrMat out = gr_mat_zero(R, fam.n);
  for (int i = 0; i < fam.n; ++i)
    for (int j = 0; j < fam.n; ++j) {
      WittDigits d(fam.s);
      for (int k = 0; k < fam.s; ++k) d[k] = P.evaluate(fam.symbolic.at(i, j)[k], t);
      out.at(i, j) = gr_from_digits(R, d);
    }
  return out;
}

// section-3 path: base diag(p^{mu_l}) with u_j = p^{mu_j} e_j + xi(t) p^{mu_j - 1} e_i.
// special fiber (t = 0) has type mu; generic fiber moves one box j -> i.
inline ParametricFamily specialization_path(const FieldParams& F, const std::vector<int>& mu, int i, int j,
                                            int s) {
  int n = int(mu.size());
  require(i >= 0 && j >= 0 && i < n && j < n && i != j, errc::bad_input, "bad index pair");
  require(mu[j] >= 1, errc::hypothesis_violated, "donor part must be positive");
  require(mu[i] >= mu[j], errc::hypothesis_violated, "receiver part must be >= donor part");
  for (int l = 0; l < n; ++l) require(mu[l] <= s, errc::truncation_too_short, "divisor exceeds truncation");
  auto W = detail::family_ring(F, s);
  const auto& P = W.coefficients();
  ParametricFamily fam{F, n, s, Mat<WittRing<PolyRing<FieldParams>>>(n, n, W.zero()), {}, {}};
  for (int l = 0; l < n; ++l) {
    auto e = W.zero();
    if (mu[l] < s) e[mu[l]] = P.one();
    fam.symbolic.at(l, l) = e;
  }
  {
    auto e = W.zero();
    e[mu[j] - 1] = P.variable();
    fam.symbolic.at(i, j) = W.add(fam.symbolic.at(i, j), e);
  }
  fam.special_type = mu;
  std::sort(fam.special_type.begin(), fam.special_type.end(), std::greater<int>());
  fam.generic_type = mu;
  fam.generic_type[i] += 1;
  fam.generic_type[j] -= 1;
  std::sort(fam.generic_type.begin(), fam.generic_type.end(), std::greater<int>());
  return fam;
}

// appendix family: alpha nondecreasing, alpha_q < r < alpha_s; at t != 0 the
// column span has type alpha, at t = 0 one box moves q <- s.
inline ParametricFamily mt_family(const FieldParams& F, const std::vector<int>& alpha, int q_idx, int s_idx,
                                  int r, int s) {
  int n = int(alpha.size());
  for (int l = 0; l + 1 < n; ++l)
    require(alpha[l] <= alpha[l + 1], errc::bad_input, "appendix convention: nondecreasing type");
  require(q_idx < s_idx && q_idx >= 0 && s_idx < n, errc::bad_input, "bad q/s indices");
  require(alpha[q_idx] < r, errc::hypothesis_violated, "alpha_q < r required");
  require(alpha[s_idx] > r, errc::hypothesis_violated, "alpha_s > r required");
  require(s >= alpha[s_idx], errc::truncation_too_short, "truncation too short to see all divisors");
  auto W = detail::family_ring(F, s);
  const auto& P = W.coefficients();
  ParametricFamily fam{F, n, s, Mat<WittRing<PolyRing<FieldParams>>>(n, n, W.zero()), {}, {}};
  for (int l = 0; l < n; ++l) {
    int d = (l == q_idx) ? alpha[l] + 1 : (l == s_idx) ? alpha[l] - 1 : alpha[l];
    auto e = W.zero();
    if (d < s) e[d] = P.one();
    fam.symbolic.at(l, l) = e;
  }
  {
    auto e = W.zero();
    e[alpha[q_idx]] = P.variable();
    fam.symbolic.at(q_idx, s_idx) = W.add(fam.symbolic.at(q_idx, s_idx), e);
  }
  fam.generic_type = alpha;
  fam.special_type = alpha;
  fam.special_type[q_idx] += 1;
  fam.special_type[s_idx] -= 1;
  std::sort(fam.generic_type.begin(), fam.generic_type.end(), std::greater<int>());
  std::sort(fam.special_type.begin(), fam.special_type.end(), std::greater<int>());
  fam.rel_row_q = q_idx;
  fam.rel_row_s = s_idx;
  fam.rel_dig_q = alpha[q_idx];
  fam.rel_dig_s = alpha[s_idx] - 1;
  fam.rel_twist = alpha[s_idx] - 1 - alpha[q_idx];
  return fam;
}

// the kernel relation of the appendix image scheme, checked on samples:
// (y_{q, alpha_q})^{p^d} = t^{p^d} y_{s, alpha_s - 1}, d = alpha_s - 1 - alpha_q.
// drop_twist replaces the twist by the identity (the spec's mutation control).
inline bool verify_mt_relation(const ParametricFamily& fam, int samples, Rng& rng, bool drop_twist = false) {
  require(fam.rel_row_q >= 0, errc::bad_input, "family carries no kernel relation");
  const FieldParams& F = fam.F;
  auto W = detail::family_ring(F, fam.s);
  const auto& P = W.coefficients();
  for (int it = 0; it < samples; ++it) {
    // X: column of Witt vectors with sampled constant digits
    std::vector<typename WittRing<PolyRing<FieldParams>>::elem> X(fam.n, W.zero());
    for (int j = 0; j < fam.n; ++j)
      for (int k = 0; k < fam.s; ++k) X[j][k] = P.constant(F.sample(rng));
    auto Y = mat_apply(W, fam.symbolic, X);
    const auto& yq = Y[fam.rel_row_q][fam.rel_dig_q];
    const auto& ys = Y[fam.rel_row_s][fam.rel_dig_s];
    long long pd = 1;
    for (int k = 0; k < (drop_twist ? 0 : fam.rel_twist); ++k) pd *= F.p();
    // lhs(t) = yq(t)^{p^d} - t^{p^d} ys(t), as a polynomial in t
    auto pow_poly = [&](typename PolyRing<FieldParams>::elem e, long long ee) {
      auto acc = P.one();
      while (ee) {
        if (ee & 1) acc = P.mul(acc, e);
        if (ee > 1) e = P.mul(e, e);
        ee >>= 1;
      }
      return acc;
    };
    auto tpow = pow_poly(P.variable(), pd);
    auto lhs = P.add(pow_poly(yq, pd), P.neg(P.mul(tpow, ys)));
    if (!P.equal(lhs, P.zero())) {
      // identically-zero check failed; also fails pointwise somewhere
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Complete-intersection smoke test: Jacobian of (delta_0..delta_{nr-1}) at
// open-cell samples, computed on dual numbers.

struct CompleteIntersectionReport {
  int ambient_dimension = 0;
  int variety_dimension = 0;
  int trials = 0;
  bool all_ranks_ok = false;
};

inline CompleteIntersectionReport verify_complete_intersection(const FieldParams& F, int n, int r, int trials,
                                                               Rng& rng) {
  int nr = n * r;
  int s = nr + 1;
  GaloisRing R(F, s);
  using Dual = DualRing<FieldParams>;
  Dual D(F, false);
  WittRing<Dual> W(D, F.p(), s);
  CompleteIntersectionReport rep;
  rep.ambient_dimension = n * n * s;
  rep.variety_dimension = n * n * s - nr;
  rep.trials = trials;
  for (int it = 0; it < trials; ++it) {
    GrMat U = sample_open_cell(F, n, nr, rng);
    Mat<WittRing<Dual>> UD(n, n, W.zero());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        WittDigits d = gr_to_digits(R, U.at(i, j));
        typename WittRing<Dual>::elem e(s);
        for (int k = 0; k < s; ++k) e[k] = D.lift(d[k]);
        UD.at(i, j) = e;
      }
    if (nr == 0) continue;
    FqMatrix J(nr, n * n * s);
    int col = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < s; ++k, ++col) {
          Mat<WittRing<Dual>> M = UD;
          auto e = M.at(i, j);
          e[k] = D.add(e[k], D.eps(F.one()));
          M.at(i, j) = e;
          auto det = mat_det(W, M);
          for (int d0 = 0; d0 < nr; ++d0) J.at(d0, col) = det[d0].b;
        }
    int rank = fq_rank(F, J);
    if (rank != nr)
      fail(errc::rank_deficit, "Jacobian rank " + std::to_string(rank) + " != " + std::to_string(nr) +
                                   " at trial " + std::to_string(it));
  }
  rep.all_ranks_ok = true;
  return rep;
}

// ---------------------------------------------------------------------------
// Exact power-multiset fit for orbit point counts N(q) = sum_i q^{e_i}.

struct CellFit {
  bool ok = false;
  std::vector<int> exponents;  // nonincreasing
  int max_exponent = -1;
  bool unique_max = false;
};

inline CellFit fit_power_multiset(const std::vector<std::pair<std::int64_t, std::int64_t>>& samples,
                                  int num_cells) {
  CellFit fit;
  if (samples.empty()) return fit;
  auto [qmax, nmax] = *std::max_element(samples.begin(), samples.end());
  std::int64_t rem = nmax;
  std::vector<int> exps;
  for (int c = 0; c < num_cells; ++c) {
    if (rem <= 0) return fit;
    int e = 0;
    std::int64_t pw = 1;
    while (pw * qmax <= rem) {
      pw *= qmax;
      ++e;
    }
    exps.push_back(e);
    rem -= pw;
  }
  if (rem != 0) return fit;
  for (const auto& [q, nv] : samples) {
    std::int64_t total = 0;
    for (int e : exps) {
      std::int64_t pw = 1;
      for (int k = 0; k < e; ++k) pw *= q;
      total += pw;
    }
    if (total != nv) return fit;
  }
  fit.ok = true;
  fit.exponents = exps;
  fit.max_exponent = exps.empty() ? -1 : exps.front();
  fit.unique_max = exps.size() < 2 || exps[1] != exps[0];
  return fit;
}

inline int count_compositions(const std::vector<int>& type) {
  // distinct rearrangements = n! / prod(multiplicities!)
  std::map<int, int> mult;
  for (int v : type) mult[v]++;
  long long num = 1;
  for (int i = 2; i <= int(type.size()); ++i) num *= i;
  for (auto& [v, c] : mult)
    for (int i = 2; i <= c; ++i) num /= i;
  return int(num);
}

}  // namespace wittkit
