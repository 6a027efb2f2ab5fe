#pragma once

// The truncated Ore ring O_s = k[theta]/theta^s with theta b = b^p theta,
// its matrices acting on row vectors on the right, left-submodule Smith
// forms, and the stabilizer/orbit dimension formulas.

#include <algorithm>
#include <map>
#include <vector>

#include "common.hpp"
#include "gf.hpp"
#include "lattice.hpp"

namespace wittkit {

class OreRing {
 public:
  using elem = std::vector<fq_t>;  // coefficients b_0..b_{s-1}, meaning sum b_i theta^i

  OreRing(FieldParams F, int s) : F_(std::move(F)), s_(s) {
    require(s >= 1, errc::bad_input, "truncation length must be >= 1");
  }

  const FieldParams& field() const { return F_; }
  int s() const { return s_; }
  bool same(const OreRing& o) const { return F_.same(o.F_) && s_ == o.s_; }

  elem zero() const { return elem(s_, 0); }
  elem one() const {
    elem e(s_, 0);
    e[0] = 1;
    return e;
  }
  elem scalar(fq_t c) const {
    elem e(s_, 0);
    e[0] = c;
    return e;
  }
  elem theta_power(int k) const {
    elem e(s_, 0);
    if (k < s_) e[k] = 1;
    return e;
  }

  elem add(const elem& a, const elem& b) const {
    check(a), check(b);
    elem r(s_);
    for (int i = 0; i < s_; ++i) r[i] = F_.add(a[i], b[i]);
    return r;
  }
  elem neg(const elem& a) const {
    check(a);
    elem r(s_);
    for (int i = 0; i < s_; ++i) r[i] = F_.neg(a[i]);
    return r;
  }
  elem sub(const elem& a, const elem& b) const { return add(a, neg(b)); }
  // twisted convolution: c_k = sum_{i+j=k} a_i b_j^{p^i}
  elem mul(const elem& a, const elem& b) const {
    check(a), check(b);
    elem r(s_, 0);
    for (int i = 0; i < s_; ++i) {
      if (!a[i]) continue;
      for (int j = 0; i + j < s_; ++j) r[i + j] = F_.add(r[i + j], F_.mul(a[i], F_.frobenius(b[j], i)));
    }
    return r;
  }
  bool equal(const elem& a, const elem& b) const { return a == b; }
  elem sample(Rng& rng) const {
    elem r(s_);
    for (auto& c : r) c = F_.sample(rng);
    return r;
  }

  int ord(const elem& a) const {  // lowest theta power; s for zero (sentinel)
    for (int i = 0; i < s_; ++i)
      if (a[i]) return i;
    return s_;
  }
  bool is_unit(const elem& a) const { return ord(a) == 0; }

  // left quotient: c with c * theta^d = a  (shift down, no twist)
  elem left_quotient_theta(const elem& a, int d) const {
    require(ord(a) >= d, errc::precision_error, "left quotient needs ord >= d");
    elem r(s_, 0);
    for (int i = d; i < s_; ++i) r[i - d] = a[i];
    return r;
  }
  // right quotient: c with theta^d * c = a  (shift down, inverse Frobenius twist)
  elem right_quotient_theta(const elem& a, int d) const {
    require(ord(a) >= d, errc::precision_error, "right quotient needs ord >= d");
    elem r(s_, 0);
    for (int i = d; i < s_; ++i) r[i - d] = F_.frobenius(a[i], -d);
    return r;
  }

  elem inv(const elem& a) const {
    require(is_unit(a), errc::not_a_unit, "inverting a non-unit Ore element");
    // graded: (a b)_k = 0 for k >= 1 solves b order by order
    elem b(s_, 0);
    b[0] = F_.inv(a[0]);
    for (int k = 1; k < s_; ++k) {
      fq_t acc = 0;
      for (int i = 1; i <= k; ++i) acc = F_.add(acc, F_.mul(a[i], F_.frobenius(b[k - i], i)));
      b[k] = F_.neg(F_.mul(F_.inv(a[0]), acc));
    }
    require(mul(a, b) == one() && mul(b, a) == one(), errc::precision_error, "ore inverse check failed");
    return b;
  }

 private:
  void check(const elem& a) const { require(int(a.size()) == s_, errc::params_mismatch, "ore length mismatch"); }
  FieldParams F_;
  int s_;
};

using OreMat = Mat<OreRing>;

inline OreMat ore_mat_random(const OreRing& O, int n, Rng& rng) {
  OreMat M(n, n, O.zero());
  for (auto& e : M.a) e = O.sample(rng);
  return M;
}

// A = sum A_i theta^i is invertible iff A_0 is (c_0 criterion)
inline bool ore_matrix_invertible(const OreRing& O, const OreMat& A) {
  const FieldParams& F = O.field();
  int n = A.rows;
  FqMatrix A0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A0.at(i, j) = A.at(i, j)[0];
  return fq_rank(F, A0) == n;
}

// graded Newton: B_0 = A_0^{-1}; A_0 B_k = -sum_{i>=1} A_i B_{k-i}^{[p^i]}
inline std::optional<OreMat> ore_matrix_inverse(const OreRing& O, const OreMat& A) {
  const FieldParams& F = O.field();
  int n = A.rows, s = O.s();
  FqMatrix A0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A0.at(i, j) = A.at(i, j)[0];
  auto A0inv = fq_inverse(F, A0);
  if (!A0inv) return std::nullopt;
  std::vector<FqMatrix> B(s, FqMatrix(n, n));
  B[0] = *A0inv;
  for (int k = 1; k < s; ++k) {
    FqMatrix rhs(n, n);
    for (int i = 1; i <= k; ++i) {
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          fq_t acc = 0;
          for (int l = 0; l < n; ++l)
            acc = F.add(acc, F.mul(A.at(r, l)[i], F.frobenius(B[k - i].at(l, c), i)));
          rhs.at(r, c) = F.add(rhs.at(r, c), acc);
        }
    }
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        fq_t acc = 0;
        for (int l = 0; l < n; ++l) acc = F.add(acc, F.mul(A0inv->at(r, l), rhs.at(l, c)));
        B[k].at(r, c) = F.neg(acc);
      }
  }
  OreMat out(n, n, O.zero());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      typename OreRing::elem e(s, 0);
      for (int k = 0; k < s; ++k) e[k] = B[k].at(r, c);
      out.at(r, c) = e;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Noncommutative Smith form: minimal-order pivot, unit normalization on the
// correct side, twisted row/column clearing. Divisors sorted nonincreasing;
// F/N = sum O/theta^{s_i} for the row span N of the input.

inline std::vector<int> ore_smith(const OreRing& O, OreMat M) {
  int n = M.rows;
  std::vector<int> divisors(n, O.s());
  for (int k = 0; k < n; ++k) {
    int bi = -1, bj = -1, bv = O.s();
    for (int i = k; i < n; ++i)
      for (int j = k; j < n; ++j) {
        int v = O.ord(M.at(i, j));
        if (v < bv) {
          bv = v;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) break;
    for (int j = 0; j < n; ++j) std::swap(M.at(k, j), M.at(bi, j));
    for (int i = 0; i < n; ++i) std::swap(M.at(i, k), M.at(i, bj));
    // pivot = u * theta^bv with u a unit; left-multiply the row by u^{-1}
    auto u = O.left_quotient_theta(M.at(k, k), bv);
    auto uinv = O.inv(u);
    for (int j = 0; j < n; ++j) M.at(k, j) = O.mul(uinv, M.at(k, j));
    // row clearing: row_i -= (a_{i,k} shifted down by bv) * row_k
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      if (O.ord(M.at(i, k)) >= O.s()) continue;
      auto c = O.left_quotient_theta(M.at(i, k), bv);
      for (int j = 0; j < n; ++j) M.at(i, j) = O.sub(M.at(i, j), O.mul(c, M.at(k, j)));
    }
    // column clearing: col_j -= col_k * c with theta^bv c = a_{k,j}
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      if (O.ord(M.at(k, j)) >= O.s()) continue;
      auto c = O.right_quotient_theta(M.at(k, j), bv);
      for (int i = 0; i < n; ++i) M.at(i, j) = O.sub(M.at(i, j), O.mul(M.at(i, k), c));
    }
    divisors[k] = bv;
  }
  std::sort(divisors.begin(), divisors.end(), std::greater<int>());
  return divisors;
}

// ---------------------------------------------------------------------------
// Submodule types from a k-basis: theta-filtration of the quotient.
// Coordinates of O_s^n: (block j, theta power i) -> j*s + i.

inline std::vector<int> ore_type_from_kbasis(const FieldParams& F, int n, int s,
                                             const std::vector<std::vector<fq_t>>& basis) {
  int N = n * s;
  auto rank_with_tail = [&](int from) {
    // rank of basis + all theta^j-block coordinates with power >= from
    std::vector<std::vector<fq_t>> rows = basis;
    for (int b = 0; b < n; ++b)
      for (int i = from; i < s; ++i) {
        std::vector<fq_t> e(N, 0);
        e[std::size_t(b) * s + i] = 1;
        rows.push_back(std::move(e));
      }
    FqMatrix M(int(rows.size()), N);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int c = 0; c < N; ++c) M.at(int(r), c) = rows[r][c];
    return fq_rank(F, M);
  };
  FqMatrix B(int(basis.size()), N);
  for (std::size_t r = 0; r < basis.size(); ++r)
    for (int c = 0; c < N; ++c) B.at(int(r), c) = basis[r][c];
  int rb = fq_rank(F, B);
  std::vector<int> c(s + 1, 0);
  for (int j = 0; j <= s; ++j) c[j] = rank_with_tail(j) - rb;  // dim theta^j(F/N)
  std::vector<int> parts;
  for (int i = 1;; ++i) {
    int t = 0;
    for (int j = 0; j < s; ++j)
      if (c[j] - c[j + 1] >= i) ++t;
    if (t == 0) break;
    parts.push_back(t);
  }
  while (int(parts.size()) < n) parts.push_back(0);
  std::sort(parts.begin(), parts.end(), std::greater<int>());
  return parts;
}

// k-basis of the row span of an Ore matrix (theta-multiples of the rows)
inline std::vector<std::vector<fq_t>> ore_rowspan_kbasis(const OreRing& O, const OreMat& M) {
  const FieldParams& F = O.field();
  int n = M.cols, s = O.s();
  std::vector<std::vector<fq_t>> rows;
  for (int r = 0; r < M.rows; ++r) {
    for (int k = 0; k < s; ++k) {
      // theta^k * row r, coefficientwise
      std::vector<fq_t> v(std::size_t(n) * s, 0);
      for (int c = 0; c < n; ++c) {
        auto e = O.mul(O.theta_power(k), M.at(r, c));
        for (int i = 0; i < s; ++i) v[std::size_t(c) * s + i] = e[i];
      }
      rows.push_back(std::move(v));
    }
  }
  FqMatrix B(int(rows.size()), n * s);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < n * s; ++c) B.at(int(r), c) = rows[r][c];
  auto pivots = fq_rref(F, B);
  std::vector<std::vector<fq_t>> out;
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    std::vector<fq_t> v(std::size_t(n) * s);
    for (int c = 0; c < n * s; ++c) v[c] = B.at(int(r), c);
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stabilizer and orbit dimensions for the type (s_1 >= ... >= s_n).

inline void require_admissible_type(const std::vector<int>& type, int n, int r) {
  require(int(type.size()) == n, errc::type_invalid, "type length != n");
  int sum = 0;
  for (std::size_t i = 0; i < type.size(); ++i) {
    require(type[i] >= 0 && type[i] <= n * r, errc::type_invalid, "type entry out of range");
    if (i + 1 < type.size()) require(type[i] >= type[i + 1], errc::type_invalid, "type must be nonincreasing");
    sum += type[i];
  }
  require(sum == n * r, errc::type_invalid, "type entries must sum to nr");
}

// literal coefficient count: n^2 nr minus the order conditions ord(a_{i,j}) >= s_j - s_i
inline int stabilizer_dimension(const std::vector<int>& type, int n, int r) {
  require_admissible_type(type, n, r);
  int nr = n * r;
  int dim = n * n * nr;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (type[j] > type[i]) dim -= std::min(type[j] - type[i], nr);
  return dim;
}

inline int orbit_dimension(const std::vector<int>& type, int n, int r) {
  require_admissible_type(type, n, r);
  int dim = 0;
  for (std::size_t i = 0; i < type.size(); ++i)
    for (std::size_t j = i + 1; j < type.size(); ++j) dim += type[i] - type[j];
  return dim;
}

// admissible types: partitions of nr into at most n parts, each part <= nr
inline std::vector<std::vector<int>> admissible_types(int n, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  int nr = n * r;
  auto rec = [&](auto&& self, int rem, int maxpart, int slots) -> void {
    if (slots == 0) {
      if (rem == 0) {
        std::vector<int> t = cur;
        while (int(t.size()) < n) t.push_back(0);
        out.push_back(t);
      }
      return;
    }
    for (int v = std::min(rem, maxpart); v >= 0; --v) {
      cur.push_back(v);
      self(self, rem - v, v, slots - 1);
      cur.pop_back();
    }
  };
  rec(rec, nr, nr, n);
  std::sort(out.begin(), out.end(), std::greater<std::vector<int>>());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace wittkit
