#pragma once

// Exact arithmetic in F_{p^m} (p <= 13, p^m <= 81) and reduction of
// p-semilinear problems to prime-field linear algebra.

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "common.hpp"

namespace wittkit {

using fq_t = std::uint16_t;  // element code in [0, p^m), base-p polynomial digits

struct ConwayEntry {
  int p, m;
  std::array<int, 7> coeffs;  // c_0..c_m, rest zero
};

// Fixed Conway modulus table for p^m <= 81: reproducible element codes.
inline const ConwayEntry* conway_table(int p, int m) {
  static const ConwayEntry table[] = {
      {2, 1, {1, 1}},          {2, 2, {1, 1, 1}},        {2, 3, {1, 1, 0, 1}},
      {2, 4, {1, 1, 0, 0, 1}}, {2, 5, {1, 0, 1, 0, 0, 1}},
      {2, 6, {1, 1, 0, 1, 1, 0, 1}},
      {3, 1, {1, 1}},          {3, 2, {2, 2, 1}},        {3, 3, {1, 2, 0, 1}},
      {3, 4, {2, 0, 0, 2, 1}},
      {5, 1, {3, 1}},          {5, 2, {2, 4, 1}},
      {7, 1, {4, 1}},          {7, 2, {3, 6, 1}},
      {11, 1, {9, 1}},         {13, 1, {11, 1}},
  };
  for (const auto& e : table)
    if (e.p == p && e.m == m) return &e;
  return nullptr;
}

class FieldParams {
 public:
  using elem = fq_t;

  FieldParams(int p, int m) : FieldParams(p, m, default_modulus(p, m)) {}

  FieldParams(int p, int m, std::vector<int> modulus) : p_(p), m_(m), modulus_(std::move(modulus)) {
    require(is_prime(p_), errc::bad_input, "p must be prime");
    require(p_ >= 2 && p_ <= 13, errc::size_guard, "p out of supported range [2,13]");
    require(m_ >= 1, errc::bad_input, "m must be >= 1");
    std::int64_t qq = 1;
    for (int i = 0; i < m_; ++i) qq *= p_;
    require(qq <= 81, errc::size_guard, "p^m exceeds the supported cap 81");
    q_ = fq_t(qq);
    require((int)modulus_.size() == m_ + 1, errc::bad_input, "modulus must have degree m");
    for (auto& c : modulus_) c = ((c % p_) + p_) % p_;
    require(modulus_[m_] == 1, errc::bad_input, "modulus must be monic");
    require(irreducible(modulus_), errc::bad_input, "modulus is reducible");
    build_tables();
  }

  int p() const { return p_; }
  int m() const { return m_; }
  fq_t q() const { return q_; }
  const std::vector<int>& modulus() const { return modulus_; }

  // Copies share the precomputed tables; FieldParams is a cheap value handle.
  bool same(const FieldParams& o) const { return p_ == o.p_ && m_ == o.m_ && modulus_ == o.modulus_; }

  fq_t zero() const { return 0; }
  fq_t one() const { return 1; }
  fq_t from_int(long long v) const {  // prime subfield embedding
    long long r = ((v % p_) + p_) % p_;
    return fq_t(r);
  }

  fq_t add(fq_t a, fq_t b) const { return tab_->add[a * q_ + b]; }
  fq_t sub(fq_t a, fq_t b) const { return tab_->add[a * q_ + tab_->neg[b]]; }
  fq_t neg(fq_t a) const { return tab_->neg[a]; }
  fq_t mul(fq_t a, fq_t b) const { return tab_->mul[a * q_ + b]; }

  fq_t inv(fq_t a) const {
    require(a != 0, errc::division_by_zero, "inverse of zero field element");
    return tab_->inv[a];
  }

  fq_t div(fq_t a, fq_t b) const { return mul(a, inv(b)); }

  fq_t pow(fq_t a, long long e) const {
    if (a == 0) {
      require(e > 0 || (e == 0), errc::division_by_zero, "0 to a negative power");
      return e == 0 ? one() : zero();
    }
    long long ord = q_ - 1;
    long long r = e % ord;
    if (r < 0) r += ord;
    fq_t acc = 1, base = a;
    while (r) {
      if (r & 1) acc = mul(acc, base);
      base = mul(base, base);
      r >>= 1;
    }
    return acc;
  }

  // a^{p^e}; negative e = inverse Frobenius (order m automorphism).
  fq_t frobenius(fq_t a, long long e) const {
    int r = int(((e % m_) + m_) % m_);
    fq_t v = a;
    for (int i = 0; i < r; ++i) v = tab_->frob[v];
    return v;
  }

  bool equal(fq_t a, fq_t b) const { return a == b; }
  fq_t sample(Rng& rng) const { return fq_t(rng.uniform(q_)); }
  fq_t sample_nonzero(Rng& rng) const { return fq_t(1 + rng.uniform(q_ - 1)); }

  // polynomial-basis digits of the code, little-endian, length m
  std::vector<int> digits(fq_t a) const {
    std::vector<int> d(m_);
    for (int i = 0; i < m_; ++i) {
      d[i] = a % p_;
      a = fq_t(a / p_);
    }
    return d;
  }
  fq_t from_digits(const std::vector<int>& d) const {
    long long code = 0;
    for (int i = m_ - 1; i >= 0; --i) code = code * p_ + (((d[i] % p_) + p_) % p_);
    return fq_t(code);
  }

 private:
  static bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  }

  static std::vector<int> default_modulus(int p, int m) {
    const ConwayEntry* e = conway_table(p, m);
    require(e != nullptr, errc::size_guard, "no modulus table entry for (p, m)");
    return std::vector<int>(e->coeffs.begin(), e->coeffs.begin() + m + 1);
  }

  // trial division by every monic polynomial of degree 1..m/2 over F_p
  bool irreducible(const std::vector<int>& f) const {
    int deg = m_;
    if (deg == 1) return true;
    for (int d = 1; 2 * d <= deg; ++d) {
      std::int64_t count = 1;
      for (int i = 0; i < d; ++i) count *= p_;
      for (std::int64_t code = 0; code < count; ++code) {
        std::vector<int> g(d + 1);
        std::int64_t c = code;
        for (int i = 0; i < d; ++i) {
          g[i] = int(c % p_);
          c /= p_;
        }
        g[d] = 1;
        if (poly_divides(g, f)) return false;
      }
    }
    return true;
  }

  bool poly_divides(const std::vector<int>& g, std::vector<int> f) const {
    int dg = int(g.size()) - 1;
    for (int i = int(f.size()) - 1; i >= dg; --i) {
      int c = f[i] % p_;
      if (c == 0) continue;
      for (int j = 0; j <= dg; ++j) f[i - dg + j] = ((f[i - dg + j] - c * g[j]) % p_ + p_) % p_;
    }
    for (int i = 0; i < dg; ++i)
      if (f[i] % p_ != 0) return false;
    return true;
  }

  fq_t mul_slow(fq_t a, fq_t b) const {
    std::array<int, 16> prod{};
    auto da = digits(a), db = digits(b);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
    for (int i = 2 * m_ - 2; i >= m_; --i) {
      int c = prod[i];
      if (!c) continue;
      for (int j = 0; j < m_; ++j) prod[i - m_ + j] = ((prod[i - m_ + j] - c * modulus_[j]) % p_ + p_) % p_;
      prod[i] = 0;
    }
    std::vector<int> d(prod.begin(), prod.begin() + m_);
    return from_digits(d);
  }

  void build_tables() {
    auto t = std::make_shared<Tables>();
    t->add.resize(std::size_t(q_) * q_);
    t->mul.resize(std::size_t(q_) * q_);
    t->neg.resize(q_);
    t->inv.resize(q_);
    t->frob.resize(q_);
    for (fq_t a = 0; a < q_; ++a) {
      auto da = digits(a);
      for (int i = 0; i < m_; ++i) da[i] = (p_ - da[i]) % p_;
      t->neg[a] = from_digits(da);
    }
    for (fq_t a = 0; a < q_; ++a)
      for (fq_t b = 0; b < q_; ++b) {
        auto da = digits(a), db = digits(b);
        for (int i = 0; i < m_; ++i) da[i] = (da[i] + db[i]) % p_;
        t->add[a * q_ + b] = from_digits(da);
        t->mul[a * q_ + b] = mul_slow(a, b);
      }
    t->inv[0] = 0;
    for (fq_t a = 1; a < q_; ++a)
      for (fq_t b = 1; b < q_; ++b)
        if (t->mul[a * q_ + b] == 1) {
          t->inv[a] = b;
          break;
        }
    for (fq_t a = 0; a < q_; ++a) {
      fq_t v = a;
      for (int i = 1; i < p_; ++i) v = t->mul[v * q_ + a];
      t->frob[a] = v;
    }
    tab_ = std::move(t);
  }

  struct Tables {
    std::vector<fq_t> add, mul, neg, inv, frob;
  };

  int p_, m_;
  fq_t q_ = 0;
  std::vector<int> modulus_;
  std::shared_ptr<const Tables> tab_;
};

// ---------------------------------------------------------------------------
// Dense linear algebra over F_q.

struct FqMatrix {
  int rows = 0, cols = 0;
  std::vector<fq_t> a;

  FqMatrix() = default;
  FqMatrix(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0) {}
  fq_t& at(int r, int c) { return a[std::size_t(r) * cols + c]; }
  fq_t at(int r, int c) const { return a[std::size_t(r) * cols + c]; }
};

// row-reduce in place; returns pivot column per row-echelon step
inline std::vector<int> fq_rref(const FieldParams& F, FqMatrix& M) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < M.cols && r < M.rows; ++c) {
    int pr = -1;
    for (int i = r; i < M.rows; ++i)
      if (M.at(i, c) != 0) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    for (int j = 0; j < M.cols; ++j) std::swap(M.a[std::size_t(pr) * M.cols + j], M.a[std::size_t(r) * M.cols + j]);
    fq_t s = F.inv(M.at(r, c));
    for (int j = 0; j < M.cols; ++j) M.at(r, j) = F.mul(M.at(r, j), s);
    for (int i = 0; i < M.rows; ++i) {
      if (i == r || M.at(i, c) == 0) continue;
      fq_t f = M.at(i, c);
      for (int j = 0; j < M.cols; ++j) M.at(i, j) = F.sub(M.at(i, j), F.mul(f, M.at(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline int fq_rank(const FieldParams& F, FqMatrix M) { return int(fq_rref(F, M).size()); }

// basis of the right kernel {x : Mx = 0}
inline std::vector<std::vector<fq_t>> fq_kernel(const FieldParams& F, FqMatrix M) {
  auto pivots = fq_rref(F, M);
  std::vector<bool> is_pivot(M.cols, false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<std::vector<fq_t>> basis;
  for (int c = 0; c < M.cols; ++c) {
    if (is_pivot[c]) continue;
    std::vector<fq_t> v(M.cols, 0);
    v[c] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = F.neg(M.at(int(r), c));
    basis.push_back(std::move(v));
  }
  return basis;
}

// solve Mx = b; nullopt when inconsistent
inline std::optional<std::vector<fq_t>> fq_solve(const FieldParams& F, FqMatrix M, const std::vector<fq_t>& b) {
  FqMatrix aug(M.rows, M.cols + 1);
  for (int r = 0; r < M.rows; ++r) {
    for (int c = 0; c < M.cols; ++c) aug.at(r, c) = M.at(r, c);
    aug.at(r, M.cols) = b[r];
  }
  auto pivots = fq_rref(F, aug);
  if (!pivots.empty() && pivots.back() == M.cols) return std::nullopt;
  std::vector<fq_t> x(M.cols, 0);
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug.at(int(r), M.cols);
  return x;
}

inline std::optional<FqMatrix> fq_inverse(const FieldParams& F, const FqMatrix& M) {
  require(M.rows == M.cols, errc::bad_input, "inverse of non-square matrix");
  int n = M.rows;
  FqMatrix aug(n, 2 * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) aug.at(r, c) = M.at(r, c);
    aug.at(r, n + r) = 1;
  }
  auto pivots = fq_rref(F, aug);
  if (int(pivots.size()) < n || pivots[n - 1] != n - 1) return std::nullopt;
  FqMatrix inv(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) inv.at(r, c) = aug.at(r, n + c);
  return inv;
}

// ---------------------------------------------------------------------------
// Semilinear solver: equations sum_j c_ij * u_j^{p^{e_ij}} = d_i over F_{p^m},
// rewritten over the prime field (each Frobenius power becomes an m x m
// F_p-matrix). Solution set is an affine F_p-subspace of F_q^n.

struct SemiTerm {
  fq_t coeff;
  int unknown;
  long long frob;  // exponent e in u^{p^e}
};

struct SemiEquation {
  std::vector<SemiTerm> terms;
  fq_t rhs = 0;
};

struct SemiSolution {
  bool consistent = false;
  std::vector<fq_t> particular;           // one solution, size = #unknowns
  std::vector<std::vector<fq_t>> kernel;  // F_p-basis of the homogeneous space
  int fp_dimension() const { return int(kernel.size()); }
};

namespace detail {

// F_p-matrix (m x m) of x -> c * x^{p^e} in the polynomial basis
inline std::vector<int> semilinear_term_matrix(const FieldParams& F, fq_t c, long long e) {
  int m = F.m();
  std::vector<int> M(std::size_t(m) * m);
  for (int j = 0; j < m; ++j) {
    std::vector<int> basis_digits(m, 0);
    basis_digits[j] = 1;
    fq_t x = F.from_digits(basis_digits);
    fq_t y = F.mul(c, F.frobenius(x, e));
    auto d = F.digits(y);
    for (int i = 0; i < m; ++i) M[std::size_t(i) * m + j] = d[i];
  }
  return M;
}

}  // namespace detail

inline SemiSolution solve_semilinear(const FieldParams& F, int num_unknowns,
                                     const std::vector<SemiEquation>& eqs) {
  int p = F.p(), m = F.m();
  int R = int(eqs.size()) * m, C = num_unknowns * m;
  // prime-field system in the digit coordinates of each unknown
  std::vector<int> A(std::size_t(R) * (C + 1), 0);
  for (std::size_t ei = 0; ei < eqs.size(); ++ei) {
    for (const auto& t : eqs[ei].terms) {
      require(t.unknown >= 0 && t.unknown < num_unknowns, errc::bad_input, "unknown index out of range");
      auto M = detail::semilinear_term_matrix(F, t.coeff, t.frob);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          auto& cell = A[std::size_t(ei * m + i) * (C + 1) + (t.unknown * m + j)];
          cell = (cell + M[std::size_t(i) * m + j]) % p;
        }
    }
    auto d = F.digits(eqs[ei].rhs);
    for (int i = 0; i < m; ++i) A[std::size_t(ei * m + i) * (C + 1) + C] = d[i];
  }
  // Gaussian elimination mod p on the augmented system
  auto at = [&](int r, int c) -> int& { return A[std::size_t(r) * (C + 1) + c]; };
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < C && r < R; ++c) {
    int pr = -1;
    for (int i = r; i < R; ++i)
      if (at(i, c) % p != 0) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    if (pr != r)
      for (int j = 0; j <= C; ++j) std::swap(at(pr, j), at(r, j));
    int inv = 1;
    for (int k = 1; k < p; ++k)
      if ((k * at(r, c)) % p == 1) {
        inv = k;
        break;
      }
    for (int j = 0; j <= C; ++j) at(r, j) = (at(r, j) * inv) % p;
    for (int i = 0; i < R; ++i) {
      if (i == r) continue;
      int f = at(i, c) % p;
      if (!f) continue;
      for (int j = 0; j <= C; ++j) at(i, j) = ((at(i, j) - f * at(r, j)) % p + p) % p;
    }
    pivot_col.push_back(c);
    ++r;
  }
  SemiSolution sol;
  for (int i = r; i < R; ++i)
    if (at(i, C) % p != 0) {
      sol.consistent = false;
      return sol;
    }
  sol.consistent = true;
  std::vector<int> part(C, 0);
  for (std::size_t i = 0; i < pivot_col.size(); ++i) part[pivot_col[i]] = at(int(i), C);
  std::vector<bool> is_pivot(C, false);
  for (int c : pivot_col) is_pivot[c] = true;
  auto pack = [&](const std::vector<int>& digits) {
    std::vector<fq_t> out(num_unknowns);
    for (int u = 0; u < num_unknowns; ++u) {
      std::vector<int> d(digits.begin() + std::size_t(u) * m, digits.begin() + std::size_t(u + 1) * m);
      out[u] = F.from_digits(d);
    }
    return out;
  };
  sol.particular = pack(part);
  for (int c = 0; c < C; ++c) {
    if (is_pivot[c]) continue;
    std::vector<int> v(C, 0);
    v[c] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = ((-at(int(i), c)) % p + p) % p;
    sol.kernel.push_back(pack(v));
  }
  return sol;
}

}  // namespace wittkit
