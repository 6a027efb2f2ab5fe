#pragma once

// p-linear maps v -> v^{[p]} B (row convention), the twisted matrix action,
// p-nilpotency, the correspondence phi <-> L(phi) with theta-closed
// submodules of O-bar tensor V transversal to V, GL(n,k)-equivariance, and
// the duality pairing.
//
// Coordinates of O-bar tensor V: basis theta^s tensor e_i, index s*n + i.

#include <optional>
#include <vector>

#include "common.hpp"
#include "gf.hpp"
#include "lattice.hpp"

namespace wittkit {

inline std::vector<fq_t> frobenius_vec(const FieldParams& F, std::vector<fq_t> v, long long e) {
  for (auto& x : v) x = F.frobenius(x, e);
  return v;
}

inline FqMatrix frobenius_mat(const FieldParams& F, FqMatrix M, long long e) {
  for (auto& x : M.a) x = F.frobenius(x, e);
  return M;
}

inline std::vector<fq_t> row_times_matrix(const FieldParams& F, const std::vector<fq_t>& v, const FqMatrix& B) {
  std::vector<fq_t> out(B.cols, 0);
  for (int j = 0; j < B.cols; ++j)
    for (int i = 0; i < B.rows; ++i) out[j] = F.add(out[j], F.mul(v[i], B.at(i, j)));
  return out;
}

inline FqMatrix fq_mat_mul(const FieldParams& F, const FqMatrix& A, const FqMatrix& B) {
  FqMatrix C(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k)
      for (int j = 0; j < B.cols; ++j) C.at(i, j) = F.add(C.at(i, j), F.mul(A.at(i, k), B.at(k, j)));
  return C;
}

// r-fold twisted application: v -> v^{[p^r]} B^{[p^{r-1}]} ... B
inline std::vector<fq_t> twisted_apply(const FieldParams& F, std::vector<fq_t> v, const FqMatrix& B, int r) {
  for (int k = 0; k < r; ++k) v = row_times_matrix(F, frobenius_vec(F, v, 1), B);
  return v;
}

// the chain C_r = B^{[p^{r-1}]} ... B, so phi^r(v) = v^{[p^r]} C_r
inline FqMatrix twisted_chain(const FieldParams& F, const FqMatrix& B, int r) {
  int n = B.rows;
  FqMatrix C(n, n);
  for (int i = 0; i < n; ++i) C.at(i, i) = 1;
  for (int k = 0; k < r; ++k) C = fq_mat_mul(F, frobenius_mat(F, C, 1), B);
  return C;
}

inline bool is_p_nilpotent(const FieldParams& F, const FqMatrix& B) {
  FqMatrix C = twisted_chain(F, B, B.rows);
  for (fq_t x : C.a)
    if (x) return false;
  return true;
}

// ---------------------------------------------------------------------------
// L(phi): kernel of lambda_phi(theta^s tensor m) = phi^s(m).

struct PLattice {
  int n = 0;
  std::vector<std::vector<fq_t>> basis;  // rref rows over F_q, vectors in F_q^{n^2}
  int codim = 0;
  bool theta_closed = false;
  bool transversal_to_v = false;
};

inline std::vector<fq_t> plin_theta_shift(const FieldParams& F, const std::vector<fq_t>& v, int n) {
  std::vector<fq_t> w(v.size(), 0);
  for (int s = 0; s + 1 < n; ++s)
    for (int i = 0; i < n; ++i) w[std::size_t(s + 1) * n + i] = F.frobenius(v[std::size_t(s) * n + i], 1);
  return w;
}

inline std::vector<std::vector<fq_t>> fq_row_space(const FieldParams& F,
                                                   const std::vector<std::vector<fq_t>>& rows, int ncols) {
  FqMatrix M(int(rows.size()), ncols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < ncols; ++c) M.at(int(r), c) = rows[r][c];
  auto pivots = fq_rref(F, M);
  std::vector<std::vector<fq_t>> out;
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    std::vector<fq_t> v(ncols);
    for (int c = 0; c < ncols; ++c) v[c] = M.at(int(r), c);
    out.push_back(std::move(v));
  }
  return out;
}

inline void plattice_audit(const FieldParams& F, PLattice& L) {
  int n = L.n;
  L.codim = n * n - int(L.basis.size());
  L.theta_closed = true;
  for (const auto& b : L.basis)
    if (!in_row_span(F, L.basis, plin_theta_shift(F, b, n))) L.theta_closed = false;
  // transversal to V: no nonzero combination of the basis lies in grade 0,
  // i.e. the projection to the grades >= 1 has trivial kernel on span(L)
  L.transversal_to_v = true;
  if (!L.basis.empty()) {
    FqMatrix A(n * (n - 1), int(L.basis.size()));
    for (std::size_t bcol = 0; bcol < L.basis.size(); ++bcol) {
      int rr = 0;
      for (int s = 1; s < n; ++s)
        for (int i = 0; i < n; ++i) A.at(rr++, int(bcol)) = L.basis[bcol][std::size_t(s) * n + i];
    }
    auto ker = fq_kernel(F, A);
    for (const auto& coeffs : ker) {
      std::vector<fq_t> x(std::size_t(n) * n, 0);
      for (std::size_t bcol = 0; bcol < L.basis.size(); ++bcol)
        for (int c = 0; c < n * n; ++c) x[c] = F.add(x[c], F.mul(coeffs[bcol], L.basis[bcol][c]));
      for (fq_t xv : x)
        if (xv) {
          L.transversal_to_v = false;
          return;
        }
    }
  }
}

inline PLattice lattice_of_nilpotent(const FieldParams& F, const FqMatrix& B) {
  int n = B.rows;
  require(is_p_nilpotent(F, B), errc::not_nilpotent, "matrix is not p-nilpotent");
  // kernel of lambda: sum_s (row_s)^{[p^s]} C_s = 0, unknowns a_{s,i}
  std::vector<FqMatrix> chains;
  for (int s = 0; s < n; ++s) chains.push_back(twisted_chain(F, B, s));
  std::vector<SemiEquation> eqs;
  for (int c = 0; c < n; ++c) {
    SemiEquation eq;
    for (int s = 0; s < n; ++s)
      for (int i = 0; i < n; ++i) {
        fq_t coef = chains[s].at(i, c);
        if (coef) eq.terms.push_back({coef, s * n + i, s});
      }
    eqs.push_back(eq);
  }
  SemiSolution sol = solve_semilinear(F, n * n, eqs);
  require(sol.consistent, errc::inconsistent, "homogeneous kernel");
  PLattice L;
  L.n = n;
  L.basis = fq_row_space(F, sol.kernel, n * n);
  require(int(L.basis.size()) * F.m() == sol.fp_dimension(), errc::precision_error,
          "kernel of lambda_phi must be an F_q-subspace");
  plattice_audit(F, L);
  require(L.codim == n, errc::precision_error, "L(phi) must have codimension n");
  require(L.theta_closed, errc::precision_error, "L(phi) must be theta-closed");
  require(L.transversal_to_v, errc::precision_error, "L(phi) must be transversal to V");
  return L;
}

// the k-span of the generator set R(phi) (cross-check for the kernel)
inline std::vector<std::vector<fq_t>> generator_span(const FieldParams& F, const FqMatrix& B) {
  int n = B.rows;
  std::vector<std::vector<fq_t>> rows;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a)
      for (int b = 0; a + b < n; ++b)
        for (int c = 0; c <= n; ++c) {
          std::vector<fq_t> e(n, 0);
          e[i] = 1;
          auto x = twisted_apply(F, e, B, c);
          auto y = twisted_apply(F, e, B, b + c);
          std::vector<fq_t> v(std::size_t(n) * n, 0);
          for (int j = 0; j < n; ++j) {
            v[std::size_t(a + b) * n + j] = F.add(v[std::size_t(a + b) * n + j], x[j]);
            v[std::size_t(a) * n + j] = F.sub(v[std::size_t(a) * n + j], y[j]);
          }
          rows.push_back(std::move(v));
        }
  return fq_row_space(F, rows, n * n);
}

inline FqMatrix nilpotent_of_lattice(const FieldParams& F, const PLattice& L) {
  int n = L.n;
  require(L.codim == n, errc::not_transversal, "submodule must have codimension n");
  require(L.theta_closed, errc::not_transversal, "submodule must be theta-closed");
  require(L.transversal_to_v, errc::not_transversal, "submodule must be transversal to V");
  // solve 1 tensor u = theta tensor e_i modulo L: unknowns u_j and span coefficients
  int nb = int(L.basis.size());
  FqMatrix B(n, n);
  for (int i = 0; i < n; ++i) {
    FqMatrix A(n * n, n + nb);
    std::vector<fq_t> rhs(std::size_t(n) * n, 0);
    rhs[std::size_t(1) * n + i] = 1;  // theta tensor e_i
    for (int j = 0; j < n; ++j) A.at(std::size_t(0) * n + j, j) = 1;  // 1 tensor u
    for (int bcol = 0; bcol < nb; ++bcol)
      for (int c = 0; c < n * n; ++c) A.at(c, n + bcol) = L.basis[bcol][c];
    auto x = fq_solve(F, A, rhs);
    require(x.has_value(), errc::not_transversal, "projection to V is not surjective");
    for (int j = 0; j < n; ++j) B.at(i, j) = (*x)[j];
  }
  require(is_p_nilpotent(F, B), errc::not_nilpotent, "recovered map is not p-nilpotent");
  return B;
}

inline FqMatrix conjugate(const FieldParams& F, const FqMatrix& B, const FqMatrix& A) {
  auto Ainv = fq_inverse(F, A);
  require(Ainv.has_value(), errc::singular, "conjugating matrix is singular");
  return fq_mat_mul(F, fq_mat_mul(F, frobenius_mat(F, A, 1), B), *Ainv);
}

// right action of A in GL(n, k) on the coordinates: gradewise v_s -> v_s A
inline PLattice plattice_right_action(const FieldParams& F, const PLattice& L, const FqMatrix& A) {
  PLattice out;
  out.n = L.n;
  std::vector<std::vector<fq_t>> rows;
  for (const auto& b : L.basis) {
    std::vector<fq_t> v(b.size(), 0);
    for (int s = 0; s < L.n; ++s) {
      std::vector<fq_t> grade(L.n);
      for (int i = 0; i < L.n; ++i) grade[i] = b[std::size_t(s) * L.n + i];
      auto moved = row_times_matrix(F, grade, A);
      for (int i = 0; i < L.n; ++i) v[std::size_t(s) * L.n + i] = moved[i];
    }
    rows.push_back(std::move(v));
  }
  out.basis = fq_row_space(F, rows, L.n * L.n);
  plattice_audit(F, out);
  return out;
}

// ---------------------------------------------------------------------------
// Duality: tau(u) = (u B^T)^{[p^{-1}]}, adjunction <u, phi(v)> = <tau(u), v>^p,
// and the semilinear-weighted extended pairing
//   <u tensor thetabar^r, thetabar^s tensor v> = <u, v>^{p^{-r}} delta_{r+s, n-1}.
// Dual-side coordinates: e*_i tensor thetabar^r at index r*n + i.

inline std::vector<fq_t> dual_tau(const FieldParams& F, const FqMatrix& B, const std::vector<fq_t>& u) {
  int n = B.rows;
  std::vector<fq_t> out(n, 0);
  for (int j = 0; j < n; ++j) {
    fq_t acc = 0;
    for (int i = 0; i < n; ++i) acc = F.add(acc, F.mul(u[i], B.at(j, i)));
    out[j] = F.frobenius(acc, -1);
  }
  return out;
}

inline fq_t extended_pairing(const FieldParams& F, const std::vector<fq_t>& dual_side,
                             const std::vector<fq_t>& module_side, int n) {
  fq_t acc = 0;
  for (int r = 0; r < n; ++r) {
    int s = n - 1 - r;
    fq_t part = 0;
    for (int i = 0; i < n; ++i)
      part = F.add(part, F.mul(dual_side[std::size_t(r) * n + i], module_side[std::size_t(s) * n + i]));
    acc = F.add(acc, F.frobenius(part, -r));
  }
  return acc;
}

// complement vector m(u) = sum_w tau^w(u) tensor thetabar^{n-1-w}
inline std::vector<fq_t> dual_complement_vector(const FieldParams& F, const FqMatrix& B,
                                                const std::vector<fq_t>& u) {
  int n = B.rows;
  std::vector<fq_t> out(std::size_t(n) * n, 0);
  std::vector<fq_t> cur = u;
  for (int w = 0; w < n; ++w) {
    int r = n - 1 - w;
    for (int i = 0; i < n; ++i) out[std::size_t(r) * n + i] = cur[i];
    cur = dual_tau(F, B, cur);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive enumerators (guarded; used by tests and the acceptance suite).

inline std::vector<FqMatrix> enumerate_p_nilpotents(const FieldParams& F, int n) {
  std::int64_t total = 1;
  for (int i = 0; i < n * n; ++i) {
    total *= F.q();
    require(total <= (1 << 16), errc::size_guard, "nilpotent enumeration exceeds guard");
  }
  std::vector<FqMatrix> out;
  for (std::int64_t code = 0; code < total; ++code) {
    FqMatrix B(n, n);
    std::int64_t v = code;
    for (int i = 0; i < n * n; ++i) {
      B.a[i] = fq_t(v % F.q());
      v /= F.q();
    }
    if (is_p_nilpotent(F, B)) out.push_back(std::move(B));
  }
  return out;
}

// theta-closed codim-n subspaces transversal to V, parametrized as graphs of
// linear maps g: (grades >= 1) -> V
inline std::vector<PLattice> enumerate_transversal_submodules(const FieldParams& F, int n) {
  int wdim = n * (n - 1);
  std::int64_t total = 1;
  for (int i = 0; i < wdim * n; ++i) {
    total *= F.q();
    require(total <= (1 << 20), errc::size_guard, "submodule enumeration exceeds guard");
  }
  std::vector<PLattice> out;
  for (std::int64_t code = 0; code < total; ++code) {
    // g maps the basis theta^s tensor e_i (s >= 1) to a vector in V
    FqMatrix G(wdim, n);
    std::int64_t v = code;
    for (int i = 0; i < wdim * n; ++i) {
      G.a[i] = fq_t(v % F.q());
      v /= F.q();
    }
    PLattice L;
    L.n = n;
    for (int s = 1; s < n; ++s)
      for (int i = 0; i < n; ++i) {
        std::vector<fq_t> b(std::size_t(n) * n, 0);
        b[std::size_t(s) * n + i] = 1;
        int grow = (s - 1) * n + i;
        for (int j = 0; j < n; ++j) b[j] = G.at(grow, j);
        L.basis.push_back(std::move(b));
      }
    L.basis = fq_row_space(F, L.basis, n * n);
    plattice_audit(F, L);
    if (L.theta_closed && L.transversal_to_v && L.codim == n) out.push_back(std::move(L));
  }
  return out;
}

inline bool plattice_equal(const FieldParams& F, const PLattice& a, const PLattice& b) {
  if (a.n != b.n || a.basis.size() != b.basis.size()) return false;
  for (std::size_t i = 0; i < a.basis.size(); ++i)
    if (a.basis[i] != b.basis[i]) return false;
  (void)F;
  return true;
}

}  // namespace wittkit
