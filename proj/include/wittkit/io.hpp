#pragma once

// JSON forms for every value that crosses the CLI boundary. ordered_json
// keeps machine reports byte-stable for a fixed seed and version.

#include <json.hpp>

#include "gf.hpp"
#include "lattice.hpp"
#include "ore.hpp"
#include "plin.hpp"
#include "rla.hpp"
#include "witt.hpp"

namespace wittkit {

using json = nlohmann::ordered_json;

inline json field_to_json(const FieldParams& F) {
  json j;
  j["p"] = F.p();
  j["m"] = F.m();
  j["modulus"] = F.modulus();
  return j;
}

inline FieldParams field_from_json(const json& j) {
  if (j.contains("modulus")) return FieldParams(j.at("p"), j.at("m"), j.at("modulus").get<std::vector<int>>());
  return FieldParams(j.at("p"), j.at("m"));
}

inline json witt_to_json(const WittDigits& d) {
  json j;
  j["s"] = d.size();
  j["digits"] = d;
  return j;
}

inline WittDigits witt_from_json(const json& j) {
  WittDigits d = j.at("digits").get<WittDigits>();
  require(d.size() == j.at("s").get<std::size_t>(), errc::bad_input, "digit count != s");
  return d;
}

// column-major: entries[j] is column j
inline json witt_matrix_to_json(const GaloisRing& R, const GrMat& M) {
  json cols = json::array();
  for (int j = 0; j < M.cols; ++j) {
    json col = json::array();
    for (int i = 0; i < M.rows; ++i) col.push_back(witt_to_json(gr_to_digits(R, M.at(i, j))));
    cols.push_back(col);
  }
  json out;
  out["n"] = M.rows;
  out["s"] = R.s();
  out["entries"] = cols;
  return out;
}

inline GrMat witt_matrix_from_json(const GaloisRing& R, const json& j) {
  int n = j.at("n");
  require(j.at("s").get<int>() == R.s(), errc::params_mismatch, "matrix truncation != ring truncation");
  GrMat M = gr_mat_zero(R, n);
  const auto& cols = j.at("entries");
  require(int(cols.size()) == n, errc::bad_input, "column count != n");
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) M.at(r, c) = gr_from_digits(R, witt_from_json(cols.at(c).at(r)));
  return M;
}

inline json lattice_to_json(const GaloisRing& R, const Lattice& L) {
  json j = witt_matrix_to_json(R, L.span);
  j["type"] = L.type;
  j["colength"] = L.colength;
  return j;
}

inline json ore_to_json(const OreRing& O, const typename OreRing::elem& e) {
  json j;
  j["s"] = O.s();
  j["coeffs"] = e;
  return j;
}

inline typename OreRing::elem ore_from_json(const OreRing& O, const json& j) {
  auto e = j.at("coeffs").get<std::vector<fq_t>>();
  require(int(e.size()) == O.s(), errc::params_mismatch, "coefficient count != s");
  return e;
}

inline json ore_matrix_to_json(const OreRing& O, const OreMat& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols; ++j) row.push_back(ore_to_json(O, M.at(i, j)));
    rows.push_back(row);
  }
  json out;
  out["n"] = M.rows;
  out["s"] = O.s();
  out["rows"] = rows;
  return out;
}

inline OreMat ore_matrix_from_json(const OreRing& O, const json& j) {
  int n = j.at("n");
  OreMat M(n, n, O.zero());
  const auto& rows = j.at("rows");
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < n; ++c) M.at(i, c) = ore_from_json(O, rows.at(i).at(c));
  return M;
}

inline json plin_to_json(const FqMatrix& B) {
  json rows = json::array();
  for (int i = 0; i < B.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < B.cols; ++j) row.push_back(B.at(i, j));
    rows.push_back(row);
  }
  json out;
  out["n"] = B.rows;
  out["rows"] = rows;
  return out;
}

inline FqMatrix plin_from_json(const json& j) {
  int n = j.at("n");
  FqMatrix B(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) B.at(r, c) = j.at("rows").at(r).at(c).get<fq_t>();
  return B;
}

inline json plattice_to_json(const PLattice& L) {
  json j;
  j["n"] = L.n;
  j["codim"] = L.codim;
  j["theta_closed"] = L.theta_closed;
  j["transversal_to_v"] = L.transversal_to_v;
  j["basis"] = L.basis;
  return j;
}

inline PLattice plattice_from_json(const FieldParams& F, const json& j) {
  PLattice L;
  L.n = j.at("n");
  L.basis = j.at("basis").get<std::vector<std::vector<fq_t>>>();
  L.basis = fq_row_space(F, L.basis, L.n * L.n);
  plattice_audit(F, L);
  return L;
}

inline json ws_model_to_json(const WsModel& M) {
  json j;
  json basis = json::array();
  for (const auto& b : M.basis) {
    std::string name;
    if (b.kind == WsModel::Basis::H) {
      name = "h_" + std::to_string(b.simple);
    } else if (b.kind == WsModel::Basis::X) {
      name = "X_(" + std::to_string(b.root_from) + "," + std::to_string(b.root_to) + ")^(" +
             std::to_string(b.depth) + ")";
    } else {
      name = "Y_(" + std::to_string(b.simple) + "," + std::to_string(b.depth) + ")";
    }
    basis.push_back(name);
  }
  j["basis"] = basis;
  json br = json::object();
  for (const auto& [key, terms] : M.bracket_table) {
    json lst = json::array();
    for (const auto& [c, k] : terms) lst.push_back(json::array({c, k}));
    br[std::to_string(key.first) + "," + std::to_string(key.second)] = lst;
  }
  j["bracket"] = br;
  json pm = json::object();
  for (int i = 0; i < M.dim(); ++i) {
    json lst = json::array();
    for (const auto& [c, k] : M.pmap_table[i]) lst.push_back(json::array({c, k}));
    pm[std::to_string(i)] = lst;
  }
  j["pmap"] = pm;
  json ws = json::object();
  for (int i = 0; i < M.dim(); ++i) ws[std::to_string(i)] = M.weights[i];
  j["weights"] = ws;
  return j;
}

inline json tangent_report_to_json(const TangentReport& r) {
  json j;
  j["dim"] = r.dim;
  j["theta_closed"] = r.theta_closed;
  j["basis"] = r.basis;
  return j;
}

}  // namespace wittkit
