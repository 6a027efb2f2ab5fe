#pragma once

// Generic commutative-ring contexts. A ring context carries the parameters
// and exposes: elem, zero(), one(), add(), mul(), neg(), equal(), sample().
// FieldParams satisfies the same interface; DualRing and PolyRing below let
// Witt arithmetic run over F_q[eps]/(eps^2) and F_q[t].

#include <utility>
#include <vector>

#include "common.hpp"
#include "gf.hpp"

namespace wittkit {

template <class Ctx>
void check_ring_axioms(const Ctx& R, Rng rng, int trials) {
  for (int i = 0; i < trials; ++i) {
    auto a = R.sample(rng), b = R.sample(rng), c = R.sample(rng);
    auto ab = R.add(a, b);
    require(R.equal(ab, R.add(b, a)), errc::bad_input, "ring axiom: commutative addition");
    require(R.equal(R.add(ab, c), R.add(a, R.add(b, c))), errc::bad_input, "ring axiom: associative addition");
    require(R.equal(R.add(a, R.neg(a)), R.zero()), errc::bad_input, "ring axiom: additive inverse");
    require(R.equal(R.mul(a, b), R.mul(b, a)), errc::bad_input, "ring axiom: commutative multiplication");
    require(R.equal(R.mul(R.mul(a, b), c), R.mul(a, R.mul(b, c))), errc::bad_input,
            "ring axiom: associative multiplication");
    require(R.equal(R.mul(a, R.add(b, c)), R.add(R.mul(a, b), R.mul(a, c))), errc::bad_input,
            "ring axiom: distributivity");
    require(R.equal(R.mul(a, R.one()), a), errc::bad_input, "ring axiom: unit");
  }
}

// Dual numbers base[eps]/(eps^2); tangent computations run Witt arithmetic here.
template <class Base>
class DualRing {
 public:
  struct elem {
    typename Base::elem a, b;  // a + b*eps
    bool operator==(const elem& o) const = default;
  };

  explicit DualRing(Base base, bool spot_check = true) : base_(std::move(base)) {
    if (spot_check) check_ring_axioms(*this, Rng(0xD0A1), 100);
  }

  const Base& base() const { return base_; }

  elem zero() const { return {base_.zero(), base_.zero()}; }
  elem one() const { return {base_.one(), base_.zero()}; }
  elem lift(typename Base::elem x) const { return {x, base_.zero()}; }
  elem eps(typename Base::elem x) const { return {base_.zero(), x}; }

  elem add(const elem& x, const elem& y) const { return {base_.add(x.a, y.a), base_.add(x.b, y.b)}; }
  elem neg(const elem& x) const { return {base_.neg(x.a), base_.neg(x.b)}; }
  elem mul(const elem& x, const elem& y) const {
    return {base_.mul(x.a, y.a), base_.add(base_.mul(x.a, y.b), base_.mul(x.b, y.a))};
  }
  bool equal(const elem& x, const elem& y) const { return base_.equal(x.a, y.a) && base_.equal(x.b, y.b); }
  elem sample(Rng& rng) const { return {base_.sample(rng), base_.sample(rng)}; }

 private:
  Base base_;
};

// Univariate polynomials base[t], dense little-endian coefficients.
template <class Base>
class PolyRing {
 public:
  using elem = std::vector<typename Base::elem>;  // normalized: no trailing zeros

  explicit PolyRing(Base base, bool spot_check = true) : base_(std::move(base)) {
    if (spot_check) check_ring_axioms(*this, Rng(0x9017), 100);
  }

  const Base& base() const { return base_; }

  elem zero() const { return {}; }
  elem one() const { return {base_.one()}; }
  elem constant(typename Base::elem c) const {
    elem e{c};
    trim(e);
    return e;
  }
  elem variable() const { return {base_.zero(), base_.one()}; }

  elem add(const elem& x, const elem& y) const {
    elem r(std::max(x.size(), y.size()), base_.zero());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i];
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = base_.add(r[i], y[i]);
    trim(r);
    return r;
  }
  elem neg(const elem& x) const {
    elem r = x;
    for (auto& c : r) c = base_.neg(c);
    return r;
  }
  elem mul(const elem& x, const elem& y) const {
    if (x.empty() || y.empty()) return {};
    elem r(x.size() + y.size() - 1, base_.zero());
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j) r[i + j] = base_.add(r[i + j], base_.mul(x[i], y[j]));
    trim(r);
    return r;
  }
  bool equal(const elem& x, const elem& y) const {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!base_.equal(x[i], y[i])) return false;
    return true;
  }
  elem sample(Rng& rng) const {
    elem r;
    int deg = int(rng.uniform(4));
    for (int i = 0; i <= deg; ++i) r.push_back(base_.sample(rng));
    trim(r);
    return r;
  }

  typename Base::elem evaluate(const elem& x, typename Base::elem t) const {
    typename Base::elem acc = base_.zero();
    for (std::size_t i = x.size(); i-- > 0;) acc = base_.add(base_.mul(acc, t), x[i]);
    return acc;
  }

 private:
  void trim(elem& e) const {
    while (!e.empty() && base_.equal(e.back(), base_.zero())) e.pop_back();
  }
  Base base_;
};

}  // namespace wittkit
