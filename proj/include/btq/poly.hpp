#ifndef BTQ_POLY_HPP
#define BTQ_POLY_HPP

#include <cassert>
#include <string>
#include <vector>

#include "btq/fq.hpp"

namespace btq {

// Elements of A = F_p[t].  Coefficients are stored lowest degree first and
// kept normalized (no trailing zeros); deg(0) is reported as -1.
class PolyA {
 public:
  PolyA() : p_(2) {}
  explicit PolyA(int p) : p_(p) {}
  PolyA(int p, std::vector<int> coeffs) : p_(p), c_(std::move(coeffs)) {
    for (auto& x : c_) x = ((x % p) + p) % p;
    normalize();
  }
  static PolyA constant(int p, long long v) { return PolyA(p, {static_cast<int>(((v % p) + p) % p)}); }
  static PolyA zero(int p) { return PolyA(p); }
  static PolyA one(int p) { return constant(p, 1); }
  static PolyA t(int p) { return PolyA(p, {0, 1}); }
  // t^n
  static PolyA tpow(int p, int n) {
    assert(n >= 0);
    std::vector<int> c(n + 1, 0);
    c[n] = 1;
    return PolyA(p, std::move(c));
  }

  int p() const { return p_; }
  int deg() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
  bool is_unit() const { return c_.size() == 1; }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }

  int coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(c_.size())) return 0;
    return c_[k];
  }
  int lead() const { return c_.empty() ? 0 : c_.back(); }
  const std::vector<int>& coeffs() const { return c_; }

  PolyA operator+(const PolyA& o) const {
    assert(p_ == o.p_);
    std::vector<int> r(std::max(c_.size(), o.c_.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) r[i] = (coeff(i) + o.coeff(i)) % p_;
    return PolyA(p_, std::move(r));
  }
  PolyA operator-(const PolyA& o) const {
    assert(p_ == o.p_);
    std::vector<int> r(std::max(c_.size(), o.c_.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) r[i] = ((coeff(i) - o.coeff(i)) % p_ + p_) % p_;
    return PolyA(p_, std::move(r));
  }
  PolyA operator-() const {
    std::vector<int> r(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = (p_ - c_[i]) % p_;
    return PolyA(p_, std::move(r));
  }
  PolyA operator*(const PolyA& o) const {
    assert(p_ == o.p_);
    if (is_zero() || o.is_zero()) return zero(p_);
    std::vector<int> r(c_.size() + o.c_.size() - 1, 0);
    for (size_t i = 0; i < c_.size(); ++i)
      for (size_t j = 0; j < o.c_.size(); ++j)
        r[i + j] = static_cast<int>((r[i + j] + static_cast<long long>(c_[i]) * o.c_[j]) % p_);
    return PolyA(p_, std::move(r));
  }
  PolyA operator*(const FqElem& s) const {
    std::vector<int> r(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) r[i] = static_cast<int>((static_cast<long long>(c_[i]) * s.value()) % p_);
    return PolyA(p_, std::move(r));
  }

  // euclidean division, divisor nonzero
  void divmod(const PolyA& b, PolyA& q, PolyA& r) const {
    assert(p_ == b.p_);
    if (b.is_zero()) throw Error("polynomial division by zero");
    q = zero(p_);
    r = *this;
    FqElem linv = FqElem(p_, b.lead()).inverse();
    std::vector<int> qc(std::max(0, deg() - b.deg() + 1), 0);
    while (!r.is_zero() && r.deg() >= b.deg()) {
      int shift = r.deg() - b.deg();
      int factor = (FqElem(p_, r.lead()) * linv).value();
      qc[shift] = factor;
      // r -= factor * t^shift * b
      std::vector<int> rc = r.c_;
      for (int i = 0; i <= b.deg(); ++i)
        rc[i + shift] = static_cast<int>(((rc[i + shift] - static_cast<long long>(factor) * b.coeff(i)) % p_ + p_) % p_);
      r = PolyA(p_, std::move(rc));
    }
    q = PolyA(p_, std::move(qc));
  }
  PolyA operator/(const PolyA& b) const {
    PolyA q(p_), r(p_);
    divmod(b, q, r);
    return q;
  }
  PolyA operator%(const PolyA& b) const {
    PolyA q(p_), r(p_);
    divmod(b, q, r);
    return r;
  }

  PolyA monic() const {
    if (is_zero()) return *this;
    return *this * FqElem(p_, lead()).inverse();
  }

  bool operator==(const PolyA& o) const { return p_ == o.p_ && c_ == o.c_; }
  bool operator!=(const PolyA& o) const { return !(*this == o); }

  // total ordering (degree, then coefficients high to low); used for canonical keys
  bool operator<(const PolyA& o) const {
    if (deg() != o.deg()) return deg() < o.deg();
    for (int i = deg(); i >= 0; --i)
      if (coeff(i) != o.coeff(i)) return coeff(i) < o.coeff(i);
    return false;
  }

  std::string str() const {
    if (is_zero()) return "0";
    std::string s;
    for (int i = deg(); i >= 0; --i) {
      if (coeff(i) == 0) continue;
      if (!s.empty()) s += "+";
      if (i == 0 || coeff(i) != 1) s += std::to_string(coeff(i));
      if (i >= 1) {
        if (coeff(i) != 1) s += "*";
        s += "t";
        if (i > 1) s += "^" + std::to_string(i);
      }
    }
    return s;
  }

 private:
  void normalize() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  int p_;
  std::vector<int> c_;
};

inline PolyA gcd(PolyA a, PolyA b) {
  while (!b.is_zero()) {
    PolyA r = a % b;
    a = b;
    b = r;
  }
  return a.monic();
}

inline PolyA lcm(const PolyA& a, const PolyA& b) {
  if (a.is_zero() || b.is_zero()) return PolyA::zero(a.p());
  return ((a * b) / gcd(a, b)).monic();
}

// parse expressions like "t^2+t+1", "2*t+1", "1", "t"
PolyA parse_poly(int p, const std::string& text);

}  // namespace btq

#endif
