#ifndef BTQ_KELEM_HPP
#define BTQ_KELEM_HPP

#include <limits>
#include <map>
#include <string>

#include "btq/poly.hpp"

namespace btq {

// Elements of F = F_q(t), viewed inside the local field K = F_q((1/t)) at
// infinity.  The uniformizer is pi = 1/t and v(x) = deg(den) - deg(num).
// Values are stored as reduced fractions with a monic denominator, so all
// arithmetic is exact and closed under inversion.
class KElem {
 public:
  KElem() : num_(PolyA::zero(2)), den_(PolyA::one(2)) {}
  explicit KElem(const PolyA& num) : num_(num), den_(PolyA::one(num.p())) {}
  KElem(const PolyA& num, const PolyA& den) : num_(num), den_(den) { reduce(); }
  static KElem zero(int p) { return KElem(PolyA::zero(p)); }
  static KElem one(int p) { return KElem(PolyA::one(p)); }
  static KElem t(int p) { return KElem(PolyA::t(p)); }
  // pi^n = t^{-n} for n of either sign
  static KElem pi_pow(int p, int n) {
    if (n >= 0) return KElem(PolyA::one(p), PolyA::tpow(p, n));
    return KElem(PolyA::tpow(p, -n));
  }

  int p() const { return num_.p(); }
  const PolyA& num() const { return num_; }
  const PolyA& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }

  static constexpr int kInfinity = std::numeric_limits<int>::max();

  // v_infinity; +infinity for 0
  int valuation() const {
    if (is_zero()) return kInfinity;
    return den_.deg() - num_.deg();
  }
  bool is_integral() const { return is_zero() || valuation() >= 0; }
  bool is_o_unit() const { return !is_zero() && valuation() == 0; }

  KElem operator+(const KElem& o) const { return KElem(num_ * o.den_ + o.num_ * den_, den_ * o.den_); }
  KElem operator-(const KElem& o) const { return KElem(num_ * o.den_ - o.num_ * den_, den_ * o.den_); }
  KElem operator*(const KElem& o) const { return KElem(num_ * o.num_, den_ * o.den_); }
  KElem operator-() const { return KElem(-num_, den_); }
  KElem inverse() const {
    if (is_zero()) throw Error("division by zero in K");
    return KElem(den_, num_);
  }
  KElem operator/(const KElem& o) const { return *this * o.inverse(); }

  bool operator==(const KElem& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const KElem& o) const { return !(*this == o); }

  std::string str() const {
    if (den_.is_one()) return num_.str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
  }

 private:
  void reduce() {
    if (den_.is_zero()) throw Error("zero denominator");
    if (num_.is_zero()) {
      den_ = PolyA::one(num_.p());
      return;
    }
    PolyA g = gcd(num_, den_);
    num_ = num_ / g;
    den_ = den_ / g;
    FqElem linv = FqElem(den_.p(), den_.lead()).inverse();
    num_ = num_ * linv;
    den_ = den_ * linv;
  }

  PolyA num_;
  PolyA den_;
};

// Coefficients of the Laurent expansion x = sum_k c_k pi^k, emitted for all
// k <= n.  Exact: the lowest nonzero index equals v(x).
struct PiExpansion {
  int p = 2;
  int upto = 0;                  // highest exponent emitted
  std::map<int, int> coeff;      // exponent -> nonzero coefficient

  int at(int k) const {
    auto it = coeff.find(k);
    return it == coeff.end() ? 0 : it->second;
  }
  // lowest nonzero exponent, or KElem::kInfinity
  int lowest() const { return coeff.empty() ? KElem::kInfinity : coeff.begin()->first; }
  // reassemble the emitted part as an exact element of F
  KElem truncation() const {
    KElem s = KElem::zero(p);
    for (auto& [k, c] : coeff) s = s + KElem(PolyA::constant(p, c)) * KElem::pi_pow(p, k);
    return s;
  }
};

PiExpansion pi_expansion(const KElem& x, int n);

}  // namespace btq

#endif
