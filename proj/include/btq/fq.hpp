#ifndef BTQ_FQ_HPP
#define BTQ_FQ_HPP

#include <cassert>
#include <vector>

#include "btq/errors.hpp"

namespace btq {

// Residue arithmetic mod a prime p. Elements are plain ints in [0, p);
// FqElem pairs a value with its modulus so mixed-field bugs trip asserts
// instead of corrupting data.
class FqElem {
 public:
  FqElem() : p_(2), v_(0) {}
  FqElem(int p, long long v) : p_(p) {
    assert(p >= 2);
    v_ = static_cast<int>(((v % p) + p) % p);
  }

  int p() const { return p_; }
  int value() const { return v_; }
  bool is_zero() const { return v_ == 0; }
  bool is_one() const { return v_ == 1; }

  FqElem operator+(const FqElem& o) const {
    assert(p_ == o.p_);
    return FqElem(p_, v_ + o.v_);
  }
  FqElem operator-(const FqElem& o) const {
    assert(p_ == o.p_);
    return FqElem(p_, v_ - o.v_);
  }
  FqElem operator*(const FqElem& o) const {
    assert(p_ == o.p_);
    return FqElem(p_, static_cast<long long>(v_) * o.v_);
  }
  FqElem operator-() const { return FqElem(p_, -v_); }

  FqElem inverse() const {
    if (v_ == 0) throw Error("division by zero in F_p");
    // extended Euclid
    int a = v_, b = p_, x0 = 1, x1 = 0;
    while (b != 0) {
      int q = a / b;
      int tmp = a - q * b;
      a = b;
      b = tmp;
      tmp = x0 - q * x1;
      x0 = x1;
      x1 = tmp;
    }
    assert(a == 1);
    return FqElem(p_, x0);
  }
  FqElem operator/(const FqElem& o) const { return *this * o.inverse(); }

  bool operator==(const FqElem& o) const { return p_ == o.p_ && v_ == o.v_; }
  bool operator!=(const FqElem& o) const { return !(*this == o); }

 private:
  int p_;
  int v_;
};

inline bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace btq

#endif
