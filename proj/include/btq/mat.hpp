#ifndef BTQ_MAT_HPP
#define BTQ_MAT_HPP

#include <cassert>
#include <functional>
#include <vector>

#include "btq/kelem.hpp"

namespace btq {

template <class T>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<T> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
  Mat(int r, int c, const T& fill) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

  T& at(int i, int j) {
    assert(i >= 0 && i < rows && j >= 0 && j < cols);
    return a[static_cast<size_t>(i) * cols + j];
  }
  const T& at(int i, int j) const {
    assert(i >= 0 && i < rows && j >= 0 && j < cols);
    return a[static_cast<size_t>(i) * cols + j];
  }

  bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

using MatK = Mat<KElem>;
using MatA = Mat<PolyA>;

MatK identity_k(int p, int d);
MatK matk_from_a(const MatA& m);
MatK matmul(const MatK& x, const MatK& y);
MatA matmul_a(const MatA& x, const MatA& y);
MatK mat_scale(const MatK& m, const KElem& s);
MatK mat_transpose(const MatK& m);

// exact determinant / inverse by fraction-free Gaussian elimination over K
KElem mat_det(const MatK& m);
PolyA mat_det_a(const MatA& m);
// throws SingularMatrix when det = 0
MatK mat_inverse(const MatK& m);
// inverse of a matrix over A with det in F_q^x (adjugate route, stays in A)
MatA mat_inverse_unimodular(const MatA& m);

MatA mat_a_mod(const MatA& m, const PolyA& modulus);
bool mat_is_identity(const MatK& m);

std::string mat_str(const MatK& m);
std::string mat_str_a(const MatA& m);

}  // namespace btq

#endif
