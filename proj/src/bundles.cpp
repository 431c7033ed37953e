#include "btq/bundles.hpp"

#include <algorithm>
#include <numeric>

#include "btq/errors.hpp"

namespace btq {

namespace {

// left kernel vector of the leading matrix over F_q, empty when invertible
std::vector<int> left_kernel_vector(const std::vector<std::vector<int>>& lm, int q) {
  const int d = static_cast<int>(lm.size());
  // eliminate on the transpose: kernel of lm^T x = 0 gives left kernel of lm
  std::vector<std::vector<int>> m(d, std::vector<int>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m[i][j] = lm[j][i] % q;
  std::vector<int> pivot_of_col(d, -1);
  int rank = 0;
  for (int col = 0; col < d && rank < d; ++col) {
    int piv = -1;
    for (int r = rank; r < d; ++r)
      if (m[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[rank], m[piv]);
    int inv = FqElem(q, m[rank][col]).inverse().value();
    for (int c = 0; c < d; ++c) m[rank][c] = static_cast<int>((static_cast<long long>(m[rank][c]) * inv) % q);
    for (int r = 0; r < d; ++r) {
      if (r == rank || m[r][col] == 0) continue;
      int f = m[r][col];
      for (int c = 0; c < d; ++c)
        m[r][c] = static_cast<int>((((m[r][c] - static_cast<long long>(f) * m[rank][c]) % q) + q) % q);
    }
    pivot_of_col[col] = rank;
    ++rank;
  }
  if (rank == d) return {};
  // free column -> kernel vector
  int freec = -1;
  for (int c = 0; c < d; ++c)
    if (pivot_of_col[c] < 0) {
      freec = c;
      break;
    }
  std::vector<int> x(d, 0);
  x[freec] = 1;
  for (int c = 0; c < d; ++c) {
    int r = pivot_of_col[c];
    if (r < 0) continue;
    x[c] = ((-m[r][freec]) % q + q) % q;
  }
  return x;
}

}  // namespace

BirkhoffWitness birkhoff(const MatK& h) {
  assert(h.rows == h.cols);
  const int d = h.rows;
  const int p = h.at(0, 0).p();
  if (mat_det(h).is_zero()) throw SingularMatrix();

  // column scaling by O-units makes all denominators powers of t
  std::vector<KElem> col_unit(d, KElem::one(p));
  MatK work = h;
  for (int j = 0; j < d; ++j) {
    PolyA m = PolyA::one(p);
    for (int i = 0; i < d; ++i) m = lcm(m, work.at(i, j).den());
    KElem s(m, PolyA::tpow(p, m.deg()));  // O-unit
    col_unit[j] = s;
    for (int i = 0; i < d; ++i) work.at(i, j) = work.at(i, j) * s;
  }
  // now multiply by t^N so the entries live in A
  int N = 0;
  for (auto& e : work.a)
    if (!e.is_zero()) N = std::max(N, e.den().deg());
  MatA poly(d, d, PolyA::zero(p));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      KElem scaled = work.at(i, j) * KElem(PolyA::tpow(p, N));
      assert(scaled.den().is_one());
      poly.at(i, j) = scaled.num();
    }

  // weak-Popov row reduction: total row degree strictly decreases
  MatA u = MatA(d, d, PolyA::zero(p));
  for (int i = 0; i < d; ++i) u.at(i, i) = PolyA::one(p);
  auto row_degree = [&](int i) {
    int r = -1;
    for (int j = 0; j < d; ++j) r = std::max(r, poly.at(i, j).deg());
    return r;
  };
  std::vector<int> rdeg(d);
  for (int i = 0; i < d; ++i) {
    rdeg[i] = row_degree(i);
    if (rdeg[i] < 0) throw SingularMatrix();
  }
  long long guard = 0;
  for (int i = 0; i < d; ++i) guard += rdeg[i] + 1;
  guard = guard * d + 64;
  for (;;) {
    std::vector<std::vector<int>> lm(d, std::vector<int>(d, 0));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) lm[i][j] = poly.at(i, j).coeff(rdeg[i]);
    std::vector<int> c = left_kernel_vector(lm, p);
    if (c.empty()) break;
    if (--guard < 0) throw Error("birkhoff reduction failed to terminate");
    int i0 = -1;
    for (int i = 0; i < d; ++i)
      if (c[i] != 0 && (i0 < 0 || rdeg[i] > rdeg[i0])) i0 = i;
    // row_i0 <- sum_i c_i t^(r_i0 - r_i) row_i ; update u by the inverse op
    std::vector<PolyA> newrow(d, PolyA::zero(p));
    for (int i = 0; i < d; ++i) {
      if (c[i] == 0) continue;
      PolyA f = PolyA::constant(p, c[i]) * PolyA::tpow(p, rdeg[i0] - rdeg[i]);
      for (int j = 0; j < d; ++j) newrow[j] = newrow[j] + f * poly.at(i, j);
    }
    // E^-1: row i0 becomes (e_i0 - sum_{i != i0} c_i t^(...) e_i) / c_i0
    FqElem cinv = FqElem(p, c[i0]).inverse();
    // u <- u * E^-1 means columns of u change: col_i += u_col_i0 * (coef of e_i)
    // easier: accumulate as matrix product
    MatA einv(d, d, PolyA::zero(p));
    for (int i = 0; i < d; ++i) einv.at(i, i) = PolyA::one(p);
    einv.at(i0, i0) = PolyA::constant(p, cinv.value());
    for (int i = 0; i < d; ++i) {
      if (i == i0 || c[i] == 0) continue;
      einv.at(i0, i) = -(PolyA::constant(p, c[i]) * PolyA::tpow(p, rdeg[i0] - rdeg[i]) *
                         PolyA::constant(p, cinv.value()));
    }
    u = matmul_a(u, einv);
    for (int j = 0; j < d; ++j) poly.at(i0, j) = newrow[j];
    rdeg[i0] = row_degree(i0);
    if (rdeg[i0] < 0) throw SingularMatrix();
  }

  // assemble: h = u * diag(pi^(N - rdeg_i)) * (t^-rdeg_i poly_ij) * diag(1/col_unit)
  BirkhoffWitness out;
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    int ax = N - rdeg[x], ay = N - rdeg[y];
    if (ax != ay) return ax > ay;
    return x < y;
  });
  out.a.resize(d);
  out.u = MatA(d, d, PolyA::zero(p));
  out.k = MatK(d, d, KElem::zero(p));
  for (int l = 0; l < d; ++l) {
    int src = order[l];
    out.a[l] = N - rdeg[src];
    for (int i = 0; i < d; ++i) out.u.at(i, l) = u.at(i, src);
    for (int j = 0; j < d; ++j)
      out.k.at(l, j) = KElem(poly.at(src, j), PolyA::tpow(p, rdeg[src])) * col_unit[j].inverse();
  }

  // certificates
  PolyA du = mat_det_a(out.u);
  if (!du.is_unit()) throw Error("birkhoff: u-factor not in GL_d(A)");
  KElem dk = mat_det(out.k);
  if (dk.is_zero() || dk.valuation() != 0) throw Error("birkhoff: k-factor not in GL_d(O)");
  for (auto& e : out.k.a)
    if (!e.is_integral()) throw Error("birkhoff: k-factor not integral");
  MatK check = matk_from_a(out.u);
  MatK diag(d, d, KElem::zero(p));
  for (int i = 0; i < d; ++i) diag.at(i, i) = KElem::pi_pow(p, out.a[i]);
  check = matmul(matmul(check, diag), out.k);
  if (!(check == h)) throw Error("birkhoff: reconstruction mismatch");
  return out;
}

Polygon polygon_of_type(const SplittingType& t) {
  Polygon poly;
  const int d = static_cast<int>(t.size());
  poly.p.assign(d + 1, 0);
  for (int i = 0; i < d; ++i) poly.p[i + 1] = poly.p[i] + t[i];
  for (int i = 1; i < d; ++i) poly.dp.push_back(t[i - 1] - t[i]);
  return poly;
}

BundleData bundle_data(const VertexKey& v) {
  const int d = v.d();
  // row lattice O^d T^{-1} carries the bundle; its Birkhoff exponents are
  // the negated summand degrees
  MatK dual = mat_transpose(mat_inverse(v.T));
  BirkhoffWitness bw = birkhoff(dual);
  BundleData out;
  out.degrees.resize(d);
  out.frame = MatA(d, d, PolyA::zero(v.T.at(0, 0).p()));
  for (int j = 0; j < d; ++j) {
    int src = d - 1 - j;  // bw.a descending => degrees -bw.a ascending; flip
    out.degrees[j] = -bw.a[src];
    for (int i = 0; i < d; ++i) out.frame.at(i, j) = bw.u.at(i, src);
  }
  int minimum = out.degrees[d - 1];
  for (int j = 0; j < d; ++j) out.type.push_back(out.degrees[j] - minimum);
  out.polygon = polygon_of_type(out.type);
  return out;
}

SplittingType splitting_type(const VertexKey& v) { return bundle_data(v).type; }
Polygon polygon(const VertexKey& v) { return bundle_data(v).polygon; }

long long h0_of_degrees(const std::vector<int>& degrees) {
  long long total = 0;
  for (int a : degrees) total += std::max(0, a + 1);
  return total;
}

bool in_truncation(const SplittingType& t, int alpha) {
  Polygon poly = polygon_of_type(t);
  for (int g : poly.dp)
    if (g >= alpha) return true;
  return false;
}

bool in_truncation(const VertexKey& v, int alpha) { return in_truncation(splitting_type(v), alpha); }

bool in_truncation_for(const SplittingType& t, int alpha, const std::vector<int>& D) {
  Polygon poly = polygon_of_type(t);
  for (int i : D) {
    assert(i >= 1 && i <= static_cast<int>(poly.dp.size()));
    if (poly.dp[i - 1] < alpha) return false;
  }
  return true;  // vacuous for empty D
}

MatK rref_over_f(MatK m) {
  const int rows = m.rows, cols = m.cols;
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (!m.at(r, col).is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    for (int c = 0; c < cols; ++c) std::swap(m.at(rank, c), m.at(piv, c));
    KElem inv = m.at(rank, col).inverse();
    for (int c = 0; c < cols; ++c) m.at(rank, c) = m.at(rank, c) * inv;
    for (int r = 0; r < rows; ++r) {
      if (r == rank || m.at(r, col).is_zero()) continue;
      KElem f = m.at(r, col);
      for (int c = 0; c < cols; ++c) m.at(r, c) = m.at(r, c) - f * m.at(rank, c);
    }
    ++rank;
  }
  m.rows = rank;
  m.a.resize(static_cast<size_t>(rank) * cols);
  return m;
}

HNFlag hn_flag(const VertexKey& v) {
  BundleData bd = bundle_data(v);
  const int d = v.d();
  const int p = v.T.at(0, 0).p();
  HNFlag flag;
  for (int i = 1; i < d; ++i) {
    if (bd.degrees[i - 1] <= bd.degrees[i]) continue;  // not a strict descent
    MatK rows(i, d, KElem::zero(p));
    for (int r = 0; r < i; ++r)
      for (int c = 0; c < d; ++c) rows.at(r, c) = KElem(bd.frame.at(c, r));
    flag.steps.push_back(rref_over_f(rows));
  }
  return flag;
}

}  // namespace btq
