#include <algorithm>
#include <cctype>

#include "btq/mat.hpp"

namespace btq {

// ---------------------------------------------------------------------------
// polynomial parsing ("t^2+t+1", "2*t", ...)
// ---------------------------------------------------------------------------

PolyA parse_poly(int p, const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw ConfigError("empty polynomial");
  PolyA result = PolyA::zero(p);
  size_t i = 0;
  int sign = 1;
  while (i < s.size()) {
    if (s[i] == '+') {
      sign = 1;
      ++i;
      continue;
    }
    if (s[i] == '-') {
      sign = -1;
      ++i;
      continue;
    }
    long long coeff = 1;
    bool saw_digit = false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      if (!saw_digit) coeff = 0;
      saw_digit = true;
      coeff = coeff * 10 + (s[i] - '0');
      ++i;
    }
    if (i < s.size() && s[i] == '*') ++i;
    int power = 0;
    if (i < s.size() && s[i] == 't') {
      ++i;
      power = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
          throw ConfigError("bad exponent in polynomial: " + text);
        power = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
          power = power * 10 + (s[i] - '0');
          ++i;
        }
      }
    } else if (!saw_digit) {
      throw ConfigError("cannot parse polynomial: " + text);
    }
    std::vector<int> mono(power + 1, 0);
    mono[power] = static_cast<int>(((sign * coeff) % p + p) % p);
    result = result + PolyA(p, std::move(mono));
    sign = 1;
  }
  return result;
}

// ---------------------------------------------------------------------------
// pi-adic expansion
// ---------------------------------------------------------------------------

PiExpansion pi_expansion(const KElem& x, int n) {
  PiExpansion out;
  out.p = x.p();
  out.upto = n;
  if (x.is_zero()) return out;
  const int p = x.p();
  // Write num = t^dn * N(pi), den = t^dd * D(pi) with N, D polynomials in pi
  // having nonzero constant term; then x = pi^(dd-dn) * N/D and N/D is a unit
  // power series, expanded by long division.
  const PolyA& num = x.num();
  const PolyA& den = x.den();
  int dn = num.deg(), dd = den.deg();
  std::vector<int> N(dn + 1), D(dd + 1);
  for (int i = 0; i <= dn; ++i) N[i] = num.coeff(dn - i);
  for (int i = 0; i <= dd; ++i) D[i] = den.coeff(dd - i);
  int v = dd - dn;  // = valuation of x
  if (n < v) return out;
  int terms = n - v + 1;
  FqElem d0inv = FqElem(p, D[0]).inverse();
  std::vector<int> series(terms, 0);
  std::vector<int> rem = N;
  rem.resize(std::max(N.size(), static_cast<size_t>(terms) + D.size()), 0);
  for (int k = 0; k < terms; ++k) {
    int c = (FqElem(p, rem[k]) * d0inv).value();
    series[k] = c;
    if (c != 0)
      for (size_t j = 0; j < D.size(); ++j)
        rem[k + j] = static_cast<int>(((rem[k + j] - static_cast<long long>(c) * D[j]) % p + p) % p);
  }
  for (int k = 0; k < terms; ++k)
    if (series[k] != 0) out.coeff[v + k] = series[k];
  return out;
}

// ---------------------------------------------------------------------------
// matrices
// ---------------------------------------------------------------------------

MatK identity_k(int p, int d) {
  MatK m(d, d, KElem::zero(p));
  for (int i = 0; i < d; ++i) m.at(i, i) = KElem::one(p);
  return m;
}

MatK matk_from_a(const MatA& m) {
  MatK r(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r.at(i, j) = KElem(m.at(i, j));
  return r;
}

MatK matmul(const MatK& x, const MatK& y) {
  assert(x.cols == y.rows);
  const int p = x.rows ? x.at(0, 0).p() : 2;
  MatK r(x.rows, y.cols, KElem::zero(p));
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      if (x.at(i, k).is_zero()) continue;
      for (int j = 0; j < y.cols; ++j) {
        if (y.at(k, j).is_zero()) continue;
        r.at(i, j) = r.at(i, j) + x.at(i, k) * y.at(k, j);
      }
    }
  return r;
}

MatA matmul_a(const MatA& x, const MatA& y) {
  assert(x.cols == y.rows);
  const int p = x.rows ? x.at(0, 0).p() : 2;
  MatA r(x.rows, y.cols, PolyA::zero(p));
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      if (x.at(i, k).is_zero()) continue;
      for (int j = 0; j < y.cols; ++j) r.at(i, j) = r.at(i, j) + x.at(i, k) * y.at(k, j);
    }
  return r;
}

MatK mat_scale(const MatK& m, const KElem& s) {
  MatK r = m;
  for (auto& v : r.a) v = v * s;
  return r;
}

MatK mat_transpose(const MatK& m) {
  MatK r(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r.at(j, i) = m.at(i, j);
  return r;
}

KElem mat_det(const MatK& m) {
  assert(m.rows == m.cols);
  const int d = m.rows;
  if (d == 0) return KElem::one(2);
  const int p = m.at(0, 0).p();
  MatK w = m;
  KElem det = KElem::one(p);
  for (int k = 0; k < d; ++k) {
    int piv = -1;
    for (int i = k; i < d; ++i)
      if (!w.at(i, k).is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) return KElem::zero(p);
    if (piv != k) {
      for (int j = 0; j < d; ++j) std::swap(w.at(piv, j), w.at(k, j));
      det = -det;
    }
    det = det * w.at(k, k);
    KElem inv = w.at(k, k).inverse();
    for (int i = k + 1; i < d; ++i) {
      if (w.at(i, k).is_zero()) continue;
      KElem f = w.at(i, k) * inv;
      for (int j = k; j < d; ++j) w.at(i, j) = w.at(i, j) - f * w.at(k, j);
    }
  }
  return det;
}

PolyA mat_det_a(const MatA& m) {
  KElem dk = mat_det(matk_from_a(m));
  assert(dk.den().is_one());
  return dk.num();
}

MatK mat_inverse(const MatK& m) {
  assert(m.rows == m.cols);
  const int d = m.rows;
  const int p = d ? m.at(0, 0).p() : 2;
  MatK w = m;
  MatK inv = identity_k(p, d);
  for (int k = 0; k < d; ++k) {
    int piv = -1;
    for (int i = k; i < d; ++i)
      if (!w.at(i, k).is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) throw SingularMatrix();
    if (piv != k)
      for (int j = 0; j < d; ++j) {
        std::swap(w.at(piv, j), w.at(k, j));
        std::swap(inv.at(piv, j), inv.at(k, j));
      }
    KElem s = w.at(k, k).inverse();
    for (int j = 0; j < d; ++j) {
      w.at(k, j) = w.at(k, j) * s;
      inv.at(k, j) = inv.at(k, j) * s;
    }
    for (int i = 0; i < d; ++i) {
      if (i == k || w.at(i, k).is_zero()) continue;
      KElem f = w.at(i, k);
      for (int j = 0; j < d; ++j) {
        w.at(i, j) = w.at(i, j) - f * w.at(k, j);
        inv.at(i, j) = inv.at(i, j) - f * inv.at(k, j);
      }
    }
  }
  return inv;
}

MatA mat_inverse_unimodular(const MatA& m) {
  PolyA det = mat_det_a(m);
  if (!det.is_unit()) throw SingularMatrix("matrix is not unimodular over A");
  MatK inv = mat_inverse(matk_from_a(m));
  MatA r(m.rows, m.cols, PolyA::zero(m.at(0, 0).p()));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      assert(inv.at(i, j).den().is_one());
      r.at(i, j) = inv.at(i, j).num();
    }
  return r;
}

MatA mat_a_mod(const MatA& m, const PolyA& modulus) {
  MatA r = m;
  for (auto& v : r.a) v = v % modulus;
  return r;
}

bool mat_is_identity(const MatK& m) {
  if (m.rows != m.cols) return false;
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      if (i == j && !m.at(i, j).is_one()) return false;
      if (i != j && !m.at(i, j).is_zero()) return false;
    }
  return true;
}

std::string mat_str(const MatK& m) {
  std::string s = "[";
  for (int i = 0; i < m.rows; ++i) {
    s += "[";
    for (int j = 0; j < m.cols; ++j) {
      s += m.at(i, j).str();
      if (j + 1 < m.cols) s += ", ";
    }
    s += "]";
    if (i + 1 < m.rows) s += ", ";
  }
  return s + "]";
}

std::string mat_str_a(const MatA& m) {
  std::string s = "[";
  for (int i = 0; i < m.rows; ++i) {
    s += "[";
    for (int j = 0; j < m.cols; ++j) {
      s += m.at(i, j).str();
      if (j + 1 < m.cols) s += ", ";
    }
    s += "]";
    if (i + 1 < m.rows) s += ", ";
  }
  return s + "]";
}

}  // namespace btq
