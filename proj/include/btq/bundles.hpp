#ifndef BTQ_BUNDLES_HPP
#define BTQ_BUNDLES_HPP

#include <vector>

#include "btq/building.hpp"

namespace btq {

// h = u * diag(pi^{a_1},...,pi^{a_d}) * k with u in GL_d(A) (det in F_q^x)
// and k in GL_d(O) (integral entries, unit determinant).  Exponents are
// emitted sorted descending; the factorization is recomputed and compared
// against the input before returning.
struct BirkhoffWitness {
  MatA u;
  std::vector<int> a;
  MatK k;
};

BirkhoffWitness birkhoff(const MatK& h);

// sorted degree vector of the rank-d bundle on P^1 attached to a vertex,
// normalized so the smallest entry is 0
using SplittingType = std::vector<int>;

// Harder-Narasimhan polygon of a splitting type: p(i) = a_1 + ... + a_i and
// the gap function dp(i) = a_i - a_{i+1} = 2p(i) - p(i-1) - p(i+1)
struct Polygon {
  std::vector<long long> p;   // p[0..d], p[0] = 0
  std::vector<int> dp;        // dp[0..d-2] = gaps at i = 1..d-1

  bool convex() const {
    for (int g : dp)
      if (g < 0) return false;
    return true;
  }
};

Polygon polygon_of_type(const SplittingType& t);

// bundle data of a vertex: the dictionary goes through the dual/row lattice
// O^d * T^{-1}, whose Birkhoff exponents are the negated degrees
struct BundleData {
  SplittingType type;       // sorted descending, min = 0
  Polygon polygon;
  MatA frame;               // u-factor; column j spans the degree-sorted summand j
  std::vector<int> degrees; // unnormalized degrees per frame column, descending
};

BundleData bundle_data(const VertexKey& v);
SplittingType splitting_type(const VertexKey& v);
Polygon polygon(const VertexKey& v);

// dimension of H^0 for a split bundle with the given (unnormalized) degrees
long long h0_of_degrees(const std::vector<int>& degrees);

// v in BT^(alpha): some gap index i has dp(i) >= alpha
bool in_truncation(const VertexKey& v, int alpha);
bool in_truncation(const SplittingType& t, int alpha);
// D-indexed version: dp(i) >= alpha for every i in D (1-based indices)
bool in_truncation_for(const SplittingType& t, int alpha, const std::vector<int>& D);

// Harder-Narasimhan flag of the vertex bundle: subspaces of F^d at the
// strict-descent positions, largest slopes first; empty for semistable v.
// Each subspace is a reduced-echelon row matrix over F.
struct HNFlag {
  std::vector<MatK> steps;  // step j: rows spanning F_(i_j)

  bool empty() const { return steps.empty(); }
};

HNFlag hn_flag(const VertexKey& v);

// reduced row echelon form over the field F = F_q(t)
MatK rref_over_f(MatK m);

}  // namespace btq

#endif
