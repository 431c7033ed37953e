#ifndef BTQ_SIMPLICIAL_HPP
#define BTQ_SIMPLICIAL_HPP

#include <map>
#include <string>
#include <vector>

#include "btq/intmat.hpp"

namespace btq {

// Generalized simplicial complex: a simplex is NOT determined by its vertex
// set (quotients of the building have multi-simplices), so faces are stored
// explicitly.  Vertices of an i-cell are i+1 distinct ids of 0-cells, kept
// sorted ascending; this ascending order is the reference orientation of the
// cell.  facets[k] is the (i-1)-cell obtained by dropping verts[k].
struct Cell {
  std::vector<int> verts;
  std::vector<int> facets;
};

struct Complex {
  std::vector<std::vector<Cell>> cells;  // cells[i] = i-dimensional cells

  int dim() const { return static_cast<int>(cells.size()) - 1; }
  int size(int i) const {
    if (i < 0 || i > dim()) return 0;
    return static_cast<int>(cells[i].size());
  }
  const Cell& cell(int i, int c) const { return cells[i][c]; }
  // id of the face of (i, c) spanned by the vertex subset `sub` (sorted,
  // subset of verts); composition of facet maps
  int face(int i, int c, const std::vector<int>& sub) const;
  // checks the simplicial-complex axioms; throws Error on violation
  void validate() const;
};

// helper for strict complexes, where a cell is identified by its vertex set
class StrictComplexBuilder {
 public:
  // declares a simplex with the given vertex set (and all its faces)
  void add(std::vector<int> verts);
  Complex build();

 private:
  std::map<std::vector<int>, int> index_;  // vertex set -> cell id
  std::vector<std::map<std::vector<int>, int>> per_dim_;
  std::vector<std::vector<std::vector<int>>> vert_sets_;
  int ensure(std::vector<int> verts);
};

// integer chain in dimension i w.r.t. reference orientations
struct Chain {
  int dim = 0;
  std::map<int, long long> coeff;  // cell id -> coefficient

  void add(int cell, long long v) {
    if (v == 0) return;
    auto it = coeff.find(cell);
    if (it == coeff.end()) {
      coeff[cell] = v;
    } else {
      it->second += v;
      if (it->second == 0) coeff.erase(it);
    }
  }
  bool is_zero() const { return coeff.empty(); }
  Chain operator-() const {
    Chain c = *this;
    for (auto& [k, v] : c.coeff) v = -v;
    return c;
  }
  Chain operator+(const Chain& o) const {
    Chain c = *this;
    for (auto& [k, v] : o.coeff) c.add(k, v);
    return c;
  }
  bool operator==(const Chain& o) const { return dim == o.dim && coeff == o.coeff; }
};

// sign with which the facet omitting position k (0-based, ascending vertex
// order) appears in the boundary: (-1)^(k+1), the s_v torsor rule
inline int boundary_sign(int k) { return (k % 2 == 0) ? -1 : 1; }

// per-dimension membership mask describing a subcomplex
using SubMask = std::vector<std::vector<char>>;

SubMask empty_mask(const Complex& c);
SubMask full_mask(const Complex& c);
// throws NotSubcomplex unless mask is closed under faces
void check_subcomplex(const Complex& c, const SubMask& mask);

// matrix of the boundary map C_i -> C_{i-1} in reference orientations
IntMatrix boundary_matrix(const Complex& c, int i);
// relative version: rows/cols run over cells NOT in `sub`
IntMatrix boundary_matrix_relative(const Complex& c, const SubMask& sub, int i,
                                   std::vector<int>* rel_cells_i = nullptr,
                                   std::vector<int>* rel_cells_im1 = nullptr);

Chain boundary_of_chain(const Complex& c, const Chain& ch);

// isomorphism invariants of a finitely generated abelian group
struct AbGroup {
  long long free_rank = 0;
  std::vector<Int> torsion;  // invariant factors > 1, ascending divisibility

  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  bool operator==(const AbGroup& o) const { return free_rank == o.free_rank && torsion == o.torsion; }
  std::string str() const;
};

AbGroup direct_sum(const AbGroup& a, const AbGroup& b);
AbGroup tensor_mod(const AbGroup& a, const Int& n);   // A (x) Z/n
AbGroup tor_mod(const AbGroup& a, const Int& n);      // Tor_1(A, Z/n)
AbGroup hom_mod(const AbGroup& a, const Int& n);      // Hom(A, Z/n)
AbGroup ext_mod(const AbGroup& a, const Int& n);      // Ext^1(A, Z/n)

// homology of ... -> Z^cols(B) --B--> Z^m --A--> ... at the middle spot, with
// coefficients Z (n = 0) or Z/n (n > 0)
AbGroup homology_of_maps(const IntMatrix& A, const IntMatrix& B, const Int& n);

AbGroup homology(const Complex& c, int i);                   // H_i(c, Z)
AbGroup homology_mod(const Complex& c, int i, const Int& n); // H_i(c, Z/n)
long long homology_rank_q(const Complex& c, int i);          // dim_Q H_i(c, Q)
AbGroup cohomology_mod(const Complex& c, int i, const Int& n);
AbGroup cohomology(const Complex& c, int i);

struct RelativeHomology {
  AbGroup invariants;
  std::vector<int> rel_cells;   // ids of relative i-cells (row order of cycles)
  IntMatrix cycles;             // columns = representing relative cycles
};
RelativeHomology relative_homology(const Complex& c, const SubMask& sub, int i);

// map of complexes with finite fibers; f_* on chains transports orientations
struct FiniteMap {
  const Complex* src = nullptr;
  const Complex* dst = nullptr;
  std::vector<std::vector<int>> map;  // map[i][cell] = image cell

  void validate() const;  // throws BadSimplicialMap
  // sign of the bijection V(cell) -> V(f(cell)) against reference orders
  int orientation_sign(int i, int cell) const;
};

Chain pushforward(const FiniteMap& f, const Chain& ch);

// report of the universal-coefficient verification in one degree
struct UctReport {
  bool ok = true;
  std::string detail;
};
// checks H_i(c, Z/n) = H_i(x)Z/n (+) Tor(H_{i-1}, Z/n) and
// H^i(c, Z/n) = Ext(H_{i-1}, Z/n) (+) Hom(H_i, Z/n) in every degree
UctReport universal_coeff_check(const Complex& c, const Int& n);
// rational version: rank H^i = rank H_i = rank H_i(Z)
UctReport universal_coeff_check_q(const Complex& c);

// boundary of the first barycentric subdivision of the standard (d-1)-simplex
// together with its oriented fundamental (d-2)-cycle
struct BarycentricSphere {
  Complex complex;
  Chain fundamental;                    // dimension d-2
  std::vector<std::vector<int>> label;  // vertex id -> subset of {1..d}
};
BarycentricSphere barycentric_sphere(int d);

}  // namespace btq

#endif
