#ifndef BTQ_BUILDING_HPP
#define BTQ_BUILDING_HPP

#include <string>
#include <vector>

#include "btq/simplicial.hpp"

namespace btq {

// Vertex of the Bruhat-Tits building of PGL_d over K = F_q((1/t)): the
// homothety class of the O-lattice spanned by the columns of g, identified
// with the coset g GL_d(O) mod K^x.  The canonical representative is lower
// triangular with exact pi-power diagonal, off-diagonal entries reduced to
// finite pi-tails with exponents < a_i (row i), and sum(a_i) in {0..d-1}.
struct VertexKey {
  std::vector<int> a;  // diagonal pi-exponents of the canonical form
  MatK T;              // the canonical matrix itself
  std::string id;      // canonical string "a1,..,ad|<offdiag tails>"

  int d() const { return static_cast<int>(a.size()); }
  bool operator==(const VertexKey& o) const { return id == o.id; }
  bool operator<(const VertexKey& o) const { return id < o.id; }
};

// canonical form of the class of g; throws SingularMatrix
VertexKey vertex_key(const MatK& g);

// Chain of lattice classes L_0 > L_1 > ... > L_i > pi L_0 describing an
// i-simplex, stored top-first; entry j is the class of L_j.
struct BTSimplex {
  std::vector<VertexKey> chain;

  int dim() const { return static_cast<int>(chain.size()) - 1; }
};

// --- local structure ---------------------------------------------------

// subspaces of F_q^d as sorted row-reduced echelon basis rows
struct Subspace {
  int q = 2;
  int d = 1;
  std::vector<std::vector<int>> rows;  // RREF over F_q, row-major

  int dim() const { return static_cast<int>(rows.size()); }
  bool operator==(const Subspace& o) const { return rows == o.rows; }
  bool operator<(const Subspace& o) const { return rows < o.rows; }
  std::string str() const;
};

Subspace subspace_from_spanning(int q, int d, std::vector<std::vector<int>> gens);
// all proper nonzero subspaces, dimension 1..d-1
std::vector<Subspace> enumerate_subspaces(int q, int d);
// descending flags W_1 > W_2 > ... > W_len of proper nonzero subspaces
std::vector<std::vector<Subspace>> enumerate_flags(int q, int d, int len);
bool subspace_contains(const Subspace& big, const Subspace& small);
// image of a subspace under an invertible matrix over F_q (columns act on
// column vectors)
Subspace subspace_image(const Subspace& w, const std::vector<std::vector<int>>& mat);

// lattice of the sublattice T*(lift(W) + pi O^d) attached to a subspace of
// the residue space L/piL in the column coordinates of T
MatK sublattice_matrix(const MatK& T, const Subspace& w);

// neighbours of v: classes of lattices pi L < L' < L
std::vector<VertexKey> neighbors(const VertexKey& v);
// all i-simplices through v, each rotated so that v is the top vertex
std::vector<BTSimplex> flag_simplices(const VertexKey& v, int i);

// --- apartments ----------------------------------------------------------

// coordinates n in Z^d mod Z(1,..,1), normalized so min(n) = 0
using ApartmentCoord = std::vector<int>;
ApartmentCoord normalize_coord(ApartmentCoord n);

// lattice O pi^{n_1} v_1 + ... for basis rows v_i (DegenerateBasis if the
// rows are dependent)
VertexKey apartment_vertex(const MatK& basis_rows, const ApartmentCoord& n);

// e(sigma, x) for an apartment simplex given by the coordinate lifts of its
// vertices (any set of lifts of the distinct classes)
std::vector<int> e_vector(const std::vector<ApartmentCoord>& lifts, int which);

// A chamber of the apartment: base coordinate n plus the order in which the
// d unit vectors are added.  Vertices are n, n+e_{w(0)}, n+e_{w(0)}+e_{w(1)}, ...
struct ApartmentChamber {
  ApartmentCoord base;
  std::vector<int> word;  // permutation of 0..d-1

  std::vector<ApartmentCoord> vertex_coords() const;
  // ordering [sigma]: position i holds the vertex x with e(sigma, x) = e_i
  std::vector<ApartmentCoord> fundamental_order() const;
};

// finite combinatorial window of an apartment: the full subcomplex on the
// coordinates n (normalized) with max(n) <= width, plus the fundamental
// (d-1)-chain beta assigning +1 in the orientation [sigma] to every chamber
struct ApartmentWindow {
  int d = 2;
  int width = 0;
  Complex complex;
  std::vector<ApartmentCoord> coord_of_vertex;
  std::map<std::vector<int>, int> vertex_of_coord;
  Chain beta;                       // dimension d-1
  std::vector<char> boundary_cell;  // per (d-2)-cell: touches the window rim?
};

ApartmentWindow beta_window(int d, int width);

}  // namespace btq

#endif
