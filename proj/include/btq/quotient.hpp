#ifndef BTQ_QUOTIENT_HPP
#define BTQ_QUOTIENT_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "btq/bundles.hpp"

namespace btq {

// Gamma = ker(GL_d(A) -> GL_d(A/(m))); m = 1 gives the full GL_d(A)
struct GroupSpec {
  int q = 2;
  int d = 2;
  PolyA modulus = PolyA::one(2);

  bool is_full_group() const { return modulus.is_unit(); }
  std::string str() const;
};

// elements of the finite ring A/(m) are reduced polynomials
struct ResidueRing {
  int q;
  PolyA modulus;

  bool is_trivial() const { return modulus.is_unit(); }
  long long size() const;
  std::vector<PolyA> elements() const;
  bool is_ring_unit(const PolyA& x) const { return gcd(x, modulus).is_one(); }
};

using ResMat = std::vector<PolyA>;  // d x d row-major, entries reduced mod m

std::string resmat_str(const ResMat& m, int d);
ResMat resmat_mul(const ResMat& x, const ResMat& y, int d, const ResidueRing& ring);
ResMat reduce_mat(const MatA& g, const ResidueRing& ring);

// lift of a residue matrix with F_q^x-liftable determinant to GL_d(A)
// (elementary generation over the finite ring, stable range 1)
MatA lift_to_gl(const ResMat& target, int d, const ResidueRing& ring);

// ---------------------------------------------------------------------------
// per splitting-type data: stabilizer shape of the standard vertex
// ---------------------------------------------------------------------------

// standard vertex of a lattice type b (sorted descending, sum in {0..d-1}):
// diag(pi^{b_1},...,pi^{b_d}).  Its GL_d(A)-stabilizer is
//   S_b = { s : deg s_il <= b_l - b_i, constant diagonal blocks invertible }.
struct TypeTable {
  std::vector<int> b;               // lattice exponents, descending
  SplittingType type;               // bundle splitting type of the vertex
  std::vector<std::vector<int>> bound;  // degree bound per entry, -1 = zero
  long long stab_order_full = 0;    // |S_b|
  long long stab_order_congruence = 0;
  std::vector<MatA> congruence_stab;       // {s in S_b : s = 1 mod m}
  std::vector<ResMat> sbar;                // images of S_b in GL_d(A/m)
  std::map<std::string, MatA> section;     // image string -> one preimage in S_b
  VertexKey standard_key;
};

// normalized lattice exponents of a lattice matrix: birkhoff exponents,
// sorted descending, shifted so the sum lies in {0..d-1}; also returns the
// u-factor matched to the sorted exponents
struct LatticeShape {
  std::vector<int> b;
  MatA u;
};
LatticeShape lattice_shape(const MatK& g);

// ---------------------------------------------------------------------------
// quotient complex
// ---------------------------------------------------------------------------

struct VertexOrbit {
  std::vector<int> b;          // lattice type
  SplittingType type;
  std::vector<int> gaps;       // dp of the splitting type
  std::string label;           // canonical coset label of u mod m over Sbar
  MatA u;                      // orbit representative lattice = u * diag(pi^b)
  VertexKey rep_key;
  long long stab_order = 0;
  int max_gap = 0;
};

struct CellOrbit {
  int dim = 0;
  std::vector<int> chain_orbit;       // vertex orbit per chain position
  std::vector<int> chain_sigma;       // sum of exponents mod d per position
  std::vector<Subspace> flag;         // descending flag at the owner lattice
  std::vector<std::string> chain_keys;
  long long stab_order = 0;
  // complex structure (vertex view): sorted orbit ids + facet cell per
  // omitted sorted position
  std::vector<int> verts;
  std::vector<int> facets;
  std::vector<int> position_of_vert;  // sorted position -> chain position
};

class QuotientComplex {
 public:
  GroupSpec group;
  int alpha = 0;         // requested truncation level
  int alpha_hi = 0;      // highest level whose relative cells are complete
  int active_bound = 0;  // vertices kept while enumerating: all gaps < bound

  std::vector<VertexOrbit> vertices;
  std::vector<std::vector<CellOrbit>> cells;  // dims 1..d-1 at index dim
  std::vector<int> orbit_of_complex_vertex;   // complex 0-cell -> orbit id
  std::vector<int> complex_vertex_of_orbit;   // orbit id -> 0-cell or -1

  // quotient as a generalized simplicial complex + mask of the
  // alpha-truncation subcomplex (cells whose vertices share an unstable
  // direction at level a)
  Complex complex;
  SubMask truncation_mask(int a) const;
  // relative cells = complement of the truncation subcomplex
  bool vertex_in_truncation(int orbit, int a) const;

  // stabilizer elements of a vertex orbit (u s u^-1)
  std::vector<MatA> vertex_stabilizer(int orbit) const;
  std::vector<MatA> cell_stabilizer(int dim, int cell) const;

  int orbit_of_lattice(const MatK& g) const;  // -1 when not enumerated
  // cell id of the simplex orbit of a lattice chain (top-first)
  int cell_of_chain(const std::vector<MatK>& chain_lattices, int* sign_out = nullptr) const;

  // core = all gaps < alpha
  bool vertex_is_core(int orbit) const { return vertices[orbit].max_gap < alpha; }

  const TypeTable& type_table(const std::vector<int>& b) const;
  std::string coset_label(const ResMat& ubar, const TypeTable& tt) const;
  std::string orbit_key(const std::vector<int>& b, const std::string& label) const;
  int orbit_index(const std::vector<int>& b, const std::string& label) const {
    auto it = orbit_index_.find(orbit_key(b, label));
    return it == orbit_index_.end() ? -1 : it->second;
  }

 private:
  friend QuotientComplex build_quotient(const GroupSpec&, int, int);
  mutable std::map<std::vector<int>, TypeTable> types_;
  std::map<std::string, int> orbit_index_;  // (type|label) -> vertex orbit
  // (owner orbit, flag string) -> cell id per dimension
  std::vector<std::map<std::pair<int, std::string>, int>> cell_by_flag_;
  ResidueRing ring_;

  TypeTable& ensure_type(const std::vector<int>& b) const;
};

// checks the BTQ_BUDGET_MS global time budget; throws BudgetExceeded
void check_global_budget();

// Builds the finite part of Gamma \ BT at level alpha: all simplex orbits
// whose vertices have every gap < alpha + 2(d-1) are enumerated; the emitted
// complex is pruned to relative cells at levels alpha..alpha_hi plus their
// faces.  alpha must exceed d-1.
QuotientComplex build_quotient(const GroupSpec& group, int alpha, int alpha_hi = 0);

// transporter {gamma in Gamma : gamma x = y} for vertex keys; the element
// list is enumerated from the stabilizer shape of the common type
std::vector<MatA> transporter(const VertexKey& x, const VertexKey& y, const GroupSpec& group);
std::vector<MatA> stabilizer(const BTSimplex& s, const GroupSpec& group);

// independent oracle: degree-bounded exhaustive search with per-column
// pruning, no stabilizer-shape theory
std::vector<MatA> transporter_bruteforce(const VertexKey& x, const VertexKey& y,
                                         const GroupSpec& group, int degree_bound);

// orientation character of a stabilizer acting on a simplex: the sign of
// the induced vertex permutations (always trivial for arithmetic groups)
template <class PermFn>
bool orientation_character_trivial(int nelems, int nverts, PermFn&& perm_of_elem) {
  for (int e = 0; e < nelems; ++e) {
    std::vector<int> perm = perm_of_elem(e);
    int inv = 0;
    for (int a = 0; a < nverts; ++a)
      for (int b = a + 1; b < nverts; ++b)
        if (perm[a] > perm[b]) ++inv;
    if (inv % 2 != 0) return false;
  }
  return true;
}

// natural map H_{d-1}(pair at alpha+1) -> H_{d-1}(pair at alpha) in the
// computed kernel bases, with an isomorphism certificate
struct AlphaTransition {
  IntMatrix matrix;
  bool isomorphism = false;
  long long rank_high = 0;
  long long rank_low = 0;
};
AlphaTransition alpha_transition(const QuotientComplex& q, int alpha);

}  // namespace btq

#endif
