#ifndef BTQ_SYMBOLS_HPP
#define BTQ_SYMBOLS_HPP

#include "btq/quotient.hpp"

namespace btq {

// relative pair data at one truncation level: mask, top relative homology
// (free, computed once) and cell-to-row lookup
struct RelativePair {
  const QuotientComplex* q = nullptr;
  int alpha = 0;
  SubMask mask;
  RelativeHomology top;            // dimension d-1
  std::map<int, int> row_of_cell;  // relative (d-1)-cell -> row in `top`

  long long rank() const { return top.invariants.free_rank; }
};

RelativePair make_relative_pair(const QuotientComplex& q, int alpha);

// pushforward of the apartment fundamental class into the relative chain
// group, computed over a certified finite window
struct SymbolChain {
  Chain chain;                  // dimension d-1, over quotient cells
  long long chambers_hit = 0;   // chambers contributing to kept cells
  int window_spread = 0;        // enumeration box edge that certified
};

// basis rows over F (rows of a d x d matrix); the zero chain is returned for
// degenerate tuples
SymbolChain apartment_core_chain(const MatK& basis_rows, const QuotientComplex& q);

// coordinates of the class of a symbol chain in the kernel basis of the pair
struct RelativeClass {
  std::vector<Int> coords;
  int alpha = 0;
};
RelativeClass modular_symbol(const MatK& basis_rows, const QuotientComplex& q,
                             const RelativePair& pair);
RelativeClass class_of_chain(const SymbolChain& s, const RelativePair& pair);

// ---------------------------------------------------------------------------
// the MS lattice
// ---------------------------------------------------------------------------

struct StreamOptions {
  int max_level = 3;            // maximal entry degree of basis matrices
  bool unimodular_only = false; // restrict to det in F_q^x
  long long per_level_cap = 0;  // 0 = exhaust the level (deduplicated)
  unsigned seed = 1;            // sampling seed when a cap is in force
};

struct MSLatticeResult {
  IntMatrix generators;      // columns: accumulated symbol coordinates
  std::vector<Int> divisors; // SNF divisors of the generator matrix
  long long rank = 0;
  bool stabilized = false;   // two consecutive quiet levels
  int levels_used = 0;
  long long symbols_computed = 0;
  std::string provenance;
};

MSLatticeResult ms_lattice(const QuotientComplex& q, const RelativePair& pair,
                           const StreamOptions& opts);

// cokernel of MS inside H_{d-1}(pair)
struct IndexReport {
  bool rank_ok = false;
  bool finite = false;
  Int index = 0;     // product of cokernel invariants when finite
  Int exponent = 0;  // largest invariant factor (0 when infinite)
  std::vector<Int> divisors;
  long long rank_lattice = 0;
  long long rank_homology = 0;
};
IndexReport index_and_exponent(const MSLatticeResult& lattice, const RelativePair& pair);

// e(d) = (d-2)(1 + (d-1)(d-2)/2) and N(d) = prod_{i=1..d} (q0^i - 1)
struct BoundConstants {
  long long e = 0;
  Int big_n = 1;
};
BoundConstants bound_constants(int d, int q0);

}  // namespace btq

#endif
