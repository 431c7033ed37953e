#ifndef BTQ_INTMAT_HPP
#define BTQ_INTMAT_HPP

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "btq/mat.hpp"

namespace btq {

using Int = mpz_class;
using IntMatrix = Mat<Int>;

IntMatrix int_identity(int d);
IntMatrix int_matmul(const IntMatrix& x, const IntMatrix& y);
bool is_unimodular(const IntMatrix& m);
Int int_det(IntMatrix m);

// U * M * V = diag(divisors), d_1 | d_2 | ... ; divisors positive, rank =
// number of nonzero divisors.  Transforms are tracked only on request.
struct SNFResult {
  std::vector<Int> divisors;  // length min(rows, cols), trailing zeros trimmed
  int rank = 0;
  std::optional<IntMatrix> U;      // rows x rows
  std::optional<IntMatrix> V;      // cols x cols
  std::optional<IntMatrix> Vinv;   // inverse of V
};

SNFResult smith_normal_form(const IntMatrix& m, bool with_transforms = false);

// Divisor/rank-only SNF taking a sparse triplet list; runs a +-1 pivot
// elimination pass before falling back to the dense routine on the residue.
struct SparseEntry {
  int row;
  int col;
  long long value;
};
SNFResult smith_sparse(int rows, int cols, std::vector<SparseEntry> entries);

// basis of the integer kernel lattice {x : Mx = 0}, one column per generator
IntMatrix kernel_basis(const IntMatrix& m);

// solve M x = b over Z; nullopt when no integral solution exists
std::optional<std::vector<Int>> solve_integer(const IntMatrix& m, const std::vector<Int>& b);

// x in the column span of M over Z?
bool in_column_span(const IntMatrix& m, const std::vector<Int>& x);

// invariant factors of Z^n / colspan(M) given n = m.rows: pairs of
// (torsion divisors > 1, free rank)
struct CokernelInvariants {
  std::vector<Int> torsion;
  int free_rank = 0;
};
CokernelInvariants cokernel_invariants(const IntMatrix& m);

}  // namespace btq

#endif
