#ifndef BTQ_GROUPHOM_HPP
#define BTQ_GROUPHOM_HPP

#include <string>
#include <vector>

#include "btq/quotient.hpp"
#include "btq/simplicial.hpp"

namespace btq {

// finite group given by an abstract multiplication table
struct FiniteGroup {
  int identity = 0;
  std::vector<std::vector<int>> mul;  // mul[a][b]

  int order() const { return static_cast<int>(mul.size()); }
  int inverse(int a) const;
  void validate() const;  // identity/closure/inverses, associativity spot checks

  static FiniteGroup cyclic(int n);
  static FiniteGroup product(const FiniteGroup& a, const FiniteGroup& b);
  // closure of a list of matrices over A under multiplication
  static FiniteGroup from_matrices(const std::vector<MatA>& elems, int limit = 100000);
};

// multiplicative character with values in {+1, -1}
struct SignCharacter {
  std::vector<int> value;  // per element

  static SignCharacter trivial(int order) { return SignCharacter{std::vector<int>(order, 1)}; }
};

// H_s(H, chi) via the chi-twisted bar complex, s <= 3 by default budget
AbGroup group_homology(const FiniteGroup& h, const SignCharacter& chi, int s,
                       long long budget_cells = 1 << 22);

// filtration H = H^0 > H^1 > ... > H^l = 1 with elementary abelian
// quotients (the lower p-central series); NoFiltrationFound when the series
// does not terminate within `d` steps for a non-p-group
std::vector<std::vector<int>> lower_p_central_series(const FiniteGroup& h, int p);

struct ExponentVerdict {
  bool holds = false;
  int filtration_length = 0;
  Int annihilator = 1;  // p^(1 + s(l-1))
  AbGroup homology;
};

// checks that p^(1 + s(l-1)) kills H_s(H, chi); when ell <= 0 the filtration
// is searched via the lower p-central series
ExponentVerdict exponent_bound_check(const FiniteGroup& h, const SignCharacter& chi, int s, int p,
                                     int ell = 0);

}  // namespace btq

#endif
