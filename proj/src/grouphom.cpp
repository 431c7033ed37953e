#include "btq/grouphom.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "btq/errors.hpp"

namespace btq {

int FiniteGroup::inverse(int a) const {
  for (int b = 0; b < order(); ++b)
    if (mul[a][b] == identity) return b;
  throw Error("group element has no inverse");
}

void FiniteGroup::validate() const {
  const int n = order();
  for (int a = 0; a < n; ++a) {
    if (mul[a][identity] != a || mul[identity][a] != a) throw Error("identity axiom fails");
    bool has_inv = false;
    for (int b = 0; b < n; ++b) {
      if (mul[a][b] < 0 || mul[a][b] >= n) throw Error("multiplication not closed");
      if (mul[a][b] == identity) has_inv = true;
    }
    if (!has_inv) throw Error("missing inverse");
  }
  // associativity: exhaustive for small groups, spot checks otherwise
  if (n <= 24) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (mul[mul[a][b]][c] != mul[a][mul[b][c]]) throw Error("associativity fails");
  } else {
    unsigned state = 12345;
    for (int trial = 0; trial < 2000; ++trial) {
      state = state * 1664525u + 1013904223u;
      int a = state % n, b = (state >> 8) % n, c = (state >> 16) % n;
      if (mul[mul[a][b]][c] != mul[a][mul[b][c]]) throw Error("associativity fails");
    }
  }
}

FiniteGroup FiniteGroup::cyclic(int n) {
  FiniteGroup g;
  g.identity = 0;
  g.mul.assign(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g.mul[a][b] = (a + b) % n;
  return g;
}

FiniteGroup FiniteGroup::product(const FiniteGroup& a, const FiniteGroup& b) {
  FiniteGroup g;
  const int na = a.order(), nb = b.order();
  g.identity = a.identity * nb + b.identity;
  g.mul.assign(na * nb, std::vector<int>(na * nb));
  for (int x = 0; x < na * nb; ++x)
    for (int y = 0; y < na * nb; ++y)
      g.mul[x][y] = a.mul[x / nb][y / nb] * nb + b.mul[x % nb][y % nb];
  return g;
}

FiniteGroup FiniteGroup::from_matrices(const std::vector<MatA>& elems, int limit) {
  if (elems.empty()) throw Error("empty generator list");
  std::map<std::string, int> index;
  std::vector<MatA> list;
  auto intern = [&](const MatA& m) -> int {
    std::string key = mat_str_a(m);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(list.size());
    index.emplace(key, id);
    list.push_back(m);
    return id;
  };
  const int d = elems[0].rows;
  const int p = elems[0].at(0, 0).p();
  MatA id_mat(d, d, PolyA::zero(p));
  for (int i = 0; i < d; ++i) id_mat.at(i, i) = PolyA::one(p);
  int ident = intern(id_mat);
  for (auto& e : elems) intern(e);
  // closure
  for (size_t i = 0; i < list.size(); ++i) {
    for (size_t j = 0; j < list.size(); ++j) {
      if (static_cast<int>(list.size()) > limit) throw BudgetExceeded("group closure exceeded limit");
      intern(matmul_a(list[i], list[j]));
    }
  }
  FiniteGroup g;
  g.identity = ident;
  const int n = static_cast<int>(list.size());
  g.mul.assign(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      auto it = index.find(mat_str_a(matmul_a(list[a], list[b])));
      if (it == index.end()) throw Error("generator list is not closed");
      g.mul[a][b] = it->second;
    }
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// bar-complex homology
// ---------------------------------------------------------------------------

namespace {

long long tuples_count(int n, int s) {
  long long c = 1;
  for (int i = 0; i < s; ++i) c *= n;
  return c;
}

// boundary of the chi-twisted bar complex: column = s-tuple, rows = (s-1)-tuples
std::vector<SparseEntry> bar_boundary(const FiniteGroup& h, const SignCharacter& chi, int s) {
  const int n = h.order();
  std::vector<SparseEntry> entries;
  if (s <= 0) return entries;
  long long cols = tuples_count(n, s);
  std::vector<int> tuple(s);
  for (long long col = 0; col < cols; ++col) {
    long long v = col;
    for (int i = 0; i < s; ++i) {
      tuple[i] = static_cast<int>(v % n);
      v /= n;
    }
    // d_0 = chi(h_1) (h_2,...,h_s)
    {
      long long row = 0, mult = 1;
      for (int i = 1; i < s; ++i) {
        row += static_cast<long long>(tuple[i]) * mult;
        mult *= n;
      }
      entries.push_back({static_cast<int>(row), static_cast<int>(col), chi.value[tuple[0]]});
    }
    // d_i merges positions i-1, i (1-based i = 1..s-1), sign (-1)^i
    for (int i = 1; i < s; ++i) {
      long long row = 0, mult = 1;
      for (int j = 0; j < s - 1; ++j) {
        int val = (j < i - 1) ? tuple[j] : (j == i - 1 ? h.mul[tuple[i - 1]][tuple[i]] : tuple[j + 1]);
        row += static_cast<long long>(val) * mult;
        mult *= n;
      }
      entries.push_back({static_cast<int>(row), static_cast<int>(col), (i % 2 == 0) ? 1 : -1});
    }
    // d_s drops the last entry, sign (-1)^s
    {
      long long row = 0, mult = 1;
      for (int j = 0; j < s - 1; ++j) {
        row += static_cast<long long>(tuple[j]) * mult;
        mult *= n;
      }
      entries.push_back({static_cast<int>(row), static_cast<int>(col), (s % 2 == 0) ? 1 : -1});
    }
  }
  return entries;
}

}  // namespace

AbGroup group_homology(const FiniteGroup& h, const SignCharacter& chi, int s, long long budget_cells) {
  const int n = h.order();
  if (s < 0) return AbGroup{};
  if (tuples_count(n, s + 1) > budget_cells)
    throw BudgetExceeded("bar complex exceeds the cell budget");
  if (s == 0) {
    // Z / <chi(h) - 1 : h in H>
    bool nontrivial = false;
    for (int a = 0; a < n; ++a)
      if (chi.value[a] == -1) nontrivial = true;
    if (nontrivial) return AbGroup{0, {2}};
    return AbGroup{1, {}};
  }
  long long n_s = tuples_count(n, s);
  long long n_sm1 = tuples_count(n, s - 1);
  long long n_sp1 = tuples_count(n, s + 1);
  SNFResult low = smith_sparse(static_cast<int>(n_sm1), static_cast<int>(n_s),
                               bar_boundary(h, chi, s));
  SNFResult high = smith_sparse(static_cast<int>(n_s), static_cast<int>(n_sp1),
                                bar_boundary(h, chi, s + 1));
  AbGroup g;
  g.free_rank = (n_s - low.rank) - high.rank;
  for (auto& d : high.divisors)
    if (d > 1) g.torsion.push_back(d);
  // normalize through direct_sum with 0
  return direct_sum(g, AbGroup{});
}

// ---------------------------------------------------------------------------
// filtrations and the exponent bound
// ---------------------------------------------------------------------------

namespace {

std::vector<int> subgroup_closure(const FiniteGroup& h, std::set<int> gens) {
  gens.insert(h.identity);
  std::vector<int> frontier(gens.begin(), gens.end());
  std::set<int> seen = gens;
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int a : frontier)
      for (int b : seen)
        for (int c : {h.mul[a][b], h.mul[b][a]})
          if (seen.insert(c).second) next.push_back(c);
    frontier = std::move(next);
  }
  return std::vector<int>(seen.begin(), seen.end());
}

}  // namespace

std::vector<std::vector<int>> lower_p_central_series(const FiniteGroup& h, int p) {
  std::vector<std::vector<int>> series;
  std::vector<int> current(h.order());
  for (int i = 0; i < h.order(); ++i) current[i] = i;
  series.push_back(current);
  while (current.size() > 1) {
    // next = < [H, current] , current^p >
    std::set<int> gens;
    for (int g = 0; g < h.order(); ++g)
      for (int x : current) {
        // commutator g^-1 x^-1 g x
        int c = h.mul[h.mul[h.inverse(g)][h.inverse(x)]][h.mul[g][x]];
        gens.insert(c);
      }
    for (int x : current) {
      int pw = h.identity;
      for (int i = 0; i < p; ++i) pw = h.mul[pw][x];
      gens.insert(pw);
    }
    std::vector<int> next = subgroup_closure(h, gens);
    if (next.size() == current.size())
      throw NoFiltrationFound("lower p-central series stalls; group is not a p-group");
    series.push_back(next);
    current = std::move(next);
  }
  return series;
}

ExponentVerdict exponent_bound_check(const FiniteGroup& h, const SignCharacter& chi, int s, int p,
                                     int ell) {
  ExponentVerdict verdict;
  if (ell <= 0) {
    auto series = lower_p_central_series(h, p);
    ell = static_cast<int>(series.size()) - 1;
  }
  verdict.filtration_length = ell;
  verdict.annihilator = 1;
  for (int i = 0; i < 1 + s * (ell - 1); ++i) verdict.annihilator *= p;
  verdict.homology = group_homology(h, chi, s);
  verdict.holds = true;
  if (verdict.homology.free_rank > 0) verdict.holds = false;
  for (auto& t : verdict.homology.torsion)
    if (verdict.annihilator % t != 0) verdict.holds = false;
  return verdict;
}

}  // namespace btq
