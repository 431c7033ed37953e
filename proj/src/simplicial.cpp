#include "btq/simplicial.hpp"

#include <algorithm>
#include <numeric>

#include "btq/errors.hpp"

namespace btq {

// ---------------------------------------------------------------------------
// Complex
// ---------------------------------------------------------------------------

int Complex::face(int i, int c, const std::vector<int>& sub) const {
  assert(i >= 0 && i <= dim());
  const Cell* cur = &cells[i][c];
  int cur_dim = i, cur_id = c;
  // drop vertices not in sub, one at a time
  for (;;) {
    std::vector<int> extra;
    for (int v : cur->verts)
      if (!std::binary_search(sub.begin(), sub.end(), v)) extra.push_back(v);
    if (extra.empty()) break;
    int v = extra[0];
    int k = static_cast<int>(std::lower_bound(cur->verts.begin(), cur->verts.end(), v) - cur->verts.begin());
    cur_id = cur->facets[k];
    --cur_dim;
    cur = &cells[cur_dim][cur_id];
  }
  assert(cur->verts == sub);
  return cur_id;
}

void Complex::validate() const {
  for (int i = 0; i <= dim(); ++i) {
    for (int c = 0; c < size(i); ++c) {
      const Cell& cell = cells[i][c];
      if (static_cast<int>(cell.verts.size()) != i + 1) throw Error("cell has wrong vertex count");
      if (!std::is_sorted(cell.verts.begin(), cell.verts.end())) throw Error("cell vertices not sorted");
      if (std::adjacent_find(cell.verts.begin(), cell.verts.end()) != cell.verts.end())
        throw Error("cell vertices not distinct");
      if (i == 0) {
        if (cell.verts[0] != c) throw Error("0-cell id mismatch");
        continue;
      }
      if (static_cast<int>(cell.facets.size()) != i + 1) throw Error("cell has wrong facet count");
      for (int k = 0; k <= i; ++k) {
        const Cell& f = cells[i - 1][cell.facets[k]];
        std::vector<int> expect;
        for (int l = 0; l <= i; ++l)
          if (l != k) expect.push_back(cell.verts[l]);
        if (f.verts != expect) throw Error("facet vertex set mismatch");  // V(sigma x V') = V'
      }
      // (sigma_v)_v' = (sigma_v')_v
      if (i >= 2) {
        for (int k = 0; k <= i; ++k)
          for (int l = k + 1; l <= i; ++l) {
            // drop verts[k] then verts[l]
            int a = cell.facets[k];
            int pos_l = l - 1;  // l shifts down after removing k < l
            int via_k = cells[i - 1][a].facets[pos_l];
            int b = cell.facets[l];
            int via_l = cells[i - 1][b].facets[k];
            if (via_k != via_l) throw Error("facet maps do not commute");
          }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// StrictComplexBuilder
// ---------------------------------------------------------------------------

int StrictComplexBuilder::ensure(std::vector<int> verts) {
  int i = static_cast<int>(verts.size()) - 1;
  if (static_cast<int>(per_dim_.size()) <= i) {
    per_dim_.resize(i + 1);
    vert_sets_.resize(i + 1);
  }
  auto it = per_dim_[i].find(verts);
  if (it != per_dim_[i].end()) return it->second;
  // faces first
  if (i >= 1)
    for (int k = 0; k <= i; ++k) {
      std::vector<int> sub;
      for (int l = 0; l <= i; ++l)
        if (l != k) sub.push_back(verts[l]);
      ensure(sub);
    }
  int id = static_cast<int>(vert_sets_[i].size());
  per_dim_[i][verts] = id;
  vert_sets_[i].push_back(verts);
  return id;
}

void StrictComplexBuilder::add(std::vector<int> verts) {
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  ensure(std::move(verts));
}

Complex StrictComplexBuilder::build() {
  // vertex ids in a strict complex are whatever ints the caller used; remap
  // them to 0..n-1 in increasing order
  std::vector<int> all_verts;
  if (!vert_sets_.empty())
    for (auto& vs : vert_sets_[0]) all_verts.push_back(vs[0]);
  std::sort(all_verts.begin(), all_verts.end());
  std::map<int, int> remap;
  for (size_t i = 0; i < all_verts.size(); ++i) remap[all_verts[i]] = static_cast<int>(i);

  Complex c;
  c.cells.resize(per_dim_.size());
  // vertices in remapped order
  c.cells[0].resize(all_verts.size());
  std::map<std::vector<int>, int> vertex_cell;
  for (size_t i = 0; i < all_verts.size(); ++i) {
    c.cells[0][i].verts = {static_cast<int>(i)};
    vertex_cell[{static_cast<int>(i)}] = static_cast<int>(i);
  }
  std::vector<std::map<std::vector<int>, int>> new_index(per_dim_.size());
  if (!per_dim_.empty()) new_index[0] = vertex_cell;
  for (int i = 1; i < static_cast<int>(per_dim_.size()); ++i) {
    // deterministic cell order: sorted by remapped vertex tuple
    std::vector<std::vector<int>> keys;
    for (auto& vs : vert_sets_[i]) {
      std::vector<int> mapped;
      for (int v : vs) mapped.push_back(remap[v]);
      std::sort(mapped.begin(), mapped.end());
      keys.push_back(mapped);
    }
    std::sort(keys.begin(), keys.end());
    c.cells[i].resize(keys.size());
    for (size_t cidx = 0; cidx < keys.size(); ++cidx) {
      new_index[i][keys[cidx]] = static_cast<int>(cidx);
      c.cells[i][cidx].verts = keys[cidx];
    }
    for (size_t cidx = 0; cidx < keys.size(); ++cidx) {
      const std::vector<int>& verts = keys[cidx];
      for (int k = 0; k <= i; ++k) {
        std::vector<int> sub;
        for (int l = 0; l <= i; ++l)
          if (l != k) sub.push_back(verts[l]);
        c.cells[i][cidx].facets.push_back(new_index[i - 1].at(sub));
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// boundary matrices and masks
// ---------------------------------------------------------------------------

SubMask empty_mask(const Complex& c) {
  SubMask m(c.dim() + 1);
  for (int i = 0; i <= c.dim(); ++i) m[i].assign(c.size(i), 0);
  return m;
}

SubMask full_mask(const Complex& c) {
  SubMask m(c.dim() + 1);
  for (int i = 0; i <= c.dim(); ++i) m[i].assign(c.size(i), 1);
  return m;
}

void check_subcomplex(const Complex& c, const SubMask& mask) {
  if (static_cast<int>(mask.size()) != c.dim() + 1) throw NotSubcomplex("mask has wrong shape");
  for (int i = 0; i <= c.dim(); ++i) {
    if (static_cast<int>(mask[i].size()) != c.size(i)) throw NotSubcomplex("mask has wrong shape");
    if (i == 0) continue;
    for (int cc = 0; cc < c.size(i); ++cc)
      if (mask[i][cc])
        for (int f : c.cells[i][cc].facets)
          if (!mask[i - 1][f]) throw NotSubcomplex("subcomplex not closed under faces");
  }
}

IntMatrix boundary_matrix(const Complex& c, int i) {
  assert(i >= 1);
  IntMatrix m(c.size(i - 1), c.size(i), Int(0));
  for (int cc = 0; cc < c.size(i); ++cc) {
    const Cell& cell = c.cells[i][cc];
    for (int k = 0; k <= i; ++k) m.at(cell.facets[k], cc) += boundary_sign(k);
  }
  return m;
}

IntMatrix boundary_matrix_relative(const Complex& c, const SubMask& sub, int i,
                                   std::vector<int>* rel_cells_i, std::vector<int>* rel_cells_im1) {
  assert(i >= 1);
  std::vector<int> rows, cols;
  std::vector<int> row_of(c.size(i - 1), -1);
  for (int cc = 0; cc < c.size(i - 1); ++cc)
    if (!sub[i - 1][cc]) {
      row_of[cc] = static_cast<int>(rows.size());
      rows.push_back(cc);
    }
  for (int cc = 0; cc < c.size(i); ++cc)
    if (!sub[i][cc]) cols.push_back(cc);
  IntMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols.size()), Int(0));
  for (size_t j = 0; j < cols.size(); ++j) {
    const Cell& cell = c.cells[i][cols[j]];
    for (int k = 0; k <= i; ++k) {
      int r = row_of[cell.facets[k]];
      if (r >= 0) m.at(r, static_cast<int>(j)) += boundary_sign(k);
    }
  }
  if (rel_cells_i) *rel_cells_i = cols;
  if (rel_cells_im1) *rel_cells_im1 = rows;
  return m;
}

Chain boundary_of_chain(const Complex& c, const Chain& ch) {
  Chain out;
  out.dim = ch.dim - 1;
  if (ch.dim <= 0) return out;
  for (auto& [cc, v] : ch.coeff) {
    const Cell& cell = c.cells[ch.dim][cc];
    for (int k = 0; k <= ch.dim; ++k) out.add(cell.facets[k], boundary_sign(k) * v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// abelian group bookkeeping
// ---------------------------------------------------------------------------

namespace {

std::vector<std::pair<Int, int>> factorize(Int n) {
  std::vector<std::pair<Int, int>> out;
  for (Int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.emplace_back(p, e);
    }
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

// rebuild invariant factors from a multiset of prime powers
std::vector<Int> invariant_factors(std::map<Int, std::vector<int>> primary) {
  size_t levels = 0;
  for (auto& [p, es] : primary) {
    std::sort(es.rbegin(), es.rend());
    levels = std::max(levels, es.size());
  }
  std::vector<Int> factors(levels, Int(1));
  for (auto& [p, es] : primary)
    for (size_t i = 0; i < es.size(); ++i) {
      Int pe;
      mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), es[i]);
      factors[i] *= pe;
    }
  std::sort(factors.begin(), factors.end());  // ascending divisibility
  return factors;
}

AbGroup normalize(AbGroup g) {
  std::map<Int, std::vector<int>> primary;
  for (auto& t : g.torsion)
    for (auto& [p, e] : factorize(t)) primary[p].push_back(e);
  g.torsion = invariant_factors(std::move(primary));
  return g;
}

}  // namespace

std::string AbGroup::str() const {
  if (is_zero()) return "0";
  std::string s;
  if (free_rank > 0) {
    s = "Z";
    if (free_rank > 1) s += "^" + std::to_string(free_rank);
  }
  for (auto& t : torsion) {
    if (!s.empty()) s += " + ";
    s += "Z/" + t.get_str();
  }
  return s;
}

AbGroup direct_sum(const AbGroup& a, const AbGroup& b) {
  AbGroup g;
  g.free_rank = a.free_rank + b.free_rank;
  g.torsion = a.torsion;
  g.torsion.insert(g.torsion.end(), b.torsion.begin(), b.torsion.end());
  return normalize(g);
}

AbGroup tensor_mod(const AbGroup& a, const Int& n) {
  AbGroup g;
  for (long long i = 0; i < a.free_rank; ++i) g.torsion.push_back(n);
  for (auto& t : a.torsion) {
    Int d = gcd(t, n);
    if (d > 1) g.torsion.push_back(d);
  }
  return normalize(g);
}

AbGroup tor_mod(const AbGroup& a, const Int& n) {
  AbGroup g;
  for (auto& t : a.torsion) {
    Int d = gcd(t, n);
    if (d > 1) g.torsion.push_back(d);
  }
  return normalize(g);
}

AbGroup hom_mod(const AbGroup& a, const Int& n) { return tensor_mod(a, n); }
AbGroup ext_mod(const AbGroup& a, const Int& n) { return tor_mod(a, n); }

AbGroup homology_of_maps(const IntMatrix& A, const IntMatrix& B, const Int& n) {
  const int m = A.cols;
  assert(B.rows == m);
  if (n == 0) {
    SNFResult sa = smith_normal_form(A);
    SNFResult sb = smith_normal_form(B);
    AbGroup g;
    g.free_rank = (m - sa.rank) - sb.rank;
    for (auto& d : sb.divisors)
      if (d > 1) g.torsion.push_back(d);
    return normalize(g);
  }
  // K = {x : Ax = 0 mod n} has basis V * diag(t_j), t_j = n/gcd(d_j, n)
  SNFResult sa = smith_normal_form(A, true);
  std::vector<Int> t(m, Int(1));
  for (int j = 0; j < sa.rank; ++j) t[j] = n / gcd(sa.divisors[j], n);
  // denominator generators im(B) + n Z^m, in K-coordinates c = diag(1/t) V^-1 g
  const IntMatrix& vinv = *sa.Vinv;
  int gens = B.cols + m;
  IntMatrix coords(m, gens, Int(0));
  for (int g = 0; g < gens; ++g) {
    std::vector<Int> col(m, Int(0));
    if (g < B.cols)
      for (int i = 0; i < m; ++i) col[i] = B.at(i, g);
    else
      col[g - B.cols] = n;
    for (int i = 0; i < m; ++i) {
      Int acc = 0;
      for (int j = 0; j < m; ++j) acc += vinv.at(i, j) * col[j];
      assert(acc % t[i] == 0);
      coords.at(i, g) = acc / t[i];
    }
  }
  CokernelInvariants inv = cokernel_invariants(coords);
  assert(inv.free_rank == 0);
  AbGroup g;
  g.torsion = inv.torsion;
  return normalize(g);
}

namespace {

IntMatrix transpose(const IntMatrix& m) {
  IntMatrix r(m.cols, m.rows, Int(0));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r.at(j, i) = m.at(i, j);
  return r;
}

IntMatrix boundary_or_empty(const Complex& c, int i, bool as_rows_of_dim_i) {
  // boundary C_i -> C_{i-1}; degenerate shapes at the ends of the complex
  if (i >= 1 && i <= c.dim()) return boundary_matrix(c, i);
  if (as_rows_of_dim_i) return IntMatrix(0, c.size(i), Int(0));
  return IntMatrix(c.size(i - 1), 0, Int(0));
}

}  // namespace

AbGroup homology(const Complex& c, int i) {
  if (i < 0 || i > c.dim()) return AbGroup{};
  IntMatrix A = boundary_or_empty(c, i, true);
  IntMatrix B = boundary_or_empty(c, i + 1, false);
  return homology_of_maps(A, B, Int(0));
}

AbGroup homology_mod(const Complex& c, int i, const Int& n) {
  if (i < 0 || i > c.dim()) return AbGroup{};
  IntMatrix A = boundary_or_empty(c, i, true);
  IntMatrix B = boundary_or_empty(c, i + 1, false);
  return homology_of_maps(A, B, n);
}

long long homology_rank_q(const Complex& c, int i) { return homology(c, i).free_rank; }

AbGroup cohomology_mod(const Complex& c, int i, const Int& n) {
  if (i < 0 || i > c.dim()) return AbGroup{};
  // cochain differential out of degree i is transpose(boundary_{i+1})
  IntMatrix A = transpose(boundary_or_empty(c, i + 1, false));
  IntMatrix B = transpose(boundary_or_empty(c, i, true));
  return homology_of_maps(A, B, n);
}

AbGroup cohomology(const Complex& c, int i) {
  IntMatrix A = transpose(boundary_or_empty(c, i + 1, false));
  IntMatrix B = transpose(boundary_or_empty(c, i, true));
  return homology_of_maps(A, B, Int(0));
}

RelativeHomology relative_homology(const Complex& c, const SubMask& sub, int i) {
  check_subcomplex(c, sub);
  RelativeHomology out;
  if (i < 0 || i > c.dim()) return out;
  std::vector<int> cols_i;
  IntMatrix A, B;
  if (i >= 1) {
    A = boundary_matrix_relative(c, sub, i, &cols_i);
  } else {
    for (int cc = 0; cc < c.size(0); ++cc)
      if (!sub[0][cc]) cols_i.push_back(cc);
    A = IntMatrix(0, static_cast<int>(cols_i.size()), Int(0));
  }
  if (i + 1 <= c.dim()) {
    B = boundary_matrix_relative(c, sub, i + 1);
  } else {
    B = IntMatrix(static_cast<int>(cols_i.size()), 0, Int(0));
  }
  out.rel_cells = cols_i;

  IntMatrix K = kernel_basis(A);
  // image of B in kernel coordinates
  IntMatrix bk(K.cols, B.cols, Int(0));
  for (int j = 0; j < B.cols; ++j) {
    std::vector<Int> col(B.rows);
    for (int r = 0; r < B.rows; ++r) col[r] = B.at(r, j);
    auto sol = solve_integer(K, col);
    assert(sol.has_value());  // boundaries are cycles
    for (int r = 0; r < K.cols; ++r) bk.at(r, j) = (*sol)[r];
  }
  SNFResult sb = smith_normal_form(bk, true);
  AbGroup g;
  g.free_rank = K.cols - sb.rank;
  for (auto& d : sb.divisors)
    if (d > 1) g.torsion.push_back(d);
  out.invariants = normalize(g);
  // representing cycles adapted to the invariant decomposition: K * U^-1
  if (K.cols > 0) {
    IntMatrix uinv = *sb.U;  // need U^-1: solve via SNF transforms of U
    // U is unimodular; invert by Gauss over Z is overkill, reuse SNF
    SNFResult su = smith_normal_form(uinv, true);
    // su: U' * U * V' = I => U^-1 = V' * U'
    IntMatrix uinv_real = int_matmul(*su.V, *su.U);
    out.cycles = int_matmul(K, uinv_real);
  } else {
    out.cycles = IntMatrix(static_cast<int>(cols_i.size()), 0, Int(0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// finite maps and pushforward
// ---------------------------------------------------------------------------

void FiniteMap::validate() const {
  if (!src || !dst) throw BadSimplicialMap("map endpoints missing");
  if (static_cast<int>(map.size()) < src->dim() + 1) throw BadSimplicialMap("map missing dimensions");
  for (int i = 0; i <= src->dim(); ++i) {
    if (static_cast<int>(map[i].size()) != src->size(i)) throw BadSimplicialMap("map has wrong shape");
    for (int cc = 0; cc < src->size(i); ++cc) {
      int img = map[i][cc];
      if (img < 0 || img >= dst->size(i)) throw BadSimplicialMap("image out of range");
      const Cell& s = src->cells[i][cc];
      const Cell& d = dst->cells[i][img];
      std::vector<int> image_verts;
      for (int v : s.verts) image_verts.push_back(map[0][v]);
      std::vector<int> sorted = image_verts;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw BadSimplicialMap("vertex map not injective on a simplex");
      if (sorted != d.verts) throw BadSimplicialMap("vertex sets incompatible");
      if (i >= 1)
        for (int k = 0; k <= i; ++k) {
          // facet omitting s.verts[k] must map to facet omitting its image
          int pos = static_cast<int>(std::lower_bound(d.verts.begin(), d.verts.end(), image_verts[k]) -
                                     d.verts.begin());
          if (map[i - 1][s.facets[k]] != d.facets[pos])
            throw BadSimplicialMap("face maps incompatible");
        }
    }
  }
}

int FiniteMap::orientation_sign(int i, int cell) const {
  const Cell& s = src->cells[i][cell];
  std::vector<int> image;
  for (int v : s.verts) image.push_back(map[0][v]);
  int inversions = 0;
  for (size_t a = 0; a < image.size(); ++a)
    for (size_t b = a + 1; b < image.size(); ++b)
      if (image[a] > image[b]) ++inversions;
  return (inversions % 2 == 0) ? 1 : -1;
}

Chain pushforward(const FiniteMap& f, const Chain& ch) {
  Chain out;
  out.dim = ch.dim;
  for (auto& [cc, v] : ch.coeff) out.add(f.map[ch.dim][cc], f.orientation_sign(ch.dim, cc) * v);
  return out;
}

// ---------------------------------------------------------------------------
// universal coefficients
// ---------------------------------------------------------------------------

UctReport universal_coeff_check(const Complex& c, const Int& n) {
  UctReport rep;
  for (int i = 0; i <= c.dim() + 1; ++i) {
    AbGroup hi = homology(c, i);
    AbGroup him1 = homology(c, i - 1);
    AbGroup lhs_h = homology_mod(c, i, n);
    AbGroup rhs_h = direct_sum(tensor_mod(hi, n), tor_mod(him1, n));
    if (!(lhs_h == rhs_h)) {
      rep.ok = false;
      rep.detail += "H_" + std::to_string(i) + ": " + lhs_h.str() + " != " + rhs_h.str() + "; ";
    }
    AbGroup lhs_c = cohomology_mod(c, i, n);
    AbGroup rhs_c = direct_sum(ext_mod(him1, n), hom_mod(hi, n));
    if (!(lhs_c == rhs_c)) {
      rep.ok = false;
      rep.detail += "H^" + std::to_string(i) + ": " + lhs_c.str() + " != " + rhs_c.str() + "; ";
    }
  }
  return rep;
}

UctReport universal_coeff_check_q(const Complex& c) {
  UctReport rep;
  for (int i = 0; i <= c.dim(); ++i) {
    // over Q both sequences collapse to rank equalities
    IntMatrix A = boundary_or_empty(c, i, true);
    IntMatrix B = boundary_or_empty(c, i + 1, false);
    long long rank_hq = (A.cols - smith_normal_form(A).rank) - smith_normal_form(B).rank;
    long long rank_hz = homology(c, i).free_rank;
    long long rank_coh = cohomology(c, i).free_rank;
    if (rank_hq != rank_hz || rank_coh != rank_hz) {
      rep.ok = false;
      rep.detail += "degree " + std::to_string(i) + " rank mismatch; ";
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// barycentric sphere
// ---------------------------------------------------------------------------

BarycentricSphere barycentric_sphere(int d) {
  assert(d >= 2);
  BarycentricSphere out;
  // vertices = proper nonempty subsets of {1..d}, id ordered by bitmask
  int full = (1 << d) - 1;
  std::vector<int> vertex_of_mask(full + 1, -1);
  for (int mask = 1; mask < full; ++mask) {
    std::vector<int> subset;
    for (int b = 0; b < d; ++b)
      if (mask & (1 << b)) subset.push_back(b + 1);
    vertex_of_mask[mask] = static_cast<int>(out.label.size());
    out.label.push_back(subset);
  }

  StrictComplexBuilder builder;
  for (int m = 1; m < full; ++m) builder.add({vertex_of_mask[m]});
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<std::pair<std::vector<int>, int>> chambers;  // (vertex list, sgn(g))
  do {
    int inversions = 0;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b)
        if (perm[a] > perm[b]) ++inversions;
    int sgn = (inversions % 2 == 0) ? 1 : -1;
    std::vector<int> chain_verts;
    int mask = 0;
    for (int k = 0; k < d - 1; ++k) {
      mask |= 1 << (perm[k] - 1);
      chain_verts.push_back(vertex_of_mask[mask]);
    }
    builder.add(chain_verts);
    chambers.emplace_back(chain_verts, sgn);
  } while (std::next_permutation(perm.begin(), perm.end()));

  out.complex = builder.build();
  out.fundamental.dim = d - 2;
  for (auto& [chain_verts, sgn] : chambers) {
    std::vector<int> sorted = chain_verts;
    std::sort(sorted.begin(), sorted.end());
    int inversions = 0;
    for (size_t a = 0; a < chain_verts.size(); ++a)
      for (size_t b = a + 1; b < chain_verts.size(); ++b)
        if (chain_verts[a] > chain_verts[b]) ++inversions;
    int parity = (inversions % 2 == 0) ? 1 : -1;
    // locate the chamber cell by its sorted vertex list
    int id = -1;
    for (int cc = 0; cc < out.complex.size(d - 2); ++cc)
      if (out.complex.cells[d - 2][cc].verts == sorted) {
        id = cc;
        break;
      }
    assert(id >= 0);
    out.fundamental.add(id, sgn * parity);
  }
  return out;
}

}  // namespace btq
