#include "btq/building.hpp"

#include <algorithm>
#include <numeric>
#include <functional>
#include <set>

#include "btq/errors.hpp"

namespace btq {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

// ---------------------------------------------------------------------------
// canonical lattice class representative
// ---------------------------------------------------------------------------

VertexKey vertex_key(const MatK& g) {
  assert(g.rows == g.cols);
  const int d = g.rows;
  const int p = g.at(0, 0).p();
  MatK w = g;

  // triangularize over O: pivot on the minimal-valuation entry of each row
  std::vector<int> pivot_col(d, -1);
  std::vector<char> used(d, 0);
  std::vector<int> diag(d, 0);
  for (int r = 0; r < d; ++r) {
    int best = -1, best_v = 0;
    for (int j = 0; j < d; ++j) {
      if (used[j] || w.at(r, j).is_zero()) continue;
      int v = w.at(r, j).valuation();
      if (best < 0 || v < best_v) {
        best = j;
        best_v = v;
      }
    }
    if (best < 0) throw SingularMatrix();
    used[best] = 1;
    pivot_col[r] = best;
    diag[r] = best_v;
    // normalize: column / unit so the pivot becomes an exact power of pi
    KElem unit = w.at(r, best) * KElem::pi_pow(p, -best_v);
    KElem unit_inv = unit.inverse();
    for (int i = 0; i < d; ++i) w.at(i, best) = w.at(i, best) * unit_inv;
    // clear the remaining entries of row r among unused columns
    for (int j = 0; j < d; ++j) {
      if (used[j] || w.at(r, j).is_zero()) continue;
      KElem coef = w.at(r, j) * KElem::pi_pow(p, -best_v);
      for (int i = 0; i < d; ++i) w.at(i, j) = w.at(i, j) - coef * w.at(i, best);
    }
  }
  // permute columns into pivot order: T lower triangular
  MatK T(d, d, KElem::zero(p));
  for (int r = 0; r < d; ++r)
    for (int i = 0; i < d; ++i) T.at(i, r) = w.at(i, pivot_col[r]);

  // reduce below-diagonal entries to their canonical pi-tails
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i) {
      KElem x = T.at(i, j);
      if (x.is_zero()) continue;
      KElem tail = pi_expansion(x, diag[i] - 1).truncation();
      KElem coef = (x - tail) * KElem::pi_pow(p, -diag[i]);
      for (int r = i; r < d; ++r) T.at(r, j) = T.at(r, j) - coef * T.at(r, i);
    }

  // homothety normalization: sum of exponents in {0..d-1}
  int total = std::accumulate(diag.begin(), diag.end(), 0);
  int shift = floor_div(total, d);
  if (shift != 0) {
    KElem f = KElem::pi_pow(p, -shift);
    for (auto& e : T.a) e = e * f;
    for (auto& e : diag) e -= shift;
  }

  VertexKey key;
  key.a = diag;
  key.T = T;
  std::string id;
  for (int r = 0; r < d; ++r) {
    if (r) id += ",";
    id += std::to_string(diag[r]);
  }
  id += "|";
  for (int j = 0; j < d; ++j)
    for (int i = j + 1; i < d; ++i) {
      const KElem& x = T.at(i, j);
      if (x.is_zero()) continue;
      PiExpansion e = pi_expansion(x, diag[i] - 1);
      id += std::to_string(i) + "." + std::to_string(j) + ":";
      for (auto& [k, c] : e.coeff) id += std::to_string(k) + "^" + std::to_string(c) + ",";
      id += ";";
    }
  key.id = id;
  return key;
}

// ---------------------------------------------------------------------------
// subspaces of F_q^d
// ---------------------------------------------------------------------------

Subspace subspace_from_spanning(int q, int d, std::vector<std::vector<int>> gens) {
  // row reduce mod q to RREF
  int rank = 0;
  for (int col = 0; col < d && rank < static_cast<int>(gens.size()); ++col) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(gens.size()); ++r)
      if (gens[r][col] % q != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(gens[rank], gens[piv]);
    int inv = FqElem(q, gens[rank][col]).inverse().value();
    for (int c = 0; c < d; ++c) gens[rank][c] = static_cast<int>((static_cast<long long>(gens[rank][c]) * inv) % q + q) % q;
    for (int r = 0; r < static_cast<int>(gens.size()); ++r) {
      if (r == rank || gens[r][col] % q == 0) continue;
      int f = gens[r][col] % q;
      for (int c = 0; c < d; ++c)
        gens[r][c] = static_cast<int>((((gens[r][c] - static_cast<long long>(f) * gens[rank][c]) % q) + q) % q);
    }
    ++rank;
  }
  gens.resize(rank);
  Subspace s;
  s.q = q;
  s.d = d;
  s.rows = std::move(gens);
  return s;
}

std::string Subspace::str() const {
  std::string s;
  for (auto& r : rows) {
    for (int v : r) s += std::to_string(v);
    s += "/";
  }
  return s;
}

std::vector<Subspace> enumerate_subspaces(int q, int d) {
  std::vector<Subspace> out;
  // enumerate RREF matrices by pivot-column pattern
  for (int r = 1; r < d; ++r) {
    std::vector<int> pivots(r);
    std::vector<char> choose(d, 0);
    std::fill(choose.begin(), choose.begin() + r, 1);
    std::sort(choose.begin(), choose.end());
    // iterate over r-subsets of columns
    std::vector<int> idx(r);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      // free positions: entry (i, c) with c > pivot_i, c not a pivot column
      std::vector<std::pair<int, int>> freepos;
      for (int i = 0; i < r; ++i)
        for (int c = idx[i] + 1; c < d; ++c)
          if (std::find(idx.begin(), idx.end(), c) == idx.end()) freepos.emplace_back(i, c);
      long long count = 1;
      for (size_t i = 0; i < freepos.size(); ++i) count *= q;
      for (long long mask = 0; mask < count; ++mask) {
        std::vector<std::vector<int>> rows(r, std::vector<int>(d, 0));
        for (int i = 0; i < r; ++i) rows[i][idx[i]] = 1;
        long long m = mask;
        for (auto& [i, c] : freepos) {
          rows[i][c] = static_cast<int>(m % q);
          m /= q;
        }
        Subspace s;
        s.q = q;
        s.d = d;
        s.rows = std::move(rows);
        out.push_back(std::move(s));
      }
      // next combination
      int i = r - 1;
      while (i >= 0 && idx[i] == d - r + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool subspace_contains(const Subspace& big, const Subspace& small) {
  // every generator of small reduces to zero against big's RREF rows
  for (auto row : small.rows) {
    for (auto& b : big.rows) {
      int piv = -1;
      for (int c = 0; c < big.d; ++c)
        if (b[c] != 0) {
          piv = c;
          break;
        }
      if (piv < 0) continue;
      int f = row[piv];
      if (f == 0) continue;
      for (int c = 0; c < big.d; ++c)
        row[c] = ((row[c] - f * b[c]) % big.q + big.q) % big.q;
    }
    for (int c = 0; c < big.d; ++c)
      if (row[c] != 0) return false;
  }
  return true;
}

std::vector<std::vector<Subspace>> enumerate_flags(int q, int d, int len) {
  std::vector<Subspace> all = enumerate_subspaces(q, d);
  std::vector<std::vector<Subspace>> out;
  std::vector<Subspace> cur;
  std::function<void(size_t)> rec = [&](size_t start) {
    if (static_cast<int>(cur.size()) == len) {
      out.push_back(cur);
      return;
    }
    for (size_t i = 0; i < all.size(); ++i) {
      if (!cur.empty() &&
          !(all[i].dim() < cur.back().dim() && subspace_contains(cur.back(), all[i])))
        continue;
      cur.push_back(all[i]);
      rec(i);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

Subspace subspace_image(const Subspace& w, const std::vector<std::vector<int>>& mat) {
  const int q = w.q, d = w.d;
  std::vector<std::vector<int>> gens;
  for (auto& row : w.rows) {
    std::vector<int> img(d, 0);
    for (int i = 0; i < d; ++i) {
      long long acc = 0;
      for (int j = 0; j < d; ++j) acc += static_cast<long long>(mat[i][j]) * row[j];
      img[i] = static_cast<int>(acc % q);
    }
    gens.push_back(img);
  }
  return subspace_from_spanning(q, d, std::move(gens));
}

MatK sublattice_matrix(const MatK& T, const Subspace& w) {
  const int d = T.rows;
  const int p = T.at(0, 0).p();
  // columns: T * lift(row_k) for each RREF row, then pi * T * e_j for the
  // non-pivot coordinates
  std::vector<char> is_pivot(d, 0);
  for (auto& row : w.rows)
    for (int c = 0; c < d; ++c)
      if (row[c] != 0) {
        is_pivot[c] = 1;
        break;
      }
  MatK m(d, d, KElem::zero(p));
  int col = 0;
  for (auto& row : w.rows) {
    for (int i = 0; i < d; ++i) {
      KElem acc = KElem::zero(p);
      for (int j = 0; j < d; ++j)
        if (row[j] != 0) acc = acc + T.at(i, j) * KElem(PolyA::constant(p, row[j]));
      m.at(i, col) = acc;
    }
    ++col;
  }
  KElem pi = KElem::pi_pow(p, 1);
  for (int j = 0; j < d; ++j) {
    if (is_pivot[j]) continue;
    for (int i = 0; i < d; ++i) m.at(i, col) = T.at(i, j) * pi;
    ++col;
  }
  assert(col == d);
  return m;
}

std::vector<VertexKey> neighbors(const VertexKey& v) {
  const int d = v.d();
  const int q = v.T.at(0, 0).p();
  std::vector<VertexKey> out;
  for (auto& w : enumerate_subspaces(q, d)) out.push_back(vertex_key(sublattice_matrix(v.T, w)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<BTSimplex> flag_simplices(const VertexKey& v, int i) {
  const int d = v.d();
  const int q = v.T.at(0, 0).p();
  std::vector<BTSimplex> out;
  if (i == 0) {
    out.push_back(BTSimplex{{v}});
    return out;
  }
  for (auto& flag : enumerate_flags(q, d, i)) {
    BTSimplex s;
    s.chain.push_back(v);
    for (auto& w : flag) s.chain.push_back(vertex_key(sublattice_matrix(v.T, w)));
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// apartments
// ---------------------------------------------------------------------------

ApartmentCoord normalize_coord(ApartmentCoord n) {
  int m = *std::min_element(n.begin(), n.end());
  for (auto& x : n) x -= m;
  return n;
}

VertexKey apartment_vertex(const MatK& basis_rows, const ApartmentCoord& n) {
  assert(basis_rows.rows == basis_rows.cols);
  const int d = basis_rows.rows;
  assert(static_cast<int>(n.size()) == d);
  const int p = basis_rows.at(0, 0).p();
  if (mat_det(basis_rows).is_zero()) throw DegenerateBasis();
  MatK g(d, d, KElem::zero(p));
  for (int i = 0; i < d; ++i) {
    KElem f = KElem::pi_pow(p, n[i]);
    for (int c = 0; c < d; ++c) g.at(c, i) = basis_rows.at(i, c) * f;
  }
  return vertex_key(g);
}

std::vector<int> e_vector(const std::vector<ApartmentCoord>& lifts, int which) {
  const int d = static_cast<int>(lifts[which].size());
  const ApartmentCoord& x = lifts[which];
  ApartmentCoord best(d);
  bool have = false;
  auto consider = [&](ApartmentCoord c) {
    // candidate must satisfy c < x (componentwise <=, strict somewhere)
    bool le = true, lt = false;
    for (int i = 0; i < d; ++i) {
      if (c[i] > x[i]) le = false;
      if (c[i] < x[i]) lt = true;
    }
    if (!le || !lt) return;
    if (!have) {
      best = c;
      have = true;
      return;
    }
    long long sc = std::accumulate(c.begin(), c.end(), 0LL);
    long long sb = std::accumulate(best.begin(), best.end(), 0LL);
    if (sc > sb) best = c;
  };
  for (size_t j = 0; j < lifts.size(); ++j) {
    if (static_cast<int>(j) == which) continue;
    // largest representative of class j below x
    int k = x[0] - lifts[j][0];
    for (int i = 1; i < d; ++i) k = std::min(k, x[i] - lifts[j][i]);
    ApartmentCoord c = lifts[j];
    for (int i = 0; i < d; ++i) c[i] += k;
    consider(c);
  }
  {
    ApartmentCoord c = x;
    for (auto& v : c) v -= 1;
    consider(c);
  }
  assert(have);
  std::vector<int> e(d);
  for (int i = 0; i < d; ++i) e[i] = x[i] - best[i];
  return e;
}

std::vector<ApartmentCoord> ApartmentChamber::vertex_coords() const {
  const int d = static_cast<int>(word.size());
  std::vector<ApartmentCoord> out;
  ApartmentCoord cur = base;
  out.push_back(cur);
  for (int k = 0; k + 1 < d; ++k) {
    cur[word[k]] += 1;
    out.push_back(cur);
  }
  return out;
}

std::vector<ApartmentCoord> ApartmentChamber::fundamental_order() const {
  const int d = static_cast<int>(word.size());
  std::vector<ApartmentCoord> verts = vertex_coords();
  std::vector<ApartmentCoord> order(d);
  for (int l = 0; l < d; ++l) {
    int i = word[l];
    order[i] = verts[(l + 1) % d];
  }
  return order;
}

ApartmentWindow beta_window(int d, int width) {
  ApartmentWindow win;
  win.d = d;
  win.width = width;
  if (width < 0) {
    win.beta.dim = d - 1;
    return win;
  }
  // all normalized coordinates with max <= width
  std::vector<ApartmentCoord> coords;
  ApartmentCoord cur(d, 0);
  std::function<void(int)> rec = [&](int pos) {
    if (pos == d) {
      if (*std::min_element(cur.begin(), cur.end()) == 0) coords.push_back(cur);
      return;
    }
    for (int v = 0; v <= width; ++v) {
      cur[pos] = v;
      rec(pos + 1);
    }
  };
  rec(0);
  std::sort(coords.begin(), coords.end());
  for (auto& c : coords) {
    win.vertex_of_coord[c] = static_cast<int>(win.coord_of_vertex.size());
    win.coord_of_vertex.push_back(c);
  }

  auto in_window = [&](const ApartmentCoord& c) {
    return win.vertex_of_coord.count(normalize_coord(c)) > 0;
  };

  StrictComplexBuilder builder;
  for (size_t v = 0; v < win.coord_of_vertex.size(); ++v) builder.add({static_cast<int>(v)});
  std::vector<ApartmentChamber> chambers;
  // a chamber has d rotations (one per choice of top vertex in its lattice
  // chain); dedupe by the vertex-class set so beta gets each simplex once
  std::set<std::vector<int>> seen_chambers;
  std::vector<int> word(d);
  std::iota(word.begin(), word.end(), 0);
  for (auto& base : coords) {
    std::vector<int> w = word;
    do {
      ApartmentChamber ch{base, w};
      bool ok = true;
      for (auto& c : ch.vertex_coords())
        if (!in_window(c)) ok = false;
      if (ok) {
        std::vector<int> verts;
        for (auto& c : ch.vertex_coords()) verts.push_back(win.vertex_of_coord.at(normalize_coord(c)));
        std::vector<int> sorted = verts;
        std::sort(sorted.begin(), sorted.end());
        if (!seen_chambers.insert(sorted).second) continue;
        builder.add(verts);
        chambers.push_back(ch);
      }
    } while (std::next_permutation(w.begin(), w.end()));
  }
  win.complex = builder.build();

  win.beta.dim = d - 1;
  for (auto& ch : chambers) {
    std::vector<int> verts;
    for (auto& c : ch.vertex_coords()) verts.push_back(win.vertex_of_coord.at(normalize_coord(c)));
    std::vector<int> sorted = verts;
    std::sort(sorted.begin(), sorted.end());
    int cell = -1;
    for (int cc = 0; cc < win.complex.size(d - 1); ++cc)
      if (win.complex.cells[d - 1][cc].verts == sorted) {
        cell = cc;
        break;
      }
    assert(cell >= 0);
    // parity of [sigma] against the ascending-vertex-id reference
    std::vector<int> order_ids;
    for (auto& c : ch.fundamental_order())
      order_ids.push_back(win.vertex_of_coord.at(normalize_coord(c)));
    int inv = 0;
    for (size_t a = 0; a < order_ids.size(); ++a)
      for (size_t b = a + 1; b < order_ids.size(); ++b)
        if (order_ids[a] > order_ids[b]) ++inv;
    win.beta.add(cell, inv % 2 == 0 ? 1 : -1);
  }

  // rim marking for (d-2)-cells
  if (d >= 2 && win.complex.dim() >= d - 2) {
    win.boundary_cell.assign(win.complex.size(d - 2), 0);
    for (int cc = 0; cc < win.complex.size(d - 2); ++cc)
      for (int v : win.complex.cells[d - 2][cc].verts) {
        const ApartmentCoord& c = win.coord_of_vertex[v];
        if (*std::max_element(c.begin(), c.end()) >= width) win.boundary_cell[cc] = 1;
      }
  }
  return win;
}

}  // namespace btq
