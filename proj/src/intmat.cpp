#include "btq/intmat.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace btq {

IntMatrix int_identity(int d) {
  IntMatrix m(d, d, Int(0));
  for (int i = 0; i < d; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix int_matmul(const IntMatrix& x, const IntMatrix& y) {
  assert(x.cols == y.rows);
  IntMatrix r(x.rows, y.cols, Int(0));
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      if (x.at(i, k) == 0) continue;
      for (int j = 0; j < y.cols; ++j) {
        if (y.at(k, j) == 0) continue;
        r.at(i, j) += x.at(i, k) * y.at(k, j);
      }
    }
  return r;
}

Int int_det(IntMatrix m) {
  assert(m.rows == m.cols);
  const int n = m.rows;
  // Bareiss fraction-free elimination
  Int prev = 1;
  Int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m.at(k, k) == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (m.at(i, k) != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(k, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        Int v = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m.at(i, j) = v;
      }
    prev = m.at(k, k);
  }
  return n == 0 ? Int(1) : sign * m.at(n - 1, n - 1);
}

bool is_unimodular(const IntMatrix& m) {
  if (m.rows != m.cols) return false;
  Int d = int_det(m);
  return d == 1 || d == -1;
}

namespace {

struct SnfWorker {
  IntMatrix A;
  bool track;
  IntMatrix U, V, Vinv;

  SnfWorker(const IntMatrix& m, bool with_transforms) : A(m), track(with_transforms) {
    if (track) {
      U = int_identity(A.rows);
      V = int_identity(A.cols);
      Vinv = int_identity(A.cols);
    }
  }

  void swap_rows(int a, int b) {
    if (a == b) return;
    for (int j = 0; j < A.cols; ++j) std::swap(A.at(a, j), A.at(b, j));
    if (track)
      for (int j = 0; j < U.cols; ++j) std::swap(U.at(a, j), U.at(b, j));
  }
  void swap_cols(int a, int b) {
    if (a == b) return;
    for (int i = 0; i < A.rows; ++i) std::swap(A.at(i, a), A.at(i, b));
    if (track) {
      for (int i = 0; i < V.rows; ++i) std::swap(V.at(i, a), V.at(i, b));
      for (int j = 0; j < Vinv.cols; ++j) std::swap(Vinv.at(a, j), Vinv.at(b, j));
    }
  }
  // row[a] += f * row[b]
  void add_row(int a, int b, const Int& f) {
    if (f == 0) return;
    for (int j = 0; j < A.cols; ++j) A.at(a, j) += f * A.at(b, j);
    if (track)
      for (int j = 0; j < U.cols; ++j) U.at(a, j) += f * U.at(b, j);
  }
  // col[a] += f * col[b]
  void add_col(int a, int b, const Int& f) {
    if (f == 0) return;
    for (int i = 0; i < A.rows; ++i) A.at(i, a) += f * A.at(i, b);
    if (track) {
      for (int i = 0; i < V.rows; ++i) V.at(i, a) += f * V.at(i, b);
      // inverse op on Vinv: row[b] -= f * row[a]
      for (int j = 0; j < Vinv.cols; ++j) Vinv.at(b, j) -= f * Vinv.at(a, j);
    }
  }
  void negate_row(int a) {
    for (int j = 0; j < A.cols; ++j) A.at(a, j) = -A.at(a, j);
    if (track)
      for (int j = 0; j < U.cols; ++j) U.at(a, j) = -U.at(a, j);
  }

  bool find_pivot(int k, int& pi, int& pj) {
    bool found = false;
    Int best = 0;
    for (int i = k; i < A.rows; ++i)
      for (int j = k; j < A.cols; ++j) {
        if (A.at(i, j) == 0) continue;
        Int v = abs(A.at(i, j));
        if (!found || v < best) {
          best = v;
          pi = i;
          pj = j;
          found = true;
        }
        if (best == 1) return true;
      }
    return found;
  }

  SNFResult run() {
    const int n = std::min(A.rows, A.cols);
    int k = 0;
    for (; k < n; ++k) {
      int pi, pj;
      if (!find_pivot(k, pi, pj)) break;
      swap_rows(k, pi);
      swap_cols(k, pj);
      // clear row and column k with gcd-improving pivoting
      for (;;) {
        bool done = true;
        for (int i = k + 1; i < A.rows; ++i) {
          if (A.at(i, k) == 0) continue;
          Int q = A.at(i, k) / A.at(k, k);
          add_row(i, k, -q);
          if (A.at(i, k) != 0) {
            // remainder strictly smaller, promote it to pivot
            swap_rows(k, i);
            done = false;
          }
        }
        for (int j = k + 1; j < A.cols; ++j) {
          if (A.at(k, j) == 0) continue;
          Int q = A.at(k, j) / A.at(k, k);
          add_col(j, k, -q);
          if (A.at(k, j) != 0) {
            swap_cols(k, j);
            done = false;
          }
        }
        if (!done) continue;
        // pivot must divide every remaining entry
        bool divides = true;
        for (int i = k + 1; i < A.rows && divides; ++i)
          for (int j = k + 1; j < A.cols && divides; ++j)
            if (A.at(i, j) % A.at(k, k) != 0) {
              add_row(k, i, 1);
              divides = false;
            }
        if (divides) break;
      }
      if (A.at(k, k) < 0) negate_row(k);
    }
    SNFResult res;
    res.rank = k;
    for (int i = 0; i < k; ++i) res.divisors.push_back(A.at(i, i));
    if (track) {
      res.U = std::move(U);
      res.V = std::move(V);
      res.Vinv = std::move(Vinv);
    }
    return res;
  }
};

}  // namespace

SNFResult smith_normal_form(const IntMatrix& m, bool with_transforms) {
  SnfWorker w(m, with_transforms);
  return w.run();
}

SNFResult smith_sparse(int rows, int cols, std::vector<SparseEntry> entries) {
  // map-of-maps storage, eliminate unit pivots greedily by fill estimate
  std::vector<std::map<int, Int>> row(rows);
  std::vector<std::map<int, Int>> col(cols);
  for (auto& e : entries) {
    if (e.value == 0) continue;
    Int& v = row[e.row][e.col];
    v += Int(static_cast<long>(e.value));
    if (v == 0) row[e.row].erase(e.col);
  }
  for (int i = 0; i < rows; ++i)
    for (auto& [j, v] : row[i]) col[j][i] = v;

  int ones = 0;
  for (;;) {
    int bi = -1, bj = -1;
    long long best_fill = -1;
    for (int i = 0; i < rows; ++i) {
      for (auto& [j, v] : row[i]) {
        if (v != 1 && v != -1) continue;
        long long fill = static_cast<long long>(row[i].size() - 1) * (col[j].size() - 1);
        if (best_fill < 0 || fill < best_fill) {
          best_fill = fill;
          bi = i;
          bj = j;
        }
        if (best_fill == 0) break;
      }
      if (best_fill == 0) break;
    }
    if (bi < 0) break;
    Int piv = row[bi][bj];
    // eliminate column bj using row bi
    std::vector<std::pair<int, Int>> col_entries(col[bj].begin(), col[bj].end());
    std::vector<std::pair<int, Int>> piv_row(row[bi].begin(), row[bi].end());
    for (auto& [i, v] : col_entries) {
      if (i == bi) continue;
      Int f = -v * piv;  // piv in {1,-1}: multiplier so that v + f*piv == 0
      for (auto& [j, w] : piv_row) {
        if (j == bj) continue;
        Int& cell = row[i][j];
        cell += f * w;
        if (cell == 0) {
          row[i].erase(j);
          col[j].erase(i);
        } else {
          col[j][i] = cell;
        }
      }
      row[i].erase(bj);
    }
    for (auto& [j, w] : piv_row) {
      if (j == bj) continue;
      col[j].erase(bi);
    }
    row[bi].clear();
    col[bj].clear();
    ++ones;
  }

  // densify the residue
  std::vector<int> live_rows, live_cols;
  for (int i = 0; i < rows; ++i)
    if (!row[i].empty()) live_rows.push_back(i);
  std::vector<char> col_live(cols, 0);
  for (int i : live_rows)
    for (auto& [j, v] : row[i]) col_live[j] = 1;
  for (int j = 0; j < cols; ++j)
    if (col_live[j]) live_cols.push_back(j);
  std::unordered_map<int, int> col_index;
  for (size_t j = 0; j < live_cols.size(); ++j) col_index[live_cols[j]] = static_cast<int>(j);

  IntMatrix dense(static_cast<int>(live_rows.size()), static_cast<int>(live_cols.size()), Int(0));
  for (size_t i = 0; i < live_rows.size(); ++i)
    for (auto& [j, v] : row[live_rows[i]]) dense.at(static_cast<int>(i), col_index[j]) = v;

  SNFResult inner = smith_normal_form(dense, false);
  SNFResult res;
  res.rank = ones + inner.rank;
  res.divisors.assign(ones, Int(1));
  for (auto& d : inner.divisors) res.divisors.push_back(d);
  return res;
}

namespace {

// column echelon form over Z by unimodular column operations, kept sparse.
// M V = E where each nonzero column of E has a distinct topmost row, and the
// unpivoted columns of V span the kernel lattice exactly.
struct ColumnEchelon {
  int rows = 0;
  int cols = 0;
  std::vector<std::map<int, Int>> col;   // echelon columns (row -> value)
  std::vector<std::map<int, Int>> vcol;  // transform columns
  std::vector<int> pivot_row;            // -1 for kernel columns
  std::vector<int> pivot_order;          // pivoted columns by ascending row

  explicit ColumnEchelon(const IntMatrix& m) : rows(m.rows), cols(m.cols) {
    col.resize(cols);
    vcol.resize(cols);
    pivot_row.assign(cols, -1);
    for (int j = 0; j < cols; ++j) {
      vcol[j][j] = 1;
      for (int i = 0; i < rows; ++i)
        if (m.at(i, j) != 0) col[j][i] = m.at(i, j);
    }
    for (int r = 0; r < rows; ++r) reduce_row(r);
  }

  void colop(int dst, int src, const Int& f) {
    if (f == 0) return;
    for (auto& [i, v] : col[src]) {
      Int& cell = col[dst][i];
      cell += f * v;
      if (cell == 0) col[dst].erase(i);
    }
    for (auto& [i, v] : vcol[src]) {
      Int& cell = vcol[dst][i];
      cell += f * v;
      if (cell == 0) vcol[dst].erase(i);
    }
  }

  void reduce_row(int r) {
    for (;;) {
      int best = -1;
      Int best_abs = 0;
      int live = 0;
      for (int j = 0; j < cols; ++j) {
        if (pivot_row[j] >= 0) continue;
        auto it = col[j].find(r);
        if (it == col[j].end()) continue;
        ++live;
        Int a = abs(it->second);
        if (best < 0 || a < best_abs) {
          best = j;
          best_abs = a;
        }
      }
      if (best < 0) return;
      if (live == 1) {
        pivot_row[best] = r;
        pivot_order.push_back(best);
        return;
      }
      Int piv = col[best][r];
      for (int j = 0; j < cols; ++j) {
        if (j == best || pivot_row[j] >= 0) continue;
        auto it = col[j].find(r);
        if (it == col[j].end()) continue;
        Int q = it->second / piv;
        colop(j, best, -q);
      }
    }
  }
};

}  // namespace

IntMatrix kernel_basis(const IntMatrix& m) {
  ColumnEchelon ech(m);
  std::vector<int> kernel_cols;
  for (int j = 0; j < m.cols; ++j)
    if (ech.pivot_row[j] < 0) {
      assert(ech.col[j].empty());
      kernel_cols.push_back(j);
    }
  IntMatrix ker(m.cols, static_cast<int>(kernel_cols.size()), Int(0));
  for (size_t j = 0; j < kernel_cols.size(); ++j)
    for (auto& [i, v] : ech.vcol[kernel_cols[j]]) ker.at(i, static_cast<int>(j)) = v;
  return ker;
}

std::optional<std::vector<Int>> solve_integer(const IntMatrix& m, const std::vector<Int>& b) {
  assert(static_cast<int>(b.size()) == m.rows);
  ColumnEchelon ech(m);
  std::vector<Int> rem = b;
  std::vector<Int> y(m.cols, 0);
  for (int j : ech.pivot_order) {
    int r = ech.pivot_row[j];
    if (rem[r] == 0) continue;
    const Int& piv = ech.col[j].at(r);
    if (rem[r] % piv != 0) return std::nullopt;
    Int f = rem[r] / piv;
    y[j] = f;
    for (auto& [i, v] : ech.col[j]) rem[i] -= f * v;
  }
  for (auto& v : rem)
    if (v != 0) return std::nullopt;
  std::vector<Int> x(m.cols, 0);
  for (int j = 0; j < m.cols; ++j) {
    if (y[j] == 0) continue;
    for (auto& [i, v] : ech.vcol[j]) x[i] += y[j] * v;
  }
  return x;
}

bool in_column_span(const IntMatrix& m, const std::vector<Int>& x) {
  return solve_integer(m, x).has_value();
}

CokernelInvariants cokernel_invariants(const IntMatrix& m) {
  SNFResult s = smith_normal_form(m, false);
  CokernelInvariants inv;
  for (auto& d : s.divisors)
    if (d > 1) inv.torsion.push_back(d);
  inv.free_rank = m.rows - s.rank;
  return inv;
}

}  // namespace btq
