#include "btq/quotient.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <set>

#include "btq/errors.hpp"

namespace btq {

// ---------------------------------------------------------------------------
// global time budget (BTQ_BUDGET_MS)
// ---------------------------------------------------------------------------

namespace {

struct Budget {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  long long limit_ms = -1;

  Budget() {
    if (const char* env = std::getenv("BTQ_BUDGET_MS")) limit_ms = std::atoll(env);
  }
  void check() const {
    if (limit_ms < 0) return;
    auto now = std::chrono::steady_clock::now();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - start).count();
    if (ms > limit_ms) throw BudgetExceeded("global time budget BTQ_BUDGET_MS exhausted");
  }
};

Budget& budget() {
  static Budget b;
  return b;
}

}  // namespace

void check_global_budget() { budget().check(); }

std::string GroupSpec::str() const {
  if (is_full_group()) return "GL_" + std::to_string(d) + "(F_" + std::to_string(q) + "[t])";
  return "Gamma_(" + modulus.str() + ") in GL_" + std::to_string(d) + "(F_" + std::to_string(q) + "[t])";
}

// ---------------------------------------------------------------------------
// residue ring A/(m)
// ---------------------------------------------------------------------------

long long ResidueRing::size() const {
  if (is_trivial()) return 1;
  long long n = 1;
  for (int i = 0; i < modulus.deg(); ++i) n *= q;
  return n;
}

std::vector<PolyA> ResidueRing::elements() const {
  std::vector<PolyA> out;
  if (is_trivial()) {
    out.push_back(PolyA::zero(q));
    return out;
  }
  int deg = modulus.deg();
  std::vector<int> c(deg, 0);
  std::function<void(int)> rec = [&](int pos) {
    if (pos == deg) {
      out.push_back(PolyA(q, c));
      return;
    }
    for (int v = 0; v < q; ++v) {
      c[pos] = v;
      rec(pos + 1);
    }
  };
  rec(0);
  return out;
}

std::string resmat_str(const ResMat& m, int d) {
  std::string s;
  for (int i = 0; i < d * d; ++i) {
    for (int c : m[i].coeffs()) s += static_cast<char>('0' + c);
    s += ",";
  }
  return s;
}

ResMat resmat_mul(const ResMat& x, const ResMat& y, int d, const ResidueRing& ring) {
  ResMat r(d * d, PolyA::zero(ring.q));
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      if (x[i * d + k].is_zero()) continue;
      for (int j = 0; j < d; ++j) r[i * d + j] = r[i * d + j] + x[i * d + k] * y[k * d + j];
    }
  if (!ring.is_trivial())
    for (auto& e : r) e = e % ring.modulus;
  else
    for (auto& e : r) e = PolyA::zero(ring.q);
  return r;
}

ResMat reduce_mat(const MatA& g, const ResidueRing& ring) {
  ResMat r;
  for (int i = 0; i < g.rows; ++i)
    for (int j = 0; j < g.cols; ++j)
      r.push_back(ring.is_trivial() ? PolyA::zero(ring.q) : g.at(i, j) % ring.modulus);
  return r;
}

namespace {

PolyA ring_inverse(const PolyA& x, const ResidueRing& ring) {
  // extended euclid: a*x + b*m = 1
  PolyA a = x % ring.modulus, m = ring.modulus;
  PolyA r0 = m, r1 = a;
  PolyA s0 = PolyA::zero(ring.q), s1 = PolyA::one(ring.q);
  while (!r1.is_zero()) {
    PolyA qq(ring.q), rem(ring.q);
    r0.divmod(r1, qq, rem);
    PolyA snew = s0 - qq * s1;
    r0 = r1;
    r1 = rem;
    s0 = s1;
    s1 = snew;
  }
  if (r0.deg() != 0) throw Error("ring element is not invertible");
  FqElem lead_inv = FqElem(ring.q, r0.coeff(0)).inverse();
  return (s0 * lead_inv) % ring.modulus;
}

PolyA resmat_det(const ResMat& m, int d, const ResidueRing& ring) {
  if (d == 1) return m[0];
  PolyA det = PolyA::zero(ring.q);
  int sign = 1;
  for (int c = 0; c < d; ++c) {
    ResMat minor;
    for (int i = 1; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (j != c) minor.push_back(m[i * d + j]);
    PolyA cof = m[c] * resmat_det(minor, d - 1, ring);
    det = (sign > 0) ? det + cof : det - cof;
    sign = -sign;
  }
  return ring.is_trivial() ? PolyA::zero(ring.q) : det % ring.modulus;
}

ResMat resmat_inverse(const ResMat& m, int d, const ResidueRing& ring) {
  PolyA det = resmat_det(m, d, ring);
  PolyA dinv = ring_inverse(det, ring);
  ResMat adj(d * d, PolyA::zero(ring.q));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      ResMat minor;
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          if (r != j && c != i) minor.push_back(m[r * d + c]);
      PolyA cof = (d == 1) ? PolyA::one(ring.q) : resmat_det(minor, d - 1, ring);
      if ((i + j) % 2 == 1) cof = -cof;
      adj[i * d + j] = (cof * dinv) % ring.modulus;
    }
  return adj;
}

}  // namespace

MatA lift_to_gl(const ResMat& target, int d, const ResidueRing& ring) {
  const int q = ring.q;
  MatA id(d, d, PolyA::zero(q));
  for (int i = 0; i < d; ++i) id.at(i, i) = PolyA::one(q);
  if (ring.is_trivial()) return id;

  PolyA det = resmat_det(target, d, ring);
  int cval = -1;
  for (int c = 1; c < q; ++c)
    if ((det - PolyA::constant(q, c)) % ring.modulus == PolyA::zero(q)) cval = c;
  if (cval < 0) throw Error("residue matrix determinant is not liftable to F_q^x");

  // reduce diag(c^-1,1,..) * target to the identity by elementary row ops
  ResMat w = target;
  int cinv = FqElem(q, cval).inverse().value();
  for (int j = 0; j < d; ++j) w[j] = (w[j] * FqElem(q, cinv)) % ring.modulus;
  std::vector<std::tuple<int, int, PolyA>> ops;  // row_i += f * row_j
  auto apply = [&](int i, int j, const PolyA& f) {
    if (f.is_zero()) return;
    for (int cc = 0; cc < d; ++cc) w[i * d + cc] = (w[i * d + cc] + f * w[j * d + cc]) % ring.modulus;
    ops.emplace_back(i, j, f);
  };
  std::vector<PolyA> ring_elems = ring.elements();

  for (int col = 0; col < d; ++col) {
    if (!ring.is_ring_unit(w[col * d + col])) {
      // stable range 1: some combination of the rows below fixes the pivot
      bool fixed = false;
      std::vector<int> pick(d - col - 1, 0);
      std::function<void(int)> search = [&](int pos) {
        if (fixed) return;
        if (pos == static_cast<int>(pick.size())) {
          PolyA acc = w[col * d + col];
          for (size_t r = 0; r < pick.size(); ++r)
            acc = (acc + ring_elems[pick[r]] * w[(col + 1 + static_cast<int>(r)) * d + col]) % ring.modulus;
          if (ring.is_ring_unit(acc)) {
            for (size_t r = 0; r < pick.size(); ++r)
              apply(col, col + 1 + static_cast<int>(r), ring_elems[pick[r]]);
            fixed = true;
          }
          return;
        }
        for (size_t e = 0; e < ring_elems.size(); ++e) {
          pick[pos] = static_cast<int>(e);
          search(pos + 1);
          if (fixed) return;
        }
      };
      search(0);
      if (!fixed) throw Error("stable-range search failed; matrix not invertible over A/m");
    }
    PolyA inv = ring_inverse(w[col * d + col], ring);
    for (int r = 0; r < d; ++r) {
      if (r == col || w[r * d + col].is_zero()) continue;
      apply(r, col, -(w[r * d + col] * inv) % ring.modulus);
    }
  }
  // diagonal with unit entries, det 1; push each unit into the next slot via
  // the Whitehead identity diag(a, a^-1) = E12(a) E21(-a^-1) E12(a) E12(-1) E21(1) E12(-1)
  for (int i = 0; i + 1 < d; ++i) {
    PolyA u = w[i * d + i];
    if ((u - PolyA::one(q)) % ring.modulus == PolyA::zero(q)) continue;
    PolyA a = ring_inverse(u, ring);  // multiply rows (i, i+1) by diag(a, a^-1)
    PolyA ainv = u;
    apply(i, i + 1, -PolyA::one(q));
    apply(i + 1, i, PolyA::one(q));
    apply(i, i + 1, -PolyA::one(q));
    apply(i, i + 1, a);
    apply(i + 1, i, -(ainv % ring.modulus));
    apply(i, i + 1, a);
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      PolyA expect = (i == j) ? PolyA::one(q) : PolyA::zero(q);
      if (!((w[i * d + j] - expect) % ring.modulus == PolyA::zero(q)))
        throw Error("elementary reduction over A/m failed");
    }

  // target = diag(c,1,..) * product of inverted ops
  MatA lift = id;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    auto& [i, j, f] = *it;
    for (int cc = 0; cc < d; ++cc) lift.at(i, cc) = lift.at(i, cc) - f * lift.at(j, cc);
  }
  for (int cc = 0; cc < d; ++cc) lift.at(0, cc) = lift.at(0, cc) * FqElem(q, cval);
  if (!mat_det_a(lift).is_unit()) throw Error("lift has non-unit determinant");
  ResMat back = reduce_mat(lift, ring);
  for (int i = 0; i < d * d; ++i)
    if (!((back[i] - target[i]) % ring.modulus == PolyA::zero(q)))
      throw Error("lift does not reduce to target");
  return lift;
}

// ---------------------------------------------------------------------------
// lattice shapes
// ---------------------------------------------------------------------------

LatticeShape lattice_shape(const MatK& g) {
  BirkhoffWitness bw = birkhoff(g);
  LatticeShape out;
  out.b = bw.a;  // already sorted descending
  out.u = bw.u;
  const int d = g.rows;
  int total = std::accumulate(out.b.begin(), out.b.end(), 0);
  int shift = total >= 0 ? total / d : -((-total + d - 1) / d);
  for (auto& e : out.b) e -= shift;
  return out;
}

// ---------------------------------------------------------------------------
// block structure and small-group helpers
// ---------------------------------------------------------------------------

namespace {

struct BlockInfo {
  std::vector<int> start;
  std::vector<int> size;
};

BlockInfo blocks_of(const std::vector<int>& b) {
  BlockInfo info;
  int i = 0;
  const int d = static_cast<int>(b.size());
  while (i < d) {
    int j = i;
    while (j < d && b[j] == b[i]) ++j;
    info.start.push_back(i);
    info.size.push_back(j - i);
    i = j;
  }
  return info;
}

const std::vector<std::vector<std::vector<int>>>& gl_matrices(int q, int k) {
  static std::map<std::pair<int, int>, std::vector<std::vector<std::vector<int>>>> cache;
  auto key = std::make_pair(q, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<int>> m(k, std::vector<int>(k, 0));
  long long total = 1;
  for (int i = 0; i < k * k; ++i) total *= q;
  for (long long mask = 0; mask < total; ++mask) {
    long long v = mask;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        m[i][j] = static_cast<int>(v % q);
        v /= q;
      }
    std::vector<std::vector<int>> w = m;
    int det = 1;
    for (int c = 0; c < k && det != 0; ++c) {
      int piv = -1;
      for (int r = c; r < k; ++r)
        if (w[r][c] != 0) {
          piv = r;
          break;
        }
      if (piv < 0) {
        det = 0;
        break;
      }
      if (piv != c) std::swap(w[piv], w[c]);
      det = static_cast<int>((static_cast<long long>(det) * w[c][c]) % q);
      int inv = FqElem(q, w[c][c]).inverse().value();
      for (int r = c + 1; r < k; ++r) {
        if (w[r][c] == 0) continue;
        int f = static_cast<int>((static_cast<long long>(w[r][c]) * inv) % q);
        for (int cc = c; cc < k; ++cc)
          w[r][cc] = static_cast<int>((((w[r][cc] - static_cast<long long>(f) * w[c][cc]) % q) + q) % q);
      }
    }
    if (det != 0) out.push_back(m);
  }
  return cache.emplace(key, std::move(out)).first->second;
}

long long pow_ll(long long base, long long e) {
  long long r = 1;
  while (e-- > 0) r *= base;
  return r;
}

long long gl_order(int q, int k) {
  long long qk = pow_ll(q, k);
  long long r = 1;
  for (int i = 0; i < k; ++i) r *= qk - pow_ll(q, i);
  return r;
}

// image of s in GL_d(F_q) through the mod-pi frame: entry (i,l) is the
// coefficient of t^{b_l - b_i} in s_il
std::vector<std::vector<int>> pi_action(const MatA& s, const std::vector<int>& b, int q) {
  const int d = static_cast<int>(b.size());
  std::vector<std::vector<int>> a(d, std::vector<int>(d, 0));
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l) {
      int e = b[l] - b[i];
      if (e >= 0) a[i][l] = ((s.at(i, l).coeff(e)) % q + q) % q;
    }
  return a;
}

// the image of the stabilizer in GL_d(F_q): structural description, no
// element lists required
std::vector<std::vector<std::vector<int>>> flag_action_group(const std::vector<int>& b, int q,
                                                             const ResidueRing& ring) {
  const int d = static_cast<int>(b.size());
  BlockInfo blocks = blocks_of(b);
  const int degm = ring.is_trivial() ? 0 : ring.modulus.deg();
  std::vector<std::pair<int, int>> freepos;
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l) {
      if (b[l] <= b[i]) continue;
      int bound = b[l] - b[i];
      bool free = ring.is_trivial() ? true : bound >= degm;
      if (free) freepos.emplace_back(i, l);
    }
  std::vector<std::vector<std::vector<int>>> out;
  long long nfree = pow_ll(q, static_cast<long long>(freepos.size()));
  if (ring.is_trivial()) {
    std::vector<size_t> bidx(blocks.size.size(), 0);
    long long nblock = 1;
    for (size_t k = 0; k < blocks.size.size(); ++k)
      nblock *= static_cast<long long>(gl_matrices(q, blocks.size[k]).size());
    for (long long step = 0; step < nblock; ++step) {
      long long v = step;
      for (size_t k = 0; k < blocks.size.size(); ++k) {
        bidx[k] = static_cast<size_t>(v % gl_matrices(q, blocks.size[k]).size());
        v /= static_cast<long long>(gl_matrices(q, blocks.size[k]).size());
      }
      for (long long fmask = 0; fmask < nfree; ++fmask) {
        std::vector<std::vector<int>> m(d, std::vector<int>(d, 0));
        for (size_t k = 0; k < blocks.size.size(); ++k) {
          const auto& bm = gl_matrices(q, blocks.size[k])[bidx[k]];
          for (int i = 0; i < blocks.size[k]; ++i)
            for (int j = 0; j < blocks.size[k]; ++j) m[blocks.start[k] + i][blocks.start[k] + j] = bm[i][j];
        }
        long long fv = fmask;
        for (auto& [i, l] : freepos) {
          m[i][l] = static_cast<int>(fv % q);
          fv /= q;
        }
        out.push_back(std::move(m));
      }
    }
  } else {
    for (long long fmask = 0; fmask < nfree; ++fmask) {
      std::vector<std::vector<int>> m(d, std::vector<int>(d, 0));
      for (int i = 0; i < d; ++i) m[i][i] = 1;
      long long fv = fmask;
      for (auto& [i, l] : freepos) {
        m[i][l] = static_cast<int>(fv % q);
        fv /= q;
      }
      out.push_back(std::move(m));
    }
  }
  return out;
}

std::string flag_str(const std::vector<Subspace>& flag) {
  std::string s;
  for (auto& w : flag) s += w.str() + "|";
  return s;
}

std::vector<Subspace> flag_image(const std::vector<Subspace>& flag,
                                 const std::vector<std::vector<int>>& mat) {
  std::vector<Subspace> out;
  for (auto& w : flag) out.push_back(subspace_image(w, mat));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// type tables
// ---------------------------------------------------------------------------

TypeTable& QuotientComplex::ensure_type(const std::vector<int>& b) const {
  auto it = types_.find(b);
  if (it != types_.end()) return it->second;
  budget().check();
  const int d = group.d;
  const int q = group.q;
  TypeTable tt;
  tt.b = b;
  {
    SplittingType t;
    for (int i = d - 1; i >= 0; --i) t.push_back(-b[i]);
    int mn = t.back();
    for (auto& x : t) x -= mn;
    tt.type = t;
  }
  tt.bound.assign(d, std::vector<int>(d, -1));
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l)
      if (b[l] >= b[i]) tt.bound[i][l] = b[l] - b[i];

  BlockInfo blocks = blocks_of(b);
  const ResidueRing& ring = ring_;
  const int degm = ring.is_trivial() ? 0 : ring.modulus.deg();

  tt.stab_order_full = 1;
  tt.stab_order_congruence = 1;
  for (size_t k = 0; k < blocks.size.size(); ++k) tt.stab_order_full *= gl_order(q, blocks.size[k]);
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l) {
      if (b[l] <= b[i]) continue;
      tt.stab_order_full *= pow_ll(q, tt.bound[i][l] + 1);
      if (!ring.is_trivial())
        tt.stab_order_congruence *= pow_ll(q, std::max(0, tt.bound[i][l] - degm + 1));
    }
  if (ring.is_trivial()) tt.stab_order_congruence = tt.stab_order_full;

  // Sbar with explicit sections
  {
    std::vector<std::pair<int, int>> freepos;
    std::vector<int> freedeg;
    for (int i = 0; i < d; ++i)
      for (int l = 0; l < d; ++l) {
        if (b[l] <= b[i]) continue;
        int dg = ring.is_trivial() ? -1 : std::min(tt.bound[i][l], degm - 1);
        if (dg >= 0) {
          freepos.emplace_back(i, l);
          freedeg.push_back(dg);
        }
      }
    std::vector<size_t> bidx(blocks.size.size(), 0);
    long long nblock = 1;
    for (size_t k = 0; k < blocks.size.size(); ++k)
      nblock *= static_cast<long long>(gl_matrices(q, blocks.size[k]).size());
    long long nfree = 1;
    for (int dg : freedeg) nfree *= pow_ll(q, dg + 1);
    for (long long step = 0; step < nblock; ++step) {
      long long v = step;
      for (size_t k = 0; k < blocks.size.size(); ++k) {
        bidx[k] = static_cast<size_t>(v % gl_matrices(q, blocks.size[k]).size());
        v /= static_cast<long long>(gl_matrices(q, blocks.size[k]).size());
      }
      for (long long fmask = 0; fmask < nfree; ++fmask) {
        MatA s(d, d, PolyA::zero(q));
        for (size_t k = 0; k < blocks.size.size(); ++k) {
          const auto& bm = gl_matrices(q, blocks.size[k])[bidx[k]];
          for (int i = 0; i < blocks.size[k]; ++i)
            for (int j = 0; j < blocks.size[k]; ++j)
              s.at(blocks.start[k] + i, blocks.start[k] + j) = PolyA::constant(q, bm[i][j]);
        }
        long long fv = fmask;
        for (size_t fp = 0; fp < freepos.size(); ++fp) {
          std::vector<int> cs(freedeg[fp] + 1);
          for (auto& x : cs) {
            x = static_cast<int>(fv % q);
            fv /= q;
          }
          s.at(freepos[fp].first, freepos[fp].second) = PolyA(q, cs);
        }
        ResMat img = reduce_mat(s, ring);
        std::string key = resmat_str(img, d);
        if (!tt.section.count(key)) {
          tt.sbar.push_back(img);
          tt.section.emplace(key, s);
        }
        if (ring.is_trivial()) break;  // single image
      }
      if (ring.is_trivial()) break;
    }
  }

  // congruence stabilizer element list (only when small)
  {
    const long long cap = 200000;
    if (tt.stab_order_congruence <= cap) {
      std::vector<std::pair<int, int>> freepos;
      std::vector<int> freedeg;
      for (int i = 0; i < d; ++i)
        for (int l = 0; l < d; ++l) {
          if (b[l] <= b[i]) continue;
          int dg = ring.is_trivial() ? tt.bound[i][l] : tt.bound[i][l] - degm;
          if (dg >= 0) {
            freepos.emplace_back(i, l);
            freedeg.push_back(dg);
          }
        }
      long long nfree = 1;
      for (int dg : freedeg) nfree *= pow_ll(q, dg + 1);
      auto fill_free = [&](MatA& s, long long fmask) {
        long long fv = fmask;
        for (size_t fp = 0; fp < freepos.size(); ++fp) {
          std::vector<int> cs(freedeg[fp] + 1);
          for (auto& x : cs) {
            x = static_cast<int>(fv % q);
            fv /= q;
          }
          PolyA w(q, cs);
          s.at(freepos[fp].first, freepos[fp].second) = ring.is_trivial() ? w : ring.modulus * w;
        }
      };
      if (ring.is_trivial()) {
        std::vector<size_t> bidx(blocks.size.size(), 0);
        long long nblock = 1;
        for (size_t k = 0; k < blocks.size.size(); ++k)
          nblock *= static_cast<long long>(gl_matrices(q, blocks.size[k]).size());
        for (long long step = 0; step < nblock; ++step) {
          long long v = step;
          for (size_t k = 0; k < blocks.size.size(); ++k) {
            bidx[k] = static_cast<size_t>(v % gl_matrices(q, blocks.size[k]).size());
            v /= static_cast<long long>(gl_matrices(q, blocks.size[k]).size());
          }
          for (long long fmask = 0; fmask < nfree; ++fmask) {
            MatA s(d, d, PolyA::zero(q));
            for (size_t k = 0; k < blocks.size.size(); ++k) {
              const auto& bm = gl_matrices(q, blocks.size[k])[bidx[k]];
              for (int i = 0; i < blocks.size[k]; ++i)
                for (int j = 0; j < blocks.size[k]; ++j)
                  s.at(blocks.start[k] + i, blocks.start[k] + j) = PolyA::constant(q, bm[i][j]);
            }
            fill_free(s, fmask);
            tt.congruence_stab.push_back(std::move(s));
          }
        }
      } else {
        MatA base(d, d, PolyA::zero(q));
        for (int i = 0; i < d; ++i) base.at(i, i) = PolyA::one(q);
        for (long long fmask = 0; fmask < nfree; ++fmask) {
          MatA s = base;
          fill_free(s, fmask);
          tt.congruence_stab.push_back(std::move(s));
        }
      }
      assert(static_cast<long long>(tt.congruence_stab.size()) == tt.stab_order_congruence);
    }
  }

  {
    MatK diag = identity_k(q, d);
    for (int i = 0; i < d; ++i) diag.at(i, i) = KElem::pi_pow(q, b[i]);
    tt.standard_key = vertex_key(diag);
  }
  return types_.emplace(b, std::move(tt)).first->second;
}

const TypeTable& QuotientComplex::type_table(const std::vector<int>& b) const { return ensure_type(b); }

std::string QuotientComplex::coset_label(const ResMat& ubar, const TypeTable& tt) const {
  std::string best;
  const int d = group.d;
  for (auto& s : tt.sbar) {
    std::string cand = resmat_str(resmat_mul(ubar, s, d, ring_), d);
    if (best.empty() || cand < best) best = cand;
  }
  return best;
}

std::string QuotientComplex::orbit_key(const std::vector<int>& b, const std::string& label) const {
  std::string key;
  for (int x : b) key += std::to_string(x) + ",";
  return key + "#" + label;
}

// ---------------------------------------------------------------------------
// masks and stabilizers
// ---------------------------------------------------------------------------

SubMask QuotientComplex::truncation_mask(int a) const {
  SubMask mask = empty_mask(complex);
  auto unstable_dirs = [&](int orbit) {
    unsigned bits = 0;
    const auto& g = vertices[orbit].gaps;
    for (size_t i = 0; i < g.size(); ++i)
      if (g[i] >= a) bits |= 1u << i;
    return bits;
  };
  for (int v = 0; v < complex.size(0); ++v) mask[0][v] = unstable_dirs(orbit_of_complex_vertex[v]) != 0;
  for (int i = 1; i <= complex.dim(); ++i)
    for (int c = 0; c < complex.size(i); ++c) {
      unsigned common = ~0u;
      for (int v : complex.cells[i][c].verts) common &= unstable_dirs(orbit_of_complex_vertex[v]);
      mask[i][c] = common != 0;
    }
  return mask;
}

bool QuotientComplex::vertex_in_truncation(int orbit, int a) const {
  return vertices[orbit].max_gap >= a;
}

std::vector<MatA> QuotientComplex::vertex_stabilizer(int orbit) const {
  const TypeTable& tt = ensure_type(vertices[orbit].b);
  return tt.congruence_stab;  // isomorphic copy at the standard frame
}

std::vector<MatA> QuotientComplex::cell_stabilizer(int dim, int cell) const {
  const CellOrbit& c = cells[dim][cell];
  const TypeTable& tt = ensure_type(vertices[c.chain_orbit[0]].b);
  std::vector<MatA> out;
  for (auto& s : tt.congruence_stab) {
    auto act = pi_action(s, tt.b, group.q);
    bool fixes = true;
    for (auto& w : c.flag)
      if (!(subspace_image(w, act) == w)) fixes = false;
    if (fixes) out.push_back(s);
  }
  return out;
}

int QuotientComplex::orbit_of_lattice(const MatK& g) const {
  LatticeShape shape = lattice_shape(g);
  auto it = types_.find(shape.b);
  if (it == types_.end()) return -1;
  std::string label = coset_label(reduce_mat(shape.u, ring_), it->second);
  auto oit = orbit_index_.find(orbit_key(shape.b, label));
  return oit == orbit_index_.end() ? -1 : oit->second;
}

// ---------------------------------------------------------------------------
// chain resolution (shared by facet computation and external lookups)
// ---------------------------------------------------------------------------

// Identifies the simplex orbit of a lattice chain M_0 > ... > M_len > pi M_0,
// where the actual lattices are (lift of `left`) * M_j.  Returns the owner
// orbit and the canonical-frame flag string; orbits along the chain are
// resolved through `orbit_of`, which may register new ones during build.
struct ResolvedChain {
  int owner_orbit = -1;
  int len = 0;
  std::string flag_string;
  std::vector<int> orbits;  // per original chain position
};

namespace {

ResolvedChain resolve_chain(const QuotientComplex& qc, const ResidueRing& ring, const ResMat& left,
                            const std::vector<MatK>& chain,
                            const std::function<int(const std::vector<int>&, const std::string&)>& orbit_of) {
  const int d = qc.group.d;
  const int q = qc.group.q;
  const int len = static_cast<int>(chain.size()) - 1;
  ResolvedChain out;
  out.len = len;
  std::vector<LatticeShape> shapes(len + 1);
  std::vector<int> orbits(len + 1), sigmas(len + 1);
  for (int j = 0; j <= len; ++j) {
    shapes[j] = lattice_shape(chain[j]);
    const TypeTable& tt = qc.type_table(shapes[j].b);
    std::string label = qc.coset_label(resmat_mul(left, reduce_mat(shapes[j].u, ring), d, ring), tt);
    orbits[j] = orbit_of(shapes[j].b, label);
    if (orbits[j] < 0) return out;  // unknown orbit; caller decides
    sigmas[j] = std::accumulate(shapes[j].b.begin(), shapes[j].b.end(), 0) % d;
  }
  out.orbits = orbits;
  int owner_pos = 0;
  for (int j = 1; j <= len; ++j)
    if (std::make_pair(orbits[j], sigmas[j]) < std::make_pair(orbits[owner_pos], sigmas[owner_pos]))
      owner_pos = j;
  out.owner_orbit = orbits[owner_pos];
  // rotate the chain so the owner position leads
  std::vector<MatK> rot;
  KElem pi = KElem::pi_pow(q, 1);
  for (int j = 0; j <= len; ++j) {
    int src = (owner_pos + j) % (len + 1);
    MatK m = chain[src];
    if (owner_pos + j > len) m = mat_scale(m, pi);
    rot.push_back(std::move(m));
  }
  const LatticeShape& os = shapes[owner_pos];
  const std::vector<int>& ob = os.b;
  MatK uinv = mat_inverse(matk_from_a(os.u));
  // X_j = pi^{-shift} D^-1 u^-1 M_j with a common homothety shift; the shift
  // is the minimal valuation of the first X
  std::vector<Subspace> flag;
  {
    MatK x1 = matmul(uinv, rot[1]);
    for (int r = 0; r < d; ++r) {
      KElem f = KElem::pi_pow(q, -ob[r]);
      for (int c = 0; c < d; ++c) x1.at(r, c) = x1.at(r, c) * f;
    }
    int mn = KElem::kInfinity;
    for (auto& e : x1.a)
      if (!e.is_zero()) mn = std::min(mn, e.valuation());
    for (int j = 1; j <= len; ++j) {
      MatK x = matmul(uinv, rot[j]);
      for (int r = 0; r < d; ++r) {
        KElem f = KElem::pi_pow(q, -ob[r] - mn);
        for (int c = 0; c < d; ++c) x.at(r, c) = x.at(r, c) * f;
      }
      std::vector<std::vector<int>> gens;
      for (int c = 0; c < d; ++c) {
        std::vector<int> col(d, 0);
        for (int r = 0; r < d; ++r) {
          const KElem& e = x.at(r, c);
          if (!e.is_integral()) throw Error("resolve_chain: not a lattice chain");
          if (!e.is_zero() && e.valuation() == 0) col[r] = pi_expansion(e, 0).at(0);
        }
        gens.push_back(col);
      }
      flag.push_back(subspace_from_spanning(q, d, gens));
    }
  }
  // twist the flag into the canonical label frame of the owner orbit
  const TypeTable& ott = qc.type_table(ob);
  if (!ring.is_trivial()) {
    const VertexOrbit& owner = qc.vertices[out.owner_orbit];
    ResMat ucan = reduce_mat(owner.u, ring);
    ResMat target = resmat_mul(resmat_inverse(ucan, d, ring),
                               resmat_mul(left, reduce_mat(os.u, ring), d, ring), d, ring);
    auto sit = ott.section.find(resmat_str(target, d));
    if (sit == ott.section.end()) throw Error("resolve_chain: missing section for label frame");
    auto act = pi_action(sit->second, ob, q);
    std::vector<Subspace> twisted;
    for (auto& w : flag) twisted.push_back(subspace_image(w, act));
    flag = std::move(twisted);
  }
  out.flag_string = flag_str(flag);
  return out;
}

int chain_parity_sign(const std::vector<int>& orbits) {
  const int n = static_cast<int>(orbits.size());
  std::vector<int> sorted = orbits;
  std::sort(sorted.begin(), sorted.end());
  int inv = 0;
  std::vector<int> slots(n);
  for (int j = 0; j < n; ++j)
    slots[j] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), orbits[j]) - sorted.begin());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (slots[a] > slots[b]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

}  // namespace

int QuotientComplex::cell_of_chain(const std::vector<MatK>& chain_lattices, int* sign_out) const {
  const int len = static_cast<int>(chain_lattices.size()) - 1;
  assert(len >= 1);
  ResMat left(group.d * group.d, PolyA::zero(group.q));
  if (!ring_.is_trivial())
    for (int i = 0; i < group.d; ++i) left[i * group.d + i] = PolyA::one(group.q);
  auto orbit_of = [&](const std::vector<int>& b, const std::string& label) -> int {
    auto it = orbit_index_.find(orbit_key(b, label));
    return it == orbit_index_.end() ? -1 : it->second;
  };
  ResolvedChain rc = resolve_chain(*this, ring_, left, chain_lattices, orbit_of);
  if (rc.owner_orbit < 0) return -1;
  auto it = cell_by_flag_[len].find(std::make_pair(rc.owner_orbit, rc.flag_string));
  if (it == cell_by_flag_[len].end()) return -1;
  if (sign_out) *sign_out = chain_parity_sign(rc.orbits);
  return it->second;
}

// ---------------------------------------------------------------------------
// quotient construction
// ---------------------------------------------------------------------------

QuotientComplex build_quotient(const GroupSpec& group, int alpha, int alpha_hi) {
  if (alpha <= group.d - 1) throw ConfigError("alpha must exceed d-1");
  if (alpha_hi < alpha) alpha_hi = alpha;
  const int d = group.d;
  const int q = group.q;
  if (!is_prime(q)) throw ConfigError("q must be prime");

  QuotientComplex out;
  out.group = group;
  out.alpha = alpha;
  out.alpha_hi = alpha_hi;
  out.active_bound = alpha_hi + 2 * (d - 1);
  out.ring_ = ResidueRing{q, group.modulus};
  const ResidueRing& ring = out.ring_;

  // ---- image of GL_d(A) in GL_d(A/m) --------------------------------------
  std::vector<ResMat> gbar;
  if (!ring.is_trivial()) {
    std::vector<PolyA> elems = ring.elements();
    long long total = 1;
    for (int i = 0; i < d * d; ++i) {
      total *= static_cast<long long>(elems.size());
      if (total > 200'000'000LL) throw SearchBudgetExceeded("residue ring too large");
    }
    std::vector<int> idx(d * d, 0);
    std::function<void(int)> rec = [&](int pos) {
      if (pos == d * d) {
        ResMat m;
        for (int i = 0; i < d * d; ++i) m.push_back(elems[idx[i]]);
        PolyA det = resmat_det(m, d, ring);
        if (!ring.is_ring_unit(det)) return;
        for (int c = 1; c < q; ++c)
          if ((det - PolyA::constant(q, c)) % ring.modulus == PolyA::zero(q)) {
            gbar.push_back(m);
            return;
          }
        return;
      }
      for (size_t e = 0; e < elems.size(); ++e) {
        idx[pos] = static_cast<int>(e);
        rec(pos + 1);
      }
    };
    rec(0);
  } else {
    gbar.push_back(ResMat(d * d, PolyA::zero(q)));
  }

  // ---- active types --------------------------------------------------------
  std::vector<std::vector<int>> active_types;
  {
    std::vector<int> gaps(d - 1, 0);
    std::function<void(int)> rec = [&](int pos) {
      if (pos == d - 1) {
        std::vector<int> b(d, 0);
        for (int i = d - 2; i >= 0; --i) b[i] = b[i + 1] + gaps[i];
        int total = std::accumulate(b.begin(), b.end(), 0);
        int shift = total >= 0 ? total / d : -((-total + d - 1) / d);
        for (auto& x : b) x -= shift;
        active_types.push_back(b);
        return;
      }
      for (int g = 0; g < out.active_bound; ++g) {
        gaps[pos] = g;
        rec(pos + 1);
      }
    };
    rec(0);
    std::sort(active_types.begin(), active_types.end());
  }

  auto register_orbit = [&](const std::vector<int>& b, const std::string& label) -> int {
    std::string key = out.orbit_key(b, label);
    auto it = out.orbit_index_.find(key);
    if (it != out.orbit_index_.end()) return it->second;
    const TypeTable& tt = out.ensure_type(b);
    VertexOrbit vo;
    vo.b = b;
    vo.type = tt.type;
    Polygon poly = polygon_of_type(tt.type);
    vo.gaps = poly.dp;
    vo.max_gap = vo.gaps.empty() ? 0 : *std::max_element(vo.gaps.begin(), vo.gaps.end());
    vo.label = label;
    vo.stab_order = tt.stab_order_congruence;
    if (!ring.is_trivial()) {
      ResMat labmat(d * d, PolyA::zero(q));
      size_t pos = 0;
      for (int e = 0; e < d * d; ++e) {
        std::vector<int> cs;
        while (pos < label.size() && label[pos] != ',') {
          cs.push_back(label[pos] - '0');
          ++pos;
        }
        ++pos;
        labmat[e] = PolyA(q, cs);
      }
      vo.u = lift_to_gl(labmat, d, ring);
    } else {
      vo.u = MatA(d, d, PolyA::zero(q));
      for (int i = 0; i < d; ++i) vo.u.at(i, i) = PolyA::one(q);
    }
    MatK rep = matk_from_a(vo.u);
    for (int c = 0; c < d; ++c) {
      KElem f = KElem::pi_pow(q, b[c]);
      for (int r = 0; r < d; ++r) rep.at(r, c) = rep.at(r, c) * f;
    }
    vo.rep_key = vertex_key(rep);
    int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(std::move(vo));
    out.orbit_index_.emplace(key, id);
    return id;
  };
  auto orbit_register_fn = [&](const std::vector<int>& b, const std::string& label) {
    return register_orbit(b, label);
  };

  for (auto& b : active_types) {
    budget().check();
    const TypeTable& tt = out.ensure_type(b);
    std::set<std::string> labels;
    for (auto& g : gbar) labels.insert(out.coset_label(g, tt));
    for (auto& label : labels) register_orbit(b, label);
  }
  const size_t n_active = out.vertices.size();
  auto is_active_orbit = [&](int o) { return out.vertices[o].max_gap < out.active_bound; };

  // ---- sublattice shapes per (type, subspace) ------------------------------
  std::map<std::pair<std::vector<int>, std::string>, std::pair<LatticeShape, int>> sub_shape;
  auto shape_of_subspace = [&](const std::vector<int>& b,
                               const Subspace& w) -> const std::pair<LatticeShape, int>& {
    auto key = std::make_pair(b, w.str());
    auto it = sub_shape.find(key);
    if (it != sub_shape.end()) return it->second;
    MatK diag = identity_k(q, d);
    for (int i = 0; i < d; ++i) diag.at(i, i) = KElem::pi_pow(q, b[i]);
    MatK sub = sublattice_matrix(diag, w);
    LatticeShape shape = lattice_shape(sub);
    int sigma = std::accumulate(shape.b.begin(), shape.b.end(), 0) % d;
    return sub_shape.emplace(key, std::make_pair(std::move(shape), sigma)).first->second;
  };

  // ---- flag-orbit tables per type ------------------------------------------
  struct FlagTable {
    std::vector<std::vector<Subspace>> reps;
    std::map<std::string, int> orbit_of_flag;
    std::vector<long long> orbit_size;
  };
  std::map<std::pair<std::vector<int>, int>, FlagTable> flag_tables;
  auto flag_table = [&](const std::vector<int>& b, int len) -> FlagTable& {
    auto key = std::make_pair(b, len);
    auto it = flag_tables.find(key);
    if (it != flag_tables.end()) return it->second;
    FlagTable ft;
    auto action = flag_action_group(b, q, ring);
    for (auto& flag : enumerate_flags(q, d, len)) {
      std::string fs = flag_str(flag);
      if (ft.orbit_of_flag.count(fs)) continue;
      int id = static_cast<int>(ft.reps.size());
      std::map<std::string, std::vector<Subspace>> seen;
      seen.emplace(fs, flag);
      std::vector<std::vector<Subspace>> frontier = {flag};
      while (!frontier.empty()) {
        std::vector<std::vector<Subspace>> next;
        for (auto& f : frontier)
          for (auto& m : action) {
            auto img = flag_image(f, m);
            std::string is = flag_str(img);
            if (seen.emplace(is, img).second) next.push_back(std::move(img));
          }
        frontier = std::move(next);
      }
      for (auto& [s, f] : seen) ft.orbit_of_flag[s] = id;
      ft.reps.push_back(seen.begin()->second);  // lexicographically minimal
      ft.orbit_size.push_back(static_cast<long long>(seen.size()));
    }
    return flag_tables.emplace(key, std::move(ft)).first->second;
  };

  // ---- enumerate cells ------------------------------------------------------
  out.cells.assign(d, {});
  out.cell_by_flag_.assign(d, {});
  for (size_t vo = 0; vo < n_active; ++vo) {
    budget().check();
    const std::vector<int> b = out.vertices[vo].b;  // copy: vertices may grow
    int sigma0 = std::accumulate(b.begin(), b.end(), 0) % d;
    for (int len = 1; len <= d - 1; ++len) {
      FlagTable& ft = flag_table(b, len);
      long long action_size = static_cast<long long>(flag_action_group(b, q, ring).size());
      for (size_t forb = 0; forb < ft.reps.size(); ++forb) {
        const std::vector<Subspace> flag = ft.reps[forb];
        std::vector<int> chain_orbit(len + 1);
        std::vector<int> chain_sigma(len + 1);
        chain_orbit[0] = static_cast<int>(vo);
        chain_sigma[0] = sigma0;
        bool all_active = true;
        for (int j = 1; j <= len; ++j) {
          const auto& [shape, sigma] = shape_of_subspace(b, flag[j - 1]);
          const TypeTable& tt = out.ensure_type(shape.b);
          ResMat uw = reduce_mat(shape.u, ring);
          ResMat uv = reduce_mat(out.vertices[vo].u, ring);
          std::string label = out.coset_label(resmat_mul(uv, uw, d, ring), tt);
          int o = register_orbit(shape.b, label);
          chain_orbit[j] = o;
          chain_sigma[j] = sigma;
          if (!is_active_orbit(o)) all_active = false;
        }
        if (!all_active) continue;
        bool owner_here = true;
        for (int j = 1; j <= len; ++j)
          if (std::make_pair(chain_orbit[j], chain_sigma[j]) <
              std::make_pair(chain_orbit[0], chain_sigma[0]))
            owner_here = false;
        if (!owner_here) continue;
        CellOrbit cell;
        cell.dim = len;
        cell.chain_orbit = chain_orbit;
        cell.chain_sigma = chain_sigma;
        cell.flag = flag;
        const TypeTable& tt0 = out.ensure_type(b);
        cell.stab_order =
            tt0.stab_order_congruence / action_size * (action_size / ft.orbit_size[forb]);
        int id = static_cast<int>(out.cells[len].size());
        out.cells[len].push_back(std::move(cell));
        for (auto& [s, f] : ft.orbit_of_flag)
          if (f == static_cast<int>(forb))
            out.cell_by_flag_[len].emplace(std::make_pair(static_cast<int>(vo), s), id);
      }
    }
  }

  // ---- facets ---------------------------------------------------------------
  for (int len = 1; len <= d - 1; ++len) {
    for (size_t ci = 0; ci < out.cells[len].size(); ++ci) {
      budget().check();
      CellOrbit& cell = out.cells[len][ci];
      const std::vector<int> b = out.vertices[cell.chain_orbit[0]].b;
      MatK diag = identity_k(q, d);
      for (int i = 0; i < d; ++i) diag.at(i, i) = KElem::pi_pow(q, b[i]);
      std::vector<MatK> chain = {diag};
      for (auto& w : cell.flag) chain.push_back(sublattice_matrix(diag, w));
      ResMat left = reduce_mat(out.vertices[cell.chain_orbit[0]].u, ring);
      cell.chain_keys.clear();
      {
        MatK uk = matk_from_a(out.vertices[cell.chain_orbit[0]].u);
        for (auto& m : chain) cell.chain_keys.push_back(vertex_key(matmul(uk, m)).id);
      }
      std::vector<std::pair<int, int>> order;
      for (int j = 0; j <= len; ++j) order.emplace_back(cell.chain_orbit[j], j);
      std::sort(order.begin(), order.end());
      cell.verts.clear();
      cell.position_of_vert.clear();
      for (auto& [o, pos] : order) {
        cell.verts.push_back(o);
        cell.position_of_vert.push_back(pos);
      }
      cell.facets.assign(len + 1, -1);
      for (int slot = 0; slot <= len; ++slot) {
        int omit = cell.position_of_vert[slot];
        if (len == 1) {
          cell.facets[slot] = cell.chain_orbit[1 - omit];
          continue;
        }
        std::vector<MatK> face;
        for (int j = 0; j <= len; ++j)
          if (j != omit) face.push_back(chain[j]);
        ResolvedChain rc = resolve_chain(out, ring, left, face, orbit_register_fn);
        if (rc.owner_orbit < 0) throw Error("facet resolution failed");
        auto fit = out.cell_by_flag_[len - 1].find(std::make_pair(rc.owner_orbit, rc.flag_string));
        if (fit == out.cell_by_flag_[len - 1].end())
          throw Error("facet of an enumerated cell was not enumerated");
        cell.facets[slot] = fit->second;
      }
    }
  }

  // ---- prune to relative cells at levels [alpha, alpha_hi] plus faces ------
  std::vector<std::vector<char>> keep(d);
  for (int len = 1; len <= d - 1; ++len) keep[len].assign(out.cells[len].size(), 0);
  auto unstable_dirs = [&](int orbit, int a) {
    unsigned bits = 0;
    const auto& g = out.vertices[orbit].gaps;
    for (size_t i = 0; i < g.size(); ++i)
      if (g[i] >= a) bits |= 1u << i;
    return bits;
  };
  for (int len = d - 1; len >= 1; --len) {
    for (size_t c = 0; c < out.cells[len].size(); ++c) {
      bool is_relative = false;
      for (int a = alpha; a <= alpha_hi && !is_relative; ++a) {
        unsigned common = ~0u;
        for (int o : out.cells[len][c].verts) common &= unstable_dirs(o, a);
        if (common == 0) is_relative = true;
      }
      if (is_relative) keep[len][c] = 1;
      if (keep[len][c] && len >= 2)
        for (int f : out.cells[len][c].facets) keep[len - 1][f] = 1;
    }
  }
  std::vector<char> keep_vertex(out.vertices.size(), 0);
  for (size_t o = 0; o < out.vertices.size(); ++o)
    if (out.vertices[o].max_gap < alpha_hi) keep_vertex[o] = 1;
  for (int len = 1; len <= d - 1; ++len)
    for (size_t c = 0; c < out.cells[len].size(); ++c)
      if (keep[len][c])
        for (int o : out.cells[len][c].verts) keep_vertex[o] = 1;

  // ---- reindex into the final complex ---------------------------------------
  std::vector<int> new_vertex(out.vertices.size(), -1);
  out.complex.cells.assign(d, {});
  out.orbit_of_complex_vertex.clear();
  for (size_t o = 0; o < out.vertices.size(); ++o) {
    if (!keep_vertex[o]) continue;
    int id = static_cast<int>(out.orbit_of_complex_vertex.size());
    new_vertex[o] = id;
    out.orbit_of_complex_vertex.push_back(static_cast<int>(o));
    out.complex.cells[0].push_back(Cell{{id}, {}});
  }
  out.complex_vertex_of_orbit = new_vertex;
  std::vector<std::vector<int>> new_cell(d);
  for (int len = 1; len <= d - 1; ++len) {
    new_cell[len].assign(out.cells[len].size(), -1);
    std::vector<CellOrbit> kept;
    for (size_t c = 0; c < out.cells[len].size(); ++c) {
      if (!keep[len][c]) continue;
      new_cell[len][c] = static_cast<int>(kept.size());
      kept.push_back(out.cells[len][c]);
    }
    out.cells[len] = std::move(kept);
  }
  for (int len = 1; len <= d - 1; ++len) {
    for (auto& cell : out.cells[len]) {
      Cell c;
      for (int o : cell.verts) {
        assert(new_vertex[o] >= 0);
        c.verts.push_back(new_vertex[o]);
      }
      c.facets.resize(len + 1);
      for (int slot = 0; slot <= len; ++slot) {
        if (len == 1) {
          c.facets[slot] = new_vertex[cell.facets[slot]];
        } else {
          c.facets[slot] = new_cell[len - 1][cell.facets[slot]];
        }
        assert(c.facets[slot] >= 0);
      }
      out.complex.cells[len].push_back(std::move(c));
    }
  }
  // remap the flag lookup to final cell ids
  for (int len = 1; len <= d - 1; ++len) {
    std::map<std::pair<int, std::string>, int> remapped;
    for (auto& [key, id] : out.cell_by_flag_[len])
      if (new_cell[len][id] >= 0) remapped.emplace(key, new_cell[len][id]);
    out.cell_by_flag_[len] = std::move(remapped);
  }
  out.complex.validate();
  return out;
}

// ---------------------------------------------------------------------------
// transporters
// ---------------------------------------------------------------------------

std::vector<MatA> transporter(const VertexKey& x, const VertexKey& y, const GroupSpec& group) {
  const int d = group.d;
  const int q = group.q;
  ResidueRing ring{q, group.modulus};
  LatticeShape sx = lattice_shape(x.T), sy = lattice_shape(y.T);
  std::vector<MatA> out;
  if (sx.b != sy.b) return out;
  const std::vector<int>& b = sx.b;
  MatA uxinv = mat_inverse_unimodular(sx.u);
  ResMat target;
  if (!ring.is_trivial()) {
    MatA uyinv = mat_inverse_unimodular(sy.u);
    target = reduce_mat(matmul_a(uyinv, sx.u), ring);
  }
  const int degm = ring.is_trivial() ? 0 : ring.modulus.deg();
  BlockInfo blocks = blocks_of(b);
  std::vector<std::vector<std::vector<PolyA>>> choice(d, std::vector<std::vector<PolyA>>(d));
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l) {
      int bound = (b[l] >= b[i]) ? b[l] - b[i] : -1;
      std::vector<PolyA>& opts = choice[i][l];
      if (ring.is_trivial()) {
        if (bound < 0) {
          opts.push_back(PolyA::zero(q));
        } else {
          std::vector<int> cs(bound + 1, 0);
          std::function<void(int)> rec = [&](int pos) {
            if (pos == bound + 1) {
              opts.push_back(PolyA(q, cs));
              return;
            }
            for (int v = 0; v < q; ++v) {
              cs[pos] = v;
              rec(pos + 1);
            }
          };
          rec(0);
        }
      } else {
        PolyA c = target[i * d + l] % ring.modulus;
        if (bound < 0) {
          if (c.is_zero()) opts.push_back(PolyA::zero(q));
        } else if (bound < degm) {
          if (c.deg() <= bound) opts.push_back(c);
        } else {
          int wdeg = bound - degm;
          std::vector<int> cs(wdeg + 1, 0);
          std::function<void(int)> rec = [&](int pos) {
            if (pos == wdeg + 1) {
              opts.push_back(c + ring.modulus * PolyA(q, cs));
              return;
            }
            for (int v = 0; v < q; ++v) {
              cs[pos] = v;
              rec(pos + 1);
            }
          };
          rec(0);
        }
      }
      if (opts.empty()) return out;
    }
  long long total = 1;
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l) {
      total *= static_cast<long long>(choice[i][l].size());
      if (total > 20'000'000LL)
        throw SearchBudgetExceeded("transporter solution space exceeds 2e7 candidates");
    }
  std::vector<int> pick(d * d, 0);
  std::function<void(int)> rec = [&](int pos) {
    if (pos == d * d) {
      MatA s(d, d, PolyA::zero(q));
      for (int i = 0; i < d; ++i)
        for (int l = 0; l < d; ++l) s.at(i, l) = choice[i][l][pick[i * d + l]];
      for (size_t k = 0; k < blocks.size.size(); ++k) {
        MatA blk(blocks.size[k], blocks.size[k], PolyA::zero(q));
        for (int i = 0; i < blocks.size[k]; ++i)
          for (int j = 0; j < blocks.size[k]; ++j)
            blk.at(i, j) = s.at(blocks.start[k] + i, blocks.start[k] + j);
        if (!mat_det_a(blk).is_unit()) return;
      }
      out.push_back(matmul_a(matmul_a(sy.u, s), uxinv));
      return;
    }
    int i = pos / d, l = pos % d;
    for (size_t o = 0; o < choice[i][l].size(); ++o) {
      pick[pos] = static_cast<int>(o);
      rec(pos + 1);
    }
  };
  rec(0);
  return out;
}

std::vector<MatA> stabilizer(const BTSimplex& s, const GroupSpec& group) {
  std::vector<MatA> base = transporter(s.chain[0], s.chain[0], group);
  if (s.dim() == 0) return base;
  std::vector<MatA> out;
  for (auto& g : base) {
    bool fixes = true;
    MatK gk = matk_from_a(g);
    for (int j = 1; j <= s.dim() && fixes; ++j) {
      VertexKey moved = vertex_key(matmul(gk, s.chain[j].T));
      if (!(moved.id == s.chain[j].id)) fixes = false;
    }
    if (fixes) out.push_back(g);
  }
  return out;
}

std::vector<MatA> transporter_bruteforce(const VertexKey& x, const VertexKey& y,
                                         const GroupSpec& group, int degree_bound) {
  const int d = group.d;
  const int q = group.q;
  ResidueRing ring{q, group.modulus};
  std::vector<MatA> out;
  int sx = std::accumulate(x.a.begin(), x.a.end(), 0);
  int sy = std::accumulate(y.a.begin(), y.a.end(), 0);
  if ((sx - sy) % d != 0) return out;
  int j0 = (sx - sy) / d;
  MatK yinv = mat_inverse(y.T);
  std::vector<std::vector<PolyA>> cols(d, std::vector<PolyA>(d, PolyA::zero(q)));
  std::vector<PolyA> entry_options;
  {
    std::vector<int> cs(degree_bound + 1, 0);
    std::function<void(int)> rec = [&](int pos) {
      if (pos == degree_bound + 1) {
        entry_options.push_back(PolyA(q, cs));
        return;
      }
      for (int v = 0; v < q; ++v) {
        cs[pos] = v;
        rec(pos + 1);
      }
    };
    rec(0);
  }
  std::function<void(int)> dfs = [&](int c) {
    budget().check();
    if (c < 0) {
      MatA g(d, d, PolyA::zero(q));
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g.at(i, j) = cols[j][i];
      if (!mat_det_a(g).is_unit()) return;
      if (!ring.is_trivial()) {
        ResMat r = reduce_mat(g, ring);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            PolyA expect = (i == j) ? PolyA::one(q) : PolyA::zero(q);
            if (!((r[i * d + j] - expect) % ring.modulus == PolyA::zero(q))) return;
          }
      }
      MatK z = matmul(matmul(yinv, matk_from_a(g)), x.T);
      KElem dz = mat_det(z);
      if (dz.is_zero() || dz.valuation() != d * j0) return;
      for (auto& e : z.a)
        if (!e.is_zero() && e.valuation() < j0) return;
      out.push_back(g);
      return;
    }
    std::function<void(int)> pick_entry = [&](int r) {
      if (r == d) {
        // column c of T_y^-1 gamma T_x only involves gamma columns >= c
        // because T_x is lower triangular; its entries need valuation >= j0
        for (int rr = 0; rr < d; ++rr) {
          KElem acc = KElem::zero(q);
          for (int i = c; i < d; ++i) {
            if (x.T.at(i, c).is_zero()) continue;
            KElem part = KElem::zero(q);
            for (int k = 0; k < d; ++k)
              if (!cols[i][k].is_zero()) part = part + yinv.at(rr, k) * KElem(cols[i][k]);
            acc = acc + part * x.T.at(i, c);
          }
          if (!acc.is_zero() && acc.valuation() < j0) return;
        }
        dfs(c - 1);
        return;
      }
      for (auto& opt : entry_options) {
        cols[c][r] = opt;
        pick_entry(r + 1);
      }
    };
    pick_entry(0);
  };
  dfs(d - 1);
  return out;
}

// ---------------------------------------------------------------------------
// alpha transition
// ---------------------------------------------------------------------------

AlphaTransition alpha_transition(const QuotientComplex& q, int alpha) {
  if (alpha <= q.group.d - 1) throw ConfigError("alpha must exceed d-1");
  if (alpha + 1 > q.alpha_hi) throw ConfigError("quotient was not built up to alpha+1");
  const int top = q.group.d - 1;
  SubMask hi = q.truncation_mask(alpha + 1);
  SubMask lo = q.truncation_mask(alpha);
  RelativeHomology rh_hi = relative_homology(q.complex, hi, top);
  RelativeHomology rh_lo = relative_homology(q.complex, lo, top);
  AlphaTransition out;
  out.rank_high = rh_hi.invariants.free_rank;
  out.rank_low = rh_lo.invariants.free_rank;
  std::map<int, int> lo_row;
  for (size_t r = 0; r < rh_lo.rel_cells.size(); ++r) lo_row[rh_lo.rel_cells[r]] = static_cast<int>(r);
  IntMatrix klo = rh_lo.cycles;
  IntMatrix rhs(static_cast<int>(rh_lo.rel_cells.size()), rh_hi.cycles.cols, Int(0));
  for (int j = 0; j < rh_hi.cycles.cols; ++j)
    for (size_t r = 0; r < rh_hi.rel_cells.size(); ++r) {
      auto it = lo_row.find(rh_hi.rel_cells[r]);
      if (it != lo_row.end()) rhs.at(it->second, j) = rh_hi.cycles.at(static_cast<int>(r), j);
    }
  out.matrix = IntMatrix(klo.cols, rhs.cols, Int(0));
  for (int j = 0; j < rhs.cols; ++j) {
    std::vector<Int> col(rhs.rows);
    for (int r = 0; r < rhs.rows; ++r) col[r] = rhs.at(r, j);
    auto sol = solve_integer(klo, col);
    if (!sol) throw Error("alpha transition: image is not a relative cycle downstairs");
    for (int r = 0; r < klo.cols; ++r) out.matrix.at(r, j) = (*sol)[r];
  }
  SNFResult s = smith_normal_form(out.matrix);
  bool unit_divisors = true;
  for (auto& dv : s.divisors)
    if (dv != 1) unit_divisors = false;
  out.isomorphism =
      (out.matrix.rows == out.matrix.cols) && (s.rank == out.matrix.rows) && unit_divisors;
  return out;
}

}  // namespace btq
