#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "btq/intmat.hpp"
#include "btq/mat.hpp"

using namespace btq;

TEST_CASE("prime field axioms, exhaustive for small p") {
  for (int p : {2, 3, 5, 7}) {
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        FqElem x(p, a), y(p, b);
        CHECK(x + y == y + x);
        CHECK(x * y == y * x);
        if (b != 0) CHECK((x / y) * y == x);
        for (int c = 0; c < p; ++c) {
          FqElem z(p, c);
          CHECK((x + y) + z == x + (y + z));
          CHECK((x * y) * z == x * (y * z));
          CHECK(x * (y + z) == x * y + x * z);
        }
      }
    for (int a = 1; a < p; ++a) CHECK((FqElem(p, a) * FqElem(p, a).inverse()).is_one());
  }
}

TEST_CASE("polynomial ring basics") {
  std::mt19937 rng(12345);
  for (int p : {2, 3, 5}) {
    for (int trial = 0; trial < 200; ++trial) {
      auto rand_poly = [&](int maxdeg) {
        std::vector<int> c(rng() % (maxdeg + 1) + 1);
        for (auto& x : c) x = rng() % p;
        return PolyA(p, c);
      };
      PolyA f = rand_poly(5), g = rand_poly(5);
      if (!f.is_zero() && !g.is_zero()) CHECK((f * g).deg() == f.deg() + g.deg());
      if (!g.is_zero()) {
        PolyA q(p), r(p);
        f.divmod(g, q, r);
        CHECK(q * g + r == f);
        if (!r.is_zero()) CHECK(r.deg() < g.deg());
      }
    }
  }
  CHECK(parse_poly(2, "t^2+t+1") == PolyA(2, {1, 1, 1}));
  CHECK(parse_poly(3, "2*t+1") == PolyA(3, {1, 2}));
  CHECK(parse_poly(5, "1") == PolyA::one(5));
  CHECK(parse_poly(2, "t") == PolyA::t(2));
}

TEST_CASE("valuation at infinity") {
  int p = 2;
  CHECK(KElem::t(p).valuation() == -1);
  CHECK(KElem(PolyA::one(p), PolyA(p, {1, 1})).valuation() == 1);  // 1/(t+1)
  CHECK(KElem::zero(p).valuation() == KElem::kInfinity);

  std::mt19937 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    auto rand_elem = [&]() {
      std::vector<int> cn(rng() % 4 + 1), cd(rng() % 4 + 1);
      for (auto& x : cn) x = rng() % p;
      for (auto& x : cd) x = rng() % p;
      PolyA num(p, cn), den(p, cd);
      if (den.is_zero()) den = PolyA::one(p);
      return KElem(num, den);
    };
    KElem x = rand_elem(), y = rand_elem();
    if (!x.is_zero() && !y.is_zero()) CHECK((x * y).valuation() == x.valuation() + y.valuation());
    KElem s = x + y;
    if (!s.is_zero())
      CHECK(s.valuation() >= std::min(x.valuation(), y.valuation()));
  }
}

TEST_CASE("pi expansions") {
  int p = 2;
  SUBCASE("x = t, n = 2") {
    PiExpansion e = pi_expansion(KElem::t(p), 2);
    CHECK(e.at(-1) == 1);
    CHECK(e.coeff.size() == 1);
  }
  SUBCASE("x = t/(t+1) over F_2, n = 3") {
    KElem x(PolyA::t(p), PolyA(p, {1, 1}));
    PiExpansion e = pi_expansion(x, 3);
    CHECK(e.at(0) == 1);
    CHECK(e.at(1) == 1);
    CHECK(e.at(2) == 1);
    CHECK(e.at(3) == 1);
    CHECK(e.coeff.size() == 4);
  }
  SUBCASE("x = 0") {
    PiExpansion e = pi_expansion(KElem::zero(p), 5);
    CHECK(e.coeff.empty());
  }
  SUBCASE("lowest emitted coefficient sits at the valuation; tail is deeper than n") {
    std::mt19937 rng(7);
    for (int q : {2, 3, 5}) {
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> cn(rng() % 5 + 1), cd(rng() % 5 + 1);
        for (auto& c : cn) c = rng() % q;
        for (auto& c : cd) c = rng() % q;
        PolyA num(q, cn), den(q, cd);
        if (num.is_zero() || den.is_zero()) continue;
        KElem x(num, den);
        int n = static_cast<int>(rng() % 8);
        PiExpansion e = pi_expansion(x, n);
        if (x.valuation() <= n) {
          CHECK(e.lowest() == x.valuation());
          KElem tail = x - e.truncation();
          if (!tail.is_zero()) CHECK(tail.valuation() > n);
        } else {
          CHECK(e.coeff.empty());
        }
      }
    }
  }
}

TEST_CASE("matrix inverse over K") {
  int p = 2;
  SUBCASE("identity") {
    MatK id = identity_k(p, 3);
    CHECK(mat_inverse(id) == id);
  }
  SUBCASE("diag(pi, 1) inverts to diag(t, 1)") {
    MatK m = identity_k(p, 2);
    m.at(0, 0) = KElem::pi_pow(p, 1);
    MatK inv = mat_inverse(m);
    CHECK(inv.at(0, 0) == KElem::t(p));
    CHECK(inv.at(1, 1).is_one());
  }
  SUBCASE("[[t,1],[1,1]] over F_2, multiply back") {
    MatK m(2, 2, KElem::zero(p));
    m.at(0, 0) = KElem::t(p);
    m.at(0, 1) = KElem::one(p);
    m.at(1, 0) = KElem::one(p);
    m.at(1, 1) = KElem::one(p);
    CHECK(mat_is_identity(matmul(m, mat_inverse(m))));
  }
  SUBCASE("singular matrix is rejected") {
    MatK m(2, 2, KElem::zero(p));
    m.at(0, 0) = KElem::one(p);
    m.at(1, 0) = KElem::one(p);
    CHECK_THROWS_AS(mat_inverse(m), SingularMatrix);
  }
}

namespace {

IntMatrix random_unimodular(int n, std::mt19937& rng) {
  IntMatrix u = int_identity(n);
  for (int step = 0; step < 3 * n; ++step) {
    int i = rng() % n, j = rng() % n;
    if (i == j) continue;
    Int f = static_cast<long>(rng() % 5) - 2;
    for (int k = 0; k < n; ++k) u.at(i, k) += f * u.at(j, k);
  }
  return u;
}

}  // namespace

TEST_CASE("smith normal form") {
  SUBCASE("already diagonal") {
    IntMatrix m(2, 2, Int(0));
    m.at(0, 0) = 3;
    m.at(1, 1) = 6;
    SNFResult s = smith_normal_form(m);
    REQUIRE(s.divisors.size() == 2);
    CHECK(s.divisors[0] == 3);
    CHECK(s.divisors[1] == 6);
  }
  SUBCASE("2x2 with gcd oracle") {
    IntMatrix m(2, 2, Int(0));
    m.at(0, 0) = 2;
    m.at(0, 1) = 4;
    m.at(1, 0) = 6;
    m.at(1, 1) = 8;
    SNFResult s = smith_normal_form(m);
    // oracle for full-rank 2x2: d1 = gcd of entries, d1*d2 = |det|
    Int g = gcd(gcd(Int(2), Int(4)), gcd(Int(6), Int(8)));
    Int det = abs(int_det(m));
    REQUIRE(s.divisors.size() == 2);
    CHECK(s.divisors[0] == g);
    CHECK(s.divisors[0] * s.divisors[1] == det);
    CHECK(det == 8);
    CHECK(s.divisors[1] == 4);
  }
  SUBCASE("zero matrix") {
    IntMatrix m(3, 2, Int(0));
    SNFResult s = smith_normal_form(m);
    CHECK(s.divisors.empty());
    CHECK(s.rank == 0);
  }
  SUBCASE("transforms multiply out and are unimodular") {
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 60; ++trial) {
      int rows = 1 + rng() % 5, cols = 1 + rng() % 5;
      IntMatrix m(rows, cols, Int(0));
      for (auto& v : m.a) v = static_cast<long>(rng() % 21) - 10;
      SNFResult s = smith_normal_form(m, true);
      CHECK(is_unimodular(*s.U));
      CHECK(is_unimodular(*s.V));
      IntMatrix d = int_matmul(int_matmul(*s.U, m), *s.V);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
          Int expect = (i == j && i < s.rank) ? s.divisors[i] : Int(0);
          CHECK(d.at(i, j) == expect);
        }
      IntMatrix vv = int_matmul(*s.V, *s.Vinv);
      CHECK(vv == int_identity(cols));
      for (int i = 0; i + 1 < static_cast<int>(s.divisors.size()); ++i)
        CHECK(s.divisors[i + 1] % s.divisors[i] == 0);
    }
  }
  SUBCASE("divisors invariant under unimodular transforms") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 40; ++trial) {
      int n = 2 + rng() % 3;
      IntMatrix m(n, n, Int(0));
      for (auto& v : m.a) v = static_cast<long>(rng() % 13) - 6;
      SNFResult s0 = smith_normal_form(m);
      IntMatrix l = random_unimodular(n, rng), r = random_unimodular(n, rng);
      SNFResult s1 = smith_normal_form(int_matmul(int_matmul(l, m), r));
      CHECK(s0.divisors == s1.divisors);
    }
  }
  SUBCASE("sparse path agrees with dense path") {
    std::mt19937 rng(31337);
    for (int trial = 0; trial < 40; ++trial) {
      int rows = 1 + rng() % 8, cols = 1 + rng() % 8;
      IntMatrix m(rows, cols, Int(0));
      std::vector<SparseEntry> entries;
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
          if (rng() % 3 != 0) continue;
          long v = static_cast<long>(rng() % 7) - 3;
          m.at(i, j) = v;
          if (v != 0) entries.push_back({i, j, v});
        }
      SNFResult dense = smith_normal_form(m);
      SNFResult sparse = smith_sparse(rows, cols, entries);
      CHECK(dense.rank == sparse.rank);
      CHECK(dense.divisors == sparse.divisors);
    }
  }
  SUBCASE("kernel and integer solve") {
    IntMatrix m(2, 3, Int(0));
    m.at(0, 0) = 1;
    m.at(0, 1) = 2;
    m.at(0, 2) = 3;
    m.at(1, 0) = 2;
    m.at(1, 1) = 4;
    m.at(1, 2) = 6;
    IntMatrix k = kernel_basis(m);
    CHECK(k.cols == 2);
    for (int j = 0; j < k.cols; ++j) {
      Int r0 = 0, r1 = 0;
      for (int i = 0; i < 3; ++i) {
        r0 += m.at(0, i) * k.at(i, j);
        r1 += m.at(1, i) * k.at(i, j);
      }
      CHECK(r0 == 0);
      CHECK(r1 == 0);
    }
    CHECK(in_column_span(m, {1, 2}));
    CHECK(!in_column_span(m, {1, 3}));
  }
}
