#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "btq/building.hpp"

using namespace btq;

namespace {

KElem random_o_series(int p, std::mt19937& rng, bool unit) {
  // c0 + c1 pi + c2 pi^2 as an exact rational function
  int c0 = unit ? 1 + static_cast<int>(rng() % (p - 1)) : static_cast<int>(rng() % p);
  int c1 = rng() % p, c2 = rng() % p;
  return KElem(PolyA(p, {c2, c1, c0}), PolyA::tpow(p, 2));
}

MatK random_gl_o(int p, int d, std::mt19937& rng) {
  MatK u = identity_k(p, d);
  for (int step = 0; step < 4 * d; ++step) {
    int kind = rng() % 3;
    int i = rng() % d, j = rng() % d;
    if (kind == 0) {
      KElem s = random_o_series(p, rng, true);
      for (int r = 0; r < d; ++r) u.at(r, i) = u.at(r, i) * s;
    } else if (kind == 1 && i != j) {
      KElem f = random_o_series(p, rng, false);
      for (int r = 0; r < d; ++r) u.at(r, i) = u.at(r, i) + f * u.at(r, j);
    } else if (i != j) {
      for (int r = 0; r < d; ++r) std::swap(u.at(r, i), u.at(r, j));
    }
  }
  return u;
}

MatK random_invertible(int p, int d, std::mt19937& rng) {
  for (;;) {
    MatK g(d, d, KElem::zero(p));
    for (auto& e : g.a) {
      std::vector<int> c(1 + rng() % 3);
      for (auto& x : c) x = rng() % p;
      PolyA num(p, c);
      PolyA den = PolyA::tpow(p, rng() % 3);
      if (num.is_zero() && rng() % 2) num = PolyA::one(p);
      e = KElem(num, den);
    }
    if (!mat_det(g).is_zero()) return g;
  }
}

}  // namespace

TEST_CASE("vertex keys: canonical forms") {
  int p = 2;
  SUBCASE("identity") {
    VertexKey k = vertex_key(identity_k(p, 3));
    CHECK(k.a == std::vector<int>{0, 0, 0});
    CHECK(mat_is_identity(k.T));
  }
  SUBCASE("diag(pi, 1)") {
    MatK g = identity_k(p, 2);
    g.at(0, 0) = KElem::pi_pow(p, 1);
    VertexKey k = vertex_key(g);
    CHECK(k.a == std::vector<int>{1, 0});
  }
  SUBCASE("homothety normalization for d = 3") {
    MatK g = identity_k(p, 3);
    g.at(0, 0) = KElem::pi_pow(p, 2);
    g.at(1, 1) = KElem::pi_pow(p, 1);
    VertexKey k = vertex_key(g);
    CHECK(k.a == std::vector<int>{1, 0, -1});
  }
  SUBCASE("singular input rejected") {
    MatK g(2, 2, KElem::zero(p));
    g.at(0, 0) = KElem::one(p);
    g.at(1, 0) = KElem::t(p);
    CHECK_THROWS_AS(vertex_key(g), SingularMatrix);
  }
}

TEST_CASE("vertex keys: invariance and idempotence") {
  std::mt19937 rng(1234);
  for (int p : {2, 3}) {
    for (int d : {2, 3}) {
      for (int trial = 0; trial < 25; ++trial) {
        MatK g = random_invertible(p, d, rng);
        VertexKey k = vertex_key(g);
        // right multiplication by a unit of GL_d(O)
        MatK u = random_gl_o(p, d, rng);
        CHECK(vertex_key(matmul(g, u)).id == k.id);
        // homothety
        CHECK(vertex_key(mat_scale(g, KElem::pi_pow(p, 1))).id == k.id);
        CHECK(vertex_key(mat_scale(g, KElem::t(p))).id == k.id);
        // idempotence: canonical form of the canonical form
        CHECK(vertex_key(k.T).id == k.id);
      }
    }
  }
}

TEST_CASE("neighbors") {
  SUBCASE("d=2, q=2: three neighbors") {
    VertexKey base = vertex_key(identity_k(2, 2));
    CHECK(neighbors(base).size() == 3);
  }
  SUBCASE("d=3, q=2: 14 neighbors (7 lines + 7 planes)") {
    VertexKey base = vertex_key(identity_k(2, 3));
    CHECK(neighbors(base).size() == 14);
    CHECK(enumerate_subspaces(2, 3).size() == 14);
  }
  SUBCASE("d=2: q+1 chambers through a vertex") {
    for (int q : {2, 3, 5}) {
      VertexKey base = vertex_key(identity_k(q, 2));
      CHECK(flag_simplices(base, 1).size() == static_cast<size_t>(q + 1));
    }
  }
  SUBCASE("distance-1 symmetry") {
    std::mt19937 rng(55);
    for (int q : {2, 3}) {
      VertexKey v = vertex_key(random_invertible(q, 2, rng));
      for (auto& u : neighbors(v)) {
        auto back = neighbors(u);
        bool found = false;
        for (auto& w : back)
          if (w.id == v.id) found = true;
        CHECK(found);
      }
    }
  }
}

TEST_CASE("apartment vertices") {
  int p = 2;
  MatK std_basis = identity_k(p, 2);
  SUBCASE("base point") {
    VertexKey k = apartment_vertex(std_basis, {0, 0});
    CHECK(k.id == vertex_key(identity_k(p, 2)).id);
  }
  SUBCASE("homothety: n and n + (1,..,1)") {
    VertexKey k1 = apartment_vertex(std_basis, {3, 1});
    VertexKey k2 = apartment_vertex(std_basis, {4, 2});
    CHECK(k1.id == k2.id);
  }
  SUBCASE("injectivity along a ray") {
    std::set<std::string> ids;
    for (int k = 0; k <= 5; ++k) ids.insert(apartment_vertex(std_basis, {k, 0}).id);
    CHECK(ids.size() == 6);
  }
  SUBCASE("degenerate basis rejected") {
    MatK bad(2, 2, KElem::one(p));
    CHECK_THROWS_AS(apartment_vertex(bad, {0, 0}), DegenerateBasis);
  }
}

TEST_CASE("e-vectors and the fundamental ordering") {
  SUBCASE("d=2 edge") {
    std::vector<ApartmentCoord> lifts = {{0, 0}, {1, 0}};
    CHECK(e_vector(lifts, 1) == std::vector<int>{1, 0});
    CHECK(e_vector(lifts, 0) == std::vector<int>{0, 1});
  }
  SUBCASE("top simplices carry each standard vector once") {
    std::mt19937 rng(7);
    for (int d : {2, 3, 4}) {
      for (int trial = 0; trial < 20; ++trial) {
        ApartmentChamber ch;
        ch.base.resize(d);
        for (auto& v : ch.base) v = static_cast<int>(rng() % 7) - 3;
        ch.word.resize(d);
        std::iota(ch.word.begin(), ch.word.end(), 0);
        std::shuffle(ch.word.begin(), ch.word.end(), rng);
        auto verts = ch.vertex_coords();
        std::set<std::vector<int>> evs;
        long long total = 0;
        for (int which = 0; which < d; ++which) {
          auto e = e_vector(verts, which);
          for (int c : e) {
            CHECK(c >= 0);
            total += c;
          }
          evs.insert(e);
        }
        CHECK(static_cast<int>(evs.size()) == d);  // all standard vectors
        CHECK(total == d);                          // sum = (1,...,1)
        // fundamental_order agrees with e_vector
        auto order = ch.fundamental_order();
        for (int i = 0; i < d; ++i) {
          int which = -1;
          for (int k = 0; k < d; ++k)
            if (verts[k] == order[i]) which = k;
          REQUIRE(which >= 0);
          std::vector<int> expect(d, 0);
          expect[i] = 1;
          CHECK(e_vector(verts, which) == expect);
        }
      }
    }
  }
  SUBCASE("d=3 worked example") {
    ApartmentChamber ch{{0, 0, 0}, {0, 1, 2}};
    auto order = ch.fundamental_order();
    CHECK(order[0] == ApartmentCoord{1, 0, 0});
    CHECK(order[1] == ApartmentCoord{1, 1, 0});
    CHECK(order[2] == ApartmentCoord{0, 0, 0});
  }
}

TEST_CASE("beta is a cycle away from the window rim") {
  SUBCASE("d=2 band") {
    ApartmentWindow w = beta_window(2, 5);
    Chain db = boundary_of_chain(w.complex, w.beta);
    for (auto& [cell, c] : db.coeff) CHECK(w.boundary_cell[cell] == 1);
  }
  SUBCASE("d=3 box") {
    ApartmentWindow w = beta_window(3, 4);
    CHECK(!w.beta.coeff.empty());
    Chain db = boundary_of_chain(w.complex, w.beta);
    for (auto& [cell, c] : db.coeff) CHECK(w.boundary_cell[cell] == 1);
  }
  SUBCASE("empty window") {
    ApartmentWindow w = beta_window(2, -1);
    CHECK(w.beta.is_zero());
  }
  SUBCASE("random window sizes, d = 2 and 3") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 6; ++trial) {
      int d = 2 + static_cast<int>(rng() % 2);
      int width = 2 + static_cast<int>(rng() % 3);
      ApartmentWindow w = beta_window(d, width);
      w.complex.validate();
      Chain db = boundary_of_chain(w.complex, w.beta);
      for (auto& [cell, c] : db.coeff) CHECK(w.boundary_cell[cell] == 1);
    }
  }
}

TEST_CASE("apartment chambers appear among flag simplices") {
  // chambers of the standard apartment through the base vertex are a subset
  // of the chambers the residue flags enumerate
  for (int q : {2, 3}) {
    for (int d : {2, 3}) {
      MatK basis = identity_k(q, d);
      VertexKey base = apartment_vertex(basis, ApartmentCoord(d, 0));
      std::set<std::multiset<std::string>> flag_keys;
      for (auto& s : flag_simplices(base, d - 1)) {
        std::multiset<std::string> ks;
        for (auto& v : s.chain) ks.insert(v.id);
        flag_keys.insert(ks);
      }
      // apartment chambers with the base vertex as top lattice
      std::vector<int> word(d);
      std::iota(word.begin(), word.end(), 0);
      int found = 0, total = 0;
      do {
        ApartmentChamber ch{ApartmentCoord(d, 0), word};
        std::multiset<std::string> ks;
        for (auto& c : ch.vertex_coords()) ks.insert(apartment_vertex(basis, c).id);
        ++total;
        if (flag_keys.count(ks)) ++found;
      } while (std::next_permutation(word.begin(), word.end()));
      CHECK(found == total);
    }
  }
}
