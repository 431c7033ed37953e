#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "btq/symbols.hpp"

using namespace btq;

namespace {

GroupSpec full_group(int q, int d) { return GroupSpec{q, d, PolyA::one(q)}; }
GroupSpec congruence(int q, int d, const std::string& m) { return GroupSpec{q, d, parse_poly(q, m)}; }

MatK rows_from(int q, std::vector<std::vector<PolyA>> rows) {
  int d = static_cast<int>(rows.size());
  MatK m(d, d, KElem::zero(q));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m.at(i, j) = KElem(rows[i][j]);
  return m;
}

std::vector<Int> sub(const std::vector<Int>& a, const std::vector<Int>& b) {
  std::vector<Int> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

bool all_zero(const std::vector<Int>& a) {
  for (auto& x : a)
    if (x != 0) return false;
  return true;
}

}  // namespace

TEST_CASE("bound constants") {
  CHECK(bound_constants(2, 2).e == 0);
  CHECK(bound_constants(3, 2).e == 2);
  CHECK(bound_constants(4, 2).e == 8);
  CHECK(bound_constants(2, 2).big_n == 3);   // (2-1)(4-1)
  CHECK(bound_constants(3, 2).big_n == 21);  // 1*3*7
  CHECK(bound_constants(2, 3).big_n == 16);  // 2*8
}

TEST_CASE("apartment pushforward for the full group folds to zero") {
  GroupSpec g = full_group(2, 2);
  QuotientComplex qc = build_quotient(g, 3);
  RelativePair pair = make_relative_pair(qc, 3);
  CHECK(pair.rank() == 0);
  MatK rows = identity_k(2, 2);
  SymbolChain s = apartment_core_chain(rows, qc);  // boundary check is internal
  RelativeClass cls = class_of_chain(s, pair);
  CHECK(cls.coords.empty());
  // restriction of the chain to relative cells must vanish since H_1 = 0
  for (auto& [cell, coeff] : s.chain.coeff)
    if (!pair.mask[1][cell]) CHECK(coeff == 0);
}

TEST_CASE("degenerate tuples give the zero chain") {
  GroupSpec g = congruence(2, 2, "t");
  QuotientComplex qc = build_quotient(g, 3);
  MatK rows(2, 2, KElem::zero(2));
  rows.at(0, 0) = KElem::one(2);
  rows.at(0, 1) = KElem::t(2);
  rows.at(1, 0) = KElem::one(2);
  rows.at(1, 1) = KElem::t(2);
  SymbolChain s = apartment_core_chain(rows, qc);
  CHECK(s.chain.is_zero());
}

TEST_CASE("ash-rudolph relations for Gamma_(t), q=2, d=2") {
  GroupSpec g = congruence(2, 2, "t");
  QuotientComplex qc = build_quotient(g, 3);
  RelativePair pair = make_relative_pair(qc, 3);
  REQUIRE(pair.rank() > 0);
  int p = 2;

  SUBCASE("antisymmetry: swapping basis rows negates the chain") {
    MatK a = rows_from(p, {{PolyA::one(p), PolyA::zero(p)}, {PolyA::zero(p), PolyA::one(p)}});
    MatK b = rows_from(p, {{PolyA::zero(p), PolyA::one(p)}, {PolyA::one(p), PolyA::zero(p)}});
    SymbolChain sa = apartment_core_chain(a, qc);
    SymbolChain sb = apartment_core_chain(b, qc);
    Chain sum = sa.chain + sb.chain;
    CHECK(sum.is_zero());
  }
  SUBCASE("row scaling by t+1 fixes the class") {
    MatK a = rows_from(p, {{PolyA::one(p), PolyA::t(p)}, {PolyA::zero(p), PolyA::one(p)}});
    MatK b = a;
    for (int j = 0; j < 2; ++j) b.at(0, j) = b.at(0, j) * KElem(PolyA(p, {1, 1}));
    RelativeClass ca = modular_symbol(a, qc, pair);
    RelativeClass cb = modular_symbol(b, qc, pair);
    CHECK(all_zero(sub(ca.coords, cb.coords)));
  }
  SUBCASE("three-term relation on random degree <= 1 triples") {
    std::mt19937 rng(2718);
    auto rand_vec = [&]() {
      std::vector<PolyA> v(2, PolyA::zero(p));
      for (;;) {
        for (auto& x : v) {
          std::vector<int> cs = {static_cast<int>(rng() % p), static_cast<int>(rng() % p)};
          x = PolyA(p, cs);
        }
        if (!(v[0].is_zero() && v[1].is_zero())) return v;
      }
    };
    int done = 0;
    while (done < 12) {
      auto q1 = rand_vec(), q2 = rand_vec(), q3 = rand_vec();
      RelativeClass c23 = modular_symbol(rows_from(p, {q2, q3}), qc, pair);
      RelativeClass c13 = modular_symbol(rows_from(p, {q1, q3}), qc, pair);
      RelativeClass c12 = modular_symbol(rows_from(p, {q1, q2}), qc, pair);
      // [q2,q3] - [q1,q3] + [q1,q2] = 0
      std::vector<Int> total(pair.rank(), Int(0));
      for (long long i = 0; i < pair.rank(); ++i)
        total[i] = c23.coords[i] - c13.coords[i] + c12.coords[i];
      CHECK(all_zero(total));
      ++done;
    }
  }
  SUBCASE("Gamma-invariance of classes") {
    std::mt19937 rng(31415);
    MatK a = rows_from(p, {{PolyA::one(p), PolyA::zero(p)}, {PolyA::zero(p), PolyA::one(p)}});
    RelativeClass base = modular_symbol(a, qc, pair);
    // gamma = I + t * strictly-lower-triangular, an element of Gamma_(t)
    MatA gamma(2, 2, PolyA::zero(p));
    gamma.at(0, 0) = PolyA::one(p);
    gamma.at(1, 1) = PolyA::one(p);
    gamma.at(1, 0) = PolyA::t(p);
    // basis rows transform by right multiplication with gamma^T acting on
    // row vectors: rows * gamma^T ~ (gamma * columns)
    MatK moved(2, 2, KElem::zero(p));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        KElem acc = KElem::zero(p);
        for (int l = 0; l < 2; ++l) acc = acc + a.at(i, l) * KElem(gamma.at(j, l));
        moved.at(i, j) = acc;
      }
    RelativeClass c2 = modular_symbol(moved, qc, pair);
    CHECK(all_zero(sub(base.coords, c2.coords)));
  }
}

TEST_CASE("alpha independence of symbol classes") {
  GroupSpec g = congruence(2, 2, "t");
  QuotientComplex qc = build_quotient(g, 3, 4);
  RelativePair lo = make_relative_pair(qc, 3);
  RelativePair hi = make_relative_pair(qc, 4);
  AlphaTransition tr = alpha_transition(qc, 3);
  REQUIRE(tr.isomorphism);
  int p = 2;
  std::mt19937 rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    MatK rows(2, 2, KElem::zero(p));
    do {
      for (auto& e : rows.a) e = KElem(PolyA(p, {static_cast<int>(rng() % p), static_cast<int>(rng() % p)}));
    } while (mat_det(rows).is_zero());
    SymbolChain s = apartment_core_chain(rows, qc);
    RelativeClass clo = class_of_chain(s, lo);
    RelativeClass chi = class_of_chain(s, hi);
    // transition matrix sends the high-level class to the low-level class
    std::vector<Int> mapped(lo.rank(), Int(0));
    for (long long r = 0; r < lo.rank(); ++r)
      for (long long c = 0; c < hi.rank(); ++c)
        mapped[r] += tr.matrix.at(static_cast<int>(r), static_cast<int>(c)) * chi.coords[c];
    CHECK(all_zero(sub(mapped, clo.coords)));
  }
}

TEST_CASE("ms lattice for the full group is trivially stable") {
  GroupSpec g = full_group(2, 2);
  QuotientComplex qc = build_quotient(g, 3);
  RelativePair pair = make_relative_pair(qc, 3);
  StreamOptions opts;
  opts.max_level = 2;
  MSLatticeResult ms = ms_lattice(qc, pair, opts);
  CHECK(ms.rank == 0);
  CHECK(ms.stabilized);
  IndexReport rep = index_and_exponent(ms, pair);
  CHECK(rep.rank_ok);
  CHECK(rep.finite);
  CHECK(rep.index == 1);
}

TEST_CASE("ms lattice spans the full pair homology for Gamma_(t), q=2") {
  GroupSpec g = congruence(2, 2, "t");
  QuotientComplex qc = build_quotient(g, 4);
  RelativePair pair = make_relative_pair(qc, 4);
  REQUIRE(pair.rank() > 0);
  StreamOptions opts;
  opts.max_level = 3;
  MSLatticeResult ms = ms_lattice(qc, pair, opts);
  CHECK(ms.stabilized);
  IndexReport rep = index_and_exponent(ms, pair);
  CHECK(rep.rank_ok);
  CHECK(rep.finite);
  CHECK(rep.index == 1);  // theorem part 5 at d = 2

  SUBCASE("unimodular stream reaches the same span") {
    StreamOptions uni = opts;
    uni.unimodular_only = true;
    MSLatticeResult ms2 = ms_lattice(qc, pair, uni);
    CHECK(ms2.rank == ms.rank);
    IndexReport rep2 = index_and_exponent(ms2, pair);
    CHECK(rep2.index == rep.index);
  }
}

TEST_CASE("symbol chains are relative cycles (boundary in truncation)") {
  // quantified over the stream generators for a congruence case
  GroupSpec g = congruence(2, 2, "t^2+t+1");
  QuotientComplex qc = build_quotient(g, 3);
  RelativePair pair = make_relative_pair(qc, 3);
  std::mt19937 rng(555);
  int p = 2;
  for (int trial = 0; trial < 8; ++trial) {
    MatK rows(2, 2, KElem::zero(p));
    do {
      for (auto& e : rows.a)
        e = KElem(PolyA(p, {static_cast<int>(rng() % p), static_cast<int>(rng() % p)}));
    } while (mat_det(rows).is_zero());
    // apartment_core_chain throws if the boundary escapes the truncation,
    // and class extraction throws if the restriction is not a cycle
    RelativeClass cls = modular_symbol(rows, qc, pair);
    CHECK(static_cast<long long>(cls.coords.size()) == pair.rank());
  }
}
