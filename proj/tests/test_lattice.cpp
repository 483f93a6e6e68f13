#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "torimem/lattice.hpp"
#include "torimem/rng.hpp"

using namespace torimem;

TEST_CASE("geometry counts and size validation") {
  LatticeGeometry g2(2);
  CHECK(g2.n_edges() == 8);
  CHECK(g2.n_sites() == 4);  // 4 stars, 4 plaquettes

  LatticeGeometry g16(16);
  CHECK(g16.n_edges() == 512);

  CHECK_THROWS_AS(LatticeGeometry(1), std::invalid_argument);
  CHECK_THROWS_AS(LatticeGeometry(0), std::invalid_argument);
}

TEST_CASE("edge index round-trip is a bijection") {
  for (int L : {2, 3, 5, 8}) {
    LatticeGeometry g(L);
    std::set<int> seen;
    for (int o = 0; o < 2; ++o)
      for (int y = 0; y < L; ++y)
        for (int x = 0; x < L; ++x) {
          const int e = g.edge_index(x, y, o);
          CHECK(g.edge_x(e) == x);
          CHECK(g.edge_y(e) == y);
          CHECK(g.edge_orient(e) == o);
          seen.insert(e);
        }
    CHECK(static_cast<int>(seen.size()) == g.n_edges());
  }
}

TEST_CASE("every edge belongs to exactly 2 stars and 2 plaquettes") {
  // brute-force incidence count from the cell side, one odd and one even size
  for (int L : {3, 4}) {
    LatticeGeometry g(L);
    std::map<int, int> face_hits, star_hits;
    for (int c = 0; c < g.n_sites(); ++c) {
      for (int e : g.edges_of_face(c)) ++face_hits[e];
      for (int e : g.edges_of_star(c)) ++star_hits[e];
    }
    for (int e = 0; e < g.n_edges(); ++e) {
      CHECK(face_hits[e] == 2);
      CHECK(star_hits[e] == 2);
    }
    // consistency with the edge-side tables
    for (int e = 0; e < g.n_edges(); ++e) {
      for (int f : g.faces_of_edge(e)) {
        const auto& edges = g.edges_of_face(f);
        CHECK(std::count(edges.begin(), edges.end(), e) == 1);
      }
      for (int s : g.stars_of_edge(e)) {
        const auto& edges = g.edges_of_star(s);
        CHECK(std::count(edges.begin(), edges.end(), e) == 1);
      }
    }
  }
}

TEST_CASE("homology cuts have L edges and near-disjoint same-type overlap") {
  for (int L : {2, 4, 7}) {
    LatticeGeometry g(L);
    for (int c = 0; c < 4; ++c)
      CHECK(static_cast<int>(g.cut_edges(c).size()) == L);

    auto overlap = [&](int a, int b) {
      std::set<int> sa(g.cut_edges(a).begin(), g.cut_edges(a).end());
      int n = 0;
      for (int e : g.cut_edges(b)) n += static_cast<int>(sa.count(e));
      return n;
    };
    CHECK(overlap(LatticeGeometry::kCutXWindH, LatticeGeometry::kCutXWindV) <= 1);
    CHECK(overlap(LatticeGeometry::kCutZWindH, LatticeGeometry::kCutZWindV) <= 1);

    // cut_mask agrees with the explicit lists
    std::map<int, std::uint8_t> expect;
    for (int c = 0; c < 4; ++c)
      for (int e : g.cut_edges(c)) expect[e] |= static_cast<std::uint8_t>(1 << c);
    for (int e = 0; e < g.n_edges(); ++e)
      CHECK(g.cut_mask(e) == (expect.count(e) ? expect[e] : 0));
  }
}

TEST_CASE("single flip creates one adjacent defect pair") {
  LatticeGeometry g(4);
  SystemState s(g);
  const int e = g.edge_index(1, 2, LatticeGeometry::kHorizontal);

  s.apply_flip(e, ErrorKind::x);
  CHECK(s.defect_count_p() == 2);
  CHECK(s.defect_count_s() == 0);
  for (int f : g.faces_of_edge(e)) CHECK(s.plaquette_defects().test(f));

  SUBCASE("the same flip twice restores the previous state exactly") {
    SystemState fresh(g);
    s.apply_flip(e, ErrorKind::x);
    CHECK(s.same_configuration(fresh));
    CHECK(s.defect_count_p() == 0);
    CHECK(s.plaquette_defects() == fresh.plaquette_defects());
    for (int c = 0; c < 4; ++c) CHECK(s.winding(c) == fresh.winding(c));
  }

  SUBCASE("z flips touch stars instead") {
    s.apply_flip(e, ErrorKind::z);
    CHECK(s.defect_count_s() == 2);
    for (int v : g.stars_of_edge(e)) CHECK(s.star_defects().test(v));
  }
}

TEST_CASE("flipping a full stabilizer support leaves no defects and no winding") {
  LatticeGeometry g(4);
  // a plaquette boundary is a closed loop for z-errors, a star set for
  // x-errors; both touch the cut lines at (0,0)
  SystemState s(g);
  for (int e : g.edges_of_face(g.site_index(0, 0))) s.apply_flip(e, ErrorKind::z);
  CHECK(s.defect_count_s() == 0);
  for (int e : g.edges_of_star(g.site_index(0, 0))) s.apply_flip(e, ErrorKind::x);
  CHECK(s.defect_count_p() == 0);
  for (int c = 0; c < 4; ++c) CHECK(s.winding(c) == false);
  CHECK(s.homology_class().trivial());
}

TEST_CASE("parity conservation under arbitrary flip sequences") {
  LatticeGeometry g(5);
  SystemState s(g);
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    const int e = static_cast<int>(rng.next_below(g.n_edges()));
    const ErrorKind k = rng.next_below(2) ? ErrorKind::x : ErrorKind::z;
    s.apply_flip(e, k);
    CHECK(s.defect_count_p() % 2 == 0);
    CHECK(s.defect_count_s() % 2 == 0);
  }

  // defect bit fields agree with a from-chain recount
  int np = 0, ns = 0;
  for (int c = 0; c < g.n_sites(); ++c) {
    int par = 0;
    for (int e : g.edges_of_face(c)) par ^= s.xchain().test(e) ? 1 : 0;
    CHECK(par == (s.plaquette_defects().test(c) ? 1 : 0));
    np += par;
    par = 0;
    for (int e : g.edges_of_star(c)) par ^= s.zchain().test(e) ? 1 : 0;
    CHECK(par == (s.star_defects().test(c) ? 1 : 0));
    ns += par;
  }
  CHECK(np == s.defect_count_p());
  CHECK(ns == s.defect_count_s());
  CHECK(s.plaquette_defects().count() == np);
}

TEST_CASE("homology of simple chains") {
  LatticeGeometry g(4);

  SUBCASE("empty chains are trivial") {
    SystemState s(g);
    CHECK(s.homology_class() == HomologyClass{});
  }

  SUBCASE("a noncontractible x-error loop winds horizontally") {
    // horizontal loop of the dual lattice: one row of vertical edges
    SystemState s(g);
    for (int x = 0; x < 4; ++x)
      s.apply_flip(g.edge_index(x, 1, LatticeGeometry::kVertical), ErrorKind::x);
    CHECK(s.defect_count_p() == 0);
    const auto [wh, wv] = s.xchain_class();
    CHECK(wh == true);
    CHECK(wv == false);
    CHECK(s.zchain_class() == std::pair{false, false});
  }

  SUBCASE("a noncontractible z-error loop winds too") {
    // horizontal loop of the direct lattice: one row of horizontal edges
    SystemState s(g);
    for (int x = 0; x < 4; ++x)
      s.apply_flip(g.edge_index(x, 2, LatticeGeometry::kHorizontal), ErrorKind::z);
    CHECK(s.defect_count_s() == 0);
    CHECK(s.zchain_class() == std::pair{true, false});
  }

  SUBCASE("open chains refuse classification") {
    SystemState s(g);
    s.apply_flip(0, ErrorKind::x);
    CHECK_THROWS_AS(s.xchain_class(), DefectsPresentError);
    CHECK_NOTHROW(s.zchain_class());
    CHECK_THROWS_AS(s.homology_class(), DefectsPresentError);
  }
}

TEST_CASE("all products of stabilizer loops are homologically trivial (L=3, exhaustive)") {
  LatticeGeometry g(3);
  // all 2^9 subsets of plaquette boundaries (z-chain triviality moves) and
  // of star sets (x-chain triviality moves)
  for (int mask = 0; mask < (1 << 9); ++mask) {
    SystemState s(g);
    for (int c = 0; c < 9; ++c) {
      if (!(mask >> c & 1)) continue;
      for (int e : g.edges_of_face(c)) s.apply_flip(e, ErrorKind::z);
      for (int e : g.edges_of_star(c)) s.apply_flip(e, ErrorKind::x);
    }
    REQUIRE(s.defect_count() == 0);
    CHECK(s.homology_class().trivial());
  }
}

namespace {

// Exhaustive homology oracle at L = 4: a closed chain is trivial iff it lies
// in the span of the triviality generators (star sets for x-chains,
// plaquette boundaries for z-chains); the class of a closed chain is found
// by checking which combination of the two reference noncontractible loops
// reduces it into that span.
struct ReductionOracle {
  const LatticeGeometry& g;
  std::unordered_set<std::uint32_t> trivial;
  std::uint32_t loop_h = 0, loop_v = 0;

  ReductionOracle(const LatticeGeometry& geom, ErrorKind kind) : g(geom) {
    REQUIRE(g.n_edges() == 32);  // chain fits a uint32
    auto generator = [&](int c) {
      std::uint32_t m = 0;
      const auto& edges = kind == ErrorKind::x ? g.edges_of_star(c) : g.edges_of_face(c);
      for (int e : edges) m ^= 1u << e;
      return m;
    };
    // span of the first n_sites - 1 generators (the product of all is empty)
    std::vector<std::uint32_t> gens;
    for (int c = 0; c < g.n_sites() - 1; ++c) gens.push_back(generator(c));
    trivial.reserve(1u << gens.size());
    trivial.insert(0);
    for (std::uint32_t gmask : gens) {
      std::vector<std::uint32_t> cur(trivial.begin(), trivial.end());
      for (std::uint32_t t : cur) trivial.insert(t ^ gmask);
    }
    REQUIRE(trivial.size() == (1u << 15));

    for (int t = 0; t < g.L(); ++t) {
      if (kind == ErrorKind::x) {
        loop_h ^= 1u << g.edge_index(t, 1, LatticeGeometry::kVertical);
        loop_v ^= 1u << g.edge_index(1, t, LatticeGeometry::kHorizontal);
      } else {
        loop_h ^= 1u << g.edge_index(t, 1, LatticeGeometry::kHorizontal);
        loop_v ^= 1u << g.edge_index(1, t, LatticeGeometry::kVertical);
      }
    }
  }

  std::pair<bool, bool> classify(std::uint32_t chain) const {
    for (int wh = 0; wh < 2; ++wh)
      for (int wv = 0; wv < 2; ++wv) {
        std::uint32_t r = chain;
        if (wh) r ^= loop_h;
        if (wv) r ^= loop_v;
        if (trivial.count(r)) return {wh == 1, wv == 1};
      }
    FAIL("chain not closed");
    return {false, false};
  }
};

}  // namespace

TEST_CASE("winding parities match the exhaustive reduction oracle at L=4") {
  LatticeGeometry g(4);
  ReductionOracle x_oracle(g, ErrorKind::x);
  ReductionOracle z_oracle(g, ErrorKind::z);
  Rng rng(7);

  for (int trial = 0; trial < 200; ++trial) {
    SystemState s(g);
    std::uint32_t xmask = 0, zmask = 0;
    // random closed chains: random stabilizer products plus reference loops
    // mixed in with probability 1/2 each
    for (int c = 0; c < g.n_sites(); ++c) {
      if (rng.next_below(2)) {
        for (int e : g.edges_of_star(c)) {
          s.apply_flip(e, ErrorKind::x);
          xmask ^= 1u << e;
        }
      }
      if (rng.next_below(2)) {
        for (int e : g.edges_of_face(c)) {
          s.apply_flip(e, ErrorKind::z);
          zmask ^= 1u << e;
        }
      }
    }
    auto add_loop = [&](std::uint32_t loop, ErrorKind k, std::uint32_t& mask) {
      for (int e = 0; e < 32; ++e)
        if (loop >> e & 1) {
          s.apply_flip(e, k);
          mask ^= 1u << e;
        }
    };
    if (rng.next_below(2)) add_loop(x_oracle.loop_h, ErrorKind::x, xmask);
    if (rng.next_below(2)) add_loop(x_oracle.loop_v, ErrorKind::x, xmask);
    if (rng.next_below(2)) add_loop(z_oracle.loop_h, ErrorKind::z, zmask);
    if (rng.next_below(2)) add_loop(z_oracle.loop_v, ErrorKind::z, zmask);

    REQUIRE(s.defect_count() == 0);
    CHECK(s.xchain_class() == x_oracle.classify(xmask));
    CHECK(s.zchain_class() == z_oracle.classify(zmask));
  }
}

TEST_CASE("homology is a homomorphism under chain composition") {
  LatticeGeometry g(4);
  ReductionOracle x_oracle(g, ErrorKind::x);
  Rng rng(11);

  auto random_closed = [&](SystemState& s) {
    for (int c = 0; c < g.n_sites(); ++c)
      if (rng.next_below(2))
        for (int e : g.edges_of_star(c)) s.apply_flip(e, ErrorKind::x);
    if (rng.next_below(2))
      for (int e = 0; e < 32; ++e)
        if (x_oracle.loop_h >> e & 1) s.apply_flip(e, ErrorKind::x);
    if (rng.next_below(2))
      for (int e = 0; e < 32; ++e)
        if (x_oracle.loop_v >> e & 1) s.apply_flip(e, ErrorKind::x);
  };

  for (int trial = 0; trial < 50; ++trial) {
    SystemState a(g), b(g), both(g);
    random_closed(a);
    random_closed(b);
    // both = a xor b
    for (int e = 0; e < g.n_edges(); ++e) {
      if (a.xchain().test(e)) both.apply_flip(e, ErrorKind::x);
      if (b.xchain().test(e)) both.apply_flip(e, ErrorKind::x);
    }
    const auto ca = a.xchain_class();
    const auto cb = b.xchain_class();
    const auto cc = both.xchain_class();
    CHECK(cc.first == (ca.first != cb.first));
    CHECK(cc.second == (ca.second != cb.second));
  }
}

TEST_CASE("winding parity toggles exactly on cut edges") {
  LatticeGeometry g(5);
  for (int e = 0; e < g.n_edges(); ++e) {
    SystemState s(g);
    s.apply_flip(e, ErrorKind::x);
    const std::uint8_t m = g.cut_mask(e);
    CHECK(s.winding(LatticeGeometry::kCutXWindH) ==
          bool(m >> LatticeGeometry::kCutXWindH & 1));
    CHECK(s.winding(LatticeGeometry::kCutXWindV) ==
          bool(m >> LatticeGeometry::kCutXWindV & 1));
    CHECK(s.winding(LatticeGeometry::kCutZWindH) == false);

    s.apply_flip(e, ErrorKind::z);
    CHECK(s.winding(LatticeGeometry::kCutZWindH) ==
          bool(m >> LatticeGeometry::kCutZWindH & 1));
    CHECK(s.winding(LatticeGeometry::kCutZWindV) ==
          bool(m >> LatticeGeometry::kCutZWindV & 1));
  }
}
