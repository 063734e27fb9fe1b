#include "damcc/lifting.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <set>

using namespace damcc;

namespace {

// Every vertex subset of size in [lo, hi] that is a clique, by bitmask sweep.
std::set<NodeSet> clique_oracle(const Graph& g, std::size_t lo, std::size_t hi) {
  const std::size_t n = g.num_nodes();
  std::set<NodeSet> out;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    NodeSet s;
    for (std::size_t v = 0; v < n; ++v)
      if (mask >> v & 1u) s.push_back(static_cast<NodeIndex>(v));
    if (s.size() < lo || s.size() > hi) continue;
    bool ok = true;
    for (std::size_t a = 0; a < s.size() && ok; ++a)
      for (std::size_t b = a + 1; b < s.size() && ok; ++b) ok = g.has_edge(s[a], s[b]);
    if (ok) out.insert(s);
  }
  return out;
}

}  // namespace

TEST_CASE("worked example lifts to three triangles") {
  // Nodes 1..8 shifted to 0..7.
  Graph g(8, {{0, 1}, {0, 5}, {1, 5}, {0, 6}, {5, 6}, {0, 7}, {6, 7}, {1, 2}, {2, 3}, {3, 4}});
  const auto cc = clique_lift(g);
  CHECK(cc.cells2() == std::vector<NodeSet>{{0, 1, 5}, {0, 5, 6}, {0, 6, 7}});
  CHECK(skeleton(cc) == g);
}

TEST_CASE("clique enumeration matches subset brute force") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(11);
    const auto g = testutil::random_graph(rng, n, 0.2 + 0.7 * rng.uniform());
    const std::size_t lo = 3 + rng.uniform_int(2), hi = lo + rng.uniform_int(6);
    const auto got = enumerate_cliques(g, {lo, hi});
    CHECK(std::set<NodeSet>(got.begin(), got.end()) == clique_oracle(g, lo, hi));
    CHECK(std::set<NodeSet>(got.begin(), got.end()).size() == got.size());
  }
}

TEST_CASE("K5 yields every 3-, 4- and 5-subset; size cap respected") {
  std::vector<Edge> e;
  for (NodeIndex u = 0; u < 5; ++u)
    for (NodeIndex v = u + 1; v < 5; ++v) e.emplace_back(u, v);
  const Graph k5(5, e);
  CHECK(clique_lift(k5).cells2().size() == 10 + 5 + 1);
  CHECK(clique_lift(k5, {3, 4}).cells2().size() == 15);
  CHECK(clique_lift(k5, {3, 3}).cells2().size() == 10);
}

TEST_CASE("triangle-free graphs gain no 2-cells; bad configs throw") {
  CHECK(clique_lift(Graph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}})).cells2().empty());
  CHECK_THROWS(LiftConfig{2, 5}.check());
  CHECK_THROWS(LiftConfig{4, 3}.check());
}

TEST_CASE("lift then skeleton recovers the graph and features") {
  Rng rng(4);
  GraphSeries gs;
  gs.num_nodes = 7;
  for (int t = 0; t < 3; ++t) gs.steps.push_back(testutil::random_graph(rng, 7, 0.5));
  gs.features = {FeatureMatrix::Ones(7, 2), FeatureMatrix::Zero(7, 2), FeatureMatrix::Ones(7, 2)};
  const auto cs = lift_series(gs);
  const auto back = skeleton(cs);
  CHECK(back.steps == gs.steps);
  CHECK(*back.features[1] == *gs.features[1]);
  CHECK_THROWS(lift_series(GraphSeries{}));
}

TEST_CASE("lifting commutes with relabelling") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = testutil::random_graph(rng, 8, 0.6);
    const auto perm = testutil::random_permutation(rng, 8);
    std::set<NodeSet> mapped;
    const auto lifted = clique_lift(g);
    for (const auto& c : lifted.cells2()) {
      NodeSet m;
      for (auto v : c) m.push_back(perm[v]);
      std::sort(m.begin(), m.end());
      mapped.insert(m);
    }
    const auto direct = clique_lift(testutil::permute(g, perm)).cells2();
    CHECK(mapped == std::set<NodeSet>(direct.begin(), direct.end()));
  }
}
