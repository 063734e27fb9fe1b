#include "damcc/cc.hpp"
#include "damcc/lifting.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <set>

using namespace damcc;

namespace {

// Random valid CC: random graph plus random 2-cells of size >= 3.
CombinatorialComplex random_cc(Rng& rng, std::size_t n) {
  const auto g = testutil::random_graph(rng, n, 0.4);
  std::set<NodeSet> cells2;
  const std::size_t k = n >= 3 ? rng.uniform_int(5) : 0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto size = 3 + rng.uniform_int(n - 2);
    auto s = rng.sample_without_replacement(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(size));
    NodeSet cell(s.begin(), s.end());
    std::sort(cell.begin(), cell.end());
    cells2.insert(cell);
  }
  std::vector<NodeSet> c1;
  for (auto [u, v] : g.edges()) c1.push_back({u, v});
  return CombinatorialComplex::create(n, c1, {cells2.begin(), cells2.end()});
}

bool subset(const NodeSet& a, const NodeSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

}  // namespace

TEST_CASE("graph canonicalises and rejects bad edges") {
  Graph g(4, {{2, 1}, {0, 3}});
  CHECK(g.edges() == std::vector<Edge>{{0, 3}, {1, 2}});
  CHECK(g.has_edge(2, 1));
  CHECK_THROWS_AS(Graph(3, {{1, 1}}), CcError);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), CcError);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), CcError);
}

TEST_CASE("create canonicalises cell order") {
  auto cc = CombinatorialComplex::create(4, {{3, 2}, {0, 1}, {1, 2}}, {{2, 1, 0}});
  CHECK(cc.cells1() == std::vector<NodeSet>{{0, 1}, {1, 2}, {2, 3}});
  CHECK(cc.cells2() == std::vector<NodeSet>{{0, 1, 2}});
  CHECK(cc.num_cells(0) == 4);
  CHECK_THROWS(cc.cells(3));
}

TEST_CASE("validate reports each kind of violation") {
  using K = Violation::Kind;
  auto kinds = [](std::size_t n, std::vector<NodeSet> c1, std::vector<NodeSet> c2) {
    std::set<K> out;
    for (const auto& v : validate(n, c1, c2)) out.insert(v.kind);
    return out;
  };
  CHECK(kinds(3, {{0, 5}}, {}).count(K::IndexOutOfRange));
  CHECK(kinds(3, {{1, 1}}, {}).count(K::DuplicateNodeInCell));
  CHECK(kinds(3, {{}}, {}).count(K::EmptyCell));
  CHECK(kinds(3, {{0, 1, 2}}, {}).count(K::EdgeNotPair));
  CHECK(kinds(3, {}, {{1}}).count(K::CellTooSmall));
  CHECK(kinds(3, {{0, 1}, {1, 0}}, {}).count(K::DuplicateCell));
  CHECK(kinds(3, {{0, 1}}, {{1, 0}}).count(K::RankOrderBroken));
  CHECK(validate(3, {{0, 1}}, {{0, 1, 2}}).empty());
  CHECK_THROWS_AS(CombinatorialComplex::create(3, {{0, 0}}, {}), CcError);
  FeatureMatrix f(2, 1);
  CHECK_FALSE(validate(3, {}, {}, f).empty());
}

TEST_CASE("co-incidence round trip on random complexes") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto cc = random_cc(rng, 1 + rng.uniform_int(12));
    const auto back = from_co_incidence(co_incidence(cc, 1), co_incidence(cc, 2), cc.num_nodes());
    CHECK(back == cc);
    const auto dense = co_incidence(cc, 2).to_dense();
    CHECK(CoIncidenceMatrix::from_dense(dense).rows == co_incidence(cc, 2).rows);
  }
}

TEST_CASE("from_co_incidence drops zero rows and merges duplicates, rejects singletons") {
  CoIncidenceMatrix r1{{{0, 1}, {}, {1, 0}}, 3};
  CoIncidenceMatrix r2{{{0, 1, 2}, {}}, 3};
  const auto cc = from_co_incidence(r1, r2, 3);
  CHECK(cc.cells1().size() == 1);
  CHECK(cc.cells2().size() == 1);
  CHECK_THROWS_AS(from_co_incidence({{{2}}, 3}, {{}, 3}, 3), CcError);
}

TEST_CASE("incidence and neighbourhoods agree with subset brute force") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto cc = random_cc(rng, 3 + rng.uniform_int(7));
    const auto& c1 = cc.cells1();
    const auto& c2 = cc.cells2();
    const auto b01 = incidence(cc, 0, 1).to_dense();
    const auto b12 = incidence(cc, 1, 2).to_dense();
    for (std::size_t i = 0; i < cc.num_nodes(); ++i)
      for (std::size_t j = 0; j < c1.size(); ++j)
        CHECK(b01(i, j) == (subset({static_cast<NodeIndex>(i)}, c1[j]) ? 1.0 : 0.0));
    for (std::size_t i = 0; i < c1.size(); ++i)
      for (std::size_t j = 0; j < c2.size(); ++j)
        CHECK(b12(i, j) == (subset(c1[i], c2[j]) && c1[i] != c2[j] ? 1.0 : 0.0));

    // Shared-upper adjacency: A = [B B^T > 0].
    const Eigen::MatrixXd a01 = adjacency(cc, 0, 1).to_dense();
    const Eigen::MatrixXd ref01 = ((b01 * b01.transpose()).array() > 0).cast<double>();
    CHECK(a01 == ref01);
    const Eigen::MatrixXd a12 = adjacency(cc, 1, 1).to_dense();
    CHECK(a12 == ((b12 * b12.transpose()).array() > 0).cast<double>().matrix());
    const Eigen::MatrixXd co2 = coadjacency(cc, 2).to_dense();
    CHECK(co2 == ((b12.transpose() * b12).array() > 0).cast<double>().matrix());
  }
}

TEST_CASE("skeleton and as_complex are inverse on graphs") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = testutil::random_graph(rng, 1 + rng.uniform_int(10), 0.5);
    CHECK(skeleton(as_complex(g)) == g);
  }
}

TEST_CASE("series checks") {
  GraphSeries gs;
  CHECK_THROWS_AS(gs.check(), CcError);
  gs.num_nodes = 3;
  gs.steps = {Graph(3, {{0, 1}}), Graph(4, {})};
  CHECK_THROWS_AS(gs.check(), CcError);
  gs.steps[1] = Graph(3, {});
  CHECK_NOTHROW(gs.check());
  CcSeries cs{3, {as_complex(gs.steps[0]), as_complex(gs.steps[1])}};
  CHECK(skeleton(cs).steps == gs.steps);
  const auto co = to_co_incidence(cs);
  CHECK(co.steps.size() == 2);
  CHECK(co.steps[0].rank1.rows == std::vector<NodeSet>{{0, 1}});
}
