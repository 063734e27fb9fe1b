#include "damcc/lifting.hpp"

#include <algorithm>
#include <set>

namespace damcc {

void LiftConfig::check() const {
  if (min_clique_size < 3 || max_clique_size < min_clique_size)
    throw CcError("lift config needs 3 <= min_clique_size <= max_clique_size");
}

namespace {

// Bron-Kerbosch with Tomita pivoting over sorted neighbour lists.
void bron_kerbosch(const std::vector<std::vector<NodeIndex>>& adj, NodeSet& r, std::vector<NodeIndex> p,
                   std::vector<NodeIndex> x, std::vector<NodeSet>& out) {
  if (p.empty() && x.empty()) {
    out.push_back(r);
    return;
  }
  auto count_in = [&](NodeIndex u, const std::vector<NodeIndex>& set) {
    std::size_t c = 0;
    for (auto v : adj[u]) c += std::binary_search(set.begin(), set.end(), v);
    return c;
  };
  NodeIndex pivot = 0;
  std::size_t best = 0;
  bool have = false;
  for (const auto* s : {&p, &x})
    for (auto u : *s) {
      auto c = count_in(u, p);
      if (!have || c > best) {
        pivot = u;
        best = c;
        have = true;
      }
    }
  std::vector<NodeIndex> candidates;
  std::set_difference(p.begin(), p.end(), adj[pivot].begin(), adj[pivot].end(), std::back_inserter(candidates));
  for (auto v : candidates) {
    std::vector<NodeIndex> np, nx;
    std::set_intersection(p.begin(), p.end(), adj[v].begin(), adj[v].end(), std::back_inserter(np));
    std::set_intersection(x.begin(), x.end(), adj[v].begin(), adj[v].end(), std::back_inserter(nx));
    r.push_back(v);
    bron_kerbosch(adj, r, std::move(np), std::move(nx), out);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.insert(std::upper_bound(x.begin(), x.end(), v), v);
  }
}

void subsets_of(const NodeSet& clique, std::size_t lo, std::size_t hi, std::set<NodeSet>& out) {
  const std::size_t n = clique.size();
  NodeSet cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() >= lo) out.insert(cur);
    if (cur.size() == hi) return;
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(clique[i]);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
}

}  // namespace

std::vector<NodeSet> enumerate_cliques(const Graph& g, const LiftConfig& cfg) {
  cfg.check();
  const auto adj = g.adjacency_lists();
  std::vector<NodeIndex> all(g.num_nodes());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<NodeIndex>(i);
  std::vector<NodeSet> maximal;
  NodeSet r;
  bron_kerbosch(adj, r, all, {}, maximal);

  std::set<NodeSet> found;
  for (auto& m : maximal) {
    if (m.size() < cfg.min_clique_size) continue;
    std::sort(m.begin(), m.end());
    subsets_of(m, cfg.min_clique_size, cfg.max_clique_size, found);
  }
  return {found.begin(), found.end()};
}

CombinatorialComplex clique_lift(const Graph& g, const LiftConfig& cfg, std::optional<FeatureMatrix> features) {
  std::vector<NodeSet> cells1;
  cells1.reserve(g.edges().size());
  for (auto [u, v] : g.edges()) cells1.push_back({u, v});
  return CombinatorialComplex::create(g.num_nodes(), std::move(cells1), enumerate_cliques(g, cfg),
                                      std::move(features));
}

CcSeries lift_series(const GraphSeries& gs, const LiftConfig& cfg) {
  if (gs.steps.empty()) throw CcError("cannot lift an empty series");
  gs.check();
  CcSeries out;
  out.num_nodes = gs.num_nodes;
  for (std::size_t t = 0; t < gs.steps.size(); ++t)
    out.steps.push_back(clique_lift(gs.steps[t], cfg, gs.features_at(t)));
  return out;
}

}  // namespace damcc
