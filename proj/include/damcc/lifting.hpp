#pragma once

#include "damcc/cc.hpp"

#include <vector>

namespace damcc {

struct LiftConfig {
  std::size_t min_clique_size = 3;
  std::size_t max_clique_size = 15;

  void check() const;
};

/// Every clique (not only maximal ones) with min <= size <= max, each sorted,
/// listed in lexicographic order.
std::vector<NodeSet> enumerate_cliques(const Graph& g, const LiftConfig& cfg = {});

/// 1-cells are the edges, 2-cells the enumerated cliques. Features carry over.
CombinatorialComplex clique_lift(const Graph& g, const LiftConfig& cfg = {},
                                 std::optional<FeatureMatrix> features = std::nullopt);

/// Throws CcError on an empty series.
CcSeries lift_series(const GraphSeries& gs, const LiftConfig& cfg = {});

}  // namespace damcc
