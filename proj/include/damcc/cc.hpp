#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace damcc {

using NodeIndex = std::uint32_t;
/// Sorted, duplicate-free list of 0-cell indices.
using NodeSet = std::vector<NodeIndex>;
using Edge = std::pair<NodeIndex, NodeIndex>;
using FeatureMatrix = Eigen::MatrixXd;

class CcError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Simple undirected graph. Edges are stored with `first < second`, sorted.
class Graph {
public:
  Graph() = default;
  /// Throws CcError on self-loops, out-of-range endpoints or duplicate edges.
  Graph(std::size_t num_nodes, std::vector<Edge> edges);

  std::size_t num_nodes() const { return num_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(NodeIndex u, NodeIndex v) const;

  /// Neighbour lists, sorted.
  std::vector<std::vector<NodeIndex>> adjacency_lists() const;
  /// Dense 0/1 adjacency matrix.
  Eigen::MatrixXd adjacency_matrix() const;

  friend bool operator==(const Graph&, const Graph&) = default;

private:
  std::size_t num_nodes_ = 0;
  std::vector<Edge> edges_;
};

/// Binary matrix stored as sorted column indices per row.
struct SparseBinaryMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<std::uint32_t>> row_indices;

  SparseBinaryMatrix() = default;
  SparseBinaryMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), row_indices(r) {}

  bool at(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j);
  std::size_t nonzeros() const;
  SparseBinaryMatrix transpose() const;
  Eigen::MatrixXd to_dense() const;

  friend bool operator==(const SparseBinaryMatrix&, const SparseBinaryMatrix&) = default;
};

/// coB_{0,r}: one row per rank-r cell listing its 0-cells, columns = 0-cells.
/// Empty rows are padding and carry no cell.
struct CoIncidenceMatrix {
  std::vector<NodeSet> rows;
  std::size_t num_cols = 0;

  std::size_t num_rows() const { return rows.size(); }
  Eigen::MatrixXd to_dense() const;
  static CoIncidenceMatrix from_dense(const Eigen::MatrixXd& m);

  friend bool operator==(const CoIncidenceMatrix&, const CoIncidenceMatrix&) = default;
};

struct Violation {
  enum class Kind {
    IndexOutOfRange,
    DuplicateNodeInCell,
    EmptyCell,
    EdgeNotPair,
    CellTooSmall,
    DuplicateCell,
    RankOrderBroken,
    FeatureShape,
  };
  Kind kind;
  std::string message;
};

/// Checks the graph-based CC invariants on raw cell lists (any order).
std::vector<Violation> validate(std::size_t num_nodes, const std::vector<NodeSet>& cells1,
                                const std::vector<NodeSet>& cells2,
                                const std::optional<FeatureMatrix>& features = std::nullopt);

/// Graph-based combinatorial complex with cells of rank 0, 1 and 2.
///
/// 0-cells are implicit ({0}, ..., {num_nodes-1}). Within each rank cells are
/// kept in canonical order: node indices ascending inside a cell, cells sorted
/// lexicographically. Instances are always valid.
class CombinatorialComplex {
public:
  CombinatorialComplex() = default;

  /// Canonicalises and validates; throws CcError listing every violation.
  static CombinatorialComplex create(std::size_t num_nodes, std::vector<NodeSet> cells1,
                                     std::vector<NodeSet> cells2,
                                     std::optional<FeatureMatrix> features = std::nullopt);

  std::size_t num_nodes() const { return num_nodes_; }
  const std::vector<NodeSet>& cells1() const { return cells1_; }
  const std::vector<NodeSet>& cells2() const { return cells2_; }
  const std::vector<NodeSet>& cells(int rank) const;
  std::size_t num_cells(int rank) const;
  const std::optional<FeatureMatrix>& features() const { return features_; }

  CombinatorialComplex with_features(std::optional<FeatureMatrix> features) const;

  friend bool operator==(const CombinatorialComplex& a, const CombinatorialComplex& b);

private:
  std::size_t num_nodes_ = 0;
  std::vector<NodeSet> cells1_;
  std::vector<NodeSet> cells2_;
  std::optional<FeatureMatrix> features_;
};

std::vector<Violation> validate(const CombinatorialComplex& cc);

/// coB_{0,rank} for rank 1 or 2, rows in canonical cell order.
CoIncidenceMatrix co_incidence(const CombinatorialComplex& cc, int rank);

/// Inverse of co_incidence. Empty rows are dropped and duplicate rows within a
/// rank are merged. Throws CcError for rows that cannot form a valid CC
/// (single-node rows, out-of-range indices, non-pair 1-cells, ...).
CombinatorialComplex from_co_incidence(const CoIncidenceMatrix& rows1, const CoIncidenceMatrix& rows2,
                                       std::size_t num_nodes);

/// B_{r,k} for (r,k) in {(0,1), (1,2)}: [B]_ij = 1 iff x^r_i is a strict subset of x^k_j.
SparseBinaryMatrix incidence(const CombinatorialComplex& cc, int r, int k);

/// Adjacency among rank-r cells through shared rank-(r+k) cells, r in {0,1}, k = 1.
/// adjacency(cc, 0, 1) is A_{0,1} (nodes via edges); adjacency(cc, 1, 1) is the
/// 1-cell adjacency via 2-cells that the encoder calls A_{1,2}. The diagonal is 1
/// iff the cell lies in at least one higher cell.
SparseBinaryMatrix adjacency(const CombinatorialComplex& cc, int r, int k = 1);

/// Coadjacency among rank-r cells through shared rank-(r-1) cells. The default
/// (rank 2) is the 2-cell matrix used by the encoder (its coA_{1,2}). The
/// diagonal is 1 iff the cell strictly contains at least one lower cell.
SparseBinaryMatrix coadjacency(const CombinatorialComplex& cc, int rank = 2);

/// 1-skeleton of the complex.
Graph skeleton(const CombinatorialComplex& cc);

/// Graph viewed as a CC with no 2-cells.
CombinatorialComplex as_complex(const Graph& g, std::optional<FeatureMatrix> features = std::nullopt);

/// Ordered sequence of graphs on a fixed node set with optional per-step node
/// features (num_nodes x F).
struct GraphSeries {
  std::size_t num_nodes = 0;
  std::vector<Graph> steps;
  std::vector<std::optional<FeatureMatrix>> features;  // empty or one entry per step

  std::size_t length() const { return steps.size(); }
  const std::optional<FeatureMatrix>& features_at(std::size_t t) const;
  /// Throws CcError unless non-empty with a shared node count and matching feature shapes.
  void check() const;
};

struct CcSeries {
  std::size_t num_nodes = 0;
  std::vector<CombinatorialComplex> steps;

  std::size_t length() const { return steps.size(); }
  void check() const;
};

GraphSeries skeleton(const CcSeries& series);

/// Raw co-incidence matrices per step (may hold zero or duplicate rows); the
/// form predictions and baselines are scored in.
struct CoIncidenceStep {
  CoIncidenceMatrix rank1;
  CoIncidenceMatrix rank2;
};

struct CoIncidenceSeries {
  std::size_t num_nodes = 0;
  std::vector<CoIncidenceStep> steps;
};

CoIncidenceSeries to_co_incidence(const CcSeries& series);

}  // namespace damcc
