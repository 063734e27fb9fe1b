#include "damcc/cc.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace damcc {

namespace {

std::string cell_str(const NodeSet& cell) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < cell.size(); ++i) os << (i ? "," : "") << cell[i];
  os << '}';
  return os.str();
}

NodeSet sorted_cell(NodeSet cell) {
  std::sort(cell.begin(), cell.end());
  return cell;
}

std::vector<NodeSet> canonical(std::vector<NodeSet> cells) {
  for (auto& c : cells) std::sort(c.begin(), c.end());
  std::sort(cells.begin(), cells.end());
  return cells;
}

bool strict_subset(const NodeSet& small, const NodeSet& big) {
  return small.size() < big.size() && std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// Index of `cell` in a canonical cell list, or -1.
std::ptrdiff_t find_cell(const std::vector<NodeSet>& cells, const NodeSet& cell) {
  auto it = std::lower_bound(cells.begin(), cells.end(), cell);
  if (it == cells.end() || *it != cell) return -1;
  return it - cells.begin();
}

void check_rank(int rank) {
  if (rank != 1 && rank != 2) throw std::invalid_argument("rank must be 1 or 2");
}

}  // namespace

// ---------------------------------------------------------------- Graph

Graph::Graph(std::size_t num_nodes, std::vector<Edge> edges) : num_nodes_(num_nodes) {
  for (auto& [u, v] : edges) {
    if (u == v) throw CcError("graph: self-loop at node " + std::to_string(u));
    if (u >= num_nodes || v >= num_nodes)
      throw CcError("graph: edge {" + std::to_string(u) + "," + std::to_string(v) + "} out of range");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (auto dup = std::adjacent_find(edges.begin(), edges.end()); dup != edges.end())
    throw CcError("graph: duplicate edge {" + std::to_string(dup->first) + "," +
                  std::to_string(dup->second) + "}");
  edges_ = std::move(edges);
}

bool Graph::has_edge(NodeIndex u, NodeIndex v) const {
  if (u > v) std::swap(u, v);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
}

std::vector<std::vector<NodeIndex>> Graph::adjacency_lists() const {
  std::vector<std::vector<NodeIndex>> adj(num_nodes_);
  for (auto [u, v] : edges_) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& l : adj) std::sort(l.begin(), l.end());
  return adj;
}

Eigen::MatrixXd Graph::adjacency_matrix() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(num_nodes_, num_nodes_);
  for (auto [u, v] : edges_) a(u, v) = a(v, u) = 1.0;
  return a;
}

// ---------------------------------------------------------------- SparseBinaryMatrix

bool SparseBinaryMatrix::at(std::size_t i, std::size_t j) const {
  const auto& r = row_indices.at(i);
  return std::binary_search(r.begin(), r.end(), static_cast<std::uint32_t>(j));
}

void SparseBinaryMatrix::set(std::size_t i, std::size_t j) {
  auto& r = row_indices.at(i);
  const auto jj = static_cast<std::uint32_t>(j);
  auto it = std::lower_bound(r.begin(), r.end(), jj);
  if (it == r.end() || *it != jj) r.insert(it, jj);
}

std::size_t SparseBinaryMatrix::nonzeros() const {
  std::size_t n = 0;
  for (const auto& r : row_indices) n += r.size();
  return n;
}

SparseBinaryMatrix SparseBinaryMatrix::transpose() const {
  SparseBinaryMatrix t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (auto j : row_indices[i]) t.row_indices[j].push_back(static_cast<std::uint32_t>(i));
  return t;
}

Eigen::MatrixXd SparseBinaryMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (auto j : row_indices[i]) m(i, j) = 1.0;
  return m;
}

// ---------------------------------------------------------------- CoIncidenceMatrix

Eigen::MatrixXd CoIncidenceMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows.size(), num_cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (auto j : rows[i]) m(i, j) = 1.0;
  return m;
}

CoIncidenceMatrix CoIncidenceMatrix::from_dense(const Eigen::MatrixXd& m) {
  CoIncidenceMatrix out;
  out.num_cols = static_cast<std::size_t>(m.cols());
  out.rows.resize(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) out.rows[i].push_back(static_cast<NodeIndex>(j));
  return out;
}

// ---------------------------------------------------------------- validation

std::vector<Violation> validate(std::size_t num_nodes, const std::vector<NodeSet>& cells1,
                                const std::vector<NodeSet>& cells2,
                                const std::optional<FeatureMatrix>& features) {
  using K = Violation::Kind;
  std::vector<Violation> out;

  auto check_cells = [&](const std::vector<NodeSet>& cells, int rank) {
    for (const auto& raw : cells) {
      const std::string where = "rank-" + std::to_string(rank) + " cell " + cell_str(raw);
      if (raw.empty()) {
        out.push_back({K::EmptyCell, where + ": empty cell"});
        continue;
      }
      for (auto v : raw)
        if (v >= num_nodes) {
          out.push_back({K::IndexOutOfRange, where + ": node " + std::to_string(v) + " out of range"});
          break;
        }
      const NodeSet cell = sorted_cell(raw);
      if (std::adjacent_find(cell.begin(), cell.end()) != cell.end())
        out.push_back({K::DuplicateNodeInCell, where + ": self-loop / duplicate node in cell"});
      if (rank == 1 && raw.size() != 2)
        out.push_back({K::EdgeNotPair, where + ": 1-cells must have exactly 2 nodes"});
      if (rank == 2 && raw.size() < 2)
        out.push_back({K::CellTooSmall, where + ": 2-cells need at least 2 nodes"});
    }
    const auto canon = canonical(cells);
    for (std::size_t i = 1; i < canon.size(); ++i)
      if (canon[i] == canon[i - 1])
        out.push_back({K::DuplicateCell, "rank-" + std::to_string(rank) + " cell " + cell_str(canon[i]) +
                                             " listed twice"});
  };
  check_cells(cells1, 1);
  check_cells(cells2, 2);

  const auto c1 = canonical(cells1);
  for (const auto& raw : cells2) {
    const NodeSet cell = sorted_cell(raw);
    if (find_cell(c1, cell) >= 0)
      out.push_back({K::RankOrderBroken, "rank order broken: 2-cell " + cell_str(cell) + " equals a 1-cell"});
  }

  if (features && static_cast<std::size_t>(features->rows()) != num_nodes)
    out.push_back({K::FeatureShape, "feature matrix has " + std::to_string(features->rows()) +
                                        " rows for " + std::to_string(num_nodes) + " nodes"});
  return out;
}

std::vector<Violation> validate(const CombinatorialComplex& cc) {
  return validate(cc.num_nodes(), cc.cells1(), cc.cells2(), cc.features());
}

// ---------------------------------------------------------------- CombinatorialComplex

CombinatorialComplex CombinatorialComplex::create(std::size_t num_nodes, std::vector<NodeSet> cells1,
                                                  std::vector<NodeSet> cells2,
                                                  std::optional<FeatureMatrix> features) {
  auto violations = validate(num_nodes, cells1, cells2, features);
  if (!violations.empty()) {
    std::string msg = "invalid combinatorial complex:";
    for (const auto& v : violations) msg += "\n  " + v.message;
    throw CcError(msg);
  }
  CombinatorialComplex cc;
  cc.num_nodes_ = num_nodes;
  cc.cells1_ = canonical(std::move(cells1));
  cc.cells2_ = canonical(std::move(cells2));
  cc.features_ = std::move(features);
  return cc;
}

const std::vector<NodeSet>& CombinatorialComplex::cells(int rank) const {
  check_rank(rank);
  return rank == 1 ? cells1_ : cells2_;
}

std::size_t CombinatorialComplex::num_cells(int rank) const {
  if (rank == 0) return num_nodes_;
  return cells(rank).size();
}

CombinatorialComplex CombinatorialComplex::with_features(std::optional<FeatureMatrix> features) const {
  return create(num_nodes_, cells1_, cells2_, std::move(features));
}

bool operator==(const CombinatorialComplex& a, const CombinatorialComplex& b) {
  if (a.num_nodes_ != b.num_nodes_ || a.cells1_ != b.cells1_ || a.cells2_ != b.cells2_) return false;
  if (a.features_.has_value() != b.features_.has_value()) return false;
  if (!a.features_) return true;
  return a.features_->rows() == b.features_->rows() && a.features_->cols() == b.features_->cols() &&
         *a.features_ == *b.features_;
}

// ---------------------------------------------------------------- representation

CoIncidenceMatrix co_incidence(const CombinatorialComplex& cc, int rank) {
  check_rank(rank);
  return CoIncidenceMatrix{cc.cells(rank), cc.num_nodes()};
}

CombinatorialComplex from_co_incidence(const CoIncidenceMatrix& rows1, const CoIncidenceMatrix& rows2,
                                       std::size_t num_nodes) {
  auto collect = [&](const CoIncidenceMatrix& m, int rank) {
    if (m.num_cols != num_nodes && !m.rows.empty())
      throw CcError("rank-" + std::to_string(rank) + " co-incidence matrix has " +
                    std::to_string(m.num_cols) + " columns for " + std::to_string(num_nodes) + " nodes");
    std::set<NodeSet> uniq;
    for (const auto& row : m.rows) {
      if (row.empty()) continue;
      NodeSet cell = sorted_cell(row);
      if (cell.size() == 1)
        throw CcError("rank-" + std::to_string(rank) + " row " + cell_str(cell) +
                      " has a single node and cannot form a cell");
      uniq.insert(std::move(cell));
    }
    return std::vector<NodeSet>(uniq.begin(), uniq.end());
  };
  return CombinatorialComplex::create(num_nodes, collect(rows1, 1), collect(rows2, 2));
}

// ---------------------------------------------------------------- neighbourhoods

SparseBinaryMatrix incidence(const CombinatorialComplex& cc, int r, int k) {
  if (r == 0 && k == 1) {
    SparseBinaryMatrix b(cc.num_nodes(), cc.cells1().size());
    for (std::size_t j = 0; j < cc.cells1().size(); ++j)
      for (auto v : cc.cells1()[j]) b.row_indices[v].push_back(static_cast<std::uint32_t>(j));
    return b;
  }
  if (r == 1 && k == 2) {
    const auto& edges = cc.cells1();
    SparseBinaryMatrix b(edges.size(), cc.cells2().size());
    for (std::size_t j = 0; j < cc.cells2().size(); ++j) {
      const auto& cell = cc.cells2()[j];
      if (cell.size() <= 2) continue;  // a strict superset of a pair has >= 3 nodes
      for (std::size_t a = 0; a < cell.size(); ++a)
        for (std::size_t c = a + 1; c < cell.size(); ++c) {
          const auto idx = find_cell(edges, NodeSet{cell[a], cell[c]});
          if (idx >= 0) b.row_indices[idx].push_back(static_cast<std::uint32_t>(j));
        }
    }
    return b;
  }
  throw std::invalid_argument("incidence: (r,k) must be (0,1) or (1,2)");
}

namespace {

// Rows of `up` index lower cells, columns upper cells. Two lower cells are
// adjacent iff they share an upper cell.
SparseBinaryMatrix shared_upper(const SparseBinaryMatrix& up) {
  SparseBinaryMatrix a(up.rows, up.rows);
  const auto by_upper = up.transpose();
  std::vector<std::set<std::uint32_t>> acc(up.rows);
  for (const auto& members : by_upper.row_indices)
    for (auto i : members)
      for (auto j : members) acc[i].insert(j);
  for (std::size_t i = 0; i < up.rows; ++i) a.row_indices[i].assign(acc[i].begin(), acc[i].end());
  return a;
}

}  // namespace

SparseBinaryMatrix adjacency(const CombinatorialComplex& cc, int r, int k) {
  if (k != 1) throw std::invalid_argument("adjacency: only k = 1 is supported");
  if (r == 0) return shared_upper(incidence(cc, 0, 1));
  if (r == 1) return shared_upper(incidence(cc, 1, 2));
  throw std::invalid_argument("adjacency: r must be 0 or 1");
}

SparseBinaryMatrix coadjacency(const CombinatorialComplex& cc, int rank) {
  // Lower cells strictly inside each cell, as a (cell x lower) matrix.
  if (rank == 1) return shared_upper(incidence(cc, 0, 1).transpose());
  if (rank == 2) return shared_upper(incidence(cc, 1, 2).transpose());
  throw std::invalid_argument("coadjacency: rank must be 1 or 2");
}

Graph skeleton(const CombinatorialComplex& cc) {
  std::vector<Edge> edges;
  edges.reserve(cc.cells1().size());
  for (const auto& c : cc.cells1()) edges.emplace_back(c[0], c[1]);
  return Graph(cc.num_nodes(), std::move(edges));
}

CombinatorialComplex as_complex(const Graph& g, std::optional<FeatureMatrix> features) {
  std::vector<NodeSet> cells1;
  cells1.reserve(g.edges().size());
  for (auto [u, v] : g.edges()) cells1.push_back({u, v});
  return CombinatorialComplex::create(g.num_nodes(), std::move(cells1), {}, std::move(features));
}

// ---------------------------------------------------------------- series

const std::optional<FeatureMatrix>& GraphSeries::features_at(std::size_t t) const {
  static const std::optional<FeatureMatrix> none;
  return features.empty() ? none : features.at(t);
}

void GraphSeries::check() const {
  if (steps.empty()) throw CcError("graph series is empty");
  if (!features.empty() && features.size() != steps.size())
    throw CcError("graph series: feature list length differs from step count");
  for (std::size_t t = 0; t < steps.size(); ++t) {
    if (steps[t].num_nodes() != num_nodes)
      throw CcError("graph series: step " + std::to_string(t) + " has a different node count");
    const auto& f = features_at(t);
    if (f && static_cast<std::size_t>(f->rows()) != num_nodes)
      throw CcError("graph series: features at step " + std::to_string(t) + " have wrong row count");
  }
}

void CcSeries::check() const {
  if (steps.empty()) throw CcError("cc series is empty");
  for (std::size_t t = 0; t < steps.size(); ++t)
    if (steps[t].num_nodes() != num_nodes)
      throw CcError("cc series: step " + std::to_string(t) + " has a different node count");
}

GraphSeries skeleton(const CcSeries& series) {
  GraphSeries gs;
  gs.num_nodes = series.num_nodes;
  bool any_features = false;
  for (const auto& cc : series.steps) {
    gs.steps.push_back(skeleton(cc));
    gs.features.push_back(cc.features());
    any_features = any_features || cc.features().has_value();
  }
  if (!any_features) gs.features.clear();
  return gs;
}

CoIncidenceSeries to_co_incidence(const CcSeries& series) {
  CoIncidenceSeries out;
  out.num_nodes = series.num_nodes;
  for (const auto& cc : series.steps) out.steps.push_back({co_incidence(cc, 1), co_incidence(cc, 2)});
  return out;
}

}  // namespace damcc
