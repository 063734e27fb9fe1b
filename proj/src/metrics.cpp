#include "damcc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace damcc::metrics {

namespace {

using Lists = std::vector<std::vector<NodeIndex>>;

std::vector<int> bfs(const Lists& adj, NodeIndex src) {
  std::vector<int> d(adj.size(), -1);
  std::queue<NodeIndex> q;
  d[src] = 0;
  q.push(src);
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    for (auto v : adj[u])
      if (d[v] < 0) {
        d[v] = d[u] + 1;
        q.push(v);
      }
  }
  return d;
}

bool linked(const Lists& adj, NodeIndex u, NodeIndex v) { return std::binary_search(adj[u].begin(), adj[u].end(), v); }

std::size_t links_among(const Lists& adj, const std::vector<NodeIndex>& nodes) {
  std::size_t e = 0;
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b) e += linked(adj, nodes[a], nodes[b]);
  return e;
}

Graph union_up_to(const GraphSeries& s, std::size_t t) {
  std::set<Edge> edges;
  for (std::size_t k = 0; k <= t; ++k) edges.insert(s.steps[k].edges().begin(), s.steps[k].edges().end());
  return Graph(s.num_nodes, {edges.begin(), edges.end()});
}

}  // namespace

std::vector<double> degree(const Graph& g) {
  std::vector<double> k(g.num_nodes(), 0);
  for (auto [u, v] : g.edges()) {
    ++k[u];
    ++k[v];
  }
  return k;
}

std::vector<double> degree_centrality(const Graph& g) {
  auto k = degree(g);
  const double n = static_cast<double>(g.num_nodes());
  for (auto& x : k) x = n < 2 ? 0.0 : x / (n - 1);
  return k;
}

std::vector<double> local_clustering(const Graph& g) {
  const auto adj = g.adjacency_lists();
  std::vector<double> c(g.num_nodes(), 0);
  for (std::size_t i = 0; i < adj.size(); ++i) {
    const double k = static_cast<double>(adj[i].size());
    if (k < 2) continue;
    c[i] = 2.0 * static_cast<double>(links_among(adj, adj[i])) / (k * (k - 1));
  }
  return c;
}

std::vector<double> closeness_centrality(const Graph& g) {
  const auto adj = g.adjacency_lists();
  const std::size_t n = g.num_nodes();
  std::vector<double> c(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = bfs(adj, static_cast<NodeIndex>(i));
    double total = 0, reach = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && d[j] > 0) {
        total += d[j];
        ++reach;
      }
    if (reach > 0) c[i] = (reach / total) * (reach / static_cast<double>(n - 1));
  }
  return c;
}

EigenvectorCentrality eigenvector_centrality(const Graph& g, double tol, std::size_t max_iter) {
  const auto adj = g.adjacency_lists();
  const std::size_t n = g.num_nodes();
  EigenvectorCentrality out;
  if (n == 0) {
    out.converged = true;
    return out;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  x.normalize();
  for (std::size_t it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd y = x;  // the identity shift
    for (std::size_t i = 0; i < n; ++i)
      for (auto j : adj[i]) y(static_cast<Eigen::Index>(i)) += x(j);
    y.normalize();
    const double change = (y - x).cwiseAbs().maxCoeff();
    x = y;
    out.iterations = it;
    if (change < tol) {
      out.converged = true;
      break;
    }
  }
  out.values.assign(x.data(), x.data() + x.size());
  return out;
}

std::vector<double> laplacian_spectrum(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  if (n == 0) return {};
  Eigen::MatrixXd L = -g.adjacency_matrix();
  for (Eigen::Index i = 0; i < n; ++i) L(i, i) = -L.row(i).sum();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

double average_clustering(const Graph& g) {
  const auto c = local_clustering(g);
  if (c.empty()) return 0;
  double s = 0;
  for (double x : c) s += x;
  return s / static_cast<double>(c.size());
}

std::size_t triangle_count(const Graph& g) {
  const auto adj = g.adjacency_lists();
  std::size_t t = 0;
  for (auto [u, v] : g.edges())
    for (auto w : adj[v])
      if (w > v && linked(adj, u, w)) ++t;
  return t;
}

double transitivity(const Graph& g) {
  double triples = 0;
  for (double k : degree(g)) triples += k * (k - 1) / 2;
  return triples == 0 ? 0.0 : 3.0 * static_cast<double>(triangle_count(g)) / triples;
}

double temporal_correlation(const GraphSeries& s) {
  const std::size_t T = s.steps.size(), n = s.num_nodes;
  if (T < 2 || n < 2) return 0;
  std::vector<std::vector<double>> k(n, std::vector<double>(T));
  for (std::size_t t = 0; t < T; ++t) {
    const auto d = degree(s.steps[t]);
    for (std::size_t i = 0; i < n; ++i) k[i][t] = d[i];
  }
  for (auto& series : k) {
    double mean = 0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(T);
    for (double& x : series) x -= mean;
  }
  double total = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double sij = 0, sii = 0, sjj = 0;
      for (std::size_t t = 0; t < T; ++t) {
        sij += k[i][t] * k[j][t];
        sii += k[i][t] * k[i][t];
        sjj += k[j][t] * k[j][t];
      }
      if (sii > 0 && sjj > 0) total += sij / std::sqrt(sii * sjj);
      ++pairs;
    }
  return total / static_cast<double>(pairs);
}

std::vector<double> temporal_closeness(const GraphSeries& s, std::size_t t) {
  if (t >= s.steps.size()) throw std::out_of_range("temporal_closeness: step out of range");
  const auto adj = union_up_to(s, t).adjacency_lists();
  std::vector<double> c(s.num_nodes, 0);
  for (std::size_t i = 0; i < s.num_nodes; ++i) {
    const auto d = bfs(adj, static_cast<NodeIndex>(i));
    double total = 0;
    for (std::size_t j = 0; j < s.num_nodes; ++j)
      if (j != i && d[j] > 0) total += d[j];
    if (total > 0) c[i] = 1.0 / total;
  }
  return c;
}

std::vector<double> temporal_clustering(const GraphSeries& s, std::size_t t) {
  if (t >= s.steps.size()) throw std::out_of_range("temporal_clustering: step out of range");
  const auto now = s.steps[t].adjacency_lists();
  const auto seen = union_up_to(s, t).adjacency_lists();
  std::vector<double> c(s.num_nodes, 0);
  for (std::size_t i = 0; i < s.num_nodes; ++i) {
    const double k = static_cast<double>(now[i].size());
    if (k < 2) continue;
    c[i] = 2.0 * static_cast<double>(links_among(seen, now[i])) / (k * (k - 1));
  }
  return c;
}

double quantile(std::vector<double> x, double p) {
  if (x.empty()) return 0;
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double dtw(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0 || m == 0) return n == m ? 0.0 : std::numeric_limits<double>::infinity();
  auto dist = [&](std::size_t i, std::size_t j) {
    if (a[i].size() != b[j].size()) throw std::invalid_argument("dtw: payload dimensions differ");
    double s = 0;
    for (std::size_t k = 0; k < a[i].size(); ++k) s += (a[i][k] - b[j][k]) * (a[i][k] - b[j][k]);
    return std::sqrt(s);
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> D(n + 1, std::vector<double>(m + 1, inf));
  D[0][0] = 0;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      D[i][j] = dist(i - 1, j - 1) + std::min({D[i - 1][j], D[i][j - 1], D[i - 1][j - 1]});
  return D[n][m];
}

double dtw(const StatSeries& a, const StatSeries& b) { return dtw(a.points, b.points); }

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{
      "spectral",           "degree",           "degree_centrality",     "local_clustering",
      "closeness_centrality", "eigenvector_centrality", "average_clustering", "transitivity",
      "temporal_correlation", "temporal_closeness", "temporal_clustering"};
  return names;
}

StatSeries stat_series(const GraphSeries& s, const std::string& metric) {
  StatSeries out{metric, {}};
  auto quartiles = [](const std::vector<double>& v) {
    return std::vector<double>{quantile(v, 0.25), quantile(v, 0.75)};
  };
  for (std::size_t t = 0; t < s.steps.size(); ++t) {
    const Graph& g = s.steps[t];
    if (metric == "spectral") out.points.push_back(quartiles(laplacian_spectrum(g)));
    else if (metric == "degree") out.points.push_back(quartiles(degree(g)));
    else if (metric == "degree_centrality") out.points.push_back(quartiles(degree_centrality(g)));
    else if (metric == "local_clustering") out.points.push_back(quartiles(local_clustering(g)));
    else if (metric == "closeness_centrality") out.points.push_back(quartiles(closeness_centrality(g)));
    else if (metric == "eigenvector_centrality") out.points.push_back(quartiles(eigenvector_centrality(g).values));
    else if (metric == "average_clustering") out.points.push_back({average_clustering(g)});
    else if (metric == "transitivity") out.points.push_back({transitivity(g)});
    else if (metric == "temporal_closeness") out.points.push_back(quartiles(temporal_closeness(s, t)));
    else if (metric == "temporal_clustering") out.points.push_back(quartiles(temporal_clustering(s, t)));
    else throw std::invalid_argument("no per-step series for metric '" + metric + "'");
  }
  return out;
}

std::vector<EvalRow> evaluate(const GraphSeries& generated, const GraphSeries& target) {
  if (generated.num_nodes != target.num_nodes) throw std::invalid_argument("evaluate: node counts differ");
  std::vector<EvalRow> rows;
  for (const auto& name : metric_names()) {
    if (name == "temporal_correlation")
      rows.push_back({name, std::abs(temporal_correlation(generated) - temporal_correlation(target))});
    else
      rows.push_back({name, dtw(stat_series(generated, name), stat_series(target, name))});
  }
  return rows;
}

}  // namespace damcc::metrics
