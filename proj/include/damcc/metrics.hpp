#pragma once

#include "damcc/cc.hpp"

#include <string>
#include <vector>

namespace damcc::metrics {

std::vector<double> degree(const Graph& g);
/// k_i / (n - 1); all zero when n < 2.
std::vector<double> degree_centrality(const Graph& g);
/// Nodes of degree < 2 get 0.
std::vector<double> local_clustering(const Graph& g);
/// Breadth-first distances. With r other nodes reachable from i,
/// C(i) = (r / sum d) * (r / (n - 1)); 0 when r = 0.
std::vector<double> closeness_centrality(const Graph& g);

struct EigenvectorCentrality {
  std::vector<double> values;  // unit L2 norm, non-negative
  bool converged = false;
  std::size_t iterations = 0;
};
/// Power iteration on A + I from the all-ones vector.
EigenvectorCentrality eigenvector_centrality(const Graph& g, double tol = 1e-10, std::size_t max_iter = 10000);

/// Eigenvalues of L = D - A, ascending.
std::vector<double> laplacian_spectrum(const Graph& g);

double average_clustering(const Graph& g);
/// 3 * triangles / connected triples; 0 without triples.
double transitivity(const Graph& g);
std::size_t triangle_count(const Graph& g);

/// Mean Pearson correlation of the degree series over all node pairs.
/// Pairs with a constant series contribute 0; 0 when T < 2 or n < 2.
double temporal_correlation(const GraphSeries& s);
/// 1 / sum of distances to the nodes reachable in the union of steps 0..t;
/// 0 when nothing is reachable.
std::vector<double> temporal_closeness(const GraphSeries& s, std::size_t t);
/// 2 E / (k (k - 1)) with k the degree at step t and E the edges among the
/// current neighbours present in the union of steps 0..t.
std::vector<double> temporal_clustering(const GraphSeries& s, std::size_t t);

/// Linear-interpolation (type 7) quantile of unsorted data; p in [0, 1].
double quantile(std::vector<double> x, double p);

/// Per-step payload: one value for global statistics, (Q1, Q3) for local ones.
struct StatSeries {
  std::string name;
  std::vector<std::vector<double>> points;
};

/// Dynamic time warping with Euclidean local distance, no window.
double dtw(const StatSeries& a, const StatSeries& b);
double dtw(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b);

/// Metric names in report order.
const std::vector<std::string>& metric_names();

StatSeries stat_series(const GraphSeries& s, const std::string& metric);

struct EvalRow {
  std::string metric;
  double value = 0;
};
/// DTW per metric (absolute difference for temporal_correlation).
std::vector<EvalRow> evaluate(const GraphSeries& generated, const GraphSeries& target);

}  // namespace damcc::metrics
