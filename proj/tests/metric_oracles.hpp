#pragma once

#include "damcc/cc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense adjacency(const damcc::Graph& g) {
  const std::size_t n = g.num_nodes();
  Dense a(n, std::vector<double>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && g.has_edge(static_cast<damcc::NodeIndex>(i), static_cast<damcc::NodeIndex>(j))) a[i][j] = 1;
  return a;
}

inline std::size_t triangles(const Dense& a) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      for (std::size_t k = j + 1; k < a.size(); ++k)
        if (a[i][j] != 0 && a[j][k] != 0 && a[i][k] != 0) ++c;
  return c;
}

// Ordered-pair count of paths u - i - v centred at i, halved.
inline std::size_t connected_triples(const Dense& a) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t u = 0; u < a.size(); ++u)
      for (std::size_t v = u + 1; v < a.size(); ++v)
        if (a[i][u] != 0 && a[i][v] != 0) ++c;
  return c;
}

inline std::vector<double> local_clustering(const Dense& a) {
  std::vector<double> out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t pairs = 0, closed = 0;
    for (std::size_t u = 0; u < a.size(); ++u)
      for (std::size_t v = u + 1; v < a.size(); ++v)
        if (a[i][u] != 0 && a[i][v] != 0) {
          ++pairs;
          if (a[u][v] != 0) ++closed;
        }
    if (pairs > 0) out[i] = static_cast<double>(closed) / static_cast<double>(pairs);
  }
  return out;
}

// Floyd-Warshall; unreachable pairs stay infinite.
inline Dense distances(const Dense& a) {
  const std::size_t n = a.size();
  const double inf = std::numeric_limits<double>::infinity();
  Dense d(n, std::vector<double>(n, inf));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (a[i][j] != 0) d[i][j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

// Cyclic Jacobi rotations; returns eigenvalues and fills `vecs` with
// eigenvectors as columns.
inline std::vector<double> jacobi_eigen(Dense m, Dense* vecs = nullptr) {
  const std::size_t n = m.size();
  Dense v(n, std::vector<double>(n, 0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += m[p][q] * m[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (m[p][q] == 0) continue;
        const double theta = (m[q][q] - m[p][p]) / (2 * m[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m[k][p], mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m[p][k], mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = m[i][i];
  if (vecs) *vecs = v;
  return ev;
}

inline std::vector<double> laplacian_spectrum(const Dense& a) {
  const std::size_t n = a.size();
  Dense l(n, std::vector<double>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) {
        l[i][j] = -a[i][j];
        l[i][i] += a[i][j];
      }
  auto ev = jacobi_eigen(l);
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Limit of power iteration on A + I from the all-ones vector: the
// normalised projection of ones onto the top eigenspace.
inline std::vector<double> eigenvector_centrality(const Dense& a) {
  const std::size_t n = a.size();
  Dense m = a, v;
  for (std::size_t i = 0; i < n; ++i) m[i][i] += 1;
  const auto ev = jacobi_eigen(m, &v);
  const double top = *std::max_element(ev.begin(), ev.end());
  std::vector<double> x(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (ev[k] < top - 1e-9) continue;
    double dot = 0;
    for (std::size_t i = 0; i < n; ++i) dot += v[i][k];
    for (std::size_t i = 0; i < n; ++i) x[i] += dot * v[i][k];
  }
  double norm = 0;
  for (double y : x) norm += y * y;
  for (double& y : x) y /= std::sqrt(norm);
  return x;
}

// Minimum over every monotone alignment path, enumerated recursively.
inline double dtw_enumerate(const Dense& a, const Dense& b) {
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0;
    for (std::size_t k = 0; k < a[i].size(); ++k) s += (a[i][k] - b[j][k]) * (a[i][k] - b[j][k]);
    return std::sqrt(s);
  };
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
    acc += dist(i, j);
    if (i + 1 == a.size() && j + 1 == b.size()) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < a.size()) walk(i + 1, j, acc);
    if (j + 1 < b.size()) walk(i, j + 1, acc);
    if (i + 1 < a.size() && j + 1 < b.size()) walk(i + 1, j + 1, acc);
  };
  walk(0, 0, 0);
  return best;
}

}  // namespace oracle
