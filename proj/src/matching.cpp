#include "damcc/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace damcc {

// Costs are computed entry by entry so that each C(i, j) depends only on the
// two rows, never on where they sit in the matrices.
Eigen::MatrixXd pairwise_bce(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  if (pred.cols() != target.cols())
    throw std::invalid_argument("pairwise_bce: column counts differ (" + std::to_string(pred.cols()) + " vs " +
                                std::to_string(target.cols()) + ")");
  const Eigen::MatrixXd a = pred.cwiseMax(kProbClamp).cwiseMin(1.0 - kProbClamp);
  // Scalar std::log: Eigen's packet log differs from the scalar tail in the
  // last bits, which would make a cost depend on the row's position.
  const Eigen::MatrixXd la = a.unaryExpr([](double x) { return std::log(x); });
  const Eigen::MatrixXd l1a = a.unaryExpr([](double x) { return std::log(1.0 - x); });
  Eigen::MatrixXd c(pred.rows(), target.rows());
  for (Eigen::Index j = 0; j < target.rows(); ++j)
    for (Eigen::Index i = 0; i < pred.rows(); ++i) {
      double s = 0;
      for (Eigen::Index d = 0; d < pred.cols(); ++d) {
        const double b = target(j, d);
        s -= b * la(i, d) + (1 - b) * l1a(i, d);
      }
      c(i, j) = s;
    }
  return c;
}

Eigen::MatrixXd pairwise_cosine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("pairwise_cosine: column counts differ");
  auto dot = [&](const Eigen::MatrixXd& x, Eigen::Index i, const Eigen::MatrixXd& y, Eigen::Index j) {
    double s = 0;
    for (Eigen::Index d = 0; d < x.cols(); ++d) s += x(i, d) * y(j, d);
    return s;
  };
  Eigen::VectorXd sa(a.rows()), sb(b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) sa(i) = dot(a, i, a, i);
  for (Eigen::Index j = 0; j < b.rows(); ++j) sb(j) = dot(b, j, b, j);
  Eigen::MatrixXd c(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      // sqrt(s * s) == s exactly, so identical rows cost exactly 0.
      c(i, j) = (sa(i) == 0 || sb(j) == 0) ? 1.0 : 1.0 - dot(a, i, b, j) / std::sqrt(sa(i) * sb(j));
    }
  return c;
}

double sum_ascending(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  double s = 0;
  for (double v : x) s += v;
  return s;
}

Assignment hungarian(const Eigen::MatrixXd& cost) {
  const Eigen::Index na = cost.rows(), nb = cost.cols();
  const Eigen::Index n = std::max(na, nb);
  Assignment res;
  res.assignment.assign(static_cast<std::size_t>(na), -1);
  if (n == 0) return res;
  auto c = [&](Eigen::Index i, Eigen::Index j) { return (i < na && j < nb) ? cost(i, j) : 0.0; };

  // 1-based potentials formulation; p[j] = row matched to column j.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(n + 1, 0);
  std::vector<Eigen::Index> p(n + 1, 0), way(n + 1, 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const Eigen::Index i0 = p[j0];
      double delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<double> picked;
  for (Eigen::Index j = 1; j <= n; ++j) {
    const Eigen::Index i = p[j] - 1;
    if (i < na && j - 1 < nb) {
      res.assignment[static_cast<std::size_t>(i)] = static_cast<int>(j - 1);
      picked.push_back(cost(i, j - 1));
    }
  }
  res.total_cost = sum_ascending(std::move(picked));
  return res;
}

namespace {
double log_sum_exp(const Eigen::VectorXd& x) {
  const double m = x.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((x.array() - m).exp().sum());
}
}  // namespace

TransportPlan sinkhorn(const Eigen::MatrixXd& cost, double eps, int iters, SinkhornMode mode) {
  if (!(eps > 0)) throw std::invalid_argument("sinkhorn: eps must be > 0");
  const Eigen::Index na = cost.rows(), nb = cost.cols();
  TransportPlan out;
  out.plan = Eigen::MatrixXd::Zero(na, nb);
  if (na == 0 || nb == 0) return out;
  const double mu = 1.0 / static_cast<double>(na), nu = 1.0 / static_cast<double>(nb);
  const double log_mu = std::log(mu), log_nu = std::log(nu);
  const bool rounded = mode == SinkhornMode::Rounded;
  double e = rounded ? std::max(eps, cost.maxCoeff() - cost.minCoeff()) : eps;
  // Dual potentials in cost units: plan = exp((f_i + g_j - C_ij) / e).
  Eigen::VectorXd f = Eigen::VectorXd::Zero(na), g = Eigen::VectorXd::Zero(nb);
  for (int it = 0; it < iters; ++it) {
    for (Eigen::Index i = 0; i < na; ++i)
      f(i) = e * (log_mu - log_sum_exp((g - cost.row(i).transpose()) / e));
    for (Eigen::Index j = 0; j < nb; ++j) g(j) = e * (log_nu - log_sum_exp((f - cost.col(j)) / e));
    e = std::max(eps, e / 2);
  }
  for (Eigen::Index i = 0; i < na; ++i)
    for (Eigen::Index j = 0; j < nb; ++j) out.plan(i, j) = std::exp((f(i) + g(j) - cost(i, j)) / e);
  if (rounded) {
    Eigen::MatrixXd& p = out.plan;
    for (Eigen::Index i = 0; i < na; ++i)
      if (const double s = p.row(i).sum(); s > mu) p.row(i) *= mu / s;
    for (Eigen::Index j = 0; j < nb; ++j)
      if (const double s = p.col(j).sum(); s > nu) p.col(j) *= nu / s;
    const Eigen::VectorXd dr = (mu - p.rowwise().sum().array()).matrix();
    const Eigen::RowVectorXd dc = (nu - p.colwise().sum().array()).matrix();
    if (const double mass = dc.sum(); mass > 0) p += dr * dc / mass;
  }
  out.distance = static_cast<double>(na) * (out.plan.array() * cost.array()).sum();
  return out;
}

Eigen::MatrixXd pad_rows(const Eigen::MatrixXd& m, Eigen::Index rows) {
  if (m.rows() >= rows) return m;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, m.cols());
  out.topRows(m.rows()) = m;
  return out;
}

RwplResult rwpl(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target, const RwplOptions& opt) {
  if (pred.cols() != target.cols()) throw std::invalid_argument("rwpl: column counts differ");
  const Eigen::Index rows = std::max(pred.rows(), target.rows());
  const Eigen::MatrixXd a = pad_rows(pred, rows), b = pad_rows(target, rows);
  const Eigen::MatrixXd c = opt.row_loss == RowLoss::Bce ? pairwise_bce(a, b) : pairwise_cosine(a, b);
  RwplResult r;
  r.value = opt.matcher == Matcher::Hungarian ? hungarian(c).total_cost : sinkhorn(c, opt.eps, opt.iters).distance;
  r.finite = std::isfinite(r.value);
  return r;
}

RwplOptions rwpl_variant(const std::string& name, double eps, int iters) {
  RwplOptions o;
  o.eps = eps;
  o.iters = iters;
  if (name == "hbce") o.row_loss = RowLoss::Bce, o.matcher = Matcher::Hungarian;
  else if (name == "sbce") o.row_loss = RowLoss::Bce, o.matcher = Matcher::Sinkhorn;
  else if (name == "hc") o.row_loss = RowLoss::Cosine, o.matcher = Matcher::Hungarian;
  else if (name == "sc") o.row_loss = RowLoss::Cosine, o.matcher = Matcher::Sinkhorn;
  else throw std::invalid_argument("unknown loss '" + name + "' (hbce, sbce, hc, sc)");
  return o;
}

}  // namespace damcc
