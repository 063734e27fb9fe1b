#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace damcc {

/// Probabilities are clamped into [kProbClamp, 1 - kProbClamp] before logs.
inline constexpr double kProbClamp = 1e-7;

/// C_ij = -sum_d [ b_jd log a_id + (1 - b_jd) log(1 - a_id) ] with `a` clamped.
Eigen::MatrixXd pairwise_bce(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target);

/// C_ij = 1 - cos(a_i, b_j); a zero-norm row has similarity 0, so cost 1.
Eigen::MatrixXd pairwise_cosine(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct Assignment {
  /// assignment[i] = column matched to row i, or -1 when row i got a dummy
  /// column (more rows than columns).
  std::vector<int> assignment;
  double total_cost = 0;  // matched costs summed in ascending order
};

/// Sum in ascending order, so the result does not depend on input order.
double sum_ascending(std::vector<double> x);

/// Exact minimum-cost assignment (shortest augmenting paths with potentials,
/// O(n^3)). Rectangular inputs are padded with zero-cost dummies.
Assignment hungarian(const Eigen::MatrixXd& cost);

struct TransportPlan {
  Eigen::MatrixXd plan;  // N_A x N_B
  double distance = 0;   // N_A * sum(plan .* cost)
};

enum class SinkhornMode {
  /// Fixed eps for every iteration; the plan is exp((f + g - C) / eps) as is.
  Plain,
  /// eps halves from the cost range down to the target over the first
  /// iterations, and the final plan is rounded onto the transport polytope
  /// (rows, then columns scaled down to their marginal, then the deficit
  /// added as a rank-one correction), so both marginals hold exactly.
  Rounded,
};

/// Entropic OT with uniform marginals, computed in the log domain so that
/// small eps never overflows.
TransportPlan sinkhorn(const Eigen::MatrixXd& cost, double eps = 0.1, int iters = 50,
                       SinkhornMode mode = SinkhornMode::Rounded);

enum class RowLoss { Bce, Cosine };
enum class Matcher { Hungarian, Sinkhorn };

struct RwplOptions {
  RowLoss row_loss = RowLoss::Cosine;
  Matcher matcher = Matcher::Hungarian;
  double eps = 0.1;
  int iters = 50;
};

struct RwplResult {
  double value = 0;
  bool finite = true;  // false flags a loss that blew up
};

/// Appends zero rows so both matrices have `rows` rows.
Eigen::MatrixXd pad_rows(const Eigen::MatrixXd& m, Eigen::Index rows);

/// Row-wise permutation-invariant loss: pad to equal row counts, build the
/// row cost matrix, match, return the total cost.
RwplResult rwpl(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target, const RwplOptions& opt);

/// Named variants: "hbce", "sbce", "hc", "sc".
RwplOptions rwpl_variant(const std::string& name, double eps = 0.1, int iters = 50);

}  // namespace damcc
