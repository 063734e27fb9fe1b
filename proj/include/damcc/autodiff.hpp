#pragma once

#include "damcc/rng.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace damcc::ad {

using Matrix = Eigen::MatrixXd;

struct Node {
  Matrix value;
  Matrix grad;  // empty until something flows in; empty reads as zero
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;  // empty for leaves
  // Leaf gradient terms x * y collected during backward and summed with one
  // product at the end.
  std::vector<std::pair<Matrix, Matrix>> deferred;
};

/// Handle to a node of the differentiation graph. Copies share the node.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static Tensor constant(Matrix value);
  /// Leaf that accumulates gradients.
  static Tensor parameter(Matrix value);
  static Tensor scalar(double v) { return constant(Matrix::Constant(1, 1, v)); }

  bool defined() const { return static_cast<bool>(node_); }
  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  /// Gradient, zero-sized until something flows into it.
  const Matrix& grad() const { return node_->grad; }
  Matrix& mutable_grad() { return node_->grad; }
  bool requires_grad() const { return node_->requires_grad; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  double item() const;
  void zero_grad() { node_->grad.resize(0, 0); }

  const std::shared_ptr<Node>& node() const { return node_; }

private:
  std::shared_ptr<Node> node_;
};

class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// While alive on this thread, ops record no backward information.
class NoGradGuard {
public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
  bool previous_;
};
bool grad_enabled();

Tensor matmul(const Tensor& a, const Tensor& b);
/// Same shape, or `b` a 1 x cols row broadcast over the rows of `a`.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
/// Hadamard product, same shapes.
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
Tensor transpose(const Tensor& a);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& a, Eigen::Index start, Eigen::Index count);
Tensor slice_rows(const Tensor& a, Eigen::Index start, Eigen::Index count);
/// out(i, j) = p(i) + q(j) for column vectors p (n x 1) and q (m x 1).
Tensor outer_sum(const Tensor& p, const Tensor& q);

Tensor leaky_relu(const Tensor& a, double slope = 0.01);
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
/// Row softmax over entries where mask != 0; rows with an empty mask are zero.
Tensor masked_row_softmax(const Tensor& a, const Matrix& mask);
Tensor row_softmax(const Tensor& a);
Tensor exp(const Tensor& a);
/// n x m -> n x 1, log sum_j exp(a(i, j)), shifted by the row max.
Tensor row_logsumexp(const Tensor& a);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
/// Summed binary cross entropy of probabilities `p` against constant targets.
/// p is clamped into [clamp, 1 - clamp]; clamped entries pass no gradient.
Tensor bce(const Tensor& p, const Matrix& target, double clamp = 1e-7);
/// Summed binary cross entropy of logits, computed stably.
Tensor bce_with_logits(const Tensor& z, const Matrix& target);
/// C(i, j) = 1 - cos(a_i, b_j) with cost 1 (and no gradient) for zero rows.
Tensor cosine_cost(const Tensor& a, const Tensor& b);

/// Reverse-mode accumulation from a 1 x 1 tensor. Parameter gradients
/// accumulate; call zero_grad between steps.
void backward(const Tensor& loss);

/// Largest relative error |a - n| / max(|a|, |n|, floor) over the checked
/// coordinates, comparing analytic gradients with central differences.
struct GradCheckOptions {
  double step = 1e-5;
  double floor = 1e-3;
  /// Coordinates checked per parameter; 0 means all of them.
  std::size_t max_coords_per_param = 0;
  std::uint64_t seed = 0;
};
struct GradCheckResult {
  double max_rel_error = 0;
  std::size_t coords_checked = 0;
  std::string worst;  // "param[i,j]" of the worst coordinate
};
GradCheckResult grad_check(const std::function<Tensor()>& f, const std::vector<Tensor>& params,
                           const GradCheckOptions& opt = {});

}  // namespace damcc::ad
