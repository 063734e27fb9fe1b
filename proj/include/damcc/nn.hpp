#pragma once

#include "damcc/autodiff.hpp"
#include "damcc/rng.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace damcc::nn {

using ad::Matrix;
using ad::Tensor;

/// Ordered, named collection of trainable tensors. Order defines the
/// checkpoint layout.
class ParameterSet {
public:
  /// Glorot-uniform initialised rows x cols parameter.
  Tensor add(const std::string& name, Eigen::Index rows, Eigen::Index cols, Rng& rng);
  Tensor add_zeros(const std::string& name, Eigen::Index rows, Eigen::Index cols);

  const std::vector<std::pair<std::string, Tensor>>& entries() const { return entries_; }
  std::vector<Tensor> tensors() const;
  std::size_t scalar_count() const;
  void zero_grad();
  /// Copies values from `other` (same names and shapes in the same order).
  void assign(const ParameterSet& other);
  /// Deep copy of the values, detached from this set.
  std::vector<Matrix> snapshot() const;
  void restore(const std::vector<Matrix>& values);

private:
  std::vector<std::pair<std::string, Tensor>> entries_;
};

/// uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng);

enum class Activation { None, LeakyRelu, Tanh, Sigmoid };
Tensor activate(const Tensor& x, Activation act);

/// y = x W + b for row-major batches x (n x in).
struct Linear {
  Tensor W, b;
  Linear() = default;
  Linear(ParameterSet& ps, const std::string& name, Eigen::Index in, Eigen::Index out, Rng& rng);
  Tensor operator()(const Tensor& x) const;
};

/// Linear layers with LeakyReLU(0.01) between them and `out_act` at the end.
struct Mlp {
  std::vector<Linear> layers;
  Activation out_act = Activation::None;
  Mlp() = default;
  Mlp(ParameterSet& ps, const std::string& name, const std::vector<Eigen::Index>& sizes, Activation out_act,
      Rng& rng);
  Tensor operator()(const Tensor& x) const;
};

struct State {
  Tensor h, c;
};

/// Standard LSTM cell on row vectors: gates i, f, g, o from [x | h].
struct LstmCell {
  Linear gates;
  Eigen::Index hidden = 0;
  LstmCell() = default;
  LstmCell(ParameterSet& ps, const std::string& name, Eigen::Index input, Eigen::Index hidden, Rng& rng);
  State operator()(const Tensor& x, const State& s) const;
};

/// Binary Tree-LSTM: gates i, f_left, f_right, o, u from [h_l | h_r];
/// c = i*u + f_l*c_l + f_r*c_r, h = o*tanh(c).
struct TreeLstmCell {
  Linear gates;
  Eigen::Index hidden = 0;
  TreeLstmCell() = default;
  TreeLstmCell(ParameterSet& ps, const std::string& name, Eigen::Index hidden, Rng& rng);
  State operator()(const State& left, const State& right) const;
};

/// Sinusoidal position code, 1 x dim.
Matrix positional_encoding(std::size_t pos, Eigen::Index dim);

/// One scaled dot-product self-attention layer over a growing history of row
/// vectors; returns the output at the last position.
struct AttentionSummarizer {
  Linear q, k, v, o;
  Eigen::Index dim = 0;

  /// Keys and values of the elements seen so far.
  struct Cache {
    std::vector<Tensor> keys, values;
  };

  AttentionSummarizer() = default;
  AttentionSummarizer(ParameterSet& ps, const std::string& name, Eigen::Index dim, Rng& rng);
  /// Appends `x` to the history and returns tanh(softmax(q Kᵀ/√d) V W_o + b_o).
  Tensor push(Cache& cache, const Tensor& x) const;
  Tensor summarize(const std::vector<Tensor>& history) const;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Parameters with an empty gradient (nothing flowed in since zero_grad) are
/// left untouched, moments included.
class Adam {
public:
  Adam(const ParameterSet& params, AdamConfig cfg = {});
  void step();
  void set_lr(double lr) { cfg_.lr = lr; }
  double lr() const { return cfg_.lr; }
  std::size_t steps() const { return t_; }

private:
  std::vector<Tensor> params_;
  std::vector<Matrix> m_, v_;
  AdamConfig cfg_;
  std::size_t t_ = 0;
};

inline constexpr int kCheckpointVersion = 1;

/// Writes `<stem>.json` (manifest: version, `meta`, parameter names and
/// shapes) and `<stem>.bin` (float32 little-endian values in manifest order,
/// column-major within a tensor).
void save_checkpoint(const std::filesystem::path& stem, const ParameterSet& params, const nlohmann::json& meta);
/// Reads the manifest's `meta`; fills `params` when given.
nlohmann::json load_checkpoint_meta(const std::filesystem::path& stem);
void load_checkpoint_values(const std::filesystem::path& stem, ParameterSet& params);

}  // namespace damcc::nn
