#pragma once

#include "damcc/cc.hpp"
#include "damcc/encoder.hpp"
#include "damcc/matching.hpp"
#include "damcc/nn.hpp"
#include "damcc/rng.hpp"

#include <string>
#include <vector>

namespace damcc {

enum class Traversal { Deterministic, Stochastic };

struct DecoderHyperparams {
  std::size_t n_new_cell = 1;
  double p_min = 0.5;
  std::size_t n_max = 2;
  std::size_t min_nonzero = 1;  // rows with 1..min_nonzero ones are resampled
  std::size_t max_resample_attempts = 20;
  Traversal traversal = Traversal::Deterministic;
  double temperature = 0.5;

  void check(std::size_t num_nodes) const;
};

/// Tree node over the 1-based index interval [lo, hi].
struct Interval {
  std::size_t lo = 1, hi = 1;
  bool leaf() const { return lo == hi; }
  std::size_t mid() const { return (lo + hi) / 2; }
  Interval left() const { return {lo, mid()}; }
  Interval right() const { return {mid() + 1, hi}; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Side { Left, Right };

/// Source of traversal decisions. `value` is the gate value compared with
/// P_min, or the leaf probability.
class DecisionMaker {
public:
  virtual ~DecisionMaker() = default;
  virtual bool gate(Side side, const Interval& node, double value) = 0;
  virtual bool leaf(std::size_t index, double prob) = 0;
};

/// Default: descend iff value > P_min, set a leaf with Bernoulli(prob).
class SamplingDecisions : public DecisionMaker {
public:
  SamplingDecisions(Rng& rng, double p_min) : rng_(rng), p_min_(p_min) {}
  bool gate(Side, const Interval&, double value) override { return value > p_min_; }
  bool leaf(std::size_t, double prob) override { return rng_.bernoulli(prob); }

private:
  Rng& rng_;
  double p_min_;
};

struct DecoderConfig {
  Eigen::Index hidden = 256;
};

struct DecoderParams {
  DecoderConfig cfg;
  nn::Mlp mlp_cat;    // 2H -> H -> H, tanh
  nn::Mlp mlp_left;   // H -> H -> 1 logit
  nn::Mlp mlp_right;  // H -> H -> 1 logit
  nn::Mlp mlp_leaf;   // H -> H -> 1 logit
  nn::LstmCell lstm;  // input: one-hot descent direction
  nn::TreeLstmCell tree;
  nn::AttentionSummarizer summarizer;

  DecoderParams() = default;
  DecoderParams(nn::ParameterSet& ps, const std::string& name, const DecoderConfig& cfg, Rng& rng);
};

struct RowTrace {
  std::size_t visited = 0;   // tree nodes entered
  std::size_t decisions = 0;  // gate and leaf decisions taken
};

struct RowSample {
  NodeSet row;    // 0-based indices of the ones
  Tensor g_new;   // root combined hidden state
  RowTrace trace;
};

/// One run of the tree traversal from the root with hidden state `h_root`.
RowSample sample_row(const Tensor& h_root, std::size_t num_nodes, const DecoderHyperparams& hp,
                     const DecoderParams& p, DecisionMaker& decide, Rng& rng);

struct MatrixSample {
  CoIncidenceMatrix matrix;           // zero rows removed
  std::vector<RowTrace> traces;       // one per accepted or abandoned row
  std::size_t resampled = 0;
};

/// Row-by-row autoregressive sampling over the rows of H_enc, n_new_cell passes.
MatrixSample sample_incidence_matrix(const Tensor& H_enc, std::size_t num_nodes, const DecoderHyperparams& hp,
                                     const DecoderParams& p, Rng& rng);

struct CcModel {
  HmcParams encoder;
  DecoderParams dec1, dec2;
  DecoderHyperparams hp1, hp2;
};

/// Encodes cc, samples coB01 and coB02, and assembles the next CC. Sampled
/// 2-cell rows that coincide with a sampled edge are dropped.
CombinatorialComplex predict_next_cc(const CombinatorialComplex& cc, const CcModel& model, Rng& rng);

enum class LossMode { Bce, SinkhornCosine };

/// Log-domain Sinkhorn with uniform marginals, unrolled on the tape so the
/// gradient also flows through the plan. Returns N_A * sum(plan .* cost).
Tensor sinkhorn_distance(const Tensor& cost, double eps, int iters);

struct TeacherForcingOptions {
  LossMode mode = LossMode::Bce;
  double sinkhorn_eps = 0.1;
  int sinkhorn_iters = 50;
};

/// Training loss for one co-incidence matrix. BCE mode forces the traversal
/// along each target row (row i of H_enc against target row i) and scores the
/// gates and visited leaves. SC mode emits one soft row per row of H_enc and
/// returns sinkhorn_distance of the cosine cost against the zero-padded target.
Tensor teacher_forced_loss(const Tensor& H_enc, const CoIncidenceMatrix& target, const DecoderHyperparams& hp,
                           const DecoderParams& p, const TeacherForcingOptions& opt, Rng& rng);

}  // namespace damcc
