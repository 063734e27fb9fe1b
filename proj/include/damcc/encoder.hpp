#pragma once

#include "damcc/cc.hpp"
#include "damcc/nn.hpp"

namespace damcc {

using ad::Matrix;
using ad::Tensor;

/// Dense neighbourhood matrices the encoder consumes.
struct CcMatrices {
  Matrix A01;   // n0 x n0, nodes via edges
  Matrix B01;   // n0 x n1
  Matrix B12;   // n1 x n2
  Matrix A12;   // n1 x n1, edges via 2-cells
  Matrix coA2;  // n2 x n2, 2-cells via shared edges
};
CcMatrices cc_matrices(const CombinatorialComplex& cc);

struct CochainSet {
  Matrix H0, H1, H2;
};
/// H0 = node features, or the identity when there are none; H1, H2 = ones.
CochainSet init_cochains(const CombinatorialComplex& cc);

/// Weights and attention vector of an equal-rank push-forward.
struct EqualAttention {
  Tensor W;  // d_in x d_out
  Tensor a;  // 2*d_out x 1
  EqualAttention() = default;
  EqualAttention(nn::ParameterSet& ps, const std::string& name, Eigen::Index in, Eigen::Index out, Rng& rng);
};

/// Weights and shared attention vector of an unequal-rank block s <-> t.
struct UnequalAttention {
  Tensor Ws;  // d_s_in x t_out
  Tensor Wt;  // d_t_in x s_out
  Tensor a;   // (t_out + s_out) x 1
  UnequalAttention() = default;
  UnequalAttention(nn::ParameterSet& ps, const std::string& name, Eigen::Index s_in, Eigen::Index t_in,
                   Eigen::Index out, Rng& rng);
};

/// K = (G .* att) H W with att the masked row softmax of
/// e_ij = LeakyReLU(a^T [W h_i | W h_j]) over the nonzeros of G.
Tensor cc_attention_equal(const Matrix& G, const Tensor& H, const EqualAttention& p);

struct UnequalOutput {
  Tensor K_t, K_s;
  Tensor e, f;  // raw scores, t x s and s x t (exposed for tests)
};
/// G is |X^t| x |X^s| (maps s-cochains to t-cochains).
UnequalOutput cc_attention_unequal(const Matrix& G, const Tensor& H_s, const Tensor& H_t, const UnequalAttention& p);

struct EncoderConfig {
  Eigen::Index input_dim = 0;  // d0: node count or feature width
  Eigen::Index hidden = 256;
};

struct HmcParams {
  EncoderConfig cfg;
  // first level
  EqualAttention l1_00;
  UnequalAttention l1_01;  // 0 <-> 1
  UnequalAttention l1_12;  // 1 <-> 2
  // second level
  EqualAttention l2_00, l2_11, l2_22;
  UnequalAttention l2_01, l2_12;

  HmcParams() = default;
  HmcParams(nn::ParameterSet& ps, const EncoderConfig& cfg, Rng& rng);
};

struct Intermediate {
  Tensor i0, i1, i2;
};

Intermediate hmc_level1(const CcMatrices& m, const CochainSet& h, const HmcParams& p);
Intermediate hmc_level2(const CcMatrices& m, const Intermediate& in, const HmcParams& p);

struct Encoded {
  Tensor H1, H2;  // n1 x hidden, n2 x hidden
};
Encoded encode_cc(const CombinatorialComplex& cc, const HmcParams& p);

}  // namespace damcc
