#include "damcc/encoder.hpp"

namespace damcc {

namespace {
constexpr double kSlope = 0.01;

Tensor phi(const Tensor& x) { return ad::leaky_relu(x, kSlope); }
Tensor constant(const Matrix& m) { return Tensor::constant(m); }
}  // namespace

CcMatrices cc_matrices(const CombinatorialComplex& cc) {
  return {adjacency(cc, 0, 1).to_dense(), incidence(cc, 0, 1).to_dense(), incidence(cc, 1, 2).to_dense(),
          adjacency(cc, 1, 1).to_dense(), coadjacency(cc, 2).to_dense()};
}

CochainSet init_cochains(const CombinatorialComplex& cc) {
  const auto n0 = static_cast<Eigen::Index>(cc.num_nodes());
  CochainSet h;
  h.H0 = cc.features() ? *cc.features() : Matrix::Identity(n0, n0);
  h.H1 = Matrix::Ones(static_cast<Eigen::Index>(cc.num_cells(1)), 1);
  h.H2 = Matrix::Ones(static_cast<Eigen::Index>(cc.num_cells(2)), 1);
  return h;
}

EqualAttention::EqualAttention(nn::ParameterSet& ps, const std::string& name, Eigen::Index in, Eigen::Index out,
                               Rng& rng)
    : W(ps.add(name + ".W", in, out, rng)), a(ps.add(name + ".a", 2 * out, 1, rng)) {}

UnequalAttention::UnequalAttention(nn::ParameterSet& ps, const std::string& name, Eigen::Index s_in,
                                   Eigen::Index t_in, Eigen::Index out, Rng& rng)
    : Ws(ps.add(name + ".Ws", s_in, out, rng)),
      Wt(ps.add(name + ".Wt", t_in, out, rng)),
      a(ps.add(name + ".a", 2 * out, 1, rng)) {}

Tensor cc_attention_equal(const Matrix& G, const Tensor& H, const EqualAttention& p) {
  const Eigen::Index out = p.W.cols();
  const Tensor HW = ad::matmul(H, p.W);
  const Tensor src = ad::matmul(HW, ad::slice_rows(p.a, 0, out));
  const Tensor dst = ad::matmul(HW, ad::slice_rows(p.a, out, out));
  const Tensor e = ad::leaky_relu(ad::outer_sum(src, dst), kSlope);
  const Tensor att = ad::masked_row_softmax(e, G);
  return ad::matmul(ad::mul(constant(G), att), HW);
}

UnequalOutput cc_attention_unequal(const Matrix& G, const Tensor& H_s, const Tensor& H_t, const UnequalAttention& p) {
  const Eigen::Index t_out = p.Ws.cols();
  const Eigen::Index s_out = p.Wt.cols();
  const Tensor s_msg = ad::matmul(H_s, p.Ws);  // n_s x t_out
  const Tensor t_msg = ad::matmul(H_t, p.Wt);  // n_t x s_out
  const Tensor a_head = ad::slice_rows(p.a, 0, t_out);
  const Tensor a_tail = ad::slice_rows(p.a, t_out, s_out);
  // e_ij = phi(a^T [s_msg_j | t_msg_i]) for target i, source j.
  UnequalOutput o;
  o.e = ad::leaky_relu(ad::outer_sum(ad::matmul(t_msg, a_tail), ad::matmul(s_msg, a_head)), kSlope);
  // f_ji = phi(rev(a)^T [t_msg_i | s_msg_j]), rev(a) = [a[t_out:] | a[:t_out]].
  const Tensor rev = ad::concat_rows({a_tail, a_head});
  o.f = ad::leaky_relu(ad::outer_sum(ad::matmul(s_msg, ad::slice_rows(rev, s_out, t_out)),
                                     ad::matmul(t_msg, ad::slice_rows(rev, 0, s_out))),
                       kSlope);
  const Matrix Gt = G.transpose();
  const Tensor att_st = ad::masked_row_softmax(o.e, G);
  const Tensor att_ts = ad::masked_row_softmax(o.f, Gt);
  o.K_t = ad::matmul(ad::mul(constant(G), att_st), s_msg);
  o.K_s = ad::matmul(ad::mul(constant(Gt), att_ts), t_msg);
  return o;
}

HmcParams::HmcParams(nn::ParameterSet& ps, const EncoderConfig& c, Rng& rng) : cfg(c) {
  const auto d = c.hidden;
  l1_00 = EqualAttention(ps, "enc.l1.00", c.input_dim, d, rng);
  l1_01 = UnequalAttention(ps, "enc.l1.01", c.input_dim, 1, d, rng);
  l1_12 = UnequalAttention(ps, "enc.l1.12", 1, 1, d, rng);
  l2_00 = EqualAttention(ps, "enc.l2.00", d, d, rng);
  l2_11 = EqualAttention(ps, "enc.l2.11", d, d, rng);
  l2_22 = EqualAttention(ps, "enc.l2.22", d, d, rng);
  l2_01 = UnequalAttention(ps, "enc.l2.01", d, d, d, rng);
  l2_12 = UnequalAttention(ps, "enc.l2.12", d, d, d, rng);
}

Intermediate hmc_level1(const CcMatrices& m, const CochainSet& h, const HmcParams& p) {
  const Tensor H0 = constant(h.H0), H1 = constant(h.H1), H2 = constant(h.H2);
  const Tensor m00 = phi(cc_attention_equal(m.A01, H0, p.l1_00));
  const auto b01 = cc_attention_unequal(m.B01.transpose(), H0, H1, p.l1_01);
  const auto b12 = cc_attention_unequal(m.B12.transpose(), H1, H2, p.l1_12);
  const Tensor m01 = phi(b01.K_t), m10 = phi(b01.K_s);
  const Tensor m12 = phi(b12.K_t), m21 = phi(b12.K_s);
  return {phi(ad::add(m00, m10)), phi(ad::add(m01, m21)), phi(m12)};
}

Intermediate hmc_level2(const CcMatrices& m, const Intermediate& in, const HmcParams& p) {
  const Tensor m00 = phi(cc_attention_equal(m.A01, in.i0, p.l2_00));
  const Tensor m11 = phi(cc_attention_equal(m.A12, in.i1, p.l2_11));
  const Tensor m22 = phi(cc_attention_equal(m.coA2, in.i2, p.l2_22));
  const auto b01 = cc_attention_unequal(m.B01.transpose(), in.i0, in.i1, p.l2_01);
  const auto b12 = cc_attention_unequal(m.B12.transpose(), in.i1, in.i2, p.l2_12);
  const Tensor m01 = phi(b01.K_t), m10 = phi(b01.K_s), m12 = phi(b12.K_t);
  return {phi(ad::add(m00, m10)), phi(ad::add(m11, m01)), phi(ad::add(m12, m22))};
}

Encoded encode_cc(const CombinatorialComplex& cc, const HmcParams& p) {
  const auto h = init_cochains(cc);
  if (h.H0.cols() != p.cfg.input_dim)
    throw std::invalid_argument("encode_cc: node input width " + std::to_string(h.H0.cols()) +
                                " does not match the encoder's " + std::to_string(p.cfg.input_dim));
  const auto m = cc_matrices(cc);
  const auto out = hmc_level2(m, hmc_level1(m, h, p), p);
  return {out.i1, out.i2};
}

}  // namespace damcc
