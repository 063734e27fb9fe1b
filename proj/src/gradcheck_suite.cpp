#include "damcc/gradcheck_suite.hpp"

#include "damcc/decoder.hpp"
#include "damcc/encoder.hpp"
#include "damcc/lifting.hpp"

namespace damcc {

namespace {

using ad::Tensor;

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c, double lo = -1, double hi = 1) {
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = lo + (hi - lo) * rng.uniform();
  return m;
}

// Away from the kinks of leaky_relu.
Matrix off_zero(Rng& rng, Eigen::Index r, Eigen::Index c) {
  Matrix m = random_matrix(rng, r, c);
  for (auto& x : m.reshaped()) x += x < 0 ? -0.1 : 0.1;
  return m;
}

}  // namespace

std::vector<GradCheckProblem> gradcheck_problems(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradCheckProblem> out;
  auto check = [&](const std::string& name, const std::vector<Tensor>& params, std::function<Tensor()> f) {
    out.push_back({name, params, std::move(f)});
  };
  // Weighted sum so every output entry carries a distinct gradient.
  auto probe = [&](Eigen::Index r, Eigen::Index c) {
    const Tensor w = Tensor::constant(random_matrix(rng, r, c));
    return [w](const Tensor& y) { return ad::sum(ad::mul(y, w)); };
  };

  const Tensor a = Tensor::parameter(random_matrix(rng, 3, 4));
  const Tensor b = Tensor::parameter(random_matrix(rng, 4, 2));
  const Tensor c = Tensor::parameter(random_matrix(rng, 3, 4));
  const Tensor row = Tensor::parameter(random_matrix(rng, 1, 4));
  const Tensor p = Tensor::parameter(random_matrix(rng, 3, 1));
  const Tensor q = Tensor::parameter(random_matrix(rng, 5, 1));
  const Tensor k = Tensor::parameter(off_zero(rng, 3, 4));
  const Tensor prob = Tensor::parameter(random_matrix(rng, 3, 4, 0.05, 0.95));
  const Matrix target = (random_matrix(rng, 3, 4, 0, 1).array() > 0.5).cast<double>();
  Matrix mask = (random_matrix(rng, 3, 4, 0, 1).array() > 0.4).cast<double>();
  mask.row(2).setZero();
  mask(0, 0) = 1;

  auto w34 = probe(3, 4);
  auto w32 = probe(3, 2);
  auto w43 = probe(4, 3);
  auto w38 = probe(3, 8);
  auto w64 = probe(6, 4);
  auto w32b = probe(3, 2);
  auto w23 = probe(2, 3);
  auto w35 = probe(3, 5);
  auto w33 = probe(3, 3);

  check("matmul", {a, b}, [=] { return w32(ad::matmul(a, b)); });
  check("add", {a, c}, [=] { return w34(ad::add(a, c)); });
  check("add_row_broadcast", {a, row}, [=] { return w34(ad::add(a, row)); });
  check("sub", {a, c}, [=] { return w34(ad::sub(a, c)); });
  check("mul", {a, c}, [=] { return w34(ad::mul(a, c)); });
  check("scale", {a}, [=] { return w34(ad::scale(a, -2.5)); });
  check("add_scalar", {a}, [=] { return w34(ad::mul(ad::add_scalar(a, 0.7), a)); });
  check("transpose", {a}, [=] { return w43(ad::transpose(a)); });
  check("concat_cols", {a, c}, [=] { return w38(ad::concat_cols({a, c})); });
  check("concat_rows", {a, c}, [=] { return w64(ad::concat_rows({a, c})); });
  check("slice_cols", {a}, [=] { return w32b(ad::slice_cols(a, 1, 2)); });
  check("slice_rows", {a}, [=] { return w23(ad::slice_rows(ad::transpose(a), 1, 2)); });
  check("outer_sum", {p, q}, [=] { return w35(ad::outer_sum(p, q)); });
  check("leaky_relu", {k}, [=] { return w34(ad::leaky_relu(k, 0.2)); });
  check("sigmoid", {a}, [=] { return w34(ad::sigmoid(a)); });
  check("tanh", {a}, [=] { return w34(ad::tanh(a)); });
  check("masked_row_softmax", {a}, [=] { return w34(ad::masked_row_softmax(a, mask)); });
  check("row_softmax", {a}, [=] { return w34(ad::row_softmax(a)); });
  check("exp", {a}, [=] { return w34(ad::exp(a)); });
  check("row_logsumexp", {a}, [=] { return ad::sum(ad::mul(ad::row_logsumexp(ad::scale(a, 4.0)), p)); });
  check("sinkhorn_distance", {q}, [=] {
    return sinkhorn_distance(ad::add(ad::matmul(q, ad::transpose(q)), ad::tanh(ad::outer_sum(q, q))), 0.1, 50);
  });
  check("sum", {a}, [=] { return ad::sum(ad::mul(a, a)); });
  check("mean", {a}, [=] { return ad::mean(ad::mul(a, a)); });
  check("bce", {prob}, [=] { return ad::bce(prob, target); });
  check("bce_with_logits", {a}, [=] { return ad::bce_with_logits(ad::scale(a, 3.0), target); });
  check("cosine_cost", {a, c}, [=] { return w33(ad::cosine_cost(a, c)); });

  // Encoder: two triangles sharing node 2.
  const auto cc = clique_lift(Graph(5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}}));
  {
    nn::ParameterSet ps;
    Rng init(derive_seed(seed, "encoder"));
    const HmcParams enc(ps, {5, 3}, init);
    const Tensor w1 = Tensor::constant(random_matrix(rng, static_cast<Eigen::Index>(cc.num_cells(1)), 3));
    const Tensor w2 = Tensor::constant(random_matrix(rng, static_cast<Eigen::Index>(cc.num_cells(2)), 3));
    check("encoder", ps.tensors(), [cc, enc, w1, w2] {
      const auto e = encode_cc(cc, enc);
      return ad::add(ad::sum(ad::mul(e.H1, w1)), ad::sum(ad::mul(e.H2, w2)));
    });
  }

  // Decoder: 4 nodes, two source rows encoded from a fixed parameter.
  {
    nn::ParameterSet ps;
    Rng init(derive_seed(seed, "decoder"));
    const DecoderParams dec(ps, "dec", {4}, init);
    const Tensor H = ps.add("H", 3, 4, init);
    const CoIncidenceMatrix tgt{{{0, 2}, {1, 3}}, 4};
    for (auto traversal : {Traversal::Deterministic, Traversal::Stochastic})
      for (auto mode : {LossMode::Bce, LossMode::SinkhornCosine}) {
        DecoderHyperparams hp;
        hp.n_max = 4;
        hp.traversal = traversal;
        hp.p_min = 0.3;
        const TeacherForcingOptions opt{mode, 0.1, 50};
        const std::string name = std::string("decoder_") + (mode == LossMode::Bce ? "bce" : "sc") + "_" +
                                 (traversal == Traversal::Deterministic ? "det" : "stoch");
        check(name, ps.tensors(), [seed, H, tgt, hp, dec, opt] {
          Rng r(derive_seed(seed, "decoder-noise"));
          return teacher_forced_loss(H, tgt, hp, dec, opt, r);
        });
      }
  }
  return out;
}

std::vector<GradCheckCase> run_gradcheck_suite(std::uint64_t seed) {
  std::vector<GradCheckCase> out;
  for (const auto& p : gradcheck_problems(seed)) out.push_back({p.name, ad::grad_check(p.f, p.params)});
  return out;
}

}  // namespace damcc
