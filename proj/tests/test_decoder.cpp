#include "damcc/decoder.hpp"
#include "damcc/lifting.hpp"
#include "walk_script.hpp"

#include <doctest.h>

#include <cmath>

using namespace damcc;

namespace {

struct Fixture {
  nn::ParameterSet ps;
  Rng init{11};
  DecoderParams dec{ps, "dec", {8}, init};
  Tensor root(std::uint64_t seed) {
    Rng r(seed);
    Matrix h(1, 8);
    for (auto& x : h.reshaped()) x = 2 * r.uniform() - 1;
    return Tensor::constant(h);
  }
};

class Always : public DecisionMaker {
public:
  Always(bool g, bool l) : g_(g), l_(l) {}
  bool gate(Side, const Interval&, double) override { return g_; }
  bool leaf(std::size_t, double) override { return l_; }

private:
  bool g_, l_;
};

}  // namespace

TEST_CASE("interval children partition the parent") {
  for (std::size_t lo = 1; lo < 12; ++lo)
    for (std::size_t hi = lo + 1; hi < 14; ++hi) {
      const Interval iv{lo, hi};
      CHECK(iv.left().lo == lo);
      CHECK(iv.right().hi == hi);
      CHECK(iv.left().hi + 1 == iv.right().lo);
      CHECK(iv.left().hi >= iv.left().lo);
      CHECK(iv.right().hi >= iv.right().lo);
    }
}

TEST_CASE("forced eight-leaf walk reproduces the reference row") {
  Fixture fx;
  DecoderHyperparams hp;
  hp.n_max = 8;
  testutil::ScriptedDecisions script(testutil::eight_leaf_script());
  Rng rng(0);
  const auto s = sample_row(fx.root(1), 8, hp, fx.dec, script, rng);
  CHECK(s.row == NodeSet{2, 4, 7});
  CHECK(script.log == testutil::eight_leaf_log());
  CHECK(script.remaining() == 0);
  CHECK(s.trace.decisions == 18);
  CHECK(s.g_new.cols() == 8);
}

TEST_CASE("closed leaves give a zero row; n_max truncates from the left") {
  Fixture fx;
  Rng rng(0);
  DecoderHyperparams hp;
  hp.n_max = 8;
  Always closed(true, false);
  CHECK(sample_row(fx.root(2), 8, hp, fx.dec, closed, rng).row.empty());
  for (std::size_t cap = 1; cap <= 5; ++cap) {
    hp.n_max = cap;
    Always open(true, true);
    const auto s = sample_row(fx.root(2), 7, hp, fx.dec, open, rng);
    NodeSet want;
    for (std::size_t i = 0; i < cap; ++i) want.push_back(static_cast<NodeIndex>(i));
    CHECK(s.row == want);
  }
}

TEST_CASE("free samples respect the caps and never return singletons") {
  Fixture fx;
  Rng rng(5);
  for (auto traversal : {Traversal::Deterministic, Traversal::Stochastic}) {
    DecoderHyperparams hp;
    hp.traversal = traversal;
    hp.n_max = 3;
    hp.p_min = 0.45;
    Matrix H(6, 8);
    for (auto& x : H.reshaped()) x = 2 * rng.uniform() - 1;
    for (int trial = 0; trial < 30; ++trial) {
      const auto m = sample_incidence_matrix(Tensor::constant(H), 8, hp, fx.dec, rng);
      for (const auto& r : m.matrix.rows) {
        CHECK(r.size() >= 2);
        CHECK(r.size() <= 3);
      }
      for (const auto& t : m.traces) CHECK(t.visited <= 2 * 8 - 1);
    }
  }
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  Fixture fx;
  DecoderHyperparams hp;
  hp.n_max = 4;
  hp.traversal = Traversal::Stochastic;
  Matrix H = Matrix::Random(5, 8);
  Rng a(9), b(9);
  CHECK(sample_incidence_matrix(Tensor::constant(H), 8, hp, fx.dec, a).matrix ==
        sample_incidence_matrix(Tensor::constant(H), 8, hp, fx.dec, b).matrix);
}

TEST_CASE("hyperparameter validation") {
  DecoderHyperparams hp;
  hp.n_max = 5;
  CHECK_THROWS(hp.check(4));
  hp.n_max = 2;
  hp.p_min = 1.0;
  CHECK_THROWS(hp.check(4));
  hp.p_min = 0.5;
  CHECK_NOTHROW(hp.check(4));
}

TEST_CASE("sinkhorn_distance on the tape matches the matrix routine") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix c(4, 5);
    for (auto& x : c.reshaped()) x = rng.uniform();
    const double want = sinkhorn(c, 0.1, 50, SinkhornMode::Plain).distance;
    CHECK(sinkhorn_distance(Tensor::constant(c), 0.1, 50).item() == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("teacher-forced BCE loss: positive, zero for empty source, lower after fitting") {
  nn::ParameterSet ps;
  Rng init(2);
  const DecoderParams dec(ps, "dec", {8}, init);
  const Tensor H = ps.add("H", 3, 8, init);
  const CoIncidenceMatrix tgt{{{0, 3}, {1, 2}, {4, 5}}, 6};
  DecoderHyperparams hp;
  hp.n_max = 2;
  Rng rng(0);
  const TeacherForcingOptions opt{};
  const double before = teacher_forced_loss(H, tgt, hp, dec, opt, rng).item();
  CHECK(before > 0);
  CHECK(teacher_forced_loss(Tensor::constant(Matrix(0, 8)), tgt, hp, dec, opt, rng).item() == 0);
  nn::AdamConfig ac;
  ac.lr = 0.01;
  nn::Adam adam(ps, ac);
  for (int step = 0; step < 60; ++step) {
    ps.zero_grad();
    ad::backward(teacher_forced_loss(H, tgt, hp, dec, opt, rng));
    adam.step();
  }
  CHECK(teacher_forced_loss(H, tgt, hp, dec, opt, rng).item() < 0.5 * before);
}

TEST_CASE("predict_next_cc yields a valid complex") {
  const auto cc = clique_lift(Graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}}));
  nn::ParameterSet ps;
  Rng init(3);
  CcModel model{HmcParams(ps, {6, 8}, init), DecoderParams(ps, "d1", {8}, init), DecoderParams(ps, "d2", {8}, init),
                {}, {}};
  model.hp1.n_max = 2;
  model.hp2.n_max = 6;
  model.hp1.p_min = model.hp2.p_min = 0.3;
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto next = predict_next_cc(cc, model, rng);
    CHECK(validate(next).empty());
    CHECK(next.num_nodes() == 6);
  }
}
