#include "damcc/decoder.hpp"

#include <cmath>

namespace damcc {

void DecoderHyperparams::check(std::size_t num_nodes) const {
  if (n_new_cell < 1) throw std::invalid_argument("decoder: n_new_cell must be >= 1");
  if (!(p_min > 0 && p_min < 1)) throw std::invalid_argument("decoder: p_min must lie in (0,1)");
  if (n_max < 1 || n_max > num_nodes)
    throw std::invalid_argument("decoder: need 1 <= n_max <= num_nodes (" + std::to_string(n_max) + ", " +
                                std::to_string(num_nodes) + ")");
  if (max_resample_attempts < 1) throw std::invalid_argument("decoder: max_resample_attempts must be >= 1");
  if (!(temperature > 0)) throw std::invalid_argument("decoder: temperature must be > 0");
}

DecoderParams::DecoderParams(nn::ParameterSet& ps, const std::string& name, const DecoderConfig& c, Rng& rng)
    : cfg(c),
      mlp_cat(ps, name + ".mlp_cat", {2 * c.hidden, c.hidden, c.hidden}, nn::Activation::Tanh, rng),
      mlp_left(ps, name + ".mlp_left", {c.hidden, c.hidden, 1}, nn::Activation::None, rng),
      mlp_right(ps, name + ".mlp_right", {c.hidden, c.hidden, 1}, nn::Activation::None, rng),
      mlp_leaf(ps, name + ".mlp_leaf", {c.hidden, c.hidden, 1}, nn::Activation::None, rng),
      lstm(ps, name + ".lstm", 2, c.hidden, rng),
      tree(ps, name + ".tree", c.hidden, rng),
      summarizer(ps, name + ".summarizer", c.hidden, rng) {}

namespace {

enum class Mode { Sample, Forced, Soft };

struct Traverser {
  const DecoderParams& p;
  const DecoderHyperparams& hp;
  Rng& rng;
  Mode mode;
  DecisionMaker* decide = nullptr;      // Sample and Soft
  const std::vector<char>* target = nullptr;  // Forced

  std::vector<char> row;
  std::size_t ones = 0;
  RowTrace trace;
  std::vector<Tensor> losses;  // Forced
  std::vector<Tensor> soft;    // Soft: per index, undefined if never reached
  nn::State zero;
  Tensor dir_left, dir_right;

  Traverser(const DecoderParams& p_, const DecoderHyperparams& hp_, Rng& rng_, Mode m, std::size_t n)
      : p(p_), hp(hp_), rng(rng_), mode(m), row(n, 0), soft(m == Mode::Soft ? n : 0) {
    const Matrix z = Matrix::Zero(1, p.cfg.hidden);
    zero = {Tensor::constant(z), Tensor::constant(z)};
    Matrix l(1, 2), r(1, 2);
    l << 1, 0;
    r << 0, 1;
    dir_left = Tensor::constant(l);
    dir_right = Tensor::constant(r);
  }

  bool target_has_one(const Interval& iv) const {
    for (std::size_t i = iv.lo; i <= iv.hi; ++i)
      if ((*target)[i - 1]) return true;
    return false;
  }

  // Gate value compared against P_min: sigmoid of the logit, or a relaxed
  // Bernoulli sample of it.
  Tensor gate_value(const Tensor& z) {
    if (hp.traversal == Traversal::Deterministic) return ad::sigmoid(z);
    const double u = rng.uniform_open();
    const double noise = std::log(u) - std::log1p(-u);
    return ad::sigmoid(ad::scale(ad::add_scalar(z, noise), 1.0 / hp.temperature));
  }

  nn::State run(const nn::State& s, const Interval& iv, const Tensor& path) {
    ++trace.visited;
    if (ones == hp.n_max) return s;

    if (iv.leaf()) {
      const Tensor z = p.mlp_leaf(s.h);
      const std::size_t i = iv.lo - 1;
      ++trace.decisions;
      if (mode == Mode::Forced) {
        const char bit = (*target)[i];
        losses.push_back(ad::bce_with_logits(z, Matrix::Constant(1, 1, bit)));
        row[i] = bit;
      } else {
        const Tensor prob = ad::sigmoid(z);
        row[i] = decide->leaf(iv.lo, prob.item()) ? 1 : 0;
        if (mode == Mode::Soft) soft[i] = ad::mul(path, prob);
      }
      ones += row[i] ? 1 : 0;
      return s;
    }

    nn::State left = zero, right = zero;
    for (Side side : {Side::Left, Side::Right}) {
      const Interval child = side == Side::Left ? iv.left() : iv.right();
      const Tensor z = (side == Side::Left ? p.mlp_left : p.mlp_right)(s.h);
      ++trace.decisions;
      bool descend = false;
      Tensor child_path = path;
      if (mode == Mode::Forced) {
        descend = target_has_one(child);
        const Matrix y = Matrix::Constant(1, 1, descend ? 1.0 : 0.0);
        if (hp.traversal == Traversal::Deterministic) losses.push_back(ad::bce_with_logits(z, y));
        else losses.push_back(ad::bce(gate_value(z), y));
      } else {
        const Tensor g = gate_value(z);
        descend = decide->gate(side, iv, g.item());
        if (mode == Mode::Soft) child_path = ad::mul(path, g);
      }
      if (descend) {
        const nn::State fresh = p.lstm(side == Side::Left ? dir_left : dir_right, s);
        (side == Side::Left ? left : right) = run(fresh, child, child_path);
      }
    }
    return p.tree(left, right);
  }
};

Tensor row_input(const Tensor& H_enc, Eigen::Index i, const Tensor& g, const DecoderParams& p) {
  return p.mlp_cat(ad::concat_cols({ad::slice_rows(H_enc, i, 1), g}));
}

bool valid_row(std::size_t n, const DecoderHyperparams& hp) { return n == 0 || n > hp.min_nonzero; }

NodeSet ones_of(const std::vector<char>& row) {
  NodeSet out;
  for (std::size_t i = 0; i < row.size(); ++i)
    if (row[i]) out.push_back(static_cast<NodeIndex>(i));
  return out;
}

}  // namespace

Tensor sinkhorn_distance(const Tensor& cost, double eps, int iters) {
  if (!(eps > 0)) throw std::invalid_argument("sinkhorn_distance: eps must be > 0");
  const Eigen::Index na = cost.rows(), nb = cost.cols();
  if (na == 0 || nb == 0) return Tensor::scalar(0.0);
  const double log_mu = -std::log(static_cast<double>(na));
  const double log_nu = -std::log(static_cast<double>(nb));
  const Tensor log_k = ad::scale(cost, -1.0 / eps);
  const Tensor zero_a = Tensor::constant(Matrix::Zero(na, 1));
  const Tensor zero_b = Tensor::constant(Matrix::Zero(nb, 1));
  Tensor f = zero_a, g = zero_b;
  for (int it = 0; it < iters; ++it) {
    f = ad::add_scalar(ad::scale(ad::row_logsumexp(ad::add(log_k, ad::outer_sum(zero_a, g))), -1.0), log_mu);
    g = ad::add_scalar(
        ad::scale(ad::row_logsumexp(ad::transpose(ad::add(log_k, ad::outer_sum(f, zero_b)))), -1.0), log_nu);
  }
  const Tensor plan = ad::exp(ad::add(log_k, ad::outer_sum(f, g)));
  return ad::scale(ad::sum(ad::mul(plan, cost)), static_cast<double>(na));
}

RowSample sample_row(const Tensor& h_root, std::size_t num_nodes, const DecoderHyperparams& hp,
                     const DecoderParams& p, DecisionMaker& decide, Rng& rng) {
  if (num_nodes == 0) throw std::invalid_argument("sample_row: no 0-cells");
  Traverser t(p, hp, rng, Mode::Sample, num_nodes);
  t.decide = &decide;
  const nn::State root{h_root, t.zero.c};
  const nn::State out = t.run(root, {1, num_nodes}, Tensor());
  return {ones_of(t.row), out.h, t.trace};
}

MatrixSample sample_incidence_matrix(const Tensor& H_enc, std::size_t num_nodes, const DecoderHyperparams& hp,
                                     const DecoderParams& p, Rng& rng) {
  hp.check(num_nodes);
  ad::NoGradGuard no_grad;
  MatrixSample out;
  out.matrix.num_cols = num_nodes;
  SamplingDecisions decide(rng, hp.p_min);
  Tensor g = Tensor::constant(Matrix::Zero(1, p.cfg.hidden));
  nn::AttentionSummarizer::Cache cache;
  for (std::size_t pass = 0; pass < hp.n_new_cell; ++pass) {
    for (Eigen::Index i = 0; i < H_enc.rows(); ++i) {
      const Tensor h_root = row_input(H_enc, i, g, p);
      RowSample s;
      std::size_t attempt = 0;
      for (;;) {
        s = sample_row(h_root, num_nodes, hp, p, decide, rng);
        out.traces.push_back(s.trace);
        if (valid_row(s.row.size(), hp)) break;
        if (++attempt >= hp.max_resample_attempts) {
          s.row.clear();
          break;
        }
        ++out.resampled;
      }
      if (!s.row.empty()) out.matrix.rows.push_back(s.row);
      g = p.summarizer.push(cache, s.g_new);
    }
  }
  return out;
}

CombinatorialComplex predict_next_cc(const CombinatorialComplex& cc, const CcModel& model, Rng& rng) {
  ad::NoGradGuard no_grad;
  const auto enc = encode_cc(cc, model.encoder);
  const std::size_t n = cc.num_nodes();
  auto rows1 = sample_incidence_matrix(enc.H1, n, model.hp1, model.dec1, rng).matrix;
  auto rows2 = sample_incidence_matrix(enc.H2, n, model.hp2, model.dec2, rng).matrix;
  std::vector<NodeSet> kept;
  for (auto& r : rows2.rows) {
    const bool is_edge =
        r.size() == 2 && std::find(rows1.rows.begin(), rows1.rows.end(), r) != rows1.rows.end();
    if (!is_edge) kept.push_back(std::move(r));
  }
  rows2.rows = std::move(kept);
  return from_co_incidence(rows1, rows2, n).with_features(cc.features());
}

Tensor teacher_forced_loss(const Tensor& H_enc, const CoIncidenceMatrix& target, const DecoderHyperparams& hp,
                           const DecoderParams& p, const TeacherForcingOptions& opt, Rng& rng) {
  const std::size_t n = target.num_cols;
  hp.check(n);
  const auto src_rows = static_cast<std::size_t>(H_enc.rows());
  if (src_rows == 0 && opt.mode == LossMode::Bce) return Tensor::scalar(0.0);

  Tensor g = Tensor::constant(Matrix::Zero(1, p.cfg.hidden));
  nn::AttentionSummarizer::Cache cache;
  std::vector<Tensor> terms;
  std::vector<Tensor> soft_rows;
  SamplingDecisions decide(rng, hp.p_min);
  const Tensor one = Tensor::scalar(1.0);
  const Tensor zero = Tensor::scalar(0.0);

  for (std::size_t i = 0; i < src_rows; ++i) {
    const Tensor h_root = row_input(H_enc, static_cast<Eigen::Index>(i), g, p);
    std::vector<char> bits(n, 0);
    if (i < target.rows.size())
      for (auto v : target.rows[i]) bits[v] = 1;
    Traverser t(p, hp, rng, opt.mode == LossMode::Bce ? Mode::Forced : Mode::Soft, n);
    t.target = &bits;
    t.decide = &decide;
    const nn::State out = t.run({h_root, t.zero.c}, {1, n}, one);
    if (opt.mode == LossMode::Bce) {
      terms.insert(terms.end(), t.losses.begin(), t.losses.end());
    } else {
      std::vector<Tensor> entries;
      for (std::size_t k = 0; k < n; ++k) entries.push_back(t.soft[k].defined() ? t.soft[k] : zero);
      soft_rows.push_back(ad::concat_cols(entries));
    }
    g = p.summarizer.push(cache, out.h);
  }

  if (opt.mode == LossMode::Bce) {
    if (terms.empty()) return Tensor::scalar(0.0);
    return ad::sum(ad::concat_rows(terms));
  }

  const std::size_t rows = std::max(src_rows, target.rows.size());
  if (rows == 0) return Tensor::scalar(0.0);
  const Tensor zero_row = Tensor::constant(Matrix::Zero(1, static_cast<Eigen::Index>(n)));
  while (soft_rows.size() < rows) soft_rows.push_back(zero_row);
  CoIncidenceMatrix padded = target;
  padded.num_cols = n;
  padded.rows.resize(rows);
  const Tensor cost = ad::cosine_cost(ad::concat_rows(soft_rows), Tensor::constant(padded.to_dense()));
  return sinkhorn_distance(cost, opt.sinkhorn_eps, opt.sinkhorn_iters);
}

}  // namespace damcc
