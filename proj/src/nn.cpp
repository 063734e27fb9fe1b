#include "damcc/nn.hpp"

#include "damcc/series_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace damcc::nn {

Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = (2.0 * rng.uniform() - 1.0) * a;
  return m;
}

Tensor ParameterSet::add(const std::string& name, Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  auto t = Tensor::parameter(glorot_uniform(rows, cols, rng));
  entries_.emplace_back(name, t);
  return t;
}

Tensor ParameterSet::add_zeros(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  auto t = Tensor::parameter(Matrix::Zero(rows, cols));
  entries_.emplace_back(name, t);
  return t;
}

std::vector<Tensor> ParameterSet::tensors() const {
  std::vector<Tensor> out;
  for (const auto& [_, t] : entries_) out.push_back(t);
  return out;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : entries_) n += static_cast<std::size_t>(t.value().size());
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& [_, t] : entries_) t.zero_grad();
}

void ParameterSet::assign(const ParameterSet& other) {
  if (other.entries_.size() != entries_.size()) throw std::invalid_argument("ParameterSet::assign: size mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& dst = entries_[i].second;
    const auto& src = other.entries_[i].second;
    if (entries_[i].first != other.entries_[i].first || dst.rows() != src.rows() || dst.cols() != src.cols())
      throw std::invalid_argument("ParameterSet::assign: mismatch at " + entries_[i].first);
    dst.mutable_value() = src.value();
  }
}

std::vector<Matrix> ParameterSet::snapshot() const {
  std::vector<Matrix> out;
  for (const auto& [_, t] : entries_) out.push_back(t.value());
  return out;
}

void ParameterSet::restore(const std::vector<Matrix>& values) {
  if (values.size() != entries_.size()) throw std::invalid_argument("ParameterSet::restore: size mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i].second.mutable_value() = values[i];
}

Tensor activate(const Tensor& x, Activation act) {
  switch (act) {
    case Activation::None: return x;
    case Activation::LeakyRelu: return ad::leaky_relu(x, 0.01);
    case Activation::Tanh: return ad::tanh(x);
    case Activation::Sigmoid: return ad::sigmoid(x);
  }
  return x;
}

Linear::Linear(ParameterSet& ps, const std::string& name, Eigen::Index in, Eigen::Index out, Rng& rng)
    : W(ps.add(name + ".W", in, out, rng)), b(ps.add_zeros(name + ".b", 1, out)) {}

Tensor Linear::operator()(const Tensor& x) const { return ad::add(ad::matmul(x, W), b); }

Mlp::Mlp(ParameterSet& ps, const std::string& name, const std::vector<Eigen::Index>& sizes, Activation act,
         Rng& rng)
    : out_act(act) {
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
    layers.emplace_back(ps, name + "." + std::to_string(i), sizes[i], sizes[i + 1], rng);
}

Tensor Mlp::operator()(const Tensor& x) const {
  Tensor y = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    y = layers[i](y);
    y = activate(y, i + 1 < layers.size() ? Activation::LeakyRelu : out_act);
  }
  return y;
}

LstmCell::LstmCell(ParameterSet& ps, const std::string& name, Eigen::Index input, Eigen::Index hid, Rng& rng)
    : gates(ps, name + ".gates", input + hid, 4 * hid, rng), hidden(hid) {}

State LstmCell::operator()(const Tensor& x, const State& s) const {
  const Tensor z = gates(ad::concat_cols({x, s.h}));
  const Tensor i = ad::sigmoid(ad::slice_cols(z, 0, hidden));
  const Tensor f = ad::sigmoid(ad::slice_cols(z, hidden, hidden));
  const Tensor g = ad::tanh(ad::slice_cols(z, 2 * hidden, hidden));
  const Tensor o = ad::sigmoid(ad::slice_cols(z, 3 * hidden, hidden));
  const Tensor c = ad::add(ad::mul(f, s.c), ad::mul(i, g));
  return {ad::mul(o, ad::tanh(c)), c};
}

TreeLstmCell::TreeLstmCell(ParameterSet& ps, const std::string& name, Eigen::Index hid, Rng& rng)
    : gates(ps, name + ".gates", 2 * hid, 5 * hid, rng), hidden(hid) {}

State TreeLstmCell::operator()(const State& l, const State& r) const {
  const Tensor z = gates(ad::concat_cols({l.h, r.h}));
  const Tensor i = ad::sigmoid(ad::slice_cols(z, 0, hidden));
  const Tensor fl = ad::sigmoid(ad::slice_cols(z, hidden, hidden));
  const Tensor fr = ad::sigmoid(ad::slice_cols(z, 2 * hidden, hidden));
  const Tensor o = ad::sigmoid(ad::slice_cols(z, 3 * hidden, hidden));
  const Tensor u = ad::tanh(ad::slice_cols(z, 4 * hidden, hidden));
  const Tensor c = ad::add(ad::add(ad::mul(i, u), ad::mul(fl, l.c)), ad::mul(fr, r.c));
  return {ad::mul(o, ad::tanh(c)), c};
}

Matrix positional_encoding(std::size_t pos, Eigen::Index dim) {
  Matrix pe(1, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double rate = std::pow(10000.0, -static_cast<double>(2 * (k / 2)) / static_cast<double>(dim));
    const double angle = static_cast<double>(pos) * rate;
    pe(0, k) = (k % 2 == 0) ? std::sin(angle) : std::cos(angle);
  }
  return pe;
}

AttentionSummarizer::AttentionSummarizer(ParameterSet& ps, const std::string& name, Eigen::Index d, Rng& rng)
    : q(ps, name + ".q", d, d, rng),
      k(ps, name + ".k", d, d, rng),
      v(ps, name + ".v", d, d, rng),
      o(ps, name + ".o", d, d, rng),
      dim(d) {}

Tensor AttentionSummarizer::push(Cache& cache, const Tensor& x) const {
  const Tensor xp = ad::add(x, Tensor::constant(positional_encoding(cache.keys.size(), dim)));
  cache.keys.push_back(k(xp));
  cache.values.push_back(v(xp));
  const Tensor query = q(xp);
  const Tensor K = ad::concat_rows(cache.keys);
  const Tensor V = ad::concat_rows(cache.values);
  const Tensor scores = ad::scale(ad::matmul(query, ad::transpose(K)), 1.0 / std::sqrt(static_cast<double>(dim)));
  const Tensor att = ad::row_softmax(scores);
  return ad::tanh(o(ad::matmul(att, V)));
}

Tensor AttentionSummarizer::summarize(const std::vector<Tensor>& history) const {
  if (history.empty()) throw std::invalid_argument("AttentionSummarizer: empty history");
  Cache cache;
  Tensor out;
  for (const auto& x : history) out = push(cache, x);
  return out;
}

Adam::Adam(const ParameterSet& params, AdamConfig cfg) : params_(params.tensors()), cfg_(cfg) {
  for (const auto& p : params_) {
    m_.push_back(Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    if (p.grad().size() == 0) continue;
    const Matrix& g = p.grad();
    // One fused pass over the parameter.
    const double b1 = cfg_.beta1, b2 = cfg_.beta2, lr = cfg_.lr / bc1, eps = cfg_.eps, inv_bc2 = 1.0 / bc2;
    double* m = m_[i].data();
    double* v = v_[i].data();
    double* w = p.mutable_value().data();
    const double* gd = g.data();
    const Eigen::Index n = g.size();
    for (Eigen::Index k = 0; k < n; ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * gd[k];
      v[k] = b2 * v[k] + (1.0 - b2) * gd[k] * gd[k];
      w[k] -= lr * m[k] / (std::sqrt(v[k] * inv_bc2) + eps);
    }
  }
}

namespace {
std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  auto p = stem;
  p += ext;
  return p;
}
}  // namespace

void save_checkpoint(const std::filesystem::path& stem, const ParameterSet& params, const nlohmann::json& meta) {
  nlohmann::json tensors = nlohmann::json::array();
  std::vector<float> blob;
  for (const auto& [name, t] : params.entries()) {
    tensors.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}});
    for (Eigen::Index i = 0; i < t.value().size(); ++i) blob.push_back(static_cast<float>(t.value()(i)));
  }
  const auto bin = with_ext(stem, ".bin");
  nlohmann::json manifest = {{"format", "damcc-checkpoint"},
                             {"version", kCheckpointVersion},
                             {"dtype", "float32-le"},
                             {"blob", bin.filename().string()},
                             {"tensors", tensors},
                             {"meta", meta}};
  io::write_json(with_ext(stem, ".json"), manifest);
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + bin.string());
  for (float f : blob) {
    auto bits = std::bit_cast<std::uint32_t>(f);
    unsigned char bytes[4] = {static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
                              static_cast<unsigned char>(bits >> 16), static_cast<unsigned char>(bits >> 24)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
  }
}

nlohmann::json load_checkpoint_meta(const std::filesystem::path& stem) {
  const auto manifest = io::read_json(with_ext(stem, ".json"));
  if (manifest.value("format", "") != "damcc-checkpoint")
    throw io::FormatError("/format", "not a checkpoint manifest");
  if (manifest.value("version", 0) != kCheckpointVersion)
    throw io::FormatError("/version", "unsupported checkpoint version");
  return manifest.at("meta");
}

void load_checkpoint_values(const std::filesystem::path& stem, ParameterSet& params) {
  const auto manifest = io::read_json(with_ext(stem, ".json"));
  const auto& tensors = manifest.at("tensors");
  if (tensors.size() != params.entries().size())
    throw io::FormatError("/tensors", "checkpoint holds " + std::to_string(tensors.size()) + " tensors, model has " +
                                          std::to_string(params.entries().size()));
  std::ifstream in(with_ext(stem, ".bin"), std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + with_ext(stem, ".bin").string());
  std::vector<Matrix> values;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& [name, t] = params.entries()[i];
    if (tensors[i].at("name") != name || tensors[i].at("rows") != t.rows() || tensors[i].at("cols") != t.cols())
      throw io::FormatError("/tensors/" + std::to_string(i), "does not match model parameter " + name);
    Matrix m(t.rows(), t.cols());
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      unsigned char b[4];
      if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("checkpoint blob truncated");
      const std::uint32_t bits = std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 |
                                 std::uint32_t(b[3]) << 24;
      m(k) = static_cast<double>(std::bit_cast<float>(bits));
    }
    values.push_back(std::move(m));
  }
  params.restore(values);
}

}  // namespace damcc::nn
