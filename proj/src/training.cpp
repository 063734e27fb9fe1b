#include "damcc/training.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace damcc {

using nlohmann::json;

ModelConfig ModelConfig::defaults(std::size_t num_nodes, std::size_t feature_dim) {
  ModelConfig c;
  c.input_dim = static_cast<Eigen::Index>(feature_dim ? feature_dim : num_nodes);
  c.hp1.n_max = std::min<std::size_t>(2, num_nodes);
  c.hp2.n_max = std::min<std::size_t>(15, num_nodes);
  return c;
}

json to_json(const DecoderHyperparams& hp) {
  return {{"n_new_cell", hp.n_new_cell},
          {"p_min", hp.p_min},
          {"n_max", hp.n_max},
          {"min_nonzero", hp.min_nonzero},
          {"max_resample_attempts", hp.max_resample_attempts},
          {"traversal", hp.traversal == Traversal::Deterministic ? "deterministic" : "stochastic"},
          {"temperature", hp.temperature}};
}

DecoderHyperparams decoder_hyperparams_from_json(const json& j) {
  DecoderHyperparams hp;
  hp.n_new_cell = j.at("n_new_cell").get<std::size_t>();
  hp.p_min = j.at("p_min").get<double>();
  hp.n_max = j.at("n_max").get<std::size_t>();
  hp.min_nonzero = j.at("min_nonzero").get<std::size_t>();
  hp.max_resample_attempts = j.at("max_resample_attempts").get<std::size_t>();
  hp.traversal = j.at("traversal") == "stochastic" ? Traversal::Stochastic : Traversal::Deterministic;
  hp.temperature = j.at("temperature").get<double>();
  return hp;
}

json to_json(const ModelConfig& c) {
  return {{"input_dim", c.input_dim}, {"hidden", c.hidden}, {"rank1", to_json(c.hp1)}, {"rank2", to_json(c.hp2)}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  c.input_dim = j.at("input_dim").get<Eigen::Index>();
  c.hidden = j.at("hidden").get<Eigen::Index>();
  c.hp1 = decoder_hyperparams_from_json(j.at("rank1"));
  c.hp2 = decoder_hyperparams_from_json(j.at("rank2"));
  return c;
}

Model::Model(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg), seed_(seed) {
  Rng init(derive_seed(seed, "init"));
  net_.encoder = HmcParams(params_, {cfg.input_dim, cfg.hidden}, init);
  net_.dec1 = DecoderParams(params_, "dec1", {cfg.hidden}, init);
  net_.dec2 = DecoderParams(params_, "dec2", {cfg.hidden}, init);
  net_.hp1 = cfg.hp1;
  net_.hp2 = cfg.hp2;
}

void Model::save(const std::filesystem::path& stem, const json& extra_meta) const {
  json meta = {{"model", to_json(cfg_)}, {"seed", seed_}};
  if (!extra_meta.is_null()) meta["extra"] = extra_meta;
  nn::save_checkpoint(stem, params_, meta);
}

std::unique_ptr<Model> Model::load(const std::filesystem::path& stem) {
  const auto meta = nn::load_checkpoint_meta(stem);
  auto m = std::make_unique<Model>(model_config_from_json(meta.at("model")), meta.at("seed").get<std::uint64_t>());
  nn::load_checkpoint_values(stem, m->params_);
  return m;
}

void TrainConfig::check() const {
  if (!(decay_factor > 0 && decay_factor < 1)) throw std::invalid_argument("train: decay factor must lie in (0,1)");
  if (patience_stop > 0 && patience_decay >= patience_stop)
    throw std::invalid_argument("train: patience_decay must be smaller than patience_stop");
  if (!(lr > 0)) throw std::invalid_argument("train: lr must be > 0");
  if (max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
}

TrainConfig TrainConfig::for_ablation(AblationModel m) {
  TrainConfig c;
  c.train_rank2 = false;
  c.loss = (m == AblationModel::Model1 || m == AblationModel::Model2) ? LossMode::Bce : LossMode::SinkhornCosine;
  c.traversal = (m == AblationModel::Model1 || m == AblationModel::Model3) ? Traversal::Deterministic
                                                                           : Traversal::Stochastic;
  return c;
}

json to_json(const TrainConfig& c) {
  return {{"loss", c.loss == LossMode::Bce ? "bce" : "sinkhorn-cosine"},
          {"traversal", c.traversal == Traversal::Deterministic ? "deterministic" : "stochastic"},
          {"lr", c.lr},
          {"decay_factor", c.decay_factor},
          {"patience_decay", c.patience_decay},
          {"patience_stop", c.patience_stop},
          {"max_epochs", c.max_epochs},
          {"seed", c.seed},
          {"train_rank2", c.train_rank2},
          {"hidden", c.hidden},
          {"p_min", c.p_min},
          {"temperature", c.temperature},
          {"sinkhorn_eps", c.sinkhorn_eps},
          {"sinkhorn_iters", c.sinkhorn_iters}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  if (!j.is_object()) throw std::invalid_argument("train config: expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    const auto& v = it.value();
    if (k == "loss") {
      if (v == "bce") c.loss = LossMode::Bce;
      else if (v == "sinkhorn-cosine") c.loss = LossMode::SinkhornCosine;
      else throw std::invalid_argument("train config: loss must be bce or sinkhorn-cosine");
    } else if (k == "traversal") {
      if (v == "deterministic") c.traversal = Traversal::Deterministic;
      else if (v == "stochastic") c.traversal = Traversal::Stochastic;
      else throw std::invalid_argument("train config: traversal must be deterministic or stochastic");
    } else if (k == "lr") c.lr = v.get<double>();
    else if (k == "decay_factor") c.decay_factor = v.get<double>();
    else if (k == "patience_decay") c.patience_decay = v.get<std::size_t>();
    else if (k == "patience_stop") c.patience_stop = v.get<std::size_t>();
    else if (k == "max_epochs") c.max_epochs = v.get<std::size_t>();
    else if (k == "seed") c.seed = v.get<std::uint64_t>();
    else if (k == "train_rank2") c.train_rank2 = v.get<bool>();
    else if (k == "hidden") c.hidden = v.get<Eigen::Index>();
    else if (k == "p_min") c.p_min = v.get<double>();
    else if (k == "temperature") c.temperature = v.get<double>();
    else if (k == "sinkhorn_eps") c.sinkhorn_eps = v.get<double>();
    else if (k == "sinkhorn_iters") c.sinkhorn_iters = v.get<int>();
    else throw std::invalid_argument("train config: unknown key '" + k + "'");
  }
  c.check();
  return c;
}

namespace {

TeacherForcingOptions tf_options(const TrainConfig& cfg) {
  return {cfg.loss, cfg.sinkhorn_eps, cfg.sinkhorn_iters};
}

// Loss of predicting `next` from `cur`.
Tensor pair_loss(const Model& model, const CombinatorialComplex& cur, const CombinatorialComplex& next,
                 const TrainConfig& cfg, Rng& rng) {
  const auto& net = model.net();
  const auto enc = encode_cc(cur, net.encoder);
  const auto opt = tf_options(cfg);
  Tensor loss = teacher_forced_loss(enc.H1, co_incidence(next, 1), net.hp1, net.dec1, opt, rng);
  if (cfg.train_rank2) {
    const Tensor l2 = teacher_forced_loss(enc.H2, co_incidence(next, 2), net.hp2, net.dec2, opt, rng);
    loss = ad::add(loss, l2);
  }
  return loss;
}

ModelConfig model_config_for(const TrainConfig& cfg, const std::vector<CcSeries>& data) {
  if (data.empty() || data[0].steps.empty()) throw TrainError("train: empty training set");
  const auto& first = data[0].steps[0];
  const std::size_t features = first.features() ? static_cast<std::size_t>(first.features()->cols()) : 0;
  auto mc = ModelConfig::defaults(data[0].num_nodes, features);
  mc.hidden = cfg.hidden;
  for (auto* hp : {&mc.hp1, &mc.hp2}) {
    hp->traversal = cfg.traversal;
    hp->p_min = cfg.p_min;
    hp->temperature = cfg.temperature;
  }
  for (const auto& s : data)
    if (s.num_nodes != data[0].num_nodes) throw TrainError("train: all series must share one node count");
  return mc;
}

}  // namespace

double evaluate_loss(const Model& model, const std::vector<CcSeries>& data, const TrainConfig& cfg, Rng& rng) {
  ad::NoGradGuard no_grad;
  double total = 0;
  std::size_t pairs = 0;
  for (const auto& s : data)
    for (std::size_t t = 0; t + 1 < s.steps.size(); ++t) {
      total += pair_loss(model, s.steps[t], s.steps[t + 1], cfg, rng).item();
      ++pairs;
    }
  return pairs ? total / static_cast<double>(pairs) : 0.0;
}

TrainResult train(const TrainConfig& cfg, const std::vector<CcSeries>& train_set,
                  const std::vector<CcSeries>& val_set) {
  cfg.check();
  if (val_set.empty()) throw TrainError("train: validation split is empty");
  TrainResult res;
  res.model = std::make_unique<Model>(model_config_for(cfg, train_set), cfg.seed);
  Model& model = *res.model;
  nn::Adam adam(model.params(), {cfg.lr});

  double best = std::numeric_limits<double>::infinity();
  std::vector<Matrix> best_params = model.params().snapshot();
  std::size_t since_best = 0, bad_for_decay = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, "train", epoch));
    double total = 0;
    std::size_t pairs = 0;
    for (std::size_t si = 0; si < train_set.size(); ++si) {
      const auto& s = train_set[si];
      for (std::size_t t = 0; t + 1 < s.steps.size(); ++t) {
        model.params().zero_grad();
        const Tensor loss = pair_loss(model, s.steps[t], s.steps[t + 1], cfg, rng);
        const double v = loss.item();
        if (!std::isfinite(v))
          throw TrainError("non-finite loss at epoch " + std::to_string(epoch) + ", series " + std::to_string(si) +
                           ", timestep " + std::to_string(t));
        if (loss.requires_grad()) {
          ad::backward(loss);
          adam.step();
        }
        total += v;
        ++pairs;
      }
    }
    Rng val_rng(derive_seed(cfg.seed, "val", epoch));
    const double val = evaluate_loss(model, val_set, cfg, val_rng);
    if (!std::isfinite(val)) throw TrainError("non-finite validation loss at epoch " + std::to_string(epoch));
    res.curve.push_back({epoch, pairs ? total / static_cast<double>(pairs) : 0.0, val, adam.lr()});

    if (val < best) {
      best = val;
      best_params = model.params().snapshot();
      res.best_epoch = epoch;
      since_best = 0;
      bad_for_decay = 0;
    } else {
      ++since_best;
      if (++bad_for_decay >= cfg.patience_decay) {
        adam.set_lr(adam.lr() * cfg.decay_factor);
        bad_for_decay = 0;
      }
    }
    if (since_best >= cfg.patience_stop) break;
  }
  res.best_val = best;
  model.params().restore(best_params);
  return res;
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& curve) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,train_loss,val_loss,lr\n";
  out.precision(17);
  for (const auto& r : curve) out << r.epoch << ',' << r.train_loss << ',' << r.val_loss << ',' << r.lr << '\n';
}

std::vector<AblationRun> run_ablation(const std::vector<CcSeries>& train_set, const std::vector<CcSeries>& val_set,
                                      const AblationOptions& opt) {
  std::vector<AblationRun> runs;
  for (auto m : {AblationModel::Model1, AblationModel::Model2, AblationModel::Model3, AblationModel::Model4})
    for (auto seed : opt.seeds) {
      auto cfg = TrainConfig::for_ablation(m);
      cfg.seed = seed;
      cfg.max_epochs = opt.max_epochs;
      cfg.hidden = opt.hidden;
      cfg.lr = opt.lr;
      auto r = train(cfg, train_set, val_set);
      AblationRun run{m, seed, r.curve, r.curve.front().val_loss, r.best_val};
      runs.push_back(std::move(run));
    }
  return runs;
}

}  // namespace damcc
