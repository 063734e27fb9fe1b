#pragma once

#include "damcc/decoder.hpp"
#include "damcc/encoder.hpp"
#include "damcc/nn.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace damcc {

struct ModelConfig {
  Eigen::Index input_dim = 0;
  Eigen::Index hidden = 256;
  DecoderHyperparams hp1{};  // 1-cells, n_max 2
  DecoderHyperparams hp2{};  // 2-cells, n_max 15 (capped at the node count)

  /// Defaults for a series on `num_nodes` nodes with `feature_dim` node
  /// features (0 = none, identity input).
  static ModelConfig defaults(std::size_t num_nodes, std::size_t feature_dim = 0);
};

nlohmann::json to_json(const DecoderHyperparams& hp);
DecoderHyperparams decoder_hyperparams_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

/// Parameters plus the structured views onto them.
class Model {
public:
  Model(const ModelConfig& cfg, std::uint64_t seed);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelConfig& config() const { return cfg_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  const CcModel& net() const { return net_; }
  std::uint64_t seed() const { return seed_; }

  void save(const std::filesystem::path& stem, const nlohmann::json& extra_meta = {}) const;
  static std::unique_ptr<Model> load(const std::filesystem::path& stem);

private:
  ModelConfig cfg_;
  std::uint64_t seed_;
  nn::ParameterSet params_;
  CcModel net_;
};

enum class AblationModel { Model1 = 1, Model2, Model3, Model4 };

struct TrainConfig {
  LossMode loss = LossMode::Bce;
  Traversal traversal = Traversal::Deterministic;
  double lr = 1e-3;
  double decay_factor = 0.1;
  std::size_t patience_decay = 10;
  std::size_t patience_stop = 20;
  std::size_t max_epochs = 200;
  std::uint64_t seed = 0;
  bool train_rank2 = true;
  Eigen::Index hidden = 256;
  double p_min = 0.5;
  double temperature = 0.5;
  double sinkhorn_eps = 0.1;
  int sinkhorn_iters = 50;

  void check() const;
  static TrainConfig for_ablation(AblationModel m);
};

nlohmann::json to_json(const TrainConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;
  double val_loss = 0;
  double lr = 0;
};

struct TrainResult {
  std::vector<EpochRecord> curve;
  std::size_t best_epoch = 0;
  double best_val = 0;
  std::unique_ptr<Model> model;  // best-validation parameters
};

class TrainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Mean loss over all consecutive pairs of the given series.
double evaluate_loss(const Model& model, const std::vector<CcSeries>& data, const TrainConfig& cfg, Rng& rng);

/// One Adam step per consecutive pair (CC_t, CC_t+1), training series in
/// order. The learning rate drops by decay_factor after patience_decay epochs
/// without a validation improvement; training stops once patience_stop epochs
/// pass without one.
TrainResult train(const TrainConfig& cfg, const std::vector<CcSeries>& train_set, const std::vector<CcSeries>& val_set);

void write_curve_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& curve);

struct AblationRun {
  AblationModel model;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> curve;
  double first_val = 0;
  double best_val = 0;
  double ratio() const { return first_val > 0 ? best_val / first_val : 1.0; }
  /// Best validation loss below half of the first epoch's.
  bool learned() const { return ratio() < 0.5; }
};

struct AblationOptions {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t max_epochs = 200;
  Eigen::Index hidden = 256;
  double lr = 1e-3;
};

/// Trains Models 1-4 on 1-cells for every seed.
std::vector<AblationRun> run_ablation(const std::vector<CcSeries>& train_set, const std::vector<CcSeries>& val_set,
                                      const AblationOptions& opt);

}  // namespace damcc
