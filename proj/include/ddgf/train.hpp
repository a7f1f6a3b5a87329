#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ddgf/graph.hpp"
#include "ddgf/models.hpp"
#include "ddgf/windows.hpp"

namespace ddgf {

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::size_t patience = 10;
  std::uint64_t seed = 42;
  SplitRatios ratios;

  void validate() const;
};

template <typename T>
struct Split {
  std::vector<T> train;
  std::vector<T> val;
  std::vector<T> test;
};

// Contiguous prefix / middle / suffix. Val and test sizes are floor(ratio *
// count); the remainder goes to train.
Split<WindowedSample> chronological_split(const std::vector<WindowedSample>& samples,
                                          const SplitRatios& ratios);
struct SplitSizes {
  std::size_t train, val, test;
};
SplitSizes split_sizes(std::size_t count, const SplitRatios& ratios);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  ParamMap m;
  ParamMap v;
  std::uint64_t step = 0;
};

// Updates every entry of params that has a gradient in grads.
void adam_step(ParamMap& params, const ParamMap& grads, AdamState& state, double lr,
               const AdamOptions& options = {});

/// Tracks the best validation loss. Training stops once more than `patience`
/// consecutive epochs fail to improve on it.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Returns true when the loss is a new best.
  bool record(std::size_t epoch, double val_loss);
  bool should_stop() const { return stale_ > patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t stale_ = 0;
  std::size_t best_epoch_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
};

struct EpochRecord {
  std::size_t epoch;
  double train_loss;
  double val_loss;
};

struct TrainingData {
  std::vector<WindowedSample> train;  // scaled
  std::vector<WindowedSample> val;    // scaled
  Scaler scaler;
  std::vector<std::string> stations;
  std::optional<GraphFilter> filter;  // GcnnFixed only
};

struct TrainResult {
  TrainedModel model;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

std::vector<WindowedSample> scale_samples(const std::vector<WindowedSample>& samples, const Scaler& s);

// Mini-batch Adam on scaled-space MSE with best-validation snapshotting.
// Non-neural specs are rejected; use fit_baseline for those.
TrainResult train(const ModelSpec& spec, const TrainingData& data, const TrainConfig& config);

// Scaled-space MSE of a neural model over a sample set.
double evaluate_mse(const TrainedModel& model, const std::vector<WindowedSample>& scaled);

std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace ddgf
