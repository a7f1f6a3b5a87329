#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddgf/demand.hpp"
#include "ddgf/graph.hpp"
#include "ddgf/metrics.hpp"
#include "ddgf/models.hpp"
#include "ddgf/train.hpp"

namespace ddgf {

/// Demand data cut into chronological windows, with the scaler fitted on the
/// hours covered by the training windows only.
struct PreparedData {
  DemandMatrix demand;        // restricted to the station universe
  DemandMatrix train_demand;  // columns spanned by the training windows
  std::size_t window = 0;
  Split<WindowedSample> raw;  // demand units
  Scaler scaler;

  TrainingData training_data(std::optional<GraphFilter> filter = {}) const;
};

// Stations with no check-out during the training hours are dropped with a
// warning.
PreparedData prepare_data(const DemandMatrix& demand, std::size_t window, const SplitRatios& ratios);

// Number of leading hours covered by the training windows.
std::size_t training_hours(std::size_t hours, std::size_t window, const SplitRatios& ratios);

// Normalized fixed filter built from training-period trips and demand only.
GraphFilter build_training_filter(GraphKind kind, const std::vector<TripRecord>& trips,
                                  const PreparedData& data, const GraphParams& params = {});

struct Evaluation {
  Tensor truth;        // M x N
  Tensor prediction;   // M x N
  std::vector<int> hours;
  MetricsReport metrics;
};

Evaluation evaluate(const TrainedModel& model, const std::vector<WindowedSample>& raw_samples);

// Fits HA or LASSO on the training split.
TrainedModel fit_baseline(const ModelSpec& spec, const PreparedData& data);

struct ModelRun {
  TrainedModel model;
  std::vector<EpochRecord> history;  // empty for baselines
  Evaluation test;
};

ModelRun run_model(const ModelSpec& spec, const PreparedData& data, const TrainConfig& config,
                   const std::optional<GraphFilter>& filter = {});

struct ComparisonRow {
  std::string model;
  MetricsReport metrics;
};

/// Rows sorted by RMSE ascending (ties by name).
class ComparisonTable {
 public:
  explicit ComparisonTable(std::vector<ComparisonRow> rows);

  const std::vector<ComparisonRow>& rows() const { return rows_; }
  std::string to_csv() const;
  // Aligned text with the published full-corpus reference values as a footer.
  std::string to_text() const;

 private:
  std::vector<ComparisonRow> rows_;
};

ComparisonTable run_comparison(const std::vector<ModelSpec>& specs, const PreparedData& data,
                               const TrainConfig& config,
                               const std::map<GraphKind, GraphFilter>& filters = {});

struct ReferenceRow {
  const char* model;
  double rmse, rmse_daytime, mae, r2;
};
// Published results on three years of Citi Bike data (2013-07 to 2016-06).
const std::vector<ReferenceRow>& reference_results();

}  // namespace ddgf
