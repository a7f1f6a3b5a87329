#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ddgf/autodiff.hpp"
#include "ddgf/graph.hpp"
#include "ddgf/rng.hpp"
#include "ddgf/tensor.hpp"
#include "ddgf/windows.hpp"

namespace ddgf {

enum class Architecture { GcnnRegDdgf, GcnnRecDdgf, GcnnFixed, Mlp, Lstm, HistoricalAverage, Lasso };

std::string_view to_string(Architecture a);
Architecture architecture_from_string(std::string_view name);

/// Architecture description.
///
/// widths: for GcnnRegDdgf, GcnnFixed and Mlp the per-layer widths
/// [C0, C1, ..., 1]. For GcnnRecDdgf the widths of the per-lag convolution
/// stack [1, ..., F]. Unused by Lstm, HistoricalAverage and Lasso.
struct ModelSpec {
  Architecture architecture = Architecture::GcnnRegDdgf;
  GraphKind graph = GraphKind::Identity;  // GcnnFixed only
  std::size_t window = 24;                // C0
  std::vector<std::size_t> widths{24, 32, 16, 1};
  std::size_t lstm_hidden = 32;
  Activation hidden_activation = Activation::Relu;
  double lasso_lambda = 1e-3;

  bool is_neural() const;
  bool uses_graph_filter() const;  // GcnnFixed or Mlp
  std::string display_name() const;
  void validate() const;

  nlohmann::json to_json() const;
  static ModelSpec from_json(const nlohmann::json& j);
};

using ParamMap = std::map<std::string, Tensor>;

struct ParamShape {
  std::string name;
  std::size_t rows;
  std::size_t cols;
};

// Names and shapes of the trainable tensors, fully determined by the spec.
std::vector<ParamShape> parameter_shapes(const ModelSpec& spec, std::size_t stations);
ParamMap init_parameters(const ModelSpec& spec, std::size_t stations, Rng& rng);

struct TrainedModel {
  ModelSpec spec;
  ParamMap params;  // trainable
  ParamMap frozen;  // e.g. the fixed graph filter
  Scaler scaler;
  std::vector<std::string> stations;
  nlohmann::json provenance = nlohmann::json::object();

  std::size_t station_count() const { return stations.size(); }
  // Materialized learned filters of the DDGF layers, in layer order.
  std::vector<Tensor> learned_filters() const;
};

// Frozen tensors for a spec: the normalized fixed filter for GcnnFixed, the
// identity for Mlp, nothing otherwise.
ParamMap frozen_tensors(const ModelSpec& spec, std::size_t stations,
                        const std::optional<GraphFilter>& filter);

using VarMap = std::map<std::string, Var>;

// Binds every tensor in params and frozen as a leaf on the tape.
VarMap bind_tensors(Tape& tape, const ParamMap& params, const ParamMap& frozen);

// Scaled-space forward of a neural model. x stacks one N x C0 block per
// sample; the result stacks one N x 1 block per sample.
Var forward(const ModelSpec& spec, const VarMap& vars, Var x, std::size_t stations);

Tensor gcnn_reg_forward(const TrainedModel& model, const Tensor& x);
Tensor gcnn_rec_forward(const TrainedModel& model, const Tensor& x);
// Dispatches on the architecture; x is scaled.
Tensor forward_scaled(const TrainedModel& model, const Tensor& x, int target_hour_of_day);

// Raw-unit prediction for one window: unscale(forward(scale(x))).
Tensor predict(const TrainedModel& model, const Tensor& x, int target_hour_of_day);

}  // namespace ddgf
