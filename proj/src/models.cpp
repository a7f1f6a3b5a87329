#include "ddgf/models.hpp"

#include <cmath>

#include "ddgf/baselines.hpp"
#include "ddgf/error.hpp"
#include "ddgf/layers.hpp"

namespace ddgf {

namespace {

constexpr const char* kFilterName = "graph.filter";

bool is_layered(Architecture a) {
  return a == Architecture::GcnnRegDdgf || a == Architecture::GcnnFixed || a == Architecture::Mlp;
}

bool is_recurrent(Architecture a) { return a == Architecture::GcnnRecDdgf || a == Architecture::Lstm; }

std::string layer_prefix(const ModelSpec& spec, std::size_t l) {
  return (is_recurrent(spec.architecture) ? "conv" : "layer") + std::to_string(l);
}

// Widths of the graph-convolution stack, empty for the plain LSTM.
std::vector<std::size_t> conv_widths(const ModelSpec& spec) {
  if (spec.architecture == Architecture::Lstm) return {};
  return spec.widths;
}

std::size_t lstm_input_width(const ModelSpec& spec) {
  return spec.architecture == Architecture::Lstm ? 1 : spec.widths.back();
}

Tensor glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t(rows, cols);
  for (auto& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

const Var& lookup(const VarMap& vars, const std::string& name) {
  const auto it = vars.find(name);
  if (it == vars.end()) throw ContractError("model is missing tensor '" + name + "'");
  return it->second;
}

}  // namespace

std::string_view to_string(Architecture a) {
  switch (a) {
    case Architecture::GcnnRegDdgf:
      return "gcnn-reg-ddgf";
    case Architecture::GcnnRecDdgf:
      return "gcnn-rec-ddgf";
    case Architecture::GcnnFixed:
      return "gcnn-fixed";
    case Architecture::Mlp:
      return "mlp";
    case Architecture::Lstm:
      return "lstm";
    case Architecture::HistoricalAverage:
      return "ha";
    case Architecture::Lasso:
      return "lasso";
  }
  return "?";
}

Architecture architecture_from_string(std::string_view name) {
  for (auto a : {Architecture::GcnnRegDdgf, Architecture::GcnnRecDdgf, Architecture::GcnnFixed,
                 Architecture::Mlp, Architecture::Lstm, Architecture::HistoricalAverage,
                 Architecture::Lasso}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown architecture '" + std::string(name) + "'");
}

bool ModelSpec::is_neural() const {
  return architecture != Architecture::HistoricalAverage && architecture != Architecture::Lasso;
}

bool ModelSpec::uses_graph_filter() const {
  return architecture == Architecture::GcnnFixed || architecture == Architecture::Mlp;
}

std::string ModelSpec::display_name() const {
  switch (architecture) {
    case Architecture::GcnnRegDdgf:
      return "GCNN_reg-DDGF";
    case Architecture::GcnnRecDdgf:
      return "GCNN_rec-DDGF";
    case Architecture::GcnnFixed:
      return "GCNN-" + std::string(to_string(graph));
    case Architecture::Mlp:
      return "MLP";
    case Architecture::Lstm:
      return "LSTM";
    case Architecture::HistoricalAverage:
      return "HA";
    case Architecture::Lasso:
      return "LASSO";
  }
  return "?";
}

void ModelSpec::validate() const {
  if (window == 0) throw ConfigError("window (C0) must be at least 1");
  for (auto w : widths) {
    if (w == 0) throw ConfigError("layer widths must be positive");
  }
  if (is_layered(architecture)) {
    if (widths.size() < 2) throw ConfigError(display_name() + ": need at least one layer (two widths)");
    if (widths.front() != window) {
      throw ConfigError(display_name() + ": first width must equal the window length " +
                        std::to_string(window));
    }
    if (widths.back() != 1) throw ConfigError(display_name() + ": final width must be 1");
  }
  if (architecture == Architecture::GcnnRecDdgf) {
    if (widths.size() < 2 || widths.front() != 1) {
      throw ConfigError("GCNN_rec-DDGF: convolution widths must start at 1 and have at least one layer");
    }
  }
  if (is_recurrent(architecture) && lstm_hidden == 0) throw ConfigError("lstm_hidden must be positive");
  if (architecture == Architecture::Lasso && !(lasso_lambda >= 0.0)) {
    throw ConfigError("lasso lambda must be non-negative");
  }
}

nlohmann::json ModelSpec::to_json() const {
  return {{"architecture", std::string(to_string(architecture))},
          {"graph", std::string(to_string(graph))},
          {"window", window},
          {"widths", widths},
          {"lstm_hidden", lstm_hidden},
          {"hidden_activation", std::string(to_string(hidden_activation))},
          {"lasso_lambda", lasso_lambda}};
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
  ModelSpec s;
  try {
    s.architecture = architecture_from_string(j.at("architecture").get<std::string>());
    s.graph = graph_kind_from_string(j.at("graph").get<std::string>());
    s.window = j.at("window").get<std::size_t>();
    s.widths = j.at("widths").get<std::vector<std::size_t>>();
    s.lstm_hidden = j.at("lstm_hidden").get<std::size_t>();
    s.hidden_activation = activation_from_string(j.at("hidden_activation").get<std::string>());
    s.lasso_lambda = j.at("lasso_lambda").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad model spec: ") + e.what());
  }
  s.validate();
  return s;
}

std::vector<ParamShape> parameter_shapes(const ModelSpec& spec, std::size_t n) {
  spec.validate();
  std::vector<ParamShape> shapes;
  const auto widths = conv_widths(spec);
  const bool learned_filter = spec.architecture == Architecture::GcnnRegDdgf ||
                              spec.architecture == Architecture::GcnnRecDdgf;
  if (spec.is_neural()) {
    for (std::size_t l = 1; l < widths.size(); ++l) {
      const std::string p = layer_prefix(spec, l);
      if (learned_filter) shapes.push_back({p + ".theta", 1, upper_triangle_size(n)});
      shapes.push_back({p + ".weight", widths[l - 1], widths[l]});
      shapes.push_back({p + ".bias", 1, widths[l]});
    }
  }
  if (is_recurrent(spec.architecture)) {
    const std::size_t f = lstm_input_width(spec), u = spec.lstm_hidden;
    for (const char* g : {"f", "i", "o", "g"}) shapes.push_back({std::string("lstm.w_") + g, f, u});
    for (const char* g : {"f", "i", "o", "g"}) shapes.push_back({std::string("lstm.r_") + g, u, u});
    for (const char* g : {"f", "i", "o", "g"}) shapes.push_back({std::string("lstm.b_") + g, 1, u});
    shapes.push_back({"head.weight", u, 1});
    shapes.push_back({"head.bias", 1, 1});
  }
  if (spec.architecture == Architecture::HistoricalAverage) shapes.push_back({"ha.by_hour", n, 24});
  if (spec.architecture == Architecture::Lasso) {
    shapes.push_back({"lasso.coef", n, spec.window + n - 1});
    shapes.push_back({"lasso.intercept", n, 1});
  }
  return shapes;
}

ParamMap init_parameters(const ModelSpec& spec, std::size_t n, Rng& rng) {
  ParamMap params;
  // Draw in declaration order so the stream of random numbers is fixed by the spec.
  for (const auto& s : parameter_shapes(spec, n)) {
    const std::string_view name = s.name;
    Tensor t(s.rows, s.cols);
    if (name.ends_with(".theta")) {
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i) {
        t[k++] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) t[k++] = rng.uniform(-0.01, 0.01);
      }
    } else if (name.ends_with(".weight") || name.starts_with("lstm.w_") || name.starts_with("lstm.r_")) {
      t = glorot(s.rows, s.cols, rng);
    }
    params.emplace(s.name, std::move(t));
  }
  return params;
}

ParamMap frozen_tensors(const ModelSpec& spec, std::size_t n, const std::optional<GraphFilter>& filter) {
  ParamMap frozen;
  if (spec.architecture == Architecture::Mlp ||
      (spec.architecture == Architecture::GcnnFixed && spec.graph == GraphKind::Identity && !filter)) {
    frozen.emplace(kFilterName, Tensor::identity(n));
  } else if (spec.architecture == Architecture::GcnnFixed) {
    if (!filter) {
      throw ConfigError(spec.display_name() + " needs a " + std::string(to_string(spec.graph)) +
                        " graph filter");
    }
    if (filter->n() != n) {
      throw DataError(spec.display_name() + ": filter has " + std::to_string(filter->n()) +
                      " stations, data has " + std::to_string(n));
    }
    frozen.emplace(kFilterName, filter->values);
  }
  return frozen;
}

VarMap bind_tensors(Tape& tape, const ParamMap& params, const ParamMap& frozen) {
  VarMap vars;
  for (const auto& [name, t] : params) vars.emplace(name, tape.leaf(t));
  for (const auto& [name, t] : frozen) vars.emplace(name, tape.leaf(t));
  return vars;
}

Var forward(const ModelSpec& spec, const VarMap& vars, Var x, std::size_t n) {
  if (!spec.is_neural()) throw ContractError(spec.display_name() + " has no differentiable forward");
  if (x.value().cols() != spec.window || n == 0 || x.value().rows() % n != 0) {
    throw ShapeError(spec.display_name() + ": input " + x.value().shape_string() +
                     " is not a stack of " + std::to_string(n) + " x " + std::to_string(spec.window) +
                     " windows");
  }
  const auto widths = conv_widths(spec);
  const bool learned = spec.architecture == Architecture::GcnnRegDdgf ||
                       spec.architecture == Architecture::GcnnRecDdgf;

  std::vector<Var> filters;
  for (std::size_t l = 1; l < widths.size(); ++l) {
    filters.push_back(learned ? ad::symmetric_from_upper(lookup(vars, layer_prefix(spec, l) + ".theta"), n)
                              : lookup(vars, kFilterName));
  }
  auto conv_stack = [&](Var h, bool last_is_output) {
    for (std::size_t l = 1; l < widths.size(); ++l) {
      const std::string p = layer_prefix(spec, l);
      const bool output = last_is_output && l + 1 == widths.size();
      h = graph_conv(filters[l - 1], h, lookup(vars, p + ".weight"), lookup(vars, p + ".bias"),
                     output ? Activation::Identity : spec.hidden_activation);
    }
    return h;
  };

  if (is_layered(spec.architecture)) return conv_stack(x, true);

  const LstmCellVars cell{lookup(vars, "lstm.w_f"), lookup(vars, "lstm.w_i"), lookup(vars, "lstm.w_o"),
                          lookup(vars, "lstm.w_g"), lookup(vars, "lstm.r_f"), lookup(vars, "lstm.r_i"),
                          lookup(vars, "lstm.r_o"), lookup(vars, "lstm.r_g"), lookup(vars, "lstm.b_f"),
                          lookup(vars, "lstm.b_i"), lookup(vars, "lstm.b_o"), lookup(vars, "lstm.b_g")};
  const std::size_t rows = x.value().rows();
  Var h = x.tape->leaf(Tensor(rows, spec.lstm_hidden));
  Var c = x.tape->leaf(Tensor(rows, spec.lstm_hidden));
  for (std::size_t t = 0; t < spec.window; ++t) {
    Var features = conv_stack(ad::slice_cols(x, t, 1), false);
    std::tie(h, c) = lstm_step(cell, features, h, c);
  }
  return ad::add_row(ad::matmul(h, lookup(vars, "head.weight")), lookup(vars, "head.bias"));
}

std::vector<Tensor> TrainedModel::learned_filters() const {
  std::vector<Tensor> out;
  if (spec.architecture != Architecture::GcnnRegDdgf && spec.architecture != Architecture::GcnnRecDdgf) {
    return out;
  }
  for (std::size_t l = 1; l < spec.widths.size(); ++l) {
    out.push_back(symmetric_from_upper(params.at(layer_prefix(spec, l) + ".theta"), station_count()));
  }
  return out;
}

namespace {

Tensor neural_forward(const TrainedModel& model, const Tensor& x) {
  Tape tape;
  const VarMap vars = bind_tensors(tape, model.params, model.frozen);
  return forward(model.spec, vars, tape.leaf(x), model.station_count()).value();
}

}  // namespace

Tensor gcnn_reg_forward(const TrainedModel& model, const Tensor& x) {
  if (!is_layered(model.spec.architecture)) {
    throw ContractError("gcnn_reg_forward called on " + model.spec.display_name());
  }
  return neural_forward(model, x);
}

Tensor gcnn_rec_forward(const TrainedModel& model, const Tensor& x) {
  if (!is_recurrent(model.spec.architecture)) {
    throw ContractError("gcnn_rec_forward called on " + model.spec.display_name());
  }
  return neural_forward(model, x);
}

Tensor forward_scaled(const TrainedModel& model, const Tensor& x, int target_hour_of_day) {
  const std::size_t n = model.station_count();
  if (x.rows() != n || x.cols() != model.spec.window) {
    throw ShapeError(model.spec.display_name() + ": expected " + std::to_string(n) + " x " +
                     std::to_string(model.spec.window) + " input, got " + x.shape_string());
  }
  switch (model.spec.architecture) {
    case Architecture::HistoricalAverage: {
      const HistoricalAverage ha{model.stations, model.params.at("ha.by_hour")};
      Tensor out(n, 1);
      for (std::size_t j = 0; j < n; ++j) out(j, 0) = ha_predict(ha, target_hour_of_day, j);
      return out;
    }
    case Architecture::Lasso:
      return lasso_predict({model.params.at("lasso.coef"), model.params.at("lasso.intercept")}, x);
    default:
      return neural_forward(model, x);
  }
}

Tensor predict(const TrainedModel& model, const Tensor& x, int target_hour_of_day) {
  if (x.rows() != model.station_count()) {
    throw DataError("input has " + std::to_string(x.rows()) + " stations, model was trained on " +
                    std::to_string(model.station_count()));
  }
  return model.scaler.unscale(forward_scaled(model, model.scaler.scale(x), target_hour_of_day));
}

}  // namespace ddgf
