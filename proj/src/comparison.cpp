#include "ddgf/comparison.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "ddgf/baselines.hpp"
#include "ddgf/error.hpp"
#include "ddgf/log.hpp"

namespace ddgf {

TrainingData PreparedData::training_data(std::optional<GraphFilter> filter) const {
  return {scale_samples(raw.train, scaler), scale_samples(raw.val, scaler), scaler, demand.stations(),
          std::move(filter)};
}

PreparedData prepare_data(const DemandMatrix& demand, std::size_t window, const SplitRatios& ratios) {
  if (demand.hours() < window + 1) {
    throw DataError("demand matrix has " + std::to_string(demand.hours()) +
                    " hours, need at least window + 1 = " + std::to_string(window + 1));
  }
  const std::size_t train_hours = training_hours(demand.hours(), window, ratios);

  std::vector<std::string> universe;
  for (std::size_t j = 0; j < demand.stations_count(); ++j) {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < train_hours; ++i) s += demand.at(j, i);
    if (s > 0) {
      universe.push_back(demand.stations()[j]);
    } else {
      log_warn("station " + demand.stations()[j] + " has no training-period demand; dropped");
    }
  }
  if (universe.empty()) throw DataError("no station has demand during the training period");

  PreparedData p;
  p.demand = universe.size() == demand.stations_count() ? demand : demand.restrict_to(universe);
  p.window = window;
  p.train_demand = p.demand.columns(0, train_hours);
  p.raw = chronological_split(make_windows(p.demand, window), ratios);
  p.scaler = Scaler::fit(p.train_demand);
  return p;
}

std::size_t training_hours(std::size_t hours, std::size_t window, const SplitRatios& ratios) {
  if (hours < window + 1) throw DataError("too few hours for the window");
  return window + split_sizes(hours - window, ratios).train;
}

GraphFilter build_training_filter(GraphKind kind, const std::vector<TripRecord>& trips,
                                  const PreparedData& data, const GraphParams& params) {
  const LocalHour end = data.train_demand.t0() + static_cast<LocalHour>(data.train_demand.hours());
  std::vector<TripRecord> period;
  for (const auto& t : trips) {
    const LocalHour h = hour_of(t.start_time);
    if (h >= data.train_demand.t0() && h < end) period.push_back(t);
  }
  GraphFilter f = normalize_adjacency(build_adjacency(kind, period, data.train_demand, params));
  f.stations = data.demand.stations();
  f.provenance["sd_threshold_km"] = params.sd_threshold_km;
  f.provenance["training_hours"] = data.train_demand.hours();
  return f;
}

Evaluation evaluate(const TrainedModel& model, const std::vector<WindowedSample>& raw_samples) {
  if (raw_samples.empty()) throw DataError("cannot evaluate on zero samples");
  const std::size_t n = model.station_count();
  Evaluation e{Tensor(raw_samples.size(), n), Tensor(raw_samples.size(), n), {}, {}};
  for (std::size_t i = 0; i < raw_samples.size(); ++i) {
    const auto& s = raw_samples[i];
    const Tensor p = predict(model, s.x, s.target_hour_of_day);
    for (std::size_t j = 0; j < n; ++j) {
      e.truth(i, j) = s.y(j, 0);
      e.prediction(i, j) = p(j, 0);
    }
    e.hours.push_back(s.target_hour_of_day);
  }
  e.metrics = compute_metrics(e.truth, e.prediction, e.hours);
  return e;
}

TrainedModel fit_baseline(const ModelSpec& spec, const PreparedData& data) {
  spec.validate();
  TrainedModel m;
  m.spec = spec;
  m.stations = data.demand.stations();
  m.scaler = data.scaler;
  switch (spec.architecture) {
    case Architecture::HistoricalAverage: {
      const HistoricalAverage ha = ha_fit(data.train_demand);
      m.params.emplace("ha.by_hour", data.scaler.scale(ha.by_hour));
      break;
    }
    case Architecture::Lasso: {
      const LassoModel lasso = lasso_fit(scale_samples(data.raw.train, data.scaler), spec.lasso_lambda);
      m.params.emplace("lasso.coef", lasso.coef);
      m.params.emplace("lasso.intercept", lasso.intercept);
      break;
    }
    default:
      throw ContractError(spec.display_name() + " is not a closed-form baseline");
  }
  return m;
}

ModelRun run_model(const ModelSpec& spec, const PreparedData& data, const TrainConfig& config,
                   const std::optional<GraphFilter>& filter) {
  if (spec.window != data.window) {
    throw ConfigError(spec.display_name() + ": window " + std::to_string(spec.window) +
                      " differs from data window " + std::to_string(data.window));
  }
  ModelRun run;
  if (spec.is_neural()) {
    TrainResult r = train(spec, data.training_data(filter), config);
    run.model = std::move(r.model);
    run.history = std::move(r.history);
  } else {
    run.model = fit_baseline(spec, data);
  }
  run.test = evaluate(run.model, data.raw.test);
  return run;
}

ComparisonTable::ComparisonTable(std::vector<ComparisonRow> rows) : rows_(std::move(rows)) {
  std::stable_sort(rows_.begin(), rows_.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    if (a.metrics.rmse != b.metrics.rmse) return a.metrics.rmse < b.metrics.rmse;
    return a.model < b.model;
  });
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "model,rmse,rmse_7am_9pm,mae,r2,m,n\n";
  for (const auto& r : rows_) {
    os << r.model << ',' << r.metrics.rmse << ',' << r.metrics.rmse_daytime << ',' << r.metrics.mae << ','
       << r.metrics.r2 << ',' << r.metrics.m << ',' << r.metrics.n << '\n';
  }
  return os.str();
}

std::string ComparisonTable::to_text() const {
  std::size_t width = 5;
  for (const auto& r : rows_) width = std::max(width, r.model.size());
  for (const auto& r : reference_results()) width = std::max(width, std::string(r.model).size());
  auto line = [&](const std::string& name, double a, double b, double c, double d) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-*s  %8.4f  %14.4f  %8.4f  %8.4f\n", static_cast<int>(width),
                  name.c_str(), a, b, c, d);
    return std::string(buf);
  };
  auto header = [&] {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-*s  %8s  %14s  %8s  %8s\n", static_cast<int>(width), "Model", "RMSE",
                  "RMSE(7AM-9PM)", "MAE", "R2");
    return std::string(buf);
  };
  std::string out = header();
  out += std::string(width + 48, '-') + "\n";
  for (const auto& r : rows_) out += line(r.model, r.metrics.rmse, r.metrics.rmse_daytime, r.metrics.mae, r.metrics.r2);
  out += "\nReference only: published results on the full 2013-2016 Citi Bike corpus\n";
  out += "(not reproduced at desk scale; see README for the full-run procedure)\n";
  out += header();
  for (const auto& r : reference_results()) out += line(r.model, r.rmse, r.rmse_daytime, r.mae, r.r2);
  return out;
}

ComparisonTable run_comparison(const std::vector<ModelSpec>& specs, const PreparedData& data,
                               const TrainConfig& config, const std::map<GraphKind, GraphFilter>& filters) {
  std::vector<ComparisonRow> rows;
  for (const auto& spec : specs) {
    std::optional<GraphFilter> filter;
    if (spec.architecture == Architecture::GcnnFixed) {
      const auto it = filters.find(spec.graph);
      if (it != filters.end()) filter = it->second;
    }
    log_info("running " + spec.display_name());
    const ModelRun run = run_model(spec, data, config, filter);
    rows.push_back({spec.display_name(), run.test.metrics});
  }
  return ComparisonTable(std::move(rows));
}

const std::vector<ReferenceRow>& reference_results() {
  static const std::vector<ReferenceRow> kRows = {
      {"GCNN_rec-DDGF", 2.12, 2.58, 1.26, 0.75}, {"GCNN_reg-DDGF", 2.35, 2.85, 1.43, 0.70},
      {"XGBoost", 2.43, 2.95, 1.44, 0.68},       {"LSTM", 2.46, 3.00, 1.44, 0.67},
      {"GCNN-DC", 2.50, 3.02, 1.53, 0.66},       {"MLP", 2.51, 3.05, 1.51, 0.65},
      {"GCNN-DE", 2.67, 3.21, 1.60, 0.61},       {"SVR-RBF", 2.67, 3.25, 1.57, 0.61},
      {"LASSO", 2.70, 3.27, 1.65, 0.60},         {"SVR-linear", 2.72, 3.31, 1.52, 0.59},
      {"GCNN-SD", 2.77, 3.31, 1.68, 0.58},       {"HA", 3.44, 3.42, 2.08, 0.35},
      {"GCNN-ATD", 3.44, 3.83, 2.21, 0.35},
  };
  return kRows;
}

}  // namespace ddgf
