#include "ddgf/train.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ddgf/error.hpp"
#include "ddgf/log.hpp"

namespace ddgf {

namespace {

struct Batch {
  Tensor x;
  Tensor y;
};

Batch stack(const std::vector<WindowedSample>& samples, std::span<const std::size_t> order) {
  const std::size_t n = samples.front().x.rows(), c0 = samples.front().x.cols();
  std::vector<double> x, y;
  x.reserve(order.size() * n * c0);
  y.reserve(order.size() * n);
  for (std::size_t k : order) {
    const auto xs = samples[k].x.values();
    const auto ys = samples[k].y.values();
    x.insert(x.end(), xs.begin(), xs.end());
    y.insert(y.end(), ys.begin(), ys.end());
  }
  return {Tensor(order.size() * n, c0, std::move(x)), Tensor(order.size() * n, 1, std::move(y))};
}

std::string norms(const ParamMap& params) {
  std::ostringstream os;
  for (const auto& [name, t] : params) os << ' ' << name << '=' << frobenius_norm(t);
  return os.str();
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (epochs == 0) throw ConfigError("epochs must be at least 1");
  if (batch_size == 0) throw ConfigError("batch size must be at least 1");
  if (patience == 0) throw ConfigError("patience must be at least 1");
  if (!(ratios.train > 0.0 && ratios.val > 0.0 && ratios.test > 0.0)) {
    throw ConfigError("split ratios must all be positive");
  }
  if (std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must sum to 1");
  }
}

SplitSizes split_sizes(std::size_t count, const SplitRatios& ratios) {
  // Small tolerance so e.g. 0.2 * 10 = 2.0000000000000004 floors to 2, not 1.
  auto part = [&](double r) {
    return static_cast<std::size_t>(std::floor(r * static_cast<double>(count) + 1e-9));
  };
  const std::size_t val = part(ratios.val), test = part(ratios.test);
  if (val + test >= count) throw DataError("too few samples (" + std::to_string(count) + ") to split");
  SplitSizes s{count - val - test, val, test};
  if (s.train == 0 || s.val == 0 || s.test == 0) {
    throw DataError("split of " + std::to_string(count) + " samples leaves an empty partition (" +
                    std::to_string(s.train) + "/" + std::to_string(s.val) + "/" +
                    std::to_string(s.test) + ")");
  }
  return s;
}

Split<WindowedSample> chronological_split(const std::vector<WindowedSample>& samples,
                                          const SplitRatios& ratios) {
  const SplitSizes s = split_sizes(samples.size(), ratios);
  Split<WindowedSample> out;
  out.train.assign(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(s.train));
  out.val.assign(samples.begin() + static_cast<std::ptrdiff_t>(s.train),
                 samples.begin() + static_cast<std::ptrdiff_t>(s.train + s.val));
  out.test.assign(samples.begin() + static_cast<std::ptrdiff_t>(s.train + s.val), samples.end());
  return out;
}

void adam_step(ParamMap& params, const ParamMap& grads, AdamState& state, double lr,
               const AdamOptions& o) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (auto& [name, p] : params) {
    const auto g_it = grads.find(name);
    if (g_it == grads.end()) continue;
    const Tensor& g = g_it->second;
    if (!g.same_shape(p)) throw ShapeError("adam: gradient shape mismatch for '" + name + "'");
    auto [m_it, m_new] = state.m.try_emplace(name, p.rows(), p.cols());
    auto [v_it, v_new] = state.v.try_emplace(name, p.rows(), p.cols());
    Tensor& m = m_it->second;
    Tensor& v = v_it->second;
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = o.beta1 * m[k] + (1.0 - o.beta1) * g[k];
      v[k] = o.beta2 * v[k] + (1.0 - o.beta2) * g[k] * g[k];
      const double m_hat = m[k] / c1;
      const double v_hat = v[k] / c2;
      p[k] -= lr * m_hat / (std::sqrt(v_hat) + o.eps);
    }
  }
}

bool EarlyStopping::record(std::size_t epoch, double val_loss) {
  if (val_loss < best_) {
    best_ = val_loss;
    best_epoch_ = epoch;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

std::vector<WindowedSample> scale_samples(const std::vector<WindowedSample>& samples, const Scaler& s) {
  std::vector<WindowedSample> out;
  out.reserve(samples.size());
  for (const auto& w : samples) out.push_back({s.scale(w.x), s.scale(w.y), w.target_hour_of_day, w.target_column});
  return out;
}

double evaluate_mse(const TrainedModel& model, const std::vector<WindowedSample>& scaled) {
  if (scaled.empty()) throw DataError("cannot evaluate on zero samples");
  constexpr std::size_t kChunk = 256;
  double sq = 0.0;
  std::size_t count = 0;
  std::vector<std::size_t> order;
  for (std::size_t begin = 0; begin < scaled.size(); begin += kChunk) {
    order.resize(std::min(kChunk, scaled.size() - begin));
    std::iota(order.begin(), order.end(), begin);
    const Batch b = stack(scaled, order);
    Tape tape;
    const VarMap vars = bind_tensors(tape, model.params, model.frozen);
    const Tensor p = forward(model.spec, vars, tape.leaf(b.x), model.station_count()).value();
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double d = p[k] - b.y[k];
      sq += d * d;
    }
    count += p.size();
  }
  return sq / static_cast<double>(count);
}

TrainResult train(const ModelSpec& spec, const TrainingData& data, const TrainConfig& config) {
  spec.validate();
  config.validate();
  if (!spec.is_neural()) throw ContractError(spec.display_name() + " is not trained by gradient descent");
  if (data.train.empty() || data.val.empty()) throw DataError("training and validation sets must be nonempty");
  const std::size_t n = data.stations.size();
  for (const auto* set : {&data.train, &data.val}) {
    for (const auto& s : *set) {
      if (s.x.rows() != n || s.x.cols() != spec.window || s.y.rows() != n) {
        throw ShapeError("sample shape " + s.x.shape_string() + " does not match " +
                         std::to_string(n) + " stations x window " + std::to_string(spec.window));
      }
    }
  }

  Rng rng(config.seed);
  TrainResult result;
  TrainedModel& model = result.model;
  model.spec = spec;
  model.stations = data.stations;
  model.scaler = data.scaler;
  model.frozen = frozen_tensors(spec, n, data.filter);
  model.params = init_parameters(spec, n, rng);
  model.provenance = {{"rng", Rng::kAlgorithm}, {"seed", config.seed}};

  ParamMap best = model.params;
  AdamState adam;
  EarlyStopping stopper(config.patience);
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++batch_index) {
      const std::size_t len = std::min(config.batch_size, order.size() - begin);
      const Batch batch = stack(data.train, std::span(order).subspan(begin, len));
      Tape tape;
      const VarMap vars = bind_tensors(tape, model.params, model.frozen);
      ParamMap grads;
      double loss = 0.0;
      try {
        Var pred = forward(spec, vars, tape.leaf(batch.x), n);
        Var l = ad::mse(pred, tape.leaf(batch.y));
        loss = l.value()[0];
        tape.backward(l);
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + " (" + e.what() + "); parameter norms:" +
                           norms(model.params));
      }
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index) + "; parameter norms:" + norms(model.params));
      }
      for (const auto& [name, t] : model.params) grads.emplace(name, vars.at(name).grad());
      adam_step(model.params, grads, adam, config.learning_rate);
      loss_sum += loss * static_cast<double>(len);
    }
    const double train_loss = loss_sum / static_cast<double>(order.size());
    const double val_loss = evaluate_mse(model, data.val);
    result.history.push_back({epoch, train_loss, val_loss});
    if (stopper.record(epoch, val_loss)) best = model.params;
    log_debug(spec.display_name() + " epoch " + std::to_string(epoch) + " train " +
              std::to_string(train_loss) + " val " + std::to_string(val_loss));
    if (stopper.should_stop()) break;
  }
  model.params = std::move(best);
  result.best_epoch = stopper.best_epoch();
  model.provenance["best_epoch"] = result.best_epoch;
  model.provenance["epochs_run"] = result.history.size();
  return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,train_loss,val_loss\n";
  for (const auto& r : history) os << r.epoch << ',' << r.train_loss << ',' << r.val_loss << '\n';
  return os.str();
}

}  // namespace ddgf
