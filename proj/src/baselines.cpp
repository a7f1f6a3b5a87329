#include "ddgf/baselines.hpp"

#include <cmath>

#include "ddgf/error.hpp"

namespace ddgf {

HistoricalAverage ha_fit(const DemandMatrix& train) {
  const std::size_t n = train.stations_count();
  if (n == 0 || train.hours() == 0) throw DataError("historical average needs a nonempty training matrix");
  Tensor sums(n, 24);
  std::vector<double> hits(24, 0.0);
  for (std::size_t i = 0; i < train.hours(); ++i) {
    const int h = train.hour_of_day(i);
    hits[static_cast<std::size_t>(h)] += 1.0;
    for (std::size_t j = 0; j < n; ++j) sums(j, static_cast<std::size_t>(h)) += train.at(j, i);
  }
  HistoricalAverage model{train.stations(), Tensor(n, 24)};
  for (std::size_t j = 0; j < n; ++j) {
    double total = 0.0;
    for (std::size_t h = 0; h < 24; ++h) total += sums(j, h);
    const double overall = total / static_cast<double>(train.hours());
    for (std::size_t h = 0; h < 24; ++h) {
      model.by_hour(j, h) = hits[h] > 0.0 ? sums(j, h) / hits[h] : overall;
    }
  }
  return model;
}

double ha_predict(const HistoricalAverage& model, int hour_of_day, std::size_t station) {
  if (station >= model.by_hour.rows()) {
    throw DataError("historical average has no station #" + std::to_string(station));
  }
  if (hour_of_day < 0 || hour_of_day > 23) throw ContractError("hour of day out of range");
  return model.by_hour(station, static_cast<std::size_t>(hour_of_day));
}

double ha_predict(const HistoricalAverage& model, int hour_of_day, const std::string& station) {
  for (std::size_t j = 0; j < model.stations.size(); ++j) {
    if (model.stations[j] == station) return ha_predict(model, hour_of_day, j);
  }
  throw DataError("historical average was not fitted on station '" + station + "'");
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

LassoResult lasso_regression(const Tensor& features, std::span<const double> y, double lambda,
                             double tol, std::size_t max_sweeps) {
  const std::size_t n = features.rows(), p = features.cols();
  if (n == 0 || y.size() != n) throw ShapeError("lasso: feature rows and targets differ");
  if (lambda < 0.0) throw ContractError("lasso: lambda must be non-negative");
  const double nn = static_cast<double>(n);

  std::vector<double> mean(p, 0.0), scale(p, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t i = 0; i < n; ++i) mean[k] += features(i, k);
    mean[k] /= nn;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = features(i, k) - mean[k];
      scale[k] += d * d;
    }
    scale[k] = std::sqrt(scale[k] / nn);
  }
  double y_mean = 0.0;
  for (double v : y) y_mean += v;
  y_mean /= nn;

  // Standardized design, column-major for the coordinate updates.
  std::vector<std::vector<double>> z(p, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < p; ++k) {
    if (scale[k] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) z[k][i] = (features(i, k) - mean[k]) / scale[k];
  }
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - y_mean;

  std::vector<double> beta(p, 0.0);
  LassoResult result;
  for (result.sweeps = 1; result.sweeps <= max_sweeps; ++result.sweeps) {
    double max_change = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      if (scale[k] == 0.0) continue;
      double rho = 0.0;
      for (std::size_t i = 0; i < n; ++i) rho += z[k][i] * residual[i];
      // Standardized columns have (1/n)||z_k||^2 = 1.
      rho = rho / nn + beta[k];
      const double updated = soft_threshold(rho, lambda);
      const double delta = updated - beta[k];
      if (delta != 0.0) {
        for (std::size_t i = 0; i < n; ++i) residual[i] -= delta * z[k][i];
        beta[k] = updated;
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    if (max_change < tol) {
      result.converged = true;
      break;
    }
  }
  if (result.sweeps > max_sweeps) result.sweeps = max_sweeps;

  result.coef.assign(p, 0.0);
  result.intercept = y_mean;
  for (std::size_t k = 0; k < p; ++k) {
    if (scale[k] == 0.0) continue;
    result.coef[k] = beta[k] / scale[k];
    result.intercept -= result.coef[k] * mean[k];
  }
  return result;
}

std::vector<double> lasso_features(const Tensor& x, std::size_t station) {
  const std::size_t n = x.rows(), c0 = x.cols();
  if (station >= n) throw ShapeError("lasso_features: station index out of range");
  std::vector<double> f;
  f.reserve(c0 + n - 1);
  for (std::size_t t = 0; t < c0; ++t) f.push_back(x(station, t));
  for (std::size_t j = 0; j < n; ++j) {
    if (j != station) f.push_back(x(j, c0 - 1));
  }
  return f;
}

LassoModel lasso_fit(const std::vector<WindowedSample>& samples, double lambda) {
  if (samples.empty()) throw DataError("lasso: no training samples");
  const std::size_t n = samples.front().x.rows();
  const std::size_t width = samples.front().x.cols() + n - 1;
  LassoModel model{Tensor(n, width), Tensor(n, 1)};
  Tensor design(samples.size(), width);
  std::vector<double> target(samples.size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const auto f = lasso_features(samples[s].x, j);
      for (std::size_t k = 0; k < width; ++k) design(s, k) = f[k];
      target[s] = samples[s].y(j, 0);
    }
    const LassoResult fit = lasso_regression(design, target, lambda);
    for (std::size_t k = 0; k < width; ++k) model.coef(j, k) = fit.coef[k];
    model.intercept(j, 0) = fit.intercept;
  }
  return model;
}

Tensor lasso_predict(const LassoModel& model, const Tensor& x) {
  const std::size_t n = model.coef.rows();
  if (x.rows() != n || x.cols() + n - 1 != model.coef.cols()) {
    throw ShapeError("lasso_predict: input " + x.shape_string() + " does not match model");
  }
  Tensor out(n, 1);
  for (std::size_t j = 0; j < n; ++j) {
    const auto f = lasso_features(x, j);
    double v = model.intercept(j, 0);
    for (std::size_t k = 0; k < f.size(); ++k) v += model.coef(j, k) * f[k];
    out(j, 0) = v;
  }
  return out;
}

}  // namespace ddgf
