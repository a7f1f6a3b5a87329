#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ddgf/demand.hpp"
#include "ddgf/tensor.hpp"
#include "ddgf/windows.hpp"

namespace ddgf {

/// Per-station, per-hour-of-day mean of the training demand. Hours of day
/// absent from training fall back to the station's overall mean.
struct HistoricalAverage {
  std::vector<std::string> stations;
  Tensor by_hour;  // N x 24
};

HistoricalAverage ha_fit(const DemandMatrix& train);
double ha_predict(const HistoricalAverage& model, int hour_of_day, std::size_t station);
double ha_predict(const HistoricalAverage& model, int hour_of_day, const std::string& station);

double soft_threshold(double z, double gamma);

struct LassoResult {
  std::vector<double> coef;  // in the units of the supplied features
  double intercept = 0.0;
  std::size_t sweeps = 0;
  bool converged = false;
};

// Minimizes (1/2n)||y - b0 - X b||^2 + lambda ||b||_1 by cyclic coordinate
// descent on standardized features. Stops when the largest coefficient change
// in a sweep drops below tol or after max_sweeps.
LassoResult lasso_regression(const Tensor& features, std::span<const double> y, double lambda,
                             double tol = 1e-7, std::size_t max_sweeps = 10000);

// Station j's own C0 lags followed by every other station's latest hour.
std::vector<double> lasso_features(const Tensor& x, std::size_t station);

struct LassoModel {
  Tensor coef;       // N x (C0 + N - 1)
  Tensor intercept;  // N x 1
};

LassoModel lasso_fit(const std::vector<WindowedSample>& samples, double lambda);
Tensor lasso_predict(const LassoModel& model, const Tensor& x);

}  // namespace ddgf
