#pragma once

#include <cstddef>
#include <span>

#include <json.hpp>

#include "ddgf/tensor.hpp"

namespace ddgf {

// Target hours of day counted by the daytime RMSE: 7AM through 9PM.
inline constexpr int kDaytimeFirstHour = 7;
inline constexpr int kDaytimeLastHour = 21;

struct MetricsReport {
  double rmse = 0.0;
  double rmse_daytime = 0.0;  // 0 when no daytime rows were evaluated
  double mae = 0.0;
  double r2 = 0.0;
  std::size_t m = 0;  // evaluated hours
  std::size_t n = 0;  // stations
  std::size_t m_daytime = 0;

  nlohmann::json to_json() const;
  static MetricsReport from_json(const nlohmann::json& j);
};

// y and p are M x N (hours x stations) in demand units; target_hours holds
// the hour of day of each row. R^2 uses the pooled mean of y over all
// entries; when y is constant it is 1 for an exact fit and 0 otherwise.
MetricsReport compute_metrics(const Tensor& y, const Tensor& p, std::span<const int> target_hours);

}  // namespace ddgf
