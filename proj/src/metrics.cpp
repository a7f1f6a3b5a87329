#include "ddgf/metrics.hpp"

#include <cmath>
#include <string>

#include "ddgf/error.hpp"

namespace ddgf {

MetricsReport compute_metrics(const Tensor& y, const Tensor& p, std::span<const int> target_hours) {
  if (!y.same_shape(p)) {
    throw ShapeError("compute_metrics: truth " + y.shape_string() + " vs prediction " + p.shape_string());
  }
  if (target_hours.size() != y.rows()) throw ShapeError("compute_metrics: one target hour per row required");
  if (y.empty()) throw DataError("compute_metrics: nothing to evaluate");

  MetricsReport r;
  r.m = y.rows();
  r.n = y.cols();
  const double count = static_cast<double>(y.size());

  double mean = 0.0;
  for (double v : y.values()) mean += v;
  mean /= count;

  double ss_res = 0.0, ss_tot = 0.0, abs_sum = 0.0, day_sq = 0.0;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const bool daytime = target_hours[i] >= kDaytimeFirstHour && target_hours[i] <= kDaytimeLastHour;
    if (daytime) ++r.m_daytime;
    for (std::size_t j = 0; j < y.cols(); ++j) {
      const double e = y(i, j) - p(i, j);
      ss_res += e * e;
      abs_sum += std::abs(e);
      if (daytime) day_sq += e * e;
      const double d = y(i, j) - mean;
      ss_tot += d * d;
    }
  }
  r.rmse = std::sqrt(ss_res / count);
  r.mae = abs_sum / count;
  r.rmse_daytime =
      r.m_daytime == 0 ? 0.0 : std::sqrt(day_sq / static_cast<double>(r.m_daytime * r.n));
  if (ss_tot == 0.0) {
    r.r2 = ss_res == 0.0 ? 1.0 : 0.0;
  } else {
    r.r2 = 1.0 - ss_res / ss_tot;
  }
  return r;
}

nlohmann::json MetricsReport::to_json() const {
  return {{"rmse", rmse}, {"rmse_daytime", rmse_daytime}, {"mae", mae}, {"r2", r2},
          {"m", m},       {"n", n},                       {"m_daytime", m_daytime}};
}

MetricsReport MetricsReport::from_json(const nlohmann::json& j) {
  try {
    MetricsReport r;
    r.rmse = j.at("rmse").get<double>();
    r.rmse_daytime = j.at("rmse_daytime").get<double>();
    r.mae = j.at("mae").get<double>();
    r.r2 = j.at("r2").get<double>();
    r.m = j.at("m").get<std::size_t>();
    r.n = j.at("n").get<std::size_t>();
    r.m_daytime = j.value("m_daytime", std::size_t{0});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad metrics record: ") + e.what());
  }
}

}  // namespace ddgf
