#include "ddgf/windows.hpp"

#include <algorithm>

#include "ddgf/error.hpp"
#include "ddgf/log.hpp"

namespace ddgf {

std::vector<WindowedSample> make_windows(const DemandMatrix& demand, std::size_t c0) {
  if (c0 == 0) throw ConfigError("window length C0 must be at least 1");
  if (demand.hours() < c0 + 1) {
    throw DataError("need at least C0 + 1 = " + std::to_string(c0 + 1) + " hours, matrix has " +
                    std::to_string(demand.hours()));
  }
  std::vector<WindowedSample> out;
  out.reserve(demand.hours() - c0);
  for (std::size_t k = 0; k + c0 < demand.hours(); ++k) {
    out.push_back({demand.slice(k, c0), demand.slice(k + c0, 1), demand.hour_of_day(k + c0), k + c0});
  }
  return out;
}

Scaler Scaler::fit(std::span<const double> training_values) {
  if (training_values.empty()) throw DataError("cannot fit a scaler on zero values");
  const auto [lo, hi] = std::minmax_element(training_values.begin(), training_values.end());
  Scaler s(*lo, *hi);
  if (s.degenerate()) {
    log_warn("training data is constant (" + std::to_string(*lo) +
             "); scaler maps everything to 0");
  }
  return s;
}

Scaler Scaler::fit(const DemandMatrix& training) {
  std::vector<double> values(training.counts().begin(), training.counts().end());
  return fit(values);
}

Tensor Scaler::scale(const Tensor& t) const {
  Tensor out = t;
  for (auto& v : out.values()) v = scale(v);
  return out;
}

Tensor Scaler::unscale(const Tensor& t) const {
  Tensor out = t;
  for (auto& v : out.values()) v = unscale(v);
  return out;
}

}  // namespace ddgf
