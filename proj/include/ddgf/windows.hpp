#pragma once

#include <span>
#include <vector>

#include "ddgf/demand.hpp"
#include "ddgf/tensor.hpp"

namespace ddgf {

struct WindowedSample {
  Tensor x;  // N x C0, columns are consecutive hours
  Tensor y;  // N x 1, the hour after x's last column
  int target_hour_of_day = 0;
  std::size_t target_column = 0;  // column of y in the source matrix
};

// Sample k has x = columns [k, k + c0) and y = column k + c0.
std::vector<WindowedSample> make_windows(const DemandMatrix& demand, std::size_t c0);

/// Global min-max scaler. Fitted on training values only; test values outside
/// the training range map outside [0, 1] and are not clipped.
class Scaler {
 public:
  Scaler() = default;
  Scaler(double min, double max) : min_(min), max_(max) {}

  static Scaler fit(std::span<const double> training_values);
  static Scaler fit(const DemandMatrix& training);

  double min() const { return min_; }
  double max() const { return max_; }
  bool degenerate() const { return !(max_ > min_); }

  double scale(double v) const { return degenerate() ? 0.0 : (v - min_) / (max_ - min_); }
  double unscale(double s) const { return degenerate() ? min_ : s * (max_ - min_) + min_; }
  Tensor scale(const Tensor& t) const;
  Tensor unscale(const Tensor& t) const;

 private:
  double min_ = 0.0;
  double max_ = 1.0;
};

}  // namespace ddgf
