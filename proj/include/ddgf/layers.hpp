#pragma once

#include <cstddef>
#include <utility>

#include "ddgf/autodiff.hpp"
#include "ddgf/tensor.hpp"

namespace ddgf {

/// Graph convolution with a trainable symmetric filter.
///
/// The filter is stored as its upper triangle (1 x n(n+1)/2, diagonal
/// included) and mirrored on materialization, so it is exactly symmetric no
/// matter how the parameters are updated.
struct DdgfLayer {
  std::size_t n = 0;
  Tensor theta;   // 1 x n(n+1)/2
  Tensor weight;  // in_width x out_width
  Tensor bias;    // 1 x out_width
  Activation activation = Activation::Relu;

  std::size_t in_width() const { return weight.rows(); }
  std::size_t out_width() const { return weight.cols(); }
  Tensor filter() const { return symmetric_from_upper(theta, n); }
};

/// Same rule with a frozen, pre-computed filter.
struct FixedGcnnLayer {
  Tensor filter;  // n x n
  Tensor weight;
  Tensor bias;
  Activation activation = Activation::Relu;
};

// sigma(A h W + b) where h stacks one n-row block per sample.
Var graph_conv(Var filter, Var h, Var weight, Var bias, Activation activation);

// Value-level forward for a single N x C_in input.
Tensor ddgf_forward(const DdgfLayer& layer, const Tensor& h);
Tensor fixed_gcnn_forward(const FixedGcnnLayer& layer, const Tensor& h);

struct LstmCellParams {
  // Input weights F x U, recurrent weights U x U, biases 1 x U; gate order
  // forget, input, output, candidate.
  Tensor w_f, w_i, w_o, w_g;
  Tensor r_f, r_i, r_o, r_g;
  Tensor b_f, b_i, b_o, b_g;

  std::size_t input_width() const { return w_f.rows(); }
  std::size_t hidden_width() const { return w_f.cols(); }
  void validate() const;
};

struct LstmCellVars {
  Var w_f, w_i, w_o, w_g;
  Var r_f, r_i, r_o, r_g;
  Var b_f, b_i, b_o, b_g;
};

// One step for a stack of independent rows: x is R x F, h and c are R x U.
std::pair<Var, Var> lstm_step(const LstmCellVars& cell, Var x, Var h, Var c);
std::pair<Tensor, Tensor> lstm_step(const LstmCellParams& cell, const Tensor& x, const Tensor& h,
                                    const Tensor& c);

}  // namespace ddgf
