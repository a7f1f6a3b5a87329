#include "ddgf/layers.hpp"

#include <string>

#include "ddgf/error.hpp"

namespace ddgf {

Var graph_conv(Var filter, Var h, Var weight, Var bias, Activation activation) {
  Var mixed = ad::block_matmul(filter, h);
  Var projected = ad::add_row(ad::matmul(mixed, weight), bias);
  return ad::elementwise(activation, projected);
}

Tensor ddgf_forward(const DdgfLayer& layer, const Tensor& h) {
  if (h.rows() != layer.n) {
    throw ShapeError("ddgf_forward: input has " + std::to_string(h.rows()) + " rows, layer has " +
                     std::to_string(layer.n) + " stations");
  }
  Tape tape;
  Var filter = ad::symmetric_from_upper(tape.leaf(layer.theta), layer.n);
  return graph_conv(filter, tape.leaf(h), tape.leaf(layer.weight), tape.leaf(layer.bias),
                    layer.activation)
      .value();
}

Tensor fixed_gcnn_forward(const FixedGcnnLayer& layer, const Tensor& h) {
  if (h.rows() != layer.filter.rows()) {
    throw ShapeError("fixed_gcnn_forward: input " + h.shape_string() + " vs filter " +
                     layer.filter.shape_string());
  }
  Tape tape;
  return graph_conv(tape.leaf(layer.filter), tape.leaf(h), tape.leaf(layer.weight),
                    tape.leaf(layer.bias), layer.activation)
      .value();
}

void LstmCellParams::validate() const {
  const std::size_t f = input_width(), u = hidden_width();
  for (const Tensor* w : {&w_f, &w_i, &w_o, &w_g}) {
    if (w->rows() != f || w->cols() != u) throw ShapeError("lstm input weight shape " + w->shape_string());
  }
  for (const Tensor* r : {&r_f, &r_i, &r_o, &r_g}) {
    if (r->rows() != u || r->cols() != u) throw ShapeError("lstm recurrent weight shape " + r->shape_string());
  }
  for (const Tensor* b : {&b_f, &b_i, &b_o, &b_g}) {
    if (b->rows() != 1 || b->cols() != u) throw ShapeError("lstm bias shape " + b->shape_string());
  }
}

std::pair<Var, Var> lstm_step(const LstmCellVars& cell, Var x, Var h, Var c) {
  auto gate = [&](Var w, Var r, Var b, Activation act) {
    return ad::elementwise(act, ad::add_row(ad::add(ad::matmul(x, w), ad::matmul(h, r)), b));
  };
  Var f = gate(cell.w_f, cell.r_f, cell.b_f, Activation::Sigmoid);
  Var i = gate(cell.w_i, cell.r_i, cell.b_i, Activation::Sigmoid);
  Var o = gate(cell.w_o, cell.r_o, cell.b_o, Activation::Sigmoid);
  Var g = gate(cell.w_g, cell.r_g, cell.b_g, Activation::Tanh);
  Var c_next = ad::add(ad::hadamard(f, c), ad::hadamard(i, g));
  Var h_next = ad::hadamard(o, ad::elementwise(Activation::Tanh, c_next));
  return {h_next, c_next};
}

std::pair<Tensor, Tensor> lstm_step(const LstmCellParams& cell, const Tensor& x, const Tensor& h,
                                    const Tensor& c) {
  cell.validate();
  Tape tape;
  LstmCellVars v{tape.leaf(cell.w_f), tape.leaf(cell.w_i), tape.leaf(cell.w_o), tape.leaf(cell.w_g),
                 tape.leaf(cell.r_f), tape.leaf(cell.r_i), tape.leaf(cell.r_o), tape.leaf(cell.r_g),
                 tape.leaf(cell.b_f), tape.leaf(cell.b_i), tape.leaf(cell.b_o), tape.leaf(cell.b_g)};
  auto [h_next, c_next] = lstm_step(v, tape.leaf(x), tape.leaf(h), tape.leaf(c));
  return {h_next.value(), c_next.value()};
}

}  // namespace ddgf
