#include "ddgf/autodiff.hpp"

#include <cmath>
#include <string>

#include "ddgf/error.hpp"

namespace ddgf {

double activate(Activation kind, double x) {
  switch (kind) {
    case Activation::Relu:
      return x > 0.0 ? x : 0.0;
    case Activation::Sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case Activation::Tanh:
      return std::tanh(x);
    case Activation::Identity:
      return x;
  }
  return x;
}

double activate_derivative(Activation kind, double x) {
  switch (kind) {
    case Activation::Relu:
      return x > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case Activation::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::Identity:
      return 1.0;
  }
  return 1.0;
}

std::string_view to_string(Activation kind) {
  switch (kind) {
    case Activation::Relu:
      return "relu";
    case Activation::Sigmoid:
      return "sigmoid";
    case Activation::Tanh:
      return "tanh";
    case Activation::Identity:
      return "identity";
  }
  return "identity";
}

Activation activation_from_string(std::string_view name) {
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

const Tensor& Var::value() const { return tape->value(*this); }
const Tensor& Var::grad() const { return tape->grad(*this); }

Var Tape::leaf(Tensor value) { return push(OpKind::Leaf, std::move(value), {}, nullptr); }

Var Tape::push(OpKind kind, Tensor value, std::vector<std::size_t> inputs, Backprop backprop) {
  if (!value.all_finite()) {
    throw NumericError("non-finite value produced by tape node " +
                       std::to_string(nodes_.size()) + " " + value.shape_string());
  }
  for (std::size_t in : inputs) {
    if (in >= nodes_.size()) throw ContractError("tape input refers to a later node");
  }
  Tensor grad(value.rows(), value.cols());
  nodes_.push_back({kind, std::move(value), std::move(grad), std::move(inputs), std::move(backprop)});
  return Var{this, nodes_.size() - 1};
}

void Tape::backward(Var loss) {
  if (loss.tape != this || loss.id >= nodes_.size()) {
    throw ContractError("backward: loss does not belong to this tape");
  }
  const Tensor& lv = nodes_[loss.id].value;
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ContractError("backward: loss must be 1x1, got " + lv.shape_string());
  }
  for (auto& node : nodes_) node.grad.fill(0.0);

  std::vector<char> reachable(loss.id + 1, 0);
  reachable[loss.id] = 1;
  nodes_[loss.id].grad[0] = 1.0;
  for (std::size_t k = loss.id + 1; k-- > 0;) {
    if (!reachable[k]) continue;
    for (std::size_t in : nodes_[k].inputs) reachable[in] = 1;
    if (nodes_[k].backprop) nodes_[k].backprop(*this, k);
  }
}

namespace ad {

namespace {

Tape& tape_of(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) throw ContractError("operands live on different tapes");
  return *a.tape;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
}

void accumulate(Tensor& dst, const Tensor& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  Tensor out = ddgf::matmul(a.value(), b.value());
  const std::size_t ia = a.id, ib = b.id;
  return t.push(OpKind::Matmul, std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad_of(self);
    accumulate(tp.grad_mut(ia), ddgf::matmul(g, transpose(tp.value_of(ib))));
    accumulate(tp.grad_mut(ib), ddgf::matmul(transpose(tp.value_of(ia)), g));
  });
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a, b);
  require_same_shape(a.value(), b.value(), "add");
  const std::size_t ia = a.id, ib = b.id;
  return t.push(OpKind::Add, a.value() + b.value(), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    accumulate(tp.grad_mut(ia), tp.grad_of(self));
    accumulate(tp.grad_mut(ib), tp.grad_of(self));
  });
}

Var add_row(Var x, Var row) {
  Tape& t = tape_of(x, row);
  const Tensor& xv = x.value();
  const Tensor& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != xv.cols()) {
    throw ShapeError("add_row: expected 1x" + std::to_string(xv.cols()) + " row, got " +
                     rv.shape_string());
  }
  Tensor out = xv;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += rv(0, j);
  const std::size_t ix = x.id, ir = row.id;
  return t.push(OpKind::Add, std::move(out), {ix, ir}, [ix, ir](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad_of(self);
    accumulate(tp.grad_mut(ix), g);
    Tensor& gr = tp.grad_mut(ir);
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) gr(0, j) += g(i, j);
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  const std::size_t ia = a.id, ib = b.id;
  return t.push(OpKind::Add, a.value() - b.value(), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad_of(self);
    accumulate(tp.grad_mut(ia), g);
    Tensor& gb = tp.grad_mut(ib);
    for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
  });
}

Var hadamard(Var a, Var b) {
  Tape& t = tape_of(a, b);
  require_same_shape(a.value(), b.value(), "hadamard");
  const std::size_t ia = a.id, ib = b.id;
  return t.push(OpKind::Hadamard, ddgf::hadamard(a.value(), b.value()), {ia, ib},
                [ia, ib](Tape& tp, std::size_t self) {
                  const Tensor& g = tp.grad_of(self);
                  const Tensor& av = tp.value_of(ia);
                  const Tensor& bv = tp.value_of(ib);
                  Tensor& ga = tp.grad_mut(ia);
                  for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
                  Tensor& gb = tp.grad_mut(ib);
                  for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
                });
}

Var elementwise(Activation kind, Var x) {
  Tape& t = *x.tape;
  const Tensor& xv = x.value();
  Tensor out(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = activate(kind, xv[i]);
  const std::size_t ix = x.id;
  return t.push(OpKind::Elementwise, std::move(out), {ix}, [ix, kind](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad_of(self);
    const Tensor& xv = tp.value_of(ix);
    Tensor& gx = tp.grad_mut(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * activate_derivative(kind, xv[i]);
  });
}

Var sum(Var x) {
  Tape& t = *x.tape;
  const std::size_t ix = x.id;
  return t.push(OpKind::Sum, Tensor(1, 1, ddgf::sum(x.value())), {ix},
                [ix](Tape& tp, std::size_t self) {
                  const double g = tp.grad_of(self)[0];
                  for (auto& v : tp.grad_mut(ix).values()) v += g;
                });
}

Var mse(Var prediction, Var target) {
  Tape& t = tape_of(prediction, target);
  const Tensor& p = prediction.value();
  const Tensor& y = target.value();
  require_same_shape(p, y, "mse");
  if (p.empty()) throw ShapeError("mse: empty operands");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - y[i];
    s += d * d;
  }
  const double n = static_cast<double>(p.size());
  const std::size_t ip = prediction.id, iy = target.id;
  return t.push(OpKind::Mse, Tensor(1, 1, s / n), {ip, iy}, [ip, iy, n](Tape& tp, std::size_t self) {
    const double g = tp.grad_of(self)[0];
    const Tensor& p = tp.value_of(ip);
    const Tensor& y = tp.value_of(iy);
    Tensor& gp = tp.grad_mut(ip);
    Tensor& gy = tp.grad_mut(iy);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = 2.0 * (p[i] - y[i]) / n * g;
      gp[i] += d;
      gy[i] -= d;
    }
  });
}

Var slice_cols(Var x, std::size_t begin, std::size_t count) {
  Tape& t = *x.tape;
  const Tensor& xv = x.value();
  if (begin + count > xv.cols()) {
    throw ShapeError("slice_cols: [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                     ") out of range for " + xv.shape_string());
  }
  Tensor out(xv.rows(), count);
  for (std::size_t i = 0; i < xv.rows(); ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = xv(i, begin + j);
  const std::size_t ix = x.id;
  return t.push(OpKind::Slice, std::move(out), {ix}, [ix, begin](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad_of(self);
    Tensor& gx = tp.grad_mut(ix);
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) gx(i, begin + j) += g(i, j);
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no operands");
  Tape& t = *parts.front().tape;
  const std::size_t rows = parts.front().value().rows();
  std::size_t cols = 0;
  std::vector<std::size_t> ids;
  for (const Var& p : parts) {
    if (p.tape != &t) throw ContractError("concat_cols: operands live on different tapes");
    if (p.value().rows() != rows) throw ShapeError("concat_cols: row counts differ");
    cols += p.value().cols();
    ids.push_back(p.id);
  }
  Tensor out(rows, cols);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < v.cols(); ++j) out(i, offset + j) = v(i, j);
    offset += v.cols();
  }
  return t.push(OpKind::Concat, std::move(out), ids, [ids](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad_of(self);
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      Tensor& gi = tp.grad_mut(id);
      for (std::size_t i = 0; i < gi.rows(); ++i)
        for (std::size_t j = 0; j < gi.cols(); ++j) gi(i, j) += g(i, offset + j);
      offset += gi.cols();
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no operands");
  Tape& t = *parts.front().tape;
  const std::size_t cols = parts.front().value().cols();
  std::size_t rows = 0;
  std::vector<std::size_t> ids;
  for (const Var& p : parts) {
    if (p.tape != &t) throw ContractError("concat_rows: operands live on different tapes");
    if (p.value().cols() != cols) throw ShapeError("concat_rows: column counts differ");
    rows += p.value().rows();
    ids.push_back(p.id);
  }
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const Var& p : parts) {
    const auto v = p.value().values();
    data.insert(data.end(), v.begin(), v.end());
  }
  return t.push(OpKind::Concat, Tensor(rows, cols, std::move(data)), ids,
                [ids](Tape& tp, std::size_t self) {
                  const Tensor& g = tp.grad_of(self);
                  std::size_t offset = 0;
                  for (std::size_t id : ids) {
                    Tensor& gi = tp.grad_mut(id);
                    for (std::size_t k = 0; k < gi.size(); ++k) gi[k] += g[offset + k];
                    offset += gi.size();
                  }
                });
}

Var block_matmul(Var a, Var x) {
  Tape& t = tape_of(a, x);
  const Tensor& av = a.value();
  const Tensor& xv = x.value();
  const std::size_t n = av.rows();
  if (av.cols() != n || n == 0 || xv.rows() % n != 0) {
    throw ShapeError("block_matmul: " + av.shape_string() + " cannot act on blocks of " +
                     xv.shape_string());
  }
  const std::size_t blocks = xv.rows() / n;
  const std::size_t c = xv.cols();
  Tensor out(xv.rows(), c);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t base = b * n;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t p = 0; p < n; ++p) {
        const double w = av(i, p);
        for (std::size_t j = 0; j < c; ++j) out(base + i, j) += w * xv(base + p, j);
      }
  }
  const std::size_t ia = a.id, ix = x.id;
  return t.push(OpKind::Matmul, std::move(out), {ia, ix},
                [ia, ix, n, blocks, c](Tape& tp, std::size_t self) {
                  const Tensor& g = tp.grad_of(self);
                  const Tensor& av = tp.value_of(ia);
                  const Tensor& xv = tp.value_of(ix);
                  Tensor& ga = tp.grad_mut(ia);
                  Tensor& gx = tp.grad_mut(ix);
                  for (std::size_t b = 0; b < blocks; ++b) {
                    const std::size_t base = b * n;
                    for (std::size_t i = 0; i < n; ++i)
                      for (std::size_t p = 0; p < n; ++p) {
                        double acc = 0.0;
                        for (std::size_t j = 0; j < c; ++j) acc += g(base + i, j) * xv(base + p, j);
                        ga(i, p) += acc;
                        const double w = av(i, p);
                        for (std::size_t j = 0; j < c; ++j) gx(base + p, j) += w * g(base + i, j);
                      }
                  }
                });
}

Var symmetric_from_upper(Var theta, std::size_t n) {
  Tape& t = *theta.tape;
  const std::size_t it = theta.id;
  return t.push(OpKind::Symmetric, ddgf::symmetric_from_upper(theta.value(), n), {it},
                [it, n](Tape& tp, std::size_t self) {
                  const Tensor& g = tp.grad_of(self);
                  Tensor& gt = tp.grad_mut(it);
                  std::size_t k = 0;
                  for (std::size_t i = 0; i < n; ++i) {
                    gt[k++] += g(i, i);
                    for (std::size_t j = i + 1; j < n; ++j) gt[k++] += g(i, j) + g(j, i);
                  }
                });
}

}  // namespace ad

std::size_t upper_triangle_size(std::size_t n) { return n * (n + 1) / 2; }

Tensor symmetric_from_upper(const Tensor& theta, std::size_t n) {
  if (theta.rows() != 1 || theta.cols() != upper_triangle_size(n)) {
    throw ShapeError("symmetric_from_upper: expected 1x" + std::to_string(upper_triangle_size(n)) +
                     ", got " + theta.shape_string());
  }
  Tensor out(n, n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = theta[k++];
    for (std::size_t j = i + 1; j < n; ++j) {
      out(i, j) = theta[k];
      out(j, i) = theta[k];
      ++k;
    }
  }
  return out;
}

Tensor upper_from_symmetric(const Tensor& a) {
  if (a.rows() != a.cols()) throw ShapeError("upper_from_symmetric: not square " + a.shape_string());
  const std::size_t n = a.rows();
  Tensor theta(1, upper_triangle_size(n));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) theta[k++] = a(i, j);
  return theta;
}

}  // namespace ddgf
