#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "ddgf/baselines.hpp"
#include "ddgf/checkpoint.hpp"
#include "ddgf/error.hpp"
#include "ddgf/grad_check.hpp"
#include "ddgf/layers.hpp"
#include "ddgf/models.hpp"
#include "test_util.hpp"

namespace ddgf {
namespace {

using test::random_tensor;
using test::sigmoid;

std::vector<std::string> names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < n; ++j) out.push_back("s" + std::to_string(j));
  return out;
}

TrainedModel make_model(const ModelSpec& spec, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  TrainedModel m;
  m.spec = spec;
  m.params = init_parameters(spec, n, rng);
  m.frozen = frozen_tensors(spec, n, std::nullopt);
  m.stations = names(n);
  return m;
}

// Randomize every parameter, including biases and theta, away from the init.
void perturb(TrainedModel& m, Rng& rng, double scale = 0.5) {
  for (auto& [name, t] : m.params) t = random_tensor(t.rows(), t.cols(), rng, -scale, scale);
}

double act(Activation a, double v) {
  switch (a) {
    case Activation::Relu:
      return v > 0 ? v : 0.0;
    case Activation::Sigmoid:
      return sigmoid(v);
    case Activation::Tanh:
      return std::tanh(v);
    case Activation::Identity:
      return v;
  }
  return v;
}

// Theta laid out row by row over the upper triangle, diagonal included.
std::vector<std::vector<double>> loop_filter(const Tensor& theta, std::size_t n) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a[i][j] = a[j][i] = theta[k++];
  return a;
}

using Grid = std::vector<std::vector<double>>;

Grid loop_conv(const Grid& a, const Grid& h, const Tensor& w, const Tensor& b, Activation f) {
  const std::size_t n = h.size(), cin = w.rows(), cout = w.cols();
  Grid out(n, std::vector<double>(cout));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t o = 0; o < cout; ++o) {
      double s = b(0, o);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t c = 0; c < cin; ++c) s += a[i][j] * h[j][c] * w(c, o);
      out[i][o] = act(f, s);
    }
  return out;
}

Grid to_grid(const Tensor& t) {
  Grid g(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) g[i][j] = t(i, j);
  return g;
}

std::vector<double> loop_reg(const TrainedModel& m, const Tensor& x) {
  const std::size_t n = m.station_count();
  Grid h = to_grid(x);
  const std::size_t layers = m.spec.widths.size() - 1;
  for (std::size_t l = 1; l <= layers; ++l) {
    const std::string p = "layer" + std::to_string(l);
    h = loop_conv(loop_filter(m.params.at(p + ".theta"), n), h, m.params.at(p + ".weight"),
                  m.params.at(p + ".bias"), l == layers ? Activation::Identity : m.spec.hidden_activation);
  }
  std::vector<double> out;
  for (auto& row : h) out.push_back(row[0]);
  return out;
}

std::vector<double> loop_rec(const TrainedModel& m, const Tensor& x) {
  const std::size_t n = m.station_count(), u = m.spec.lstm_hidden;
  const auto& p = m.params;
  std::vector<double> result(n);
  std::vector<Grid> features;  // per lag, n x F
  for (std::size_t t = 0; t < m.spec.window; ++t) {
    Grid h(n, std::vector<double>(1));
    for (std::size_t j = 0; j < n; ++j) h[j][0] = x(j, t);
    for (std::size_t l = 1; l < m.spec.widths.size(); ++l) {
      const std::string q = "conv" + std::to_string(l);
      h = loop_conv(loop_filter(p.at(q + ".theta"), n), h, p.at(q + ".weight"), p.at(q + ".bias"),
                    m.spec.hidden_activation);
    }
    features.push_back(h);
  }
  auto gate = [&](const char* g, const std::vector<double>& in, const std::vector<double>& hid,
                  std::size_t k) {
    const std::string s(g);
    double z = p.at("lstm.b_" + s)(0, k);
    for (std::size_t c = 0; c < in.size(); ++c) z += in[c] * p.at("lstm.w_" + s)(c, k);
    for (std::size_t c = 0; c < u; ++c) z += hid[c] * p.at("lstm.r_" + s)(c, k);
    return z;
  };
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> h(u, 0.0), c(u, 0.0);
    for (std::size_t t = 0; t < m.spec.window; ++t) {
      std::vector<double> hn(u), cn(u);
      for (std::size_t k = 0; k < u; ++k) {
        const double f = sigmoid(gate("f", features[t][j], h, k));
        const double i = sigmoid(gate("i", features[t][j], h, k));
        const double o = sigmoid(gate("o", features[t][j], h, k));
        const double g = std::tanh(gate("g", features[t][j], h, k));
        cn[k] = f * c[k] + i * g;
        hn[k] = o * std::tanh(cn[k]);
      }
      h = hn;
      c = cn;
    }
    double y = p.at("head.bias")(0, 0);
    for (std::size_t k = 0; k < u; ++k) y += h[k] * p.at("head.weight")(k, 0);
    result[j] = y;
  }
  return result;
}

ModelSpec reg_spec(std::size_t c0, std::vector<std::size_t> widths) {
  ModelSpec s;
  s.architecture = Architecture::GcnnRegDdgf;
  s.window = c0;
  s.widths = std::move(widths);
  return s;
}

ModelSpec rec_spec(std::size_t c0, std::vector<std::size_t> widths, std::size_t u) {
  ModelSpec s;
  s.architecture = Architecture::GcnnRecDdgf;
  s.window = c0;
  s.widths = std::move(widths);
  s.lstm_hidden = u;
  return s;
}

TEST(DdgfLayer, IdentityFilterReducesToDense) {
  Rng rng(1);
  DdgfLayer layer{3, Tensor(1, 6), random_tensor(2, 4, rng), random_tensor(1, 4, rng),
                  Activation::Identity};
  layer.theta = upper_from_symmetric(Tensor::identity(3));
  const Tensor h = random_tensor(3, 2, rng);
  Tensor expected = matmul(h, layer.weight);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) expected(i, j) += layer.bias(0, j);
  EXPECT_LE(max_abs_diff(ddgf_forward(layer, h), expected), 1e-15);
}

TEST(DdgfLayer, TwoStationHandExample) {
  DdgfLayer layer{2, Tensor::from_rows({{0.5, 0.5, 0.5}}), Tensor::from_rows({{1.0}}), Tensor(1, 1),
                  Activation::Identity};
  EXPECT_EQ(ddgf_forward(layer, Tensor::from_rows({{2}, {4}})), Tensor::from_rows({{3}, {3}}));
}

TEST(DdgfLayer, ThetaGradientMatchesFiniteDifferences) {
  Rng rng(2);
  std::vector<Tensor> params{random_tensor(1, 10, rng), random_tensor(3, 2, rng), random_tensor(1, 2, rng)};
  const Tensor h = random_tensor(4, 3, rng);
  auto loss = [&](Tape& tape, const std::vector<Var>& v) {
    Var out = graph_conv(ad::symmetric_from_upper(v[0], 4), tape.leaf(h), v[1], v[2], Activation::Tanh);
    return ad::sum(ad::hadamard(out, out));
  };
  Tape tape;
  std::vector<Var> vars;
  for (auto& p : params) vars.push_back(tape.leaf(p));
  tape.backward(loss(tape, vars));
  auto numeric = finite_diff_grad(
      [&](const std::vector<Tensor>& ps) {
        Tape t;
        std::vector<Var> vs;
        for (auto& p : ps) vs.push_back(t.leaf(p));
        return loss(t, vs).value()(0, 0);
      },
      params);
  for (std::size_t k = 0; k < params.size(); ++k) {
    EXPECT_LE(max_relative_error(vars[k].grad(), numeric[k]), 1e-6) << "param " << k;
  }
}

TEST(GcnnReg, ProjectionFilterOnSingleLayer) {
  // Â = 1/n * ones, W = [1], b = 0: every output is the station mean.
  TrainedModel m = make_model(reg_spec(1, {1, 1}), 4, 3);
  m.params["layer1.theta"] = Tensor(1, 10);
  m.params["layer1.theta"].fill(0.25);
  m.params["layer1.weight"] = Tensor::from_rows({{1.0}});
  const Tensor out = gcnn_reg_forward(m, Tensor::from_rows({{1}, {2}, {3}, {6}}));
  for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(out(j, 0), 3.0);
}

TEST(GcnnReg, ZeroNetworkGivesZero) {
  TrainedModel m = make_model(reg_spec(3, {3, 4, 1}), 3, 4);
  for (auto& [name, t] : m.params) t.fill(0.0);
  Rng rng(5);
  EXPECT_EQ(gcnn_reg_forward(m, random_tensor(3, 3, rng)), Tensor(3, 1));
}

TEST(GcnnReg, MatchesLoopOracle) {
  Rng rng(6);
  for (Activation a : {Activation::Relu, Activation::Sigmoid, Activation::Tanh}) {
    ModelSpec spec = reg_spec(2, {2, 5, 3, 1});
    spec.hidden_activation = a;
    TrainedModel m = make_model(spec, 3, 7);
    perturb(m, rng);
    const Tensor x = random_tensor(3, 2, rng, 0.0, 1.0);
    const Tensor got = gcnn_reg_forward(m, x);
    const auto want = loop_reg(m, x);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(got(j, 0), want[j], 1e-10) << to_string(a);
  }
}

TEST(GcnnReg, StackedBatchEqualsPerSampleForward) {
  Rng rng(8);
  TrainedModel m = make_model(reg_spec(3, {3, 4, 1}), 4, 9);
  perturb(m, rng);
  const Tensor a = random_tensor(4, 3, rng), b = random_tensor(4, 3, rng);
  Tensor stacked(8, 3);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t c = 0; c < 3; ++c) {
      stacked(i, c) = a(i, c);
      stacked(i + 4, c) = b(i, c);
    }
  const Tensor out = gcnn_reg_forward(m, stacked), oa = gcnn_reg_forward(m, a), ob = gcnn_reg_forward(m, b);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(out(i, 0), oa(i, 0));
    EXPECT_EQ(out(i + 4, 0), ob(i, 0));
  }
}

TEST(GcnnReg, PermutationEquivariant) {
  Rng rng(10);
  const std::size_t n = 5;
  TrainedModel m = make_model(reg_spec(3, {3, 4, 1}), n, 11);
  perturb(m, rng);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  TrainedModel pm = m;
  for (const char* p : {"layer1.theta", "layer2.theta"}) {
    const Tensor a = symmetric_from_upper(m.params.at(p), n);
    Tensor b(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b(i, j) = a(perm[i], perm[j]);
    pm.params[p] = upper_from_symmetric(b);
  }
  const Tensor x = random_tensor(n, 3, rng);
  Tensor px(n, 3);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < 3; ++c) px(i, c) = x(perm[i], c);
  const Tensor y = gcnn_reg_forward(m, x), py = gcnn_reg_forward(pm, px);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(py(i, 0), y(perm[i], 0), 1e-12);
}

TEST(GcnnRec, MatchesLoopOracle) {
  Rng rng(12);
  TrainedModel m = make_model(rec_spec(3, {1, 3}, 4), 2, 13);
  perturb(m, rng);
  const Tensor x = random_tensor(2, 3, rng, 0.0, 1.0);
  const Tensor got = gcnn_rec_forward(m, x);
  const auto want = loop_rec(m, x);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(got(j, 0), want[j], 1e-10);
}

TEST(GcnnRec, SingleLagMatchesLoopOracle) {
  Rng rng(14);
  TrainedModel m = make_model(rec_spec(1, {1, 2, 3}, 2), 3, 15);
  perturb(m, rng);
  const Tensor x = random_tensor(3, 1, rng, 0.0, 1.0);
  const Tensor got = gcnn_rec_forward(m, x);
  const auto want = loop_rec(m, x);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(got(j, 0), want[j], 1e-10);
}

TEST(GcnnRec, ZeroLstmGivesHeadBias) {
  Rng rng(16);
  TrainedModel m = make_model(rec_spec(4, {1, 3}, 3), 3, 17);
  perturb(m, rng);
  for (auto& [name, t] : m.params)
    if (name.starts_with("lstm.")) t.fill(0.0);
  m.params["head.bias"] = Tensor::from_rows({{0.7}});
  // h stays o * tanh(c) with c = 0.5 * tanh(0) = 0, so the head sees zeros.
  const Tensor out = gcnn_rec_forward(m, random_tensor(3, 4, rng));
  for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(out(j, 0), 0.7);
}

LstmCellParams random_cell(std::size_t f, std::size_t u, Rng& rng) {
  LstmCellParams p;
  for (Tensor* w : {&p.w_f, &p.w_i, &p.w_o, &p.w_g}) *w = random_tensor(f, u, rng);
  for (Tensor* r : {&p.r_f, &p.r_i, &p.r_o, &p.r_g}) *r = random_tensor(u, u, rng);
  for (Tensor* b : {&p.b_f, &p.b_i, &p.b_o, &p.b_g}) *b = random_tensor(1, u, rng);
  return p;
}

TEST(LstmStep, ZeroCellStaysZero) {
  LstmCellParams p;
  for (Tensor* w : {&p.w_f, &p.w_i, &p.w_o, &p.w_g}) *w = Tensor(2, 3);
  for (Tensor* r : {&p.r_f, &p.r_i, &p.r_o, &p.r_g}) *r = Tensor(3, 3);
  for (Tensor* b : {&p.b_f, &p.b_i, &p.b_o, &p.b_g}) *b = Tensor(1, 3);
  Rng rng(18);
  const auto [h, c] = lstm_step(p, random_tensor(4, 2, rng), Tensor(4, 3), Tensor(4, 3));
  EXPECT_EQ(h, Tensor(4, 3));
  EXPECT_EQ(c, Tensor(4, 3));
}

TEST(LstmStep, SaturatedForgetGateKeepsCell) {
  Rng rng(19);
  LstmCellParams p = random_cell(2, 3, rng);
  p.b_f.fill(20.0);
  for (Tensor* w : {&p.w_f, &p.r_f}) w->fill(0.0);
  const Tensor x = random_tensor(2, 2, rng), h = random_tensor(2, 3, rng), c = random_tensor(2, 3, rng);
  const auto [h2, c2] = lstm_step(p, x, h, c);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t k = 0; k < 3; ++k) {
      double zi = p.b_i(0, k), zg = p.b_g(0, k);
      for (std::size_t a = 0; a < 2; ++a) {
        zi += x(r, a) * p.w_i(a, k);
        zg += x(r, a) * p.w_g(a, k);
      }
      for (std::size_t a = 0; a < 3; ++a) {
        zi += h(r, a) * p.r_i(a, k);
        zg += h(r, a) * p.r_g(a, k);
      }
      EXPECT_NEAR(c2(r, k), c(r, k) + sigmoid(zi) * std::tanh(zg), 1e-8);
    }
}

TEST(LstmStep, ScalarHandComputation) {
  LstmCellParams p;
  p.w_f = Tensor::from_rows({{0.5}});
  p.w_i = Tensor::from_rows({{-0.3}});
  p.w_o = Tensor::from_rows({{0.8}});
  p.w_g = Tensor::from_rows({{1.2}});
  p.r_f = Tensor::from_rows({{0.1}});
  p.r_i = Tensor::from_rows({{0.2}});
  p.r_o = Tensor::from_rows({{-0.4}});
  p.r_g = Tensor::from_rows({{0.3}});
  p.b_f = Tensor::from_rows({{0.05}});
  p.b_i = Tensor::from_rows({{-0.1}});
  p.b_o = Tensor::from_rows({{0.0}});
  p.b_g = Tensor::from_rows({{0.2}});
  const double x = 0.7, h = -0.2, c = 0.4;
  const double f = sigmoid(0.5 * x + 0.1 * h + 0.05), i = sigmoid(-0.3 * x + 0.2 * h - 0.1);
  const double o = sigmoid(0.8 * x - 0.4 * h), g = std::tanh(1.2 * x + 0.3 * h + 0.2);
  const double c2 = f * c + i * g, h2 = o * std::tanh(c2);
  const auto [hh, cc] = lstm_step(p, Tensor::from_rows({{x}}), Tensor::from_rows({{h}}),
                                  Tensor::from_rows({{c}}));
  EXPECT_NEAR(cc(0, 0), c2, 1e-12);
  EXPECT_NEAR(hh(0, 0), h2, 1e-12);
}

TEST(HistoricalAverage, ConstantSeries) {
  const DemandMatrix d({"a"}, 0, 48, std::vector<std::uint32_t>(48, 5));
  const auto ha = ha_fit(d);
  for (int h = 0; h < 24; ++h) EXPECT_EQ(ha_predict(ha, h, "a"), 5.0);
}

TEST(HistoricalAverage, HourOfDayMeanAndFallback) {
  // Three days of 12 hours each starting at midnight: hours 0..11 observed only.
  std::vector<std::uint32_t> counts;
  std::vector<std::uint32_t> eight{3, 6, 12};
  for (int day = 0; day < 3; ++day) {
    for (int h = 0; h < 24; ++h) counts.push_back(h == 8 ? eight[static_cast<std::size_t>(day)] : 1);
  }
  const DemandMatrix d({"a"}, 0, 72, counts);
  const auto ha = ha_fit(d);
  EXPECT_DOUBLE_EQ(ha_predict(ha, 8, "a"), 7.0);
  EXPECT_DOUBLE_EQ(ha_predict(ha, 9, "a"), 1.0);

  const DemandMatrix half({"a"}, 0, 12, std::vector<std::uint32_t>{0, 0, 0, 0, 0, 0, 0, 0, 6, 0, 0, 6});
  const auto h2 = ha_fit(half);
  EXPECT_DOUBLE_EQ(ha_predict(h2, 20, "a"), 1.0);
  EXPECT_THROW(ha_predict(h2, 3, "zz"), DataError);
}

TEST(Lasso, SoftThreshold) {
  EXPECT_EQ(soft_threshold(3.0, 1.0), 2.0);
  EXPECT_EQ(soft_threshold(-0.5, 1.0), 0.0);
  EXPECT_EQ(soft_threshold(-3.0, 1.0), -2.0);
}

TEST(Lasso, ZeroPenaltyRecoversLinearRule) {
  Rng rng(20);
  const std::size_t rows = 200;
  Tensor features(rows, 2);
  std::vector<double> y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    features(r, 0) = rng.uniform();
    features(r, 1) = rng.uniform();
    y[r] = 2.0 * features(r, 0) - features(r, 1);
  }
  const auto fit = lasso_regression(features, y, 0.0);
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.coef[0], 2.0, 1e-4);
  EXPECT_NEAR(fit.coef[1], -1.0, 1e-4);
  EXPECT_NEAR(fit.intercept, 0.0, 1e-4);
}

TEST(Lasso, HugePenaltyGivesMeanPredictor) {
  Rng rng(21);
  const Tensor features = random_tensor(50, 3, rng);
  std::vector<double> y(50);
  for (auto& v : y) v = rng.uniform(0, 4);
  const auto fit = lasso_regression(features, y, 1e6);
  for (double c : fit.coef) EXPECT_EQ(c, 0.0);
  EXPECT_NEAR(fit.intercept, std::accumulate(y.begin(), y.end(), 0.0) / 50.0, 1e-12);
}

TEST(Lasso, FeatureLayout) {
  const Tensor x = Tensor::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  EXPECT_EQ(lasso_features(x, 1), (std::vector<double>{4, 5, 6, 3, 9}));
}

TEST(Predict, UnscalesForwardOutput) {
  TrainedModel m = make_model(reg_spec(1, {1, 1}), 1, 22);
  m.params["layer1.theta"] = Tensor::from_rows({{1.0}});
  m.params["layer1.weight"] = Tensor::from_rows({{0.0}});
  m.params["layer1.bias"] = Tensor::from_rows({{0.5}});
  m.scaler = Scaler(0.0, 10.0);
  EXPECT_DOUBLE_EQ(predict(m, Tensor::from_rows({{3.0}}), 0)(0, 0), 5.0);
  EXPECT_THROW(predict(m, Tensor(2, 1), 0), DataError);
}

TEST(Predict, FixedIdentityEqualsMlp) {
  ModelSpec mlp = reg_spec(3, {3, 4, 1});
  mlp.architecture = Architecture::Mlp;
  ModelSpec fixed = mlp;
  fixed.architecture = Architecture::GcnnFixed;
  fixed.graph = GraphKind::Identity;
  const TrainedModel a = make_model(mlp, 4, 23), b = make_model(fixed, 4, 23);
  ASSERT_EQ(a.params, b.params);
  Rng rng(24);
  const Tensor x = random_tensor(4, 3, rng);
  EXPECT_EQ(gcnn_reg_forward(a, x), gcnn_reg_forward(b, x));
}

TEST(Forward, EveryParameterReceivesGradient) {
  Rng rng(25);
  for (const ModelSpec& spec : {reg_spec(3, {3, 4, 1}), rec_spec(3, {1, 2}, 3)}) {
    TrainedModel m = make_model(spec, 3, 26);
    perturb(m, rng);
    Tape tape;
    const VarMap vars = bind_tensors(tape, m.params, m.frozen);
    Var out = forward(spec, vars, tape.leaf(random_tensor(6, 3, rng)), 3);
    tape.backward(ad::mse(out, tape.leaf(random_tensor(6, 1, rng))));
    for (const auto& [name, v] : vars) {
      if (!m.params.contains(name)) continue;
      EXPECT_GT(frobenius_norm(v.grad()), 0.0) << spec.display_name() << " " << name;
    }
  }
}

TEST(Forward, InitIsDeterministicPerSeed) {
  const ModelSpec spec = rec_spec(3, {1, 2}, 3);
  EXPECT_EQ(make_model(spec, 4, 27).params, make_model(spec, 4, 27).params);
  EXPECT_NE(make_model(spec, 4, 27).params, make_model(spec, 4, 28).params);
}

TEST(Forward, RejectsBadShapes) {
  const TrainedModel m = make_model(reg_spec(3, {3, 1}), 3, 29);
  EXPECT_THROW(gcnn_reg_forward(m, Tensor(3, 2)), ShapeError);
  EXPECT_THROW(gcnn_rec_forward(m, Tensor(3, 3)), ContractError);
}

TEST(Checkpoint, RoundTripAndFilterExport) {
  Rng rng(30);
  TrainedModel m = make_model(reg_spec(3, {3, 4, 1}), 3, 31);
  perturb(m, rng);
  m.scaler = Scaler(1.0, 9.0);
  const auto dir = std::filesystem::temp_directory_path() / "ddgf_mdl_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "m.mdl").string();
  save_model(path, m);
  const TrainedModel back = load_model(path);
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(back.stations, m.stations);
  EXPECT_EQ(back.scaler.min(), 1.0);
  EXPECT_EQ(back.scaler.max(), 9.0);
  const Tensor x = random_tensor(3, 3, rng);
  EXPECT_EQ(predict(back, x, 4), predict(m, x, 4));

  const GraphFilter f = export_filter(m, 2);
  EXPECT_EQ(f.values, symmetric_from_upper(m.params.at("layer2.theta"), 3));
  EXPECT_EQ(f.stations, m.stations);
  EXPECT_THROW(export_filter(m, 3), UserError);
}

}  // namespace
}  // namespace ddgf
