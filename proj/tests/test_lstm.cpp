#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "figet/lstm.hpp"

using namespace figet;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Scalar LSTM cell written out gate by gate.
struct ScalarCell {
  // Per gate: weight on input, weight on previous output, bias.
  double wi[3], wf[3], wo[3], wg[3];

  std::pair<double, double> step(double u, double h, double s) const {
    const double i = sig(wi[0] * u + wi[1] * h + wi[2]);
    const double f = sig(wf[0] * u + wf[1] * h + wf[2]);
    const double o = sig(wo[0] * u + wo[1] * h + wo[2]);
    const double g = std::tanh(wg[0] * u + wg[1] * h + wg[2]);
    const double s_new = f * s + i * g;
    return {o * std::tanh(s_new), s_new};
  }
};

LstmWeights from_scalar(const ScalarCell& c) {
  LstmWeights w(1, 1);
  const double* gates[4] = {c.wi, c.wf, c.wo, c.wg};
  for (std::size_t g = 0; g < 4; ++g) {
    w.weight[g].value(0, 0) = gates[g][0];
    w.weight[g].value(0, 1) = gates[g][1];
    w.bias[g].value[0] = gates[g][2];
  }
  return w;
}

}  // namespace

TEST(LstmCell, AllZeroGivesZeroOutput) {
  LstmWeights w(3, 2);
  auto [h, s] = lstm_cell_step(Tensor::vector(3), Tensor::vector(2), Tensor::vector(2), w);
  EXPECT_EQ(h, Tensor::vector(2));
  EXPECT_EQ(s, Tensor::vector(2));
}

TEST(LstmCell, OutputsBoundedForRandomWeights) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    LstmWeights w(4, 3);
    w.initialize(rng, 3.0);
    Tensor u = Tensor::vector(4), h = Tensor::vector(3), s = Tensor::vector(3);
    fill_uniform(u, rng, 5.0);
    fill_uniform(h, rng, 1.0);
    fill_uniform(s, rng, 5.0);
    auto [h2, s2] = lstm_cell_step(u, h, s, w);
    for (double v : h2.span()) {
      ASSERT_GT(v, -1.0);
      ASSERT_LT(v, 1.0);
    }
  }
}

TEST(LstmCell, MatchesHandEvaluatedGates) {
  const ScalarCell cell{{0.5, -0.3, 0.1}, {0.2, 0.4, 1.0}, {-0.7, 0.6, 0.0}, {0.9, -0.8, 0.05}};
  const auto w = from_scalar(cell);
  const auto [h_ref, s_ref] = cell.step(0.8, 0.25, -0.4);
  auto [h, s] = lstm_cell_step(Tensor::from({0.8}), Tensor::from({0.25}), Tensor::from({-0.4}), w);
  EXPECT_NEAR(h[0], h_ref, 1e-15);
  EXPECT_NEAR(s[0], s_ref, 1e-15);
}

TEST(LstmCell, ShapeMismatchThrows) {
  LstmWeights w(3, 2);
  EXPECT_THROW(lstm_cell_step(Tensor::vector(2), Tensor::vector(2), Tensor::vector(2), w), ShapeError);
  EXPECT_THROW(lstm_cell_step(Tensor::vector(3), Tensor::vector(1), Tensor::vector(2), w), ShapeError);
}

TEST(LstmCell, InitializationSetsForgetBias) {
  Rng rng(1);
  LstmWeights w(2, 2);
  w.initialize(rng);
  EXPECT_EQ(w.b(Gate::forget).value[0], 1.0);
  EXPECT_EQ(w.b(Gate::input).value[1], 0.0);
  for (double v : w.w(Gate::output).value.span()) {
    EXPECT_LE(std::abs(v), 0.08);
  }
}

TEST(LstmBackward, PassesGradientCheck) {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    LstmWeights w(3, 2);
    w.initialize(rng, 0.7);
    std::vector<std::vector<double>> inputs(4, std::vector<double>(3));
    std::vector<std::vector<double>> probe(4, std::vector<double>(2));
    for (auto& v : inputs)
      for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    for (auto& v : probe)
      for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    // Leave one step without an external gradient.
    probe[1].clear();

    auto loss = [&] {
      std::vector<std::span<const double>> seq(inputs.begin(), inputs.end());
      const auto steps = lstm_run(seq, w);
      double total = 0.0;
      for (std::size_t t = 0; t < steps.size(); ++t) {
        if (!probe[t].empty()) total += dot(probe[t], steps[t].h);
      }
      return total;
    };
    std::vector<std::span<const double>> seq(inputs.begin(), inputs.end());
    lstm_backward(lstm_run(seq, w), probe, w);
    std::vector<std::pair<std::string, Parameter*>> named;
    w.append_parameters("lstm", named);
    std::vector<Parameter*> params;
    for (auto& [n, p] : named) params.push_back(p);
    const auto r = grad_check_detailed(loss, params, 1e-4);
    EXPECT_LT(r.max_relative_error, 1e-4) << named[r.worst_parameter].first << "[" << r.worst_index << "]";
  }
}
