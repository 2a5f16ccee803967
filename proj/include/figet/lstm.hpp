#pragma once

// Standard LSTM (no peepholes) with a hand-written backward pass through time.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "figet/numerics.hpp"
#include "figet/tensor.hpp"

namespace figet {

enum class Gate : std::size_t { input = 0, forget = 1, output = 2, candidate = 3 };
inline constexpr std::size_t kGateCount = 4;

struct LstmWeights {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  // Each gate matrix is hidden x (input + hidden), applied to [u; h_prev].
  std::array<Parameter, kGateCount> weight;
  std::array<Parameter, kGateCount> bias;

  LstmWeights() = default;
  LstmWeights(std::size_t input, std::size_t hidden) : input_size(input), hidden_size(hidden) {
    for (std::size_t g = 0; g < kGateCount; ++g) {
      weight[g] = Parameter::zeros({hidden, input + hidden});
      bias[g] = Parameter::zeros({hidden});
    }
  }

  // Uniform weights in [-scale, scale]; forget bias 1, other biases 0.
  void initialize(Rng& rng, double scale = 0.08) {
    for (std::size_t g = 0; g < kGateCount; ++g) {
      fill_uniform(weight[g].value, rng, scale);
      bias[g].value.fill(g == static_cast<std::size_t>(Gate::forget) ? 1.0 : 0.0);
    }
  }

  Parameter& w(Gate g) { return weight[static_cast<std::size_t>(g)]; }
  const Parameter& w(Gate g) const { return weight[static_cast<std::size_t>(g)]; }
  Parameter& b(Gate g) { return bias[static_cast<std::size_t>(g)]; }
  const Parameter& b(Gate g) const { return bias[static_cast<std::size_t>(g)]; }

  void append_parameters(const std::string& prefix,
                         std::vector<std::pair<std::string, Parameter*>>& out) {
    static constexpr const char* names[kGateCount] = {"input", "forget", "output", "candidate"};
    for (std::size_t g = 0; g < kGateCount; ++g) {
      out.emplace_back(prefix + ".W_" + names[g], &weight[g]);
      out.emplace_back(prefix + ".b_" + names[g], &bias[g]);
    }
  }
};

// Everything the backward pass needs from one cell evaluation.
struct LstmStep {
  std::vector<double> z;  // [u; h_prev]
  std::array<std::vector<double>, kGateCount> gate;
  std::vector<double> s_prev;
  std::vector<double> s;
  std::vector<double> tanh_s;
  std::vector<double> h;
};

inline LstmStep lstm_step_traced(std::span<const double> u, std::span<const double> h_prev,
                                 std::span<const double> s_prev, const LstmWeights& w) {
  const std::size_t dm = w.input_size;
  const std::size_t dh = w.hidden_size;
  if (u.size() != dm || h_prev.size() != dh || s_prev.size() != dh) {
    throw ShapeError("lstm step: expected input " + std::to_string(dm) + " and state " +
                     std::to_string(dh) + ", got " + std::to_string(u.size()) + "/" +
                     std::to_string(h_prev.size()) + "/" + std::to_string(s_prev.size()));
  }
  LstmStep st;
  st.z.resize(dm + dh);
  std::copy(u.begin(), u.end(), st.z.begin());
  std::copy(h_prev.begin(), h_prev.end(), st.z.begin() + static_cast<std::ptrdiff_t>(dm));
  for (std::size_t g = 0; g < kGateCount; ++g) {
    auto& a = st.gate[g];
    a.assign(w.bias[g].value.values().begin(), w.bias[g].value.values().end());
    matvec_add(w.weight[g].value, st.z, a);
    const auto kind = g == static_cast<std::size_t>(Gate::candidate) ? Activation::tanh : Activation::sigmoid;
    for (auto& x : a) x = apply(kind, x);
  }
  st.s_prev.assign(s_prev.begin(), s_prev.end());
  st.s.resize(dh);
  st.tanh_s.resize(dh);
  st.h.resize(dh);
  const auto& in = st.gate[0];
  const auto& fg = st.gate[1];
  const auto& out = st.gate[2];
  const auto& cand = st.gate[3];
  for (std::size_t j = 0; j < dh; ++j) {
    st.s[j] = fg[j] * s_prev[j] + in[j] * cand[j];
    st.tanh_s[j] = std::tanh(st.s[j]);
    st.h[j] = out[j] * st.tanh_s[j];
  }
  return st;
}

// One cell step; returns (h_i, s_i).
inline std::pair<Tensor, Tensor> lstm_cell_step(const Tensor& u, const Tensor& h_prev, const Tensor& s_prev,
                                                const LstmWeights& w) {
  auto st = lstm_step_traced(u.span(), h_prev.span(), s_prev.span(), w);
  return {Tensor::from(std::move(st.h)), Tensor::from(std::move(st.s))};
}

// Runs the cell over `inputs` in the given order from zero states.
inline std::vector<LstmStep> lstm_run(const std::vector<std::span<const double>>& inputs, const LstmWeights& w) {
  std::vector<LstmStep> steps;
  steps.reserve(inputs.size());
  std::vector<double> h(w.hidden_size, 0.0);
  std::vector<double> s(w.hidden_size, 0.0);
  for (const auto& u : inputs) {
    steps.push_back(lstm_step_traced(u, h, s, w));
    h = steps.back().h;
    s = steps.back().s;
  }
  return steps;
}

// Backpropagation through time. dh_out[t] is the loss gradient arriving at
// step t's output from outside the recurrence (may be empty for "none").
// Weight and bias gradients are accumulated into w.
inline void lstm_backward(const std::vector<LstmStep>& steps, const std::vector<std::vector<double>>& dh_out,
                          LstmWeights& w) {
  const std::size_t dm = w.input_size;
  const std::size_t dh = w.hidden_size;
  std::vector<double> dh_next(dh, 0.0);
  std::vector<double> ds_next(dh, 0.0);
  std::array<std::vector<double>, kGateCount> da;
  for (auto& v : da) v.resize(dh);
  std::vector<double> dz(dm + dh);

  for (std::size_t t = steps.size(); t-- > 0;) {
    const auto& st = steps[t];
    const auto& in = st.gate[0];
    const auto& fg = st.gate[1];
    const auto& out = st.gate[2];
    const auto& cand = st.gate[3];
    for (std::size_t j = 0; j < dh; ++j) {
      const double dhj = dh_next[j] + (dh_out[t].empty() ? 0.0 : dh_out[t][j]);
      const double d_out = dhj * st.tanh_s[j];
      const double ds = ds_next[j] + dhj * out[j] * (1.0 - st.tanh_s[j] * st.tanh_s[j]);
      const double d_in = ds * cand[j];
      const double d_cand = ds * in[j];
      const double d_fg = ds * st.s_prev[j];
      ds_next[j] = ds * fg[j];
      da[0][j] = d_in * in[j] * (1.0 - in[j]);
      da[1][j] = d_fg * fg[j] * (1.0 - fg[j]);
      da[2][j] = d_out * out[j] * (1.0 - out[j]);
      da[3][j] = d_cand * (1.0 - cand[j] * cand[j]);
    }
    std::fill(dz.begin(), dz.end(), 0.0);
    for (std::size_t g = 0; g < kGateCount; ++g) {
      outer_add(da[g], st.z, w.weight[g].grad);
      axpy(1.0, da[g], w.bias[g].grad.span());
      matTvec_add(w.weight[g].value, da[g], dz);
    }
    std::copy(dz.begin() + static_cast<std::ptrdiff_t>(dm), dz.end(), dh_next.begin());
  }
}

}  // namespace figet
