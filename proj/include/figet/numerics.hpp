#pragma once

// Activations, the Adam optimizer, dropout and a finite-difference gradient
// checker. Forward and backward passes elsewhere in the library are written
// by hand against these primitives.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "figet/error.hpp"
#include "figet/tensor.hpp"

namespace figet {

enum class Activation { sigmoid, tanh };

inline double sigmoid(double x) {
  // Branching keeps exp() from overflowing for large |x|.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double apply(Activation kind, double x) {
  return kind == Activation::sigmoid ? sigmoid(x) : std::tanh(x);
}

inline Tensor activation(const Tensor& x, Activation kind) {
  Tensor out = x;
  for (auto& v : out.span()) v = apply(kind, v);
  return out;
}

// ---------------------------------------------------------------------------

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (!(learning_rate > 0.0)) throw ValidationError("adam: learning_rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ValidationError("adam: beta1 must be in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ValidationError("adam: beta2 must be in [0, 1)");
    if (!(epsilon > 0.0)) throw ValidationError("adam: epsilon must be positive");
  }
};

// Bias-corrected Adam update; consumes and zeroes p.grad.
inline void adam_step(Parameter& p, const AdamConfig& cfg) {
  p.step_count += 1;
  const double t = static_cast<double>(p.step_count);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  auto value = p.value.span();
  auto grad = p.grad.span();
  auto m = p.m.span();
  auto v = p.v.span();
  for (std::size_t i = 0; i < value.size(); ++i) {
    const double g = grad[i];
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    value[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    grad[i] = 0.0;
  }
}

// ---------------------------------------------------------------------------

enum class Mode { train, eval };

// Inverted dropout. The returned mask holds the multiplier applied to each
// entry (0 or 1/(1-rate)) so callers can reuse it in the backward pass.
struct DropoutResult {
  Tensor output;
  std::vector<double> mask;
};

inline DropoutResult dropout_with_mask(const Tensor& x, double rate, Mode mode, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw ValidationError("dropout rate must be in [0, 1)");
  DropoutResult r{x, std::vector<double>(x.size(), 1.0)};
  if (mode == Mode::eval || rate == 0.0) return r;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.mask[i] = rng.uniform() < rate ? 0.0 : keep_scale;
    r.output[i] = x[i] * r.mask[i];
  }
  return r;
}

inline Tensor dropout(const Tensor& x, double rate, Mode mode, Rng& rng) {
  return dropout_with_mask(x, rate, mode, rng).output;
}

// ---------------------------------------------------------------------------

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_parameter = 0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Compares the analytic gradients already stored in each parameter's grad
// against central differences of `loss`. Parameter values are restored.
inline GradCheckResult grad_check_detailed(const std::function<double()>& loss,
                                           std::span<Parameter* const> params, double h = 1e-4) {
  GradCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto value = params[p]->value.span();
    const auto grad = params[p]->grad.span();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + h;
      const double plus = loss();
      value[i] = saved - h;
      const double minus = loss();
      value[i] = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw Error("grad_check: loss is not finite");
      }
      const double numeric = (plus - minus) / (2.0 * h);
      const double analytic = grad[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      const double rel = std::abs(analytic - numeric) / denom;
      if (rel > result.max_relative_error) {
        result = {rel, p, i, analytic, numeric};
      }
    }
  }
  return result;
}

inline double grad_check(const std::function<double()>& loss, std::span<Parameter* const> params,
                         double h = 1e-4) {
  return grad_check_detailed(loss, params, h).max_relative_error;
}

}  // namespace figet
