#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "figet/error.hpp"

namespace figet {

// Dense row-major array of doubles.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> shape)
      : shape_(std::move(shape)), data_(element_count(shape_), 0.0) {}

  Tensor(std::vector<std::size_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != element_count(shape_)) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape " + shape_string());
    }
  }

  static Tensor vector(std::size_t n) { return Tensor({n}); }
  static Tensor matrix(std::size_t rows, std::size_t cols) { return Tensor({rows, cols}); }
  static Tensor from(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({n}, std::move(values));
  }

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t rows() const {
    assert(rank() == 2);
    return shape_[0];
  }
  std::size_t cols() const {
    assert(rank() == 2);
    return shape_[1];
  }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }

  std::span<double> row(std::size_t r) { return std::span<double>(data_).subspan(r * shape_[1], shape_[1]); }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * shape_[1], shape_[1]);
  }

  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  std::string shape_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(shape_[i]);
    }
    return s + ")";
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  static std::size_t element_count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }

  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Learnable tensor with its gradient and Adam moments.
struct Parameter {
  Tensor value;
  Tensor grad;
  Tensor m;
  Tensor v;
  std::uint64_t step_count = 0;

  Parameter() = default;
  explicit Parameter(Tensor init)
      : value(std::move(init)), grad(value.shape()), m(value.shape()), v(value.shape()) {}

  static Parameter zeros(std::vector<std::size_t> shape) { return Parameter(Tensor(std::move(shape))); }

  std::size_t size() const noexcept { return value.size(); }
  void zero_grad() { grad.fill(0.0); }
};

// Seeded generator with distribution code that does not depend on the
// standard library's (implementation-defined) distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    assert(n > 0);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return static_cast<std::size_t>(r % n);
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

inline void fill_uniform(Tensor& t, Rng& rng, double scale) {
  for (auto& x : t.span()) x = rng.uniform(-scale, scale);
}

// ---------------------------------------------------------------------------
// Small dense kernels. All accumulate into their output.

// out += W * x, W is (rows x cols).
inline void matvec_add(const Tensor& w, std::span<const double> x, std::span<double> out) {
  assert(x.size() == w.cols() && out.size() == w.rows());
  const std::size_t cols = w.cols();
  const double* p = w.values().data();
  for (std::size_t r = 0; r < out.size(); ++r, p += cols) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += p[c] * x[c];
    out[r] += acc;
  }
}

// out += W[:, :x.size()] * x, for W wider than x.
inline void matvec_add_prefix(const Tensor& w, std::span<const double> x, std::span<double> out) {
  assert(x.size() <= w.cols() && out.size() == w.rows());
  const std::size_t cols = w.cols();
  const double* p = w.values().data();
  for (std::size_t r = 0; r < out.size(); ++r, p += cols) {
    double acc = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) acc += p[c] * x[c];
    out[r] += acc;
  }
}

// out += W^T * y.
inline void matTvec_add(const Tensor& w, std::span<const double> y, std::span<double> out) {
  assert(y.size() == w.rows() && out.size() == w.cols());
  const std::size_t cols = w.cols();
  const double* p = w.values().data();
  for (std::size_t r = 0; r < y.size(); ++r, p += cols) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) out[c] += p[c] * yr;
  }
}

// G += a * b^T.
inline void outer_add(std::span<const double> a, std::span<const double> b, Tensor& g) {
  assert(a.size() == g.rows() && b.size() == g.cols());
  const std::size_t cols = g.cols();
  double* p = g.values().data();
  for (std::size_t r = 0; r < a.size(); ++r, p += cols) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) p[c] += ar * b[c];
  }
}

// G[:, :b.size()] += a * b^T.
inline void outer_add_prefix(std::span<const double> a, std::span<const double> b, Tensor& g) {
  assert(a.size() == g.rows() && b.size() <= g.cols());
  const std::size_t cols = g.cols();
  double* p = g.values().data();
  for (std::size_t r = 0; r < a.size(); ++r, p += cols) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    for (std::size_t c = 0; c < b.size(); ++c) p[c] += ar * b[c];
  }
}

// out += W[:, :out.size()]^T * y.
inline void matTvec_add_prefix(const Tensor& w, std::span<const double> y, std::span<double> out) {
  assert(y.size() == w.rows() && out.size() <= w.cols());
  const std::size_t cols = w.cols();
  const double* p = w.values().data();
  for (std::size_t r = 0; r < y.size(); ++r, p += cols) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += p[c] * yr;
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace figet
