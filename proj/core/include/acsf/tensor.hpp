#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace acsf {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& s);
std::string shape_str(const Shape& s);

/// Forward mode of the spike nonlinearity. `binary` emits hard 0/1 spikes and
/// uses the arctangent surrogate only in the backward pass; `smooth` replaces
/// the forward step with the surrogate itself so the whole network becomes
/// differentiable (gradient-check mode).
enum class FireMode { binary, smooth };

/// Dense double-precision tensor participating in reverse-mode
/// differentiation. Copying a Tensor copies a handle, not the buffer; all
/// values are immutable after creation except through mutable_values(),
/// which is reserved for optimizer updates between graph episodes.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values,
                     bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t numel() const;
  bool is_scalar() const { return defined() && numel() == 1; }

  // 2-D accessors; throw unless rank is exactly 2.
  std::size_t rows() const;
  std::size_t cols() const;
  double at(std::size_t r, std::size_t c) const;

  std::span<const double> values() const;
  std::span<double> mutable_values();
  double item() const;  // scalar tensors only

  bool requires_grad() const;
  bool has_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  /// Same buffer contents, no history, requires_grad off.
  Tensor detach() const;
  /// Deep copy of the values into a fresh leaf.
  Tensor clone(bool requires_grad = false) const;

  /// Stable identity of the underlying storage (for parameter sets).
  const void* id() const { return node_.get(); }

  struct Node;
  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}
  std::shared_ptr<Node> node_;

  friend Tensor make_op_tensor(Shape, std::vector<double>,
                               std::vector<Tensor>,
                               std::function<void(Node&)>);
};

// ---------------------------------------------------------------------------
// Operations. Every op records itself on the implicit per-thread tape when at
// least one input requires a gradient; constant inputs produce constant
// outputs with no recording.

Tensor matmul(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);   // same shape, or one scalar
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor neg(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor square(const Tensor& a);

/// Elementwise smooth L1 (0.5 x^2 for |x| < 1, |x| - 0.5 otherwise).
Tensor smooth_l1(const Tensor& a);

/// Elementwise clamp to [lo, hi]; gradient passes only inside the interval.
Tensor clamp(const Tensor& a, double lo, double hi);

Tensor sum(const Tensor& a);   // -> scalar
Tensor mean(const Tensor& a);  // -> scalar

/// (m x n) + (1 x n) row broadcast (bias addition).
Tensor add_row(const Tensor& a, const Tensor& row);

/// (m x n) * (1 x n) row broadcast (per-column scaling).
Tensor mul_row(const Tensor& a, const Tensor& row);

/// Horizontal concatenation of two 2-D tensors with equal row counts.
Tensor concat_cols(const Tensor& a, const Tensor& b);

/// One-element view of flat index i, as a scalar tensor. Gradients
/// accumulate back into a.grad[i].
Tensor index(const Tensor& a, std::size_t i);

/// Per-row column selection: out[r, 0] = q[r, cols[r]].
Tensor select_per_row(const Tensor& q, const std::vector<std::size_t>& cols);

/// Spike nonlinearity on membrane voltage. Forward emits 1 where
/// v >= threshold, else 0 (FireMode::binary) or the smooth surrogate
/// h(v - threshold) (FireMode::smooth). Backward always multiplies the
/// upstream gradient by the arctangent surrogate derivative
///   h'(x) = alpha / (2 * (1 + (pi/2 * alpha * x)^2)),  x = v - threshold.
Tensor spike_fire(const Tensor& v, double threshold, double alpha,
                  FireMode mode = FireMode::binary);

/// Surrogate firing function h(x) and its derivative, exposed for tests.
double surrogate_fire(double x, double alpha);
double surrogate_grad(double x, double alpha);

/// Reverse pass from a scalar loss. Populates grads of every reachable
/// tensor with requires_grad set, visiting each recorded operation exactly
/// once (reverse creation order), then releases the recorded graph.
void backward(const Tensor& loss);

// Non-differentiating helpers over raw values.
std::size_t argmax_row(const Tensor& t, std::size_t row);
double max_row(const Tensor& t, std::size_t row);

}  // namespace acsf
