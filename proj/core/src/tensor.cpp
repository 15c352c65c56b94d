#include "acsf/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace acsf {

namespace {
using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr double kHalfPi = 1.57079632679489661923;

thread_local std::uint64_t g_tape_seq = 0;
}  // namespace

std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ", ";
    os << s[i];
  }
  os << ")";
  return os.str();
}

struct Tensor::Node {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;
  bool requires_grad = false;
  std::uint64_t seq = 0;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;
};

namespace {

using Node = Tensor::Node;

std::shared_ptr<Node> make_node(Shape shape, std::vector<double> values,
                                bool requires_grad) {
  if (values.size() != shape_numel(shape))
    throw std::invalid_argument("tensor: values length does not match shape " +
                                shape_str(shape));
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->values = std::move(values);
  n->requires_grad = requires_grad;
  n->seq = ++g_tape_seq;
  return n;
}

void ensure_grad(Node& n) {
  if (n.grad.size() != n.values.size()) n.grad.assign(n.values.size(), 0.0);
}

}  // namespace

Tensor make_op_tensor(Shape shape, std::vector<double> values,
                      std::vector<Tensor> inputs,
                      std::function<void(Node&)> backward_fn) {
  bool tracked = false;
  for (const Tensor& t : inputs) tracked = tracked || t.requires_grad();
  auto n = make_node(std::move(shape), std::move(values), tracked);
  if (tracked) {
    n->parents.reserve(inputs.size());
    for (const Tensor& t : inputs) n->parents.push_back(t.node());
    n->backward_fn = std::move(backward_fn);
  }
  return Tensor(std::move(n));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  std::vector<double> v(shape_numel(shape), 0.0);
  return Tensor(make_node(std::move(shape), std::move(v), requires_grad));
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  std::vector<double> v(shape_numel(shape), value);
  return Tensor(make_node(std::move(shape), std::move(v), requires_grad));
}

Tensor Tensor::from(Shape shape, std::vector<double> values,
                    bool requires_grad) {
  return Tensor(make_node(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(make_node(Shape{1}, {value}, requires_grad));
}

const Shape& Tensor::shape() const {
  if (!node_) throw std::logic_error("tensor: undefined");
  return node_->shape;
}

std::size_t Tensor::numel() const { return shape_numel(shape()); }

std::size_t Tensor::rows() const {
  if (shape().size() != 2)
    throw std::invalid_argument("tensor: rows() needs rank 2, got " +
                                shape_str(shape()));
  return shape()[0];
}

std::size_t Tensor::cols() const {
  if (shape().size() != 2)
    throw std::invalid_argument("tensor: cols() needs rank 2, got " +
                                shape_str(shape()));
  return shape()[1];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return node_->values[r * cols() + c];
}

std::span<const double> Tensor::values() const {
  if (!node_) throw std::logic_error("tensor: undefined");
  return node_->values;
}

std::span<double> Tensor::mutable_values() {
  if (!node_) throw std::logic_error("tensor: undefined");
  return node_->values;
}

double Tensor::item() const {
  if (!is_scalar())
    throw std::logic_error("tensor: item() on non-scalar " +
                           shape_str(shape()));
  return node_->values[0];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

bool Tensor::has_grad() const {
  return node_ && node_->grad.size() == node_->values.size();
}

std::span<const double> Tensor::grad() const {
  if (!has_grad()) throw std::logic_error("tensor: grad not populated");
  return node_->grad;
}

std::span<double> Tensor::mutable_grad() {
  if (!node_) throw std::logic_error("tensor: undefined");
  ensure_grad(*node_);
  return node_->grad;
}

void Tensor::zero_grad() {
  if (node_) node_->grad.assign(node_->values.size(), 0.0);
}

Tensor Tensor::detach() const {
  return Tensor(make_node(shape(), node_->values, false));
}

Tensor Tensor::clone(bool requires_grad) const {
  return Tensor(make_node(shape(), node_->values, requires_grad));
}

// ---------------------------------------------------------------------------
// Ops

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
}

// Binary elementwise with scalar broadcast on either side.
template <typename Fwd, typename Bwd>
Tensor binary_ew(const Tensor& a, const Tensor& b, const char* name, Fwd fwd,
                 Bwd bwd) {
  const bool sa = a.is_scalar();
  const bool sb = b.is_scalar();
  if (!sa && !sb) check_same_shape(a, b, name);
  const Tensor& big = (sa && !sb) ? b : a;
  const std::size_t n = big.numel();
  std::vector<double> out(n);
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < n; ++i)
    out[i] = fwd(va[sa ? 0 : i], vb[sb ? 0 : i]);
  return make_op_tensor(
      big.shape(), std::move(out), {a, b},
      [sa, sb, n, bwd](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        const bool need_a = pa.requires_grad;
        const bool need_b = pb.requires_grad;
        if (need_a) ensure_grad(pa);
        if (need_b) ensure_grad(pb);
        for (std::size_t i = 0; i < n; ++i) {
          const double x = pa.values[sa ? 0 : i];
          const double y = pb.values[sb ? 0 : i];
          const double g = self.grad[i];
          auto [da, db] = bwd(x, y);
          if (need_a) pa.grad[sa ? 0 : i] += da * g;
          if (need_b) pb.grad[sb ? 0 : i] += db * g;
        }
      });
}

template <typename Fwd, typename Bwd>
Tensor unary_ew(const Tensor& a, Fwd fwd, Bwd bwd) {
  const std::size_t n = a.numel();
  std::vector<double> out(n);
  auto va = a.values();
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(va[i]);
  return make_op_tensor(a.shape(), std::move(out), {a}, [n, bwd](Node& self) {
    Node& pa = *self.parents[0];
    ensure_grad(pa);
    // bwd(x, y) where y is the op output; some rules are cheaper in y.
    for (std::size_t i = 0; i < n; ++i)
      pa.grad[i] += bwd(pa.values[i], self.values[i]) * self.grad[i];
  });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2)
    throw std::invalid_argument("matmul: needs rank-2 operands, got " +
                                shape_str(a.shape()) + " and " +
                                shape_str(b.shape()));
  const std::size_t m = a.rows(), k = a.cols(), k2 = b.rows(), n = b.cols();
  if (k != k2)
    throw std::invalid_argument("matmul: inner dimensions disagree, " +
                                shape_str(a.shape()) + " x " +
                                shape_str(b.shape()));
  std::vector<double> out(m * n);
  {
    Eigen::Map<const RowMat> A(a.values().data(), m, k);
    Eigen::Map<const RowMat> B(b.values().data(), k, n);
    Eigen::Map<RowMat> C(out.data(), m, n);
    C.noalias() = A * B;
  }
  return make_op_tensor(
      Shape{m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        Eigen::Map<const RowMat> A(pa.values.data(), m, k);
        Eigen::Map<const RowMat> B(pb.values.data(), k, n);
        Eigen::Map<const RowMat> G(self.grad.data(), m, n);
        if (pa.requires_grad) {
          ensure_grad(pa);
          Eigen::Map<RowMat> GA(pa.grad.data(), m, k);
          GA.noalias() += G * B.transpose();
        }
        if (pb.requires_grad) {
          ensure_grad(pb);
          Eigen::Map<RowMat> GB(pb.grad.data(), k, n);
          GB.noalias() += A.transpose() * G;
        }
      });
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_ew(a, b, "add", [](double x, double y) { return x + y; },
                   [](double, double) { return std::pair{1.0, 1.0}; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_ew(a, b, "sub", [](double x, double y) { return x - y; },
                   [](double, double) { return std::pair{1.0, -1.0}; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_ew(a, b, "mul", [](double x, double y) { return x * y; },
                   [](double x, double y) { return std::pair{y, x}; });
}

Tensor scale(const Tensor& a, double c) {
  return unary_ew(a, [c](double x) { return c * x; },
                  [c](double, double) { return c; });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor relu(const Tensor& a) {
  return unary_ew(a, [](double x) { return x > 0.0 ? x : 0.0; },
                  [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor tanh(const Tensor& a) {
  return unary_ew(a, [](double x) { return std::tanh(x); },
                  [](double, double y) { return 1.0 - y * y; });
}

Tensor exp(const Tensor& a) {
  return unary_ew(a, [](double x) { return std::exp(x); },
                  [](double, double y) { return y; });
}

Tensor square(const Tensor& a) {
  return unary_ew(a, [](double x) { return x * x; },
                  [](double x, double) { return 2.0 * x; });
}

Tensor smooth_l1(const Tensor& a) {
  return unary_ew(
      a,
      [](double x) {
        return std::abs(x) < 1.0 ? 0.5 * x * x : std::abs(x) - 0.5;
      },
      [](double x, double) {
        if (std::abs(x) < 1.0) return x;
        return x > 0.0 ? 1.0 : -1.0;
      });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("clamp: lo > hi");
  return unary_ew(
      a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
      [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Tensor sum(const Tensor& a) {
  auto va = a.values();
  double s = std::accumulate(va.begin(), va.end(), 0.0);
  return make_op_tensor(Shape{1}, {s}, {a}, [](Node& self) {
    Node& pa = *self.parents[0];
    ensure_grad(pa);
    const double g = self.grad[0];
    for (double& x : pa.grad) x += g;
  });
}

Tensor mean(const Tensor& a) {
  const std::size_t n = a.numel();
  if (n == 0) throw std::invalid_argument("mean: empty tensor");
  auto va = a.values();
  double s = std::accumulate(va.begin(), va.end(), 0.0) / double(n);
  return make_op_tensor(Shape{1}, {s}, {a}, [n](Node& self) {
    Node& pa = *self.parents[0];
    ensure_grad(pa);
    const double g = self.grad[0] / double(n);
    for (double& x : pa.grad) x += g;
  });
}

Tensor add_row(const Tensor& a, const Tensor& row) {
  const std::size_t m = a.rows(), n = a.cols();
  if (row.numel() != n)
    throw std::invalid_argument("add_row: row length " +
                                std::to_string(row.numel()) +
                                " does not match " + shape_str(a.shape()));
  std::vector<double> out(m * n);
  auto va = a.values();
  auto vr = row.values();
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] = va[r * n + c] + vr[c];
  return make_op_tensor(Shape{m, n}, std::move(out), {a, row},
                        [m, n](Node& self) {
                          Node& pa = *self.parents[0];
                          Node& pr = *self.parents[1];
                          if (pa.requires_grad) {
                            ensure_grad(pa);
                            for (std::size_t i = 0; i < m * n; ++i)
                              pa.grad[i] += self.grad[i];
                          }
                          if (pr.requires_grad) {
                            ensure_grad(pr);
                            for (std::size_t r = 0; r < m; ++r)
                              for (std::size_t c = 0; c < n; ++c)
                                pr.grad[c] += self.grad[r * n + c];
                          }
                        });
}

Tensor mul_row(const Tensor& a, const Tensor& row) {
  const std::size_t m = a.rows(), n = a.cols();
  if (row.numel() != n)
    throw std::invalid_argument("mul_row: row length " +
                                std::to_string(row.numel()) +
                                " does not match " + shape_str(a.shape()));
  std::vector<double> out(m * n);
  auto va = a.values();
  auto vr = row.values();
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] = va[r * n + c] * vr[c];
  return make_op_tensor(Shape{m, n}, std::move(out), {a, row},
                        [m, n](Node& self) {
                          Node& pa = *self.parents[0];
                          Node& pr = *self.parents[1];
                          if (pa.requires_grad) {
                            ensure_grad(pa);
                            for (std::size_t r = 0; r < m; ++r)
                              for (std::size_t c = 0; c < n; ++c)
                                pa.grad[r * n + c] +=
                                    pr.values[c] * self.grad[r * n + c];
                          }
                          if (pr.requires_grad) {
                            ensure_grad(pr);
                            for (std::size_t r = 0; r < m; ++r)
                              for (std::size_t c = 0; c < n; ++c)
                                pr.grad[c] += pa.values[r * n + c] *
                                              self.grad[r * n + c];
                          }
                        });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  const std::size_t m = a.rows(), p = a.cols(), q = b.cols();
  if (b.rows() != m)
    throw std::invalid_argument("concat_cols: row counts differ, " +
                                shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
  std::vector<double> out(m * (p + q));
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t r = 0; r < m; ++r) {
    std::copy_n(va.data() + r * p, p, out.data() + r * (p + q));
    std::copy_n(vb.data() + r * q, q, out.data() + r * (p + q) + p);
  }
  return make_op_tensor(
      Shape{m, p + q}, std::move(out), {a, b}, [m, p, q](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        for (std::size_t r = 0; r < m; ++r) {
          if (pa.requires_grad) {
            ensure_grad(pa);
            for (std::size_t c = 0; c < p; ++c)
              pa.grad[r * p + c] += self.grad[r * (p + q) + c];
          }
          if (pb.requires_grad) {
            ensure_grad(pb);
            for (std::size_t c = 0; c < q; ++c)
              pb.grad[r * q + c] += self.grad[r * (p + q) + p + c];
          }
        }
      });
}

Tensor index(const Tensor& a, std::size_t i) {
  if (i >= a.numel())
    throw std::invalid_argument("index: " + std::to_string(i) +
                                " out of range for " + shape_str(a.shape()));
  return make_op_tensor(Shape{1}, {a.values()[i]}, {a}, [i](Node& self) {
    Node& pa = *self.parents[0];
    ensure_grad(pa);
    pa.grad[i] += self.grad[0];
  });
}

Tensor select_per_row(const Tensor& q, const std::vector<std::size_t>& cols) {
  const std::size_t m = q.rows(), n = q.cols();
  if (cols.size() != m)
    throw std::invalid_argument("select_per_row: need one column per row");
  std::vector<double> out(m);
  auto vq = q.values();
  for (std::size_t r = 0; r < m; ++r) {
    if (cols[r] >= n)
      throw std::invalid_argument("select_per_row: column out of range");
    out[r] = vq[r * n + cols[r]];
  }
  return make_op_tensor(Shape{m, 1}, std::move(out), {q},
                        [n, cols](Node& self) {
                          Node& pq = *self.parents[0];
                          ensure_grad(pq);
                          for (std::size_t r = 0; r < cols.size(); ++r)
                            pq.grad[r * n + cols[r]] += self.grad[r];
                        });
}

double surrogate_fire(double x, double alpha) {
  return std::atan(kHalfPi * alpha * x) / (2.0 * kHalfPi) + 0.5;
}

double surrogate_grad(double x, double alpha) {
  const double u = kHalfPi * alpha * x;
  return alpha / (2.0 * (1.0 + u * u));
}

Tensor spike_fire(const Tensor& v, double threshold, double alpha,
                  FireMode mode) {
  if (!(alpha > 0.0)) throw std::domain_error("spike_fire: alpha must be > 0");
  const std::size_t n = v.numel();
  std::vector<double> out(n);
  auto vv = v.values();
  if (mode == FireMode::binary) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = vv[i] >= threshold ? 1.0 : 0.0;
  } else {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = surrogate_fire(vv[i] - threshold, alpha);
  }
  return make_op_tensor(v.shape(), std::move(out), {v},
                        [threshold, alpha, n](Node& self) {
                          Node& pv = *self.parents[0];
                          ensure_grad(pv);
                          for (std::size_t i = 0; i < n; ++i)
                            pv.grad[i] +=
                                surrogate_grad(pv.values[i] - threshold,
                                               alpha) *
                                self.grad[i];
                        });
}

// ---------------------------------------------------------------------------
// Reverse pass

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1)
    throw std::logic_error("backward: loss must be a defined scalar");
  Node* root = loss.node().get();
  if (!root->requires_grad) return;  // constant loss, nothing reachable

  // Collect the recorded subgraph reachable from the loss. The shared_ptr
  // copies pin every node until the final clearing pass is done.
  std::vector<Node*> order;
  std::vector<std::shared_ptr<Node>> pinned;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{root};
  seen.insert(root);
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    order.push_back(n);
    for (const auto& p : n->parents)
      if (seen.insert(p.get()).second) {
        pinned.push_back(p);
        stack.push_back(p.get());
      }
  }
  // Reverse creation order is a topological order: parents always precede
  // their consumers on the tape.
  std::sort(order.begin(), order.end(),
            [](Node* a, Node* b) { return a->seq > b->seq; });

  root->grad.assign(1, 1.0);
  for (Node* n : order) {
    if (!n->backward_fn) continue;
    ensure_grad(*n);
    n->backward_fn(*n);
  }
  for (Node* n : order) {
    n->parents.clear();
    n->backward_fn = nullptr;
  }
}

std::size_t argmax_row(const Tensor& t, std::size_t row) {
  const std::size_t n = t.cols();
  if (n == 0) throw std::logic_error("argmax_row: empty row");
  auto v = t.values();
  std::size_t best = 0;
  for (std::size_t c = 1; c < n; ++c)
    if (v[row * n + c] > v[row * n + best]) best = c;  // ties keep lowest index
  return best;
}

double max_row(const Tensor& t, std::size_t row) {
  return t.at(row, argmax_row(t, row));
}

}  // namespace acsf
