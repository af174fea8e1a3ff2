#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "logrepair/tensor/tensor.hpp"

namespace logrepair {

/// A learnable tensor with its gradient accumulator.
struct Parameter {
  Tensor value;
  Tensor grad;
  std::uint32_t id = 0;
  std::string name;

  Parameter() = default;
  Parameter(Tensor v, std::uint32_t id_, std::string name_)
      : value(std::move(v)), grad(value.rows(), value.cols()), id(id_), name(std::move(name_)) {}

  void zero_grad() { grad.fill(0.0); }
};

class Tape;

/// Handle to a value recorded on a tape.
struct Var {
  Tape* tape = nullptr;
  std::uint32_t id = 0;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

/// Row groups in compressed form: group g is members[offsets[g] .. offsets[g+1]).
struct Groups {
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> members;

  static Groups from_lists(const std::vector<std::vector<std::uint32_t>>& lists);

  std::size_t count() const noexcept { return offsets.size() - 1; }
  std::span<const std::uint32_t> group(std::size_t g) const {
    return {members.data() + offsets[g], offsets[g + 1] - offsets[g]};
  }
};

enum class Aggregator { Sum, Mean, Max };

const char* to_string(Aggregator a);
Aggregator parse_aggregator(std::string_view s);

/// Records operations for reverse-mode differentiation. Nodes are appended
/// in execution order, so the node list is already topologically sorted.
/// Single-threaded: one tape per training step.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Tensor& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor t);
  /// Borrowed constant; `t` must outlive the tape.
  Var constant_ref(const Tensor& t);
  /// Leaf whose gradient is accumulated into `p.grad` by backward().
  Var param(Parameter& p);
  /// Leaf reading a parameter without tracking its gradient.
  Var param_ref(const Parameter& p) { return constant_ref(p.value); }

  const Tensor& value(Var v) const;
  /// Gradient of the last backward() target w.r.t. v (zeros if unreached).
  Tensor grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Reverse sweep from a 1x1 node. Parameter gradients accumulate across
  /// calls; intermediate gradients are reset first.
  void backward(Var loss);

  // Op implementation interface.
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward);
  /// Accumulation buffer for an input's gradient (allocated on first use).
  Tensor& grad_buffer(Var v);

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    Parameter* sink = nullptr;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
};

// Differentiable ops. All throw ShapeMismatch on non-conforming inputs.

Var matmul(Var a, Var b);
/// Elementwise sum; `b` may also be a 1 x cols row broadcast over a's rows.
Var add(Var a, Var b);
Var relu(Var a);
/// 1 x 1 sum of all elements.
Var sum(Var a);
/// Rows of `a` at `indices`, in order. Throws IndexOutOfRange.
Var gather_rows(Var a, std::span<const std::uint32_t> indices);
/// Row g of the result aggregates the rows of `src` listed in group g; empty
/// groups produce zero rows. Max ties route the gradient to the lowest row.
Var segment_aggregate(Var src, const Groups& groups, Aggregator mode);
/// Mean over rows of -log softmax(logits)[target].
Var softmax_cross_entropy(Var logits, std::span<const std::int32_t> targets);
/// Mean absolute error over all elements; subgradient 0 at ties.
Var l1_loss(Var pred, const Tensor& target);

/// Row-wise softmax (not recorded).
Tensor softmax_rows(const Tensor& logits);

}  // namespace logrepair
