#include "logrepair/tensor/tape.hpp"

#include <algorithm>
#include <cmath>

#include "logrepair/error.hpp"
#include "logrepair/tensor/kernels.hpp"

namespace logrepair {
namespace {

std::string shape(const Tensor& t) { return std::to_string(t.rows()) + "x" + std::to_string(t.cols()); }

void check_finite(const Tensor& t, const char* op) {
  if (!t.all_finite()) throw Error(ErrorCode::NonFinite, std::string("non-finite output from ") + op);
}

}  // namespace

const Tensor& Var::value() const { return tape->value(*this); }

Groups Groups::from_lists(const std::vector<std::vector<std::uint32_t>>& lists) {
  Groups g;
  g.offsets.reserve(lists.size() + 1);
  for (const auto& l : lists) {
    g.members.insert(g.members.end(), l.begin(), l.end());
    g.offsets.push_back(static_cast<std::uint32_t>(g.members.size()));
  }
  return g;
}

const char* to_string(Aggregator a) {
  switch (a) {
    case Aggregator::Sum: return "sum";
    case Aggregator::Mean: return "mean";
    case Aggregator::Max: return "max";
  }
  return "mean";
}

Aggregator parse_aggregator(std::string_view s) {
  if (s == "sum") return Aggregator::Sum;
  if (s == "mean") return Aggregator::Mean;
  if (s == "max") return Aggregator::Max;
  throw Error(ErrorCode::InvalidConfig, "unknown aggregator '" + std::string(s) + "'");
}

Var Tape::constant(Tensor t) {
  check_finite(t, "constant");
  Node n;
  n.value = std::move(t);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::constant_ref(const Tensor& t) {
  Node n;
  n.external = &t;
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::param(Parameter& p) {
  Node n;
  n.external = &p.value;
  n.sink = &p;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tensor& Tape::value(Var v) const {
  const Node& n = nodes_[v.id];
  return n.external ? *n.external : n.value;
}

Tensor Tape::grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.has_grad) return n.grad;
  const Tensor& val = value(v);
  return Tensor(val.rows(), val.cols());
}

Var Tape::record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (Var in : inputs) n.requires_grad = n.requires_grad || nodes_[in.id].requires_grad;
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Tensor& Tape::grad_buffer(Var v) {
  Node& n = nodes_[v.id];
  if (!n.has_grad) {
    const Tensor& val = n.external ? *n.external : n.value;
    if (n.grad.same_shape(val)) {
      n.grad.fill(0.0);
    } else {
      n.grad = Tensor(val.rows(), val.cols());
    }
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::backward(Var loss) {
  const Tensor& out = value(loss);
  if (out.rows() != 1 || out.cols() != 1) {
    throw Error(ErrorCode::ShapeMismatch, "backward needs a 1x1 loss, got " + shape(out));
  }
  for (auto& n : nodes_) n.has_grad = false;
  grad_buffer(loss)(0, 0) = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.has_grad || !n.requires_grad) continue;
    if (n.sink != nullptr) {
      kernels::active().axpy(n.grad.size(), 1.0, n.grad.data(), n.sink->grad.data());
    } else if (n.backward) {
      n.backward(*this, n.grad);
    }
  }
}

Var matmul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) throw Error(ErrorCode::ShapeMismatch, "matmul " + shape(av) + " * " + shape(bv));
  const std::size_t n = av.rows(), k = av.cols(), m = bv.cols();
  Tensor out(n, m);
  kernels::active().gemm_nn_acc(n, k, m, av.data(), k, bv.data(), m, out.data(), m);
  check_finite(out, "matmul");
  return a.tape->record(std::move(out), {a, b}, [a, b, n, k, m](Tape& tape, const Tensor& g) {
    const auto& kt = kernels::active();
    if (tape.requires_grad(a)) {
      kt.gemm_nt_acc(n, m, k, g.data(), m, tape.value(b).data(), m, tape.grad_buffer(a).data(), k);
    }
    if (tape.requires_grad(b)) {
      kt.gemm_tn_acc(n, k, m, tape.value(a).data(), k, g.data(), m, tape.grad_buffer(b).data(), m);
    }
  });
}

Var add(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const bool broadcast = !av.same_shape(bv);
  if (broadcast && !(bv.rows() == 1 && bv.cols() == av.cols())) {
    throw Error(ErrorCode::ShapeMismatch, "add " + shape(av) + " + " + shape(bv));
  }
  Tensor out = av;
  const auto& kt = kernels::active();
  if (broadcast) {
    for (std::size_t r = 0; r < out.rows(); ++r) kt.axpy(out.cols(), 1.0, bv.data(), out.row(r).data());
  } else {
    kt.axpy(out.size(), 1.0, bv.data(), out.data());
  }
  check_finite(out, "add");
  return a.tape->record(std::move(out), {a, b}, [a, b, broadcast](Tape& tape, const Tensor& g) {
    const auto& kt = kernels::active();
    if (tape.requires_grad(a)) kt.axpy(g.size(), 1.0, g.data(), tape.grad_buffer(a).data());
    if (tape.requires_grad(b)) {
      Tensor& gb = tape.grad_buffer(b);
      if (broadcast) {
        for (std::size_t r = 0; r < g.rows(); ++r) kt.axpy(g.cols(), 1.0, g.row(r).data(), gb.data());
      } else {
        kt.axpy(g.size(), 1.0, g.data(), gb.data());
      }
    }
  });
}

Var relu(Var a) {
  Tensor out = a.value();
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return a.tape->record(std::move(out), {a}, [a](Tape& tape, const Tensor& g) {
    const Tensor& x = tape.value(a);
    Tensor& ga = tape.grad_buffer(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (x.data()[i] > 0.0) ga.data()[i] += g.data()[i];
    }
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  Tensor out(1, 1, s);
  check_finite(out, "sum");
  return a.tape->record(std::move(out), {a}, [a](Tape& tape, const Tensor& g) {
    Tensor& ga = tape.grad_buffer(a);
    for (double& v : ga.values()) v += g(0, 0);
  });
}

Var gather_rows(Var a, std::span<const std::uint32_t> indices) {
  const Tensor& av = a.value();
  Tensor out(indices.size(), av.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= av.rows()) {
      throw Error(ErrorCode::IndexOutOfRange, "row " + std::to_string(indices[i]) + " of " + shape(av));
    }
    std::copy_n(av.row(indices[i]).data(), av.cols(), out.row(i).data());
  }
  std::vector<std::uint32_t> idx(indices.begin(), indices.end());
  return a.tape->record(std::move(out), {a}, [a, idx = std::move(idx)](Tape& tape, const Tensor& g) {
    Tensor& ga = tape.grad_buffer(a);
    const auto& kt = kernels::active();
    for (std::size_t i = 0; i < idx.size(); ++i) kt.axpy(g.cols(), 1.0, g.row(i).data(), ga.row(idx[i]).data());
  });
}

Var segment_aggregate(Var src, const Groups& groups, Aggregator mode) {
  const Tensor& sv = src.value();
  const std::size_t cols = sv.cols();
  for (std::uint32_t m : groups.members) {
    if (m >= sv.rows()) {
      throw Error(ErrorCode::IndexOutOfRange, "group member " + std::to_string(m) + " of " + shape(sv));
    }
  }
  Tensor out(groups.count(), cols);
  std::vector<std::uint32_t> argmax;
  const auto& kt = kernels::active();
  if (mode == Aggregator::Max) {
    argmax.assign(groups.count() * cols, 0);
    for (std::size_t g = 0; g < groups.count(); ++g) {
      const auto members = groups.group(g);
      if (members.empty()) continue;
      std::uint32_t* best = argmax.data() + g * cols;
      std::fill_n(best, cols, members[0]);
      for (std::size_t c = 0; c < cols; ++c) {
        for (std::uint32_t m : members) {
          const double v = sv(m, c), cur = sv(best[c], c);
          if (v > cur || (v == cur && m < best[c])) best[c] = m;
        }
        out(g, c) = sv(best[c], c);
      }
    }
  } else {
    for (std::size_t g = 0; g < groups.count(); ++g) {
      const auto members = groups.group(g);
      for (std::uint32_t m : members) kt.axpy(cols, 1.0, sv.row(m).data(), out.row(g).data());
      if (mode == Aggregator::Mean && members.size() > 1) {
        const double inv = 1.0 / static_cast<double>(members.size());
        for (double& v : out.row(g)) v *= inv;
      }
    }
  }
  check_finite(out, "segment_aggregate");
  return src.tape->record(std::move(out), {src},
                          [src, groups, mode, argmax = std::move(argmax)](Tape& tape, const Tensor& g) {
                            Tensor& gs = tape.grad_buffer(src);
                            const std::size_t cols = g.cols();
                            if (mode == Aggregator::Max) {
                              for (std::size_t grp = 0; grp < groups.count(); ++grp) {
                                if (groups.group(grp).empty()) continue;
                                for (std::size_t c = 0; c < cols; ++c) gs(argmax[grp * cols + c], c) += g(grp, c);
                              }
                              return;
                            }
                            const auto& kt = kernels::active();
                            for (std::size_t grp = 0; grp < groups.count(); ++grp) {
                              const auto members = groups.group(grp);
                              if (members.empty()) continue;
                              const double w =
                                  mode == Aggregator::Mean ? 1.0 / static_cast<double>(members.size()) : 1.0;
                              for (std::uint32_t m : members) kt.axpy(cols, w, g.row(grp).data(), gs.row(m).data());
                            }
                          });
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto in = logits.row(r);
    auto o = out.row(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) z += (o[c] = std::exp(in[c] - mx));
    for (double& v : o) v /= z;
  }
  return out;
}

Var softmax_cross_entropy(Var logits, std::span<const std::int32_t> targets) {
  const Tensor& lv = logits.value();
  if (lv.rows() != targets.size()) {
    throw Error(ErrorCode::ShapeMismatch, "cross entropy: " + shape(lv) + " logits for " +
                                              std::to_string(targets.size()) + " targets");
  }
  for (std::int32_t t : targets) {
    if (t < 0 || static_cast<std::size_t>(t) >= lv.cols()) {
      throw Error(ErrorCode::ShapeMismatch, "cross entropy target " + std::to_string(t) + " outside " + shape(lv));
    }
  }
  double total = 0.0;
  for (std::size_t r = 0; r < lv.rows(); ++r) {
    const auto in = lv.row(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (double v : in) z += std::exp(v - mx);
    total += std::log(z) + mx - in[static_cast<std::size_t>(targets[r])];
  }
  const double n = static_cast<double>(lv.rows());
  Tensor out(1, 1, lv.rows() ? total / n : 0.0);
  check_finite(out, "softmax_cross_entropy");
  std::vector<std::int32_t> tgt(targets.begin(), targets.end());
  return logits.tape->record(std::move(out), {logits}, [logits, tgt = std::move(tgt)](Tape& tape, const Tensor& g) {
    const Tensor& lv = tape.value(logits);
    if (lv.rows() == 0) return;
    Tensor p = softmax_rows(lv);
    Tensor& gl = tape.grad_buffer(logits);
    const double scale = g(0, 0) / static_cast<double>(lv.rows());
    for (std::size_t r = 0; r < lv.rows(); ++r) {
      p(r, static_cast<std::size_t>(tgt[r])) -= 1.0;
      kernels::active().axpy(lv.cols(), scale, p.row(r).data(), gl.row(r).data());
    }
  });
}

Var l1_loss(Var pred, const Tensor& target) {
  const Tensor& pv = pred.value();
  if (!pv.same_shape(target)) throw Error(ErrorCode::ShapeMismatch, "l1 " + shape(pv) + " vs " + shape(target));
  double total = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) total += std::abs(pv.data()[i] - target.data()[i]);
  Tensor out(1, 1, pv.size() ? total / static_cast<double>(pv.size()) : 0.0);
  check_finite(out, "l1_loss");
  return pred.tape->record(std::move(out), {pred}, [pred, target](Tape& tape, const Tensor& g) {
    const Tensor& pv = tape.value(pred);
    if (pv.size() == 0) return;
    Tensor& gp = tape.grad_buffer(pred);
    const double scale = g(0, 0) / static_cast<double>(pv.size());
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double d = pv.data()[i] - target.data()[i];
      gp.data()[i] += d > 0.0 ? scale : (d < 0.0 ? -scale : 0.0);
    }
  });
}

}  // namespace logrepair
