#include "logrepair/model/hgnn.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "logrepair/error.hpp"
#include "logrepair/log/schema_io.hpp"
#include "logrepair/random.hpp"

namespace logrepair {

void ModelConfig::validate() const {
  if (hidden_size < 1) throw Error(ErrorCode::InvalidConfig, "hidden size must be >= 1");
  if (layers < 1) throw Error(ErrorCode::InvalidConfig, "layer count must be >= 1");
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params) n += p.value.size();
  return n;
}

void ModelParams::zero_grad() {
  for (auto& p : params) p.zero_grad();
}

std::size_t Predictions::row_count() const {
  std::size_t n = 0;
  for (const auto& a : attributes) n += a.rows.size();
  return n;
}

std::uint64_t schema_hash(const EncoderSet& enc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  mix(schema_to_json(enc.schema).dump());
  for (const auto& a : enc.attributes) {
    mix(a.name);
    for (const auto& v : a.vocabulary) mix(v);
  }
  return h;
}

ModelParams init_params(const EncoderSet& enc, const ModelConfig& cfg) {
  cfg.validate();
  ModelParams m;
  m.config = cfg;
  m.schema_hash = schema_hash(enc);
  m.relations = relation_types(enc.schema);
  const std::size_t hidden = cfg.hidden_size;
  Rng rng(derive_seed(cfg.seed, 0x1417));

  auto weight = [&](std::size_t fan_in, std::size_t fan_out, std::string name) {
    Tensor w(fan_in, fan_out);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w.values()) v = uniform_real(rng, -bound, bound);
    const auto id = static_cast<std::uint32_t>(m.params.size());
    m.params.emplace_back(std::move(w), id, std::move(name));
    return id;
  };
  auto bias = [&](std::size_t width, std::string name) {
    const auto id = static_cast<std::uint32_t>(m.params.size());
    m.params.emplace_back(Tensor(1, width), id, std::move(name));
    return id;
  };

  for (const auto& a : enc.attributes) {
    LinearSlots s;
    s.weight = weight(a.width(), hidden, "input." + a.name + ".weight");
    s.bias = bias(hidden, "input." + a.name + ".bias");
    m.input.push_back(s);
  }
  for (std::size_t k = 0; k < cfg.layers; ++k) {
    std::vector<SageSlots> layer;
    for (const auto& r : m.relations) {
      const std::string prefix = "layer" + std::to_string(k) + "." + relation_name(r, enc.schema);
      SageSlots s;
      s.self_weight = weight(hidden, hidden, prefix + ".self");
      s.neighbor_weight = weight(hidden, hidden, prefix + ".neighbor");
      s.bias = bias(hidden, prefix + ".bias");
      layer.push_back(s);
    }
    m.layers.push_back(std::move(layer));
  }
  for (const auto& a : enc.attributes) {
    LinearSlots s;
    s.weight = weight(hidden, a.width(), "head." + a.name + ".weight");
    s.bias = bias(a.width(), "head." + a.name + ".bias");
    m.heads.push_back(s);
  }
  return m;
}

Var sage_conv(Var h_dst, Var h_src, const Groups& neighbors, Var self_weight, Var neighbor_weight, Var bias,
              Aggregator aggregator) {
  Var self = matmul(h_dst, self_weight);
  Var agg = segment_aggregate(h_src, neighbors, aggregator);
  return add(add(self, matmul(agg, neighbor_weight)), bias);
}

std::vector<Groups> neighbor_groups(const GraphBatch& batch, std::span<const RelationType> relations) {
  if (batch.edges.size() != relations.size()) {
    throw Error(ErrorCode::SchemaMismatch, "batch has " + std::to_string(batch.edges.size()) + " relations, model " +
                                               std::to_string(relations.size()));
  }
  const std::size_t rows = batch.rows();
  std::vector<Groups> out(relations.size());
  for (std::size_t r = 0; r < relations.size(); ++r) {
    const auto& edges = batch.edges[r];
    Groups& g = out[r];
    g.offsets.assign(rows + 1, 0);
    for (const auto& e : edges) {
      if (e.first >= rows || e.second >= rows) throw Error(ErrorCode::IndexOutOfRange, "edge endpoint beyond batch");
      ++g.offsets[e.second + 1];
    }
    for (std::size_t i = 0; i < rows; ++i) g.offsets[i + 1] += g.offsets[i];
    g.members.resize(edges.size());
    std::vector<std::uint32_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
    for (const auto& e : edges) g.members[cursor[e.second]++] = e.first;
  }
  return out;
}

std::vector<Var> sage_layer(std::span<const Var> hidden, std::span<const RelationType> relations,
                            std::span<const Groups> neighbors, std::span<const SageLeaves> layer, Aggregator aggregator,
                            bool activate) {
  std::vector<Var> out;
  out.reserve(hidden.size());
  for (std::size_t a = 0; a < hidden.size(); ++a) {
    // Sum_r (h W_self_r + agg_r W_neigh_r + b_r): the self terms share their
    // input, so the weights are summed before a single product.
    std::optional<Var> self_weight, bias, acc;
    for (std::size_t r = 0; r < relations.size(); ++r) {
      if (relations[r].dst != a) continue;
      self_weight = self_weight ? add(*self_weight, layer[r].self_weight) : layer[r].self_weight;
      bias = bias ? add(*bias, layer[r].bias) : layer[r].bias;
      Var agg = segment_aggregate(hidden[relations[r].src], neighbors[r], aggregator);
      Var msg = matmul(agg, layer[r].neighbor_weight);
      acc = acc ? add(*acc, msg) : msg;
    }
    if (!acc) {
      out.push_back(hidden[a]);
      continue;
    }
    Var h = add(add(matmul(hidden[a], *self_weight), *acc), *bias);
    out.push_back(activate ? relu(h) : h);
  }
  return out;
}

namespace {

template <typename Params, typename LeafFn>
Predictions forward_impl(Tape& tape, const GraphBatch& batch, Params& params, LeafFn leaf) {
  const std::size_t n_attr = params.input.size();
  if (batch.nodes.size() != n_attr) {
    throw Error(ErrorCode::SchemaMismatch, "batch has " + std::to_string(batch.nodes.size()) + " attributes, model " +
                                               std::to_string(n_attr));
  }
  for (std::size_t a = 0; a < n_attr; ++a) {
    if (batch.nodes[a].features.cols() != params.params[params.input[a].weight].value.rows()) {
      throw Error(ErrorCode::SchemaMismatch, "feature width of attribute " + std::to_string(a) + " differs from model");
    }
  }
  const auto neighbors = neighbor_groups(batch, params.relations);

  std::vector<Var> hidden;
  for (std::size_t a = 0; a < n_attr; ++a) {
    Var x = tape.constant_ref(batch.nodes[a].features);
    hidden.push_back(add(matmul(x, leaf(params.input[a].weight)), leaf(params.input[a].bias)));
  }
  const std::size_t n_layers = params.layers.size();
  for (std::size_t k = 0; k < n_layers; ++k) {
    std::vector<SageLeaves> leaves;
    for (const auto& s : params.layers[k]) {
      leaves.push_back(SageLeaves{leaf(s.self_weight), leaf(s.neighbor_weight), leaf(s.bias)});
    }
    hidden = sage_layer(hidden, params.relations, neighbors, leaves, params.config.aggregator, k + 1 < n_layers);
  }

  Predictions preds;
  preds.attributes.resize(n_attr);
  for (std::size_t a = 0; a < n_attr; ++a) {
    AttributePredictions& ap = preds.attributes[a];
    const NodeTable& t = batch.nodes[a];
    for (std::uint32_t row = 0; row < t.rows(); ++row) {
      if (!t.mask[row]) continue;
      ap.rows.push_back(row);
      const std::uint32_t g = batch.graph_of_row[row];
      ap.graph.push_back(g);
      ap.event.push_back(row - batch.row_offset[g]);
    }
    Var selected = gather_rows(hidden[a], ap.rows);
    ap.output = add(matmul(selected, leaf(params.heads[a].weight)), leaf(params.heads[a].bias));
  }
  return preds;
}

}  // namespace

Predictions forward(Tape& tape, const GraphBatch& batch, ModelParams& params) {
  return forward_impl(tape, batch, params, [&](std::uint32_t id) { return tape.param(params.params[id]); });
}

Predictions forward(Tape& tape, const GraphBatch& batch, const ModelParams& params) {
  return forward_impl(tape, batch, params, [&](std::uint32_t id) { return tape.param_ref(params.params[id]); });
}

Var compute_loss(const Predictions& preds, const GraphBatch& batch, Tape& tape) {
  std::optional<Var> total;
  for (std::size_t a = 0; a < preds.attributes.size(); ++a) {
    const AttributePredictions& ap = preds.attributes[a];
    const NodeTable& t = batch.nodes[a];
    std::vector<std::uint32_t> keep;
    for (std::uint32_t i = 0; i < ap.rows.size(); ++i) {
      if (t.has_target[ap.rows[i]]) keep.push_back(i);
    }
    if (keep.empty()) continue;
    Var out = gather_rows(ap.output, keep);
    Var term;
    if (!t.categorical) {
      Tensor target(keep.size(), 1);
      for (std::size_t i = 0; i < keep.size(); ++i) target(i, 0) = t.target_value[ap.rows[keep[i]]];
      term = l1_loss(out, target);
    } else {
      std::vector<std::int32_t> classes;
      for (std::uint32_t i : keep) classes.push_back(t.target_class[ap.rows[i]]);
      term = softmax_cross_entropy(out, classes);
    }
    total = total ? add(*total, term) : term;
  }
  return total ? *total : tape.constant(Tensor(1, 1));
}

std::size_t argmax_excluding_missing(std::span<const double> logits) {
  std::size_t best = 0;
  const std::size_t n = logits.size() > 1 ? logits.size() - 1 : logits.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

std::vector<Repair> predict_repair(const HeteroGraph& graph, const ModelParams& params, const EncoderSet& enc) {
  const GraphBatch batch = batch_graphs(std::span<const HeteroGraph>(&graph, 1));
  Tape tape;
  const Predictions preds = forward(tape, batch, params);
  const std::optional<Timestamp> origin = graph.origin ? graph.origin : enc.fallback_origin;

  std::vector<Repair> out;
  for (std::size_t a = 0; a < preds.attributes.size(); ++a) {
    const AttributeEncoder& e = enc.attributes[a];
    const AttributePredictions& ap = preds.attributes[a];
    const Tensor& values = ap.output.value();
    for (std::size_t i = 0; i < ap.rows.size(); ++i) {
      Repair r{ap.event[i], a, std::string()};
      if (e.categorical()) {
        r.value = e.vocabulary[argmax_excluding_missing(values.row(i))];
      } else if (e.kind == AttributeKind::Timestamp) {
        if (!origin) throw Error(ErrorCode::InvalidConfig, "no time origin available to repair '" + e.name + "'");
        // Keep absurd regressions representable (about 3000 years either way).
        constexpr double kMaxSeconds = 1e11;
        r.value = add_seconds(*origin, std::clamp(inverse_transform(values(i, 0), e), -kMaxSeconds, kMaxSeconds));
      } else {
        r.value = inverse_transform(values(i, 0), e);
      }
      out.push_back(std::move(r));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Repair& x, const Repair& y) {
    return x.event != y.event ? x.event < y.event : x.attribute < y.attribute;
  });
  return out;
}

}  // namespace logrepair
