#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "logrepair/graph/encoders.hpp"
#include "logrepair/graph/hetero_graph.hpp"
#include "logrepair/tensor/tape.hpp"

namespace logrepair {

struct ModelConfig {
  std::size_t hidden_size = 128;
  std::size_t layers = 2;
  Aggregator aggregator = Aggregator::Mean;
  std::uint64_t seed = 123;

  void validate() const;  // throws InvalidConfig
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Indices of a weight/bias pair in ModelParams::params.
struct LinearSlots {
  std::uint32_t weight = 0;
  std::uint32_t bias = 0;
};

/// Parameters of one SAGE operator: out = h_i W_self + agg(h_j) W_neigh + b.
struct SageSlots {
  std::uint32_t self_weight = 0;
  std::uint32_t neighbor_weight = 0;
  std::uint32_t bias = 0;
};

/// All learnable tensors. `params[i].id == i`; the layout below is a pure
/// function of the encoder set and config.
struct ModelParams {
  ModelConfig config;
  std::uint64_t schema_hash = 0;
  std::vector<RelationType> relations;
  std::vector<Parameter> params;
  std::vector<LinearSlots> input;              // per attribute: width -> hidden
  std::vector<std::vector<SageSlots>> layers;  // [layer][relation]
  std::vector<LinearSlots> heads;              // per attribute: hidden -> width

  std::size_t scalar_count() const;
  void zero_grad();
};

/// Fingerprint of schema and vocabularies; params only load against the
/// encoder set they were trained with.
std::uint64_t schema_hash(const EncoderSet& enc);

/// Glorot-uniform weights, zero biases, deterministic under config.seed.
ModelParams init_params(const EncoderSet& enc, const ModelConfig& cfg);

/// Per-relation SAGE convolution without activation.
Var sage_conv(Var h_dst, Var h_src, const Groups& neighbors, Var self_weight, Var neighbor_weight, Var bias,
              Aggregator aggregator);

/// Row groups of incoming neighbours per relation, for every relation of a batch.
std::vector<Groups> neighbor_groups(const GraphBatch& batch, std::span<const RelationType> relations);

/// Leaves of one layer's parameters, per relation.
struct SageLeaves {
  Var self_weight;
  Var neighbor_weight;
  Var bias;
};

/// One message-passing layer over all node types: for every destination
/// attribute, the sum over relations targeting it of the per-relation SAGE
/// output, rectified when `activate`.
std::vector<Var> sage_layer(std::span<const Var> hidden, std::span<const RelationType> relations,
                            std::span<const Groups> neighbors, std::span<const SageLeaves> layer, Aggregator aggregator,
                            bool activate);

/// Head outputs for the flagged rows of one attribute.
struct AttributePredictions {
  Var output;                          // rows x width: logits or a single value
  std::vector<std::uint32_t> rows;     // batch row of each prediction
  std::vector<std::uint32_t> graph;    // graph index within the batch
  std::vector<std::uint32_t> event;    // event index within its trace
};

struct Predictions {
  std::vector<AttributePredictions> attributes;

  std::size_t row_count() const;
};

/// Input projections, K SAGE layers (ReLU between, linear last), then the
/// attribute heads on masked rows only. The mutable overload records
/// gradient sinks; the const overload is for inference.
Predictions forward(Tape& tape, const GraphBatch& batch, ModelParams& params);
Predictions forward(Tape& tape, const GraphBatch& batch, const ModelParams& params);

/// Sum over categorical attributes of mean cross-entropy plus sum over
/// numeric attributes of mean absolute error, over masked rows with a known
/// target. Attributes without such rows contribute 0.
Var compute_loss(const Predictions& preds, const GraphBatch& batch, Tape& tape);

struct Repair {
  std::size_t event = 0;
  std::size_t attribute = 0;
  Value value;
};

/// Repaired values for every flagged node of a graph: argmax over the
/// vocabulary excluding MISSING VALUE (lowest index on ties), or the
/// inverse transform of the regression output.
std::vector<Repair> predict_repair(const HeteroGraph& graph, const ModelParams& params, const EncoderSet& enc);

/// Argmax over all classes but the last (MISSING VALUE).
std::size_t argmax_excluding_missing(std::span<const double> logits);

/// Binary parameter file: "SGRF", u32 version, u64 schema hash, config, then
/// every parameter (id, rows, cols, little-endian f64 data) in id order.
void write_params(std::ostream& out, const ModelParams& params);
/// Throws FormatError or SchemaMismatch.
ModelParams read_params(std::istream& in, const EncoderSet& enc);

}  // namespace logrepair
