#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "logrepair/graph/encoders.hpp"
#include "logrepair/graph/mask.hpp"
#include "logrepair/log/event_log.hpp"
#include "logrepair/tensor/tensor.hpp"

namespace logrepair {

/// Edge types. Chains link consecutive events of one attribute; spokes link
/// an event's activity node to its other attribute nodes. Each has a
/// reverse twin with swapped endpoints.
enum class RelationKind { Next, Previous, Describes, DescribedBy };

struct RelationType {
  std::size_t src = 0;  // attribute index
  std::size_t dst = 0;
  RelationKind kind = RelationKind::Next;

  bool reverse() const noexcept { return kind == RelationKind::Previous || kind == RelationKind::DescribedBy; }

  friend bool operator==(const RelationType&, const RelationType&) = default;
};

/// Relation types for a schema in canonical order: forward chains (schema
/// order), forward spokes, then the reverses in the same order. The count is
/// 2 * (n + n - 1) for n attributes.
std::vector<RelationType> relation_types(const AttributeSchema& schema);
std::string relation_name(const RelationType& r, const AttributeSchema& schema);

using Edge = std::pair<std::uint32_t, std::uint32_t>;  // (src row, dst row)

/// Nodes of one attribute type: one row per event.
struct NodeTable {
  bool categorical = true;
  Tensor features;                    // rows x encoder width
  std::vector<bool> mask;             // node is empty and must be repaired
  std::vector<bool> has_target;       // ground truth known for a masked node
  std::vector<std::int32_t> target_class;  // categorical, -1 when absent
  std::vector<double> target_value;        // numeric, normalized space

  std::size_t rows() const noexcept { return mask.size(); }

  friend bool operator==(const NodeTable&, const NodeTable&) = default;
};

/// One trace encoded as a typed graph.
struct HeteroGraph {
  std::size_t trace_len = 0;
  std::vector<NodeTable> nodes;             // one per attribute
  std::vector<std::vector<Edge>> edges;     // aligned with relation_types()
  std::optional<Timestamp> origin;          // reference for timestamp features
  std::string case_id;

  std::size_t node_count() const noexcept { return trace_len * nodes.size(); }
  std::size_t edge_count() const;

  friend bool operator==(const HeteroGraph&, const HeteroGraph&) = default;
};

/// Encode a trace with `event_mask` applied. A node is flagged empty if its
/// event is masked or its cell is Missing in the data; flagged nodes get
/// the MISSING VALUE one-hot / -1 feature. Targets are recorded for masked
/// events with a present ground-truth value. The timestamp origin is the
/// first present, unmasked timestamp, so features never depend on removed
/// values. Throws LengthMismatch.
HeteroGraph build_graph(const Trace& trace, const EventMask& event_mask, const EncoderSet& enc);

/// Disjoint union of graphs sharing one encoder set.
struct GraphBatch {
  std::vector<NodeTable> nodes;                  // concatenated per attribute
  std::vector<std::vector<Edge>> edges;          // offset-shifted
  std::vector<std::uint32_t> row_offset;         // graph g owns rows [row_offset[g], row_offset[g+1])
  std::vector<std::uint32_t> graph_of_row;
  std::vector<std::optional<Timestamp>> origins;
  std::vector<std::string> case_ids;

  std::size_t graph_count() const noexcept { return row_offset.empty() ? 0 : row_offset.size() - 1; }
  std::size_t rows() const noexcept { return graph_of_row.size(); }
};

/// Throws SchemaMismatch when graphs disagree on attribute count, feature
/// widths or relation count.
GraphBatch batch_graphs(std::span<const HeteroGraph> graphs);
GraphBatch batch_graphs(std::span<const HeteroGraph* const> graphs);
std::vector<HeteroGraph> unbatch(const GraphBatch& batch);

}  // namespace logrepair
