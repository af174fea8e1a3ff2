#include "logrepair/graph/hetero_graph.hpp"

#include <algorithm>

#include "logrepair/error.hpp"

namespace logrepair {

std::vector<RelationType> relation_types(const AttributeSchema& schema) {
  const std::size_t act = schema.activity_index();
  std::vector<RelationType> forward;
  for (std::size_t a = 0; a < schema.size(); ++a) forward.push_back({a, a, RelationKind::Next});
  for (std::size_t b = 0; b < schema.size(); ++b) {
    if (b != act) forward.push_back({act, b, RelationKind::Describes});
  }
  std::vector<RelationType> all = forward;
  for (const auto& r : forward) {
    all.push_back({r.dst, r.src, r.kind == RelationKind::Next ? RelationKind::Previous : RelationKind::DescribedBy});
  }
  return all;
}

std::string relation_name(const RelationType& r, const AttributeSchema& schema) {
  const char* label = "next";
  switch (r.kind) {
    case RelationKind::Next: label = "next"; break;
    case RelationKind::Previous: label = "prev"; break;
    case RelationKind::Describes: label = "has"; break;
    case RelationKind::DescribedBy: label = "of"; break;
  }
  return schema.attributes[r.src].name + "-" + label + "->" + schema.attributes[r.dst].name;
}

std::size_t HeteroGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& e : edges) n += e.size();
  return n;
}

HeteroGraph build_graph(const Trace& trace, const EventMask& event_mask, const EncoderSet& enc) {
  const std::size_t len = trace.events.size();
  if (event_mask.size() != len) {
    throw Error(ErrorCode::LengthMismatch, "mask of length " + std::to_string(event_mask.size()) + " for trace '" +
                                               trace.case_id + "' of length " + std::to_string(len));
  }
  const std::size_t n_attr = enc.attributes.size();
  const std::size_t ts_index = enc.timestamp_index();

  HeteroGraph g;
  g.trace_len = len;
  g.case_id = trace.case_id;
  for (std::size_t i = 0; i < len; ++i) {
    const Cell& c = trace.events[i].values.at(ts_index);
    if (!event_mask[i] && c.is_present()) {
      g.origin = *c.as_timestamp();
      break;
    }
  }
  // Any other timestamp attribute still needs an origin when the main
  // timestamp is entirely unavailable.
  const std::optional<Timestamp> feature_origin = g.origin ? g.origin : enc.fallback_origin;

  g.nodes.resize(n_attr);
  for (std::size_t a = 0; a < n_attr; ++a) {
    const AttributeEncoder& e = enc.attributes[a];
    NodeTable& t = g.nodes[a];
    t.categorical = e.categorical();
    t.features = Tensor(len, e.width());
    t.mask.assign(len, false);
    t.has_target.assign(len, false);
    t.target_class.assign(len, -1);
    t.target_value.assign(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
      const Cell& cell = trace.events[i].values.at(a);
      const bool empty = event_mask[i] || cell.is_missing();
      t.mask[i] = empty;
      if (e.categorical()) {
        t.features(i, empty ? e.missing_index() : e.class_of(*cell.as_string())) = 1.0;
      } else {
        t.features(i, 0) = empty ? kMissingNumeric : transform_value(cell, e, feature_origin);
      }
      if (!event_mask[i] || cell.is_missing()) continue;
      if (e.categorical()) {
        t.target_class[i] = static_cast<std::int32_t>(e.class_of(*cell.as_string()));
        t.has_target[i] = true;
      } else if (e.kind != AttributeKind::Timestamp || g.origin) {
        t.target_value[i] = transform_value(cell, e, g.origin);
        t.has_target[i] = true;
      }
    }
  }

  const auto rels = relation_types(enc.schema);
  g.edges.resize(rels.size());
  for (std::size_t r = 0; r < rels.size(); ++r) {
    auto& list = g.edges[r];
    switch (rels[r].kind) {
      case RelationKind::Next:
        for (std::uint32_t i = 0; i + 1 < len; ++i) list.emplace_back(i, i + 1);
        break;
      case RelationKind::Previous:
        for (std::uint32_t i = 0; i + 1 < len; ++i) list.emplace_back(i + 1, i);
        break;
      case RelationKind::Describes:
      case RelationKind::DescribedBy:
        for (std::uint32_t i = 0; i < len; ++i) list.emplace_back(i, i);
        break;
    }
  }
  return g;
}

GraphBatch batch_graphs(std::span<const HeteroGraph> graphs) {
  std::vector<const HeteroGraph*> ptrs;
  ptrs.reserve(graphs.size());
  for (const auto& g : graphs) ptrs.push_back(&g);
  return batch_graphs(std::span<const HeteroGraph* const>(ptrs));
}

GraphBatch batch_graphs(std::span<const HeteroGraph* const> graphs) {
  GraphBatch b;
  b.row_offset.push_back(0);
  if (graphs.empty()) return b;
  const HeteroGraph& first = *graphs.front();
  const std::size_t n_attr = first.nodes.size();
  std::size_t total = 0;
  for (const HeteroGraph* gp : graphs) {
    const HeteroGraph& g = *gp;
    if (g.nodes.size() != n_attr || g.edges.size() != first.edges.size()) {
      throw Error(ErrorCode::SchemaMismatch, "graph '" + g.case_id + "' has a different attribute or relation set");
    }
    for (std::size_t a = 0; a < n_attr; ++a) {
      if (g.nodes[a].features.cols() != first.nodes[a].features.cols()) {
        throw Error(ErrorCode::SchemaMismatch, "graph '" + g.case_id + "' has a different feature width");
    }
    if (g.nodes[a].categorical != first.nodes[a].categorical) {
      throw Error(ErrorCode::SchemaMismatch, "graph '" + g.case_id + "' has a different attribute kind");
      }
    }
    total += g.trace_len;
  }

  b.nodes.resize(n_attr);
  for (std::size_t a = 0; a < n_attr; ++a) {
    NodeTable& t = b.nodes[a];
    t.categorical = first.nodes[a].categorical;
    const std::size_t width = first.nodes[a].features.cols();
    t.features = Tensor(total, width);
    t.mask.reserve(total);
    t.has_target.reserve(total);
    t.target_class.reserve(total);
    t.target_value.reserve(total);
    std::size_t row = 0;
    for (const HeteroGraph* g : graphs) {
      const NodeTable& s = g->nodes[a];
      std::copy(s.features.values().begin(), s.features.values().end(), t.features.data() + row * width);
      row += g->trace_len;
      t.mask.insert(t.mask.end(), s.mask.begin(), s.mask.end());
      t.has_target.insert(t.has_target.end(), s.has_target.begin(), s.has_target.end());
      t.target_class.insert(t.target_class.end(), s.target_class.begin(), s.target_class.end());
      t.target_value.insert(t.target_value.end(), s.target_value.begin(), s.target_value.end());
    }
  }

  b.edges.resize(first.edges.size());
  b.graph_of_row.reserve(total);
  std::uint32_t offset = 0;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const HeteroGraph& g = *graphs[gi];
    for (std::size_t r = 0; r < g.edges.size(); ++r) {
      for (const auto& [s, d] : g.edges[r]) b.edges[r].emplace_back(s + offset, d + offset);
    }
    b.graph_of_row.insert(b.graph_of_row.end(), g.trace_len, static_cast<std::uint32_t>(gi));
    offset += static_cast<std::uint32_t>(g.trace_len);
    b.row_offset.push_back(offset);
    b.origins.push_back(g.origin);
    b.case_ids.push_back(g.case_id);
  }
  return b;
}

std::vector<HeteroGraph> unbatch(const GraphBatch& b) {
  std::vector<HeteroGraph> out(b.graph_count());
  for (std::size_t gi = 0; gi < out.size(); ++gi) {
    HeteroGraph& g = out[gi];
    const std::uint32_t lo = b.row_offset[gi], hi = b.row_offset[gi + 1];
    g.trace_len = hi - lo;
    g.origin = b.origins[gi];
    g.case_id = b.case_ids[gi];
    g.nodes.resize(b.nodes.size());
    for (std::size_t a = 0; a < b.nodes.size(); ++a) {
      const NodeTable& s = b.nodes[a];
      NodeTable& t = g.nodes[a];
      t.categorical = s.categorical;
      const std::size_t width = s.features.cols();
      t.features = Tensor(g.trace_len, width,
                          std::vector<double>(s.features.data() + lo * width, s.features.data() + hi * width));
      t.mask.assign(s.mask.begin() + lo, s.mask.begin() + hi);
      t.has_target.assign(s.has_target.begin() + lo, s.has_target.begin() + hi);
      t.target_class.assign(s.target_class.begin() + lo, s.target_class.begin() + hi);
      t.target_value.assign(s.target_value.begin() + lo, s.target_value.begin() + hi);
    }
    g.edges.resize(b.edges.size());
  }
  for (std::size_t r = 0; r < b.edges.size(); ++r) {
    for (const auto& [s, d] : b.edges[r]) {
      const std::uint32_t gi = b.graph_of_row[s];
      const std::uint32_t lo = b.row_offset[gi];
      out[gi].edges[r].emplace_back(s - lo, d - lo);
    }
  }
  return out;
}

}  // namespace logrepair
