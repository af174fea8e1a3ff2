#pragma once

#include "logrepair/graph/encoders.hpp"
#include "logrepair/log/event_log.hpp"
#include "logrepair/model/hgnn.hpp"

namespace logrepair {

/// Fills every Missing cell of `damaged` with the model's repair; present
/// cells are copied untouched. Missing cells of a trace-scoped attribute take
/// a value present elsewhere in the trace if there is one. Repaired main
/// timestamps are clamped between their neighbours so events stay ordered.
/// Throws SchemaMismatch when the log or params do not match `enc`.
EventLog repair_log(const EventLog& damaged, const ModelParams& params, const EncoderSet& enc);

}  // namespace logrepair
