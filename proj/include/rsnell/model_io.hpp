// JSON ingestion and serialization for tree models.
//
// Schema ("tree_model"):
//   {"kind":"tree_model","horizon":int,"dim":int,
//    "nodes":[{"id":str,"t":int,"parent":str|null,"succ":[str],"S":[num],"dt":num}],
//    "local_sets":{node-id:[[num]]},"payoff":{node-id:num}}
// Serialization writes keys in exactly this order; terminal nodes omit "dt".
#pragma once

#include "rsnell/measure.hpp"
#include "rsnell/tree.hpp"

#include <string>
#include <tuple>

namespace rsnell {

struct TreeModel {
    ScenarioTree tree;
    MeasureFamily family;
    ScalarProcess payoff;
};

/// Parses and validates a tree_model JSON document. Throws ModelError with
/// the offending node id and rule on any invariant violation.
TreeModel parse_model(const std::string& json_text);

/// Reads a tree_model file from disk.
TreeModel load_model(const std::string& path);

/// Serializes back to the canonical schema (stable key order, round-trip
/// lossless numbers).
std::string serialize_model(const TreeModel& model);

void save_model(const TreeModel& model, const std::string& path);

/// Reads just the "kind" discriminator of a JSON file ("tree_model",
/// "characteristics", "uv", "levy", ...). Throws ModelError on parse failure.
std::string peek_kind(const std::string& path);

} // namespace rsnell
