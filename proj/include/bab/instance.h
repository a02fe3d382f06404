#pragma once

// Problem instances: the JSON file form and the materialized two-metric form
// the algorithms run on.

#include <optional>
#include <string>
#include <vector>

#include "bab/graph.h"
#include "json.hpp"

namespace bab {

enum class Mode { kEdge, kNode, kDirected, kPrize };

std::string ModeName(Mode mode);
// Throws InvalidInput on an unknown name.
Mode ParseMode(const std::string& name);

struct TerminalPair {
  int index = 0;
  VertexId s = 0;
  VertexId t = 0;
  std::optional<double> penalty;  // q_i, prize-collecting only
};

// Instance as stored on disk.
struct InstanceSpec {
  struct EdgeSpec {
    int id = 0;
    VertexId tail = 0;
    VertexId head = 0;
    double c = 0.0;
    double l = 0.0;
    std::vector<CableType> cables;  // replaces (c, l) when non-empty
  };
  struct PairSpec {
    VertexId s = 0;
    VertexId t = 0;
    std::optional<double> q;
  };

  bool directed = false;
  int n = 0;
  std::vector<EdgeSpec> edges;
  std::vector<PairSpec> pairs;
  Mode mode = Mode::kEdge;
  std::vector<NodeWeight> node_costs;  // empty unless node-weighted
};

// Throws InvalidInput on schema violations, demands other than 1, negative
// weights or penalties, and out-of-range vertices.
InstanceSpec ParseInstance(const nlohmann::json& json);
nlohmann::json InstanceToJson(const InstanceSpec& spec);
InstanceSpec LoadInstance(const std::string& path);
void SaveInstance(const InstanceSpec& spec, const std::string& path);

// Working form. Node-weighted inputs are split and their terminals remapped;
// cable lists are expanded into parallel edges.
struct Instance {
  TwoMetricGraph graph;
  std::vector<TerminalPair> pairs;
  Mode mode = Mode::kEdge;
  int input_vertices = 0;
  bool node_split = false;
};

// `mode` overrides the file's mode when set. Prize mode requires q on every
// pair; node mode requires node costs.
Instance Materialize(const InstanceSpec& spec,
                     std::optional<Mode> mode = std::nullopt);

}  // namespace bab
