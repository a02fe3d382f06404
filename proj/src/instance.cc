#include "bab/instance.h"

#include <fstream>
#include <sstream>

#include "bab/errors.h"

namespace bab {
namespace {

using nlohmann::json;

template <typename T>
T Required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    throw InvalidInput(where + ": missing field \"" + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(where + ": bad field \"" + key + "\": " + e.what());
  }
}

double NonNegative(double v, const std::string& what) {
  if (!(v >= 0.0)) throw InvalidInput(what + " must be nonnegative");
  return v;
}

}  // namespace

std::string ModeName(Mode mode) {
  switch (mode) {
    case Mode::kEdge:
      return "edge";
    case Mode::kNode:
      return "node";
    case Mode::kDirected:
      return "directed";
    case Mode::kPrize:
      return "prize";
  }
  return "edge";
}

Mode ParseMode(const std::string& name) {
  if (name == "edge") return Mode::kEdge;
  if (name == "node") return Mode::kNode;
  if (name == "directed") return Mode::kDirected;
  if (name == "prize") return Mode::kPrize;
  throw InvalidInput("unknown mode \"" + name + "\"");
}

InstanceSpec ParseInstance(const json& j) {
  if (!j.is_object()) throw InvalidInput("instance must be a JSON object");
  InstanceSpec spec;
  spec.directed = j.value("directed", false);
  spec.n = Required<int>(j, "n", "instance");
  if (spec.n < 1) throw InvalidInput("instance: n must be positive");
  spec.mode = ParseMode(j.value("mode", std::string("edge")));
  auto check_vertex = [&](VertexId v, const std::string& where) {
    if (v < 0 || v >= spec.n) {
      throw InvalidInput(where + ": vertex " + std::to_string(v) +
                         " out of range");
    }
    return v;
  };

  std::vector<bool> seen_ids;
  if (j.contains("edges")) {
    for (const json& e : j.at("edges")) {
      InstanceSpec::EdgeSpec edge;
      const std::string where = "edge";
      edge.id = Required<int>(e, "id", where);
      if (edge.id < 0) throw InvalidInput("edge ids must be nonnegative");
      if (edge.id >= static_cast<int>(seen_ids.size())) {
        seen_ids.resize(edge.id + 1, false);
      }
      if (seen_ids[edge.id]) {
        throw InvalidInput("duplicate edge id " + std::to_string(edge.id));
      }
      seen_ids[edge.id] = true;
      edge.tail = check_vertex(Required<int>(e, "tail", where), where);
      edge.head = check_vertex(Required<int>(e, "head", where), where);
      if (e.contains("cables")) {
        for (const json& cable : e.at("cables")) {
          CableType type;
          type.fixed_cost =
              NonNegative(Required<double>(cable, "sigma", "cable"), "sigma");
          type.unit_cost =
              NonNegative(Required<double>(cable, "delta", "cable"), "delta");
          edge.cables.push_back(type);
        }
        if (edge.cables.empty()) {
          throw InvalidInput("edge " + std::to_string(edge.id) +
                             " has an empty cable list");
        }
      } else {
        edge.c = NonNegative(e.value("c", 0.0), "edge cost");
        edge.l = NonNegative(e.value("l", 0.0), "edge length");
      }
      spec.edges.push_back(std::move(edge));
    }
  }

  if (j.contains("pairs")) {
    for (const json& p : j.at("pairs")) {
      InstanceSpec::PairSpec pair;
      pair.s = check_vertex(Required<int>(p, "s", "pair"), "pair");
      pair.t = check_vertex(Required<int>(p, "t", "pair"), "pair");
      if (p.contains("d") && p.at("d").get<double>() != 1.0) {
        throw InvalidInput("only unit demands are supported");
      }
      if (p.contains("q")) {
        pair.q = NonNegative(p.at("q").get<double>(), "penalty");
      }
      spec.pairs.push_back(pair);
    }
  }

  if (j.contains("node_costs")) {
    spec.node_costs.assign(spec.n, NodeWeight{});
    for (const json& nc : j.at("node_costs")) {
      const VertexId v =
          check_vertex(Required<int>(nc, "v", "node_costs"), "node_costs");
      spec.node_costs[v].cost =
          NonNegative(nc.value("c", 0.0), "node cost");
      spec.node_costs[v].length =
          NonNegative(nc.value("l", 0.0), "node length");
    }
  }
  return spec;
}

json InstanceToJson(const InstanceSpec& spec) {
  json j;
  j["directed"] = spec.directed;
  j["n"] = spec.n;
  j["mode"] = ModeName(spec.mode);
  j["edges"] = json::array();
  for (const auto& e : spec.edges) {
    json edge = {{"id", e.id}, {"tail", e.tail}, {"head", e.head}};
    if (e.cables.empty()) {
      edge["c"] = e.c;
      edge["l"] = e.l;
    } else {
      edge["cables"] = json::array();
      for (const CableType& cable : e.cables) {
        edge["cables"].push_back(
            {{"sigma", cable.fixed_cost}, {"delta", cable.unit_cost}});
      }
    }
    j["edges"].push_back(std::move(edge));
  }
  j["pairs"] = json::array();
  for (const auto& p : spec.pairs) {
    json pair = {{"s", p.s}, {"t", p.t}};
    if (p.q) pair["q"] = *p.q;
    j["pairs"].push_back(std::move(pair));
  }
  if (!spec.node_costs.empty()) {
    j["node_costs"] = json::array();
    for (int v = 0; v < static_cast<int>(spec.node_costs.size()); ++v) {
      j["node_costs"].push_back({{"v", v},
                                 {"c", spec.node_costs[v].cost},
                                 {"l", spec.node_costs[v].length}});
    }
  }
  return j;
}

InstanceSpec LoadInstance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open instance file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput("malformed JSON in " + path + ": " + e.what());
  }
  return ParseInstance(j);
}

void SaveInstance(const InstanceSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << InstanceToJson(spec).dump(1) << "\n";
}

Instance Materialize(const InstanceSpec& spec, std::optional<Mode> mode) {
  Instance inst;
  inst.mode = mode.value_or(spec.mode);
  inst.input_vertices = spec.n;

  std::vector<CabledEdge> cabled;
  cabled.reserve(spec.edges.size());
  for (const auto& e : spec.edges) {
    CabledEdge ce{e.id, e.tail, e.head, e.cables};
    if (ce.cables.empty()) ce.cables.push_back({e.c, e.l});
    cabled.push_back(std::move(ce));
  }
  TwoMetricGraph base = BabToTwoMetric(spec.n, spec.directed, cabled);

  if (inst.mode == Mode::kNode && spec.node_costs.empty()) {
    throw InvalidInput("node mode requires node_costs");
  }
  inst.node_split = !spec.node_costs.empty();
  if (inst.node_split) {
    SplitGraph split = NodeSplit(base, spec.node_costs);
    inst.graph = std::move(split.graph);
  } else {
    inst.graph = std::move(base);
  }

  for (int i = 0; i < static_cast<int>(spec.pairs.size()); ++i) {
    const auto& p = spec.pairs[i];
    TerminalPair pair;
    pair.index = i;
    pair.s = inst.node_split ? SplitGraph::OutVertex(p.s) : p.s;
    pair.t = inst.node_split ? SplitGraph::InVertex(p.t) : p.t;
    if (inst.mode == Mode::kPrize) {
      if (!p.q) {
        throw InvalidInput("prize mode requires q on pair " +
                           std::to_string(i));
      }
      pair.penalty = p.q;
    }
    inst.pairs.push_back(pair);
  }
  return inst;
}

}  // namespace bab
