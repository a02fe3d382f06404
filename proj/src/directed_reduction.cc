#include "bab/directed_reduction.h"

#include <algorithm>
#include <functional>
#include <map>
#include <string>

#include "bab/errors.h"

namespace bab {
namespace {

constexpr int64_t kCountCap = int64_t{1} << 60;

// Tuples in the tree hanging below layered vertex (v, level): up trees grow
// along in-edges, down trees along out-edges.
int64_t SubtreeSize(const LayeredGraph& lg, VertexId layered,
                    std::map<VertexId, int64_t>& memo) {
  if (auto it = memo.find(layered); it != memo.end()) return it->second;
  int64_t total = 1;
  if (lg.Level(layered) < lg.height()) {
    const bool up = lg.direction() == Direction::kUp;
    const auto edges = up ? lg.graph().in_edges(layered)
                          : lg.graph().out_edges(layered);
    for (EdgeId e : edges) {
      const Edge& edge = lg.graph().edge(e);
      total += SubtreeSize(lg, up ? edge.tail : edge.head, memo);
      total = std::min(total, kCountCap);
    }
  }
  memo[layered] = total;
  return total;
}

std::string JoinTuple(const std::vector<VertexId>& tuple) {
  std::string out;
  for (size_t i = 0; i < tuple.size(); ++i) {
    if (i > 0) out += '.';
    out += std::to_string(tuple[i]);
  }
  return out;
}

}  // namespace

VertexId JunctionForest::TreeRoot(int root, Direction side) const {
  return side == Direction::kUp ? up_root_.at(root) : down_root_.at(root);
}

VertexId JunctionForest::BaseVertex(VertexId v) const {
  if (IsTuple(v)) {
    const TupleVertex& t = tuples_[v];
    return t.tuple.empty() ? t.root : t.tuple.back();
  }
  const int offset = v - num_tuples();
  return offset < num_roots_ ? offset : offset - num_roots_;
}

VertexId JunctionForest::Parent(VertexId v) const {
  const EdgeId e = ParentArc(v);
  if (e == kNoEdge) return -1;
  const Edge& edge = graph_.edge(e);
  return edge.tail == v ? edge.head : edge.tail;
}

std::vector<EdgeId> JunctionForest::PullBackPath(
    const std::vector<EdgeId>& h_path) const {
  std::vector<EdgeId> out;
  for (EdgeId e : h_path) {
    if (e < 0 || e >= graph_.num_edges()) {
      throw IntegrityError("H arc " + std::to_string(e) + " out of range");
    }
    out.insert(out.end(), back_path_[e].begin(), back_path_[e].end());
  }
  return out;
}

std::string JunctionForest::VertexName(VertexId v) const {
  if (IsTuple(v)) {
    const TupleVertex& t = tuples_[v];
    return std::to_string(t.root) + "|" + JoinTuple(t.tuple) +
           (t.side == Direction::kUp ? ":up" : ":down");
  }
  const int offset = v - num_tuples();
  return offset < num_roots_ ? "s:" + std::to_string(offset)
                             : "t:" + std::to_string(offset - num_roots_);
}

int64_t HNodeCount(const LayeredGraph& up, const LayeredGraph& down) {
  std::map<VertexId, int64_t> up_memo;
  std::map<VertexId, int64_t> down_memo;
  const int n = up.base_vertices();
  int64_t total = 2 * static_cast<int64_t>(n);
  for (VertexId r = 0; r < n; ++r) {
    total += SubtreeSize(up, up.RootVertex(r), up_memo);
    total += SubtreeSize(down, down.RootVertex(r), down_memo);
    total = std::min(total, kCountCap);
  }
  return total;
}

JunctionForest BuildH(const LayeredGraph& up, const LayeredGraph& down,
                      int64_t node_budget) {
  if (up.direction() != Direction::kUp ||
      down.direction() != Direction::kDown ||
      up.base_vertices() != down.base_vertices() ||
      up.height() != down.height()) {
    throw InvalidInput("H needs matching up and down layered graphs");
  }
  const int64_t needed = HNodeCount(up, down);
  if (needed > node_budget) {
    throw BudgetExceeded("H needs " + std::to_string(needed) +
                         " vertices, node budget is " +
                         std::to_string(node_budget));
  }
  const int n = up.base_vertices();
  const int h = up.height();

  JunctionForest out;
  out.num_roots_ = n;
  out.height_ = h;
  struct PendingArc {
    VertexId tail;
    VertexId head;
    double cost;
    double length;
    HArcInfo info;
    std::vector<EdgeId> back;
  };
  std::vector<PendingArc> arcs;

  // Depth-first over one tree; `layered` is the layered vertex of `node`.
  std::function<void(const LayeredGraph&, VertexId, VertexId)> grow =
      [&](const LayeredGraph& lg, VertexId node, VertexId layered) {
        if (lg.Level(layered) == h) return;
        const bool is_up = lg.direction() == Direction::kUp;
        const auto edges = is_up ? lg.graph().in_edges(layered)
                                 : lg.graph().out_edges(layered);
        std::vector<EdgeId> sorted(edges.begin(), edges.end());
        std::sort(sorted.begin(), sorted.end());
        for (EdgeId e : sorted) {
          const Edge& edge = lg.graph().edge(e);
          const VertexId next = is_up ? edge.tail : edge.head;
          TupleVertex child = out.tuples_[node];
          child.tuple.push_back(lg.Base(next));
          const VertexId id = static_cast<VertexId>(out.tuples_.size());
          out.tuples_.push_back(std::move(child));
          out.children_.emplace_back();
          out.children_[node].push_back(id);
          out.parent_arc_.push_back(static_cast<EdgeId>(arcs.size()));
          arcs.push_back({is_up ? id : node, is_up ? node : id, edge.cost,
                          edge.length,
                          {HArcKind::kTree, out.tuples_[id].root,
                           lg.direction(), e},
                          lg.BackPath(e)});
          grow(lg, id, next);
        }
      };

  for (VertexId r = 0; r < n; ++r) {
    for (const LayeredGraph* lg : {&up, &down}) {
      const VertexId id = static_cast<VertexId>(out.tuples_.size());
      out.tuples_.push_back({r, lg->direction(), {}});
      out.children_.emplace_back();
      out.parent_arc_.push_back(kNoEdge);
      (lg == &up ? out.up_root_ : out.down_root_).push_back(id);
      grow(*lg, id, lg->RootVertex(r));
    }
  }
  const int tuples = out.num_tuples();
  for (VertexId r = 0; r < n; ++r) {
    out.root_link_.push_back(static_cast<EdgeId>(arcs.size()));
    arcs.push_back({out.up_root_[r], out.down_root_[r], 0.0, 0.0,
                    {HArcKind::kRootLink, r, Direction::kUp, kNoEdge},
                    {}});
  }
  out.attach_arc_.assign(tuples, kNoEdge);
  for (VertexId v = 0; v < tuples; ++v) {
    const TupleVertex& t = out.tuples_[v];
    if (t.level() != h) continue;
    out.attach_arc_[v] = static_cast<EdgeId>(arcs.size());
    const VertexId w = t.tuple.back();
    if (t.side == Direction::kUp) {
      arcs.push_back({tuples + w, v, 0.0, 0.0,
                      {HArcKind::kSourceAttach, t.root, Direction::kUp,
                       kNoEdge},
                      {}});
    } else {
      arcs.push_back({v, tuples + n + w, 0.0, 0.0,
                      {HArcKind::kSinkAttach, t.root, Direction::kDown,
                       kNoEdge},
                      {}});
    }
  }

  out.graph_ = TwoMetricGraph(tuples + 2 * n, /*directed=*/true);
  for (PendingArc& a : arcs) {
    out.graph_.AddEdge(a.tail, a.head, a.cost, a.length);
    out.arc_info_.push_back(a.info);
    out.back_path_.push_back(std::move(a.back));
  }
  return out;
}

int CountRootLinks(const JunctionForest& h, const std::vector<EdgeId>& path) {
  int links = 0;
  for (EdgeId e : path) {
    if (h.arc_info(e).kind == HArcKind::kRootLink) ++links;
  }
  return links;
}

LpNetworks NetworksFromH(const JunctionForest& h, int n,
                         bool prize_collecting) {
  LpNetworks nets;
  nets.n = n;
  nets.num_roots = h.num_roots();
  nets.prize_collecting = prize_collecting;
  const TwoMetricGraph& g = h.graph();
  for (LpSide* side : {&nets.up, &nets.down}) {
    side->num_nodes = g.num_vertices();
  }
  for (const Edge& e : g.edges()) {
    const HArcInfo& info = h.arc_info(e.id);
    const bool up = (info.kind == HArcKind::kTree &&
                     info.side == Direction::kUp) ||
                    info.kind == HArcKind::kSourceAttach;
    const bool down = (info.kind == HArcKind::kTree &&
                       info.side == Direction::kDown) ||
                      info.kind == HArcKind::kSinkAttach;
    if (up) nets.up.arcs.push_back({e.tail, e.head, e.cost, e.length, e.id});
    if (down) {
      nets.down.arcs.push_back({e.tail, e.head, e.cost, e.length, e.id});
    }
  }
  for (int r = 0; r < h.num_roots(); ++r) {
    nets.up.root_node.push_back(h.TreeRoot(r, Direction::kUp));
    nets.down.root_node.push_back(h.TreeRoot(r, Direction::kDown));
    nets.up.terminal_node.push_back(h.SourceTerminal(r));
    nets.down.terminal_node.push_back(h.SinkTerminal(r));
  }
  return nets;
}

GstMapping MapToGst(const JunctionForest& h, VertexId junction,
                    const std::vector<std::pair<int, VertexId>>& terminals) {
  if (!h.IsTuple(junction)) {
    throw InvalidInput("GST junction must be a tuple vertex");
  }
  GstMapping m;
  m.junction = junction;
  m.side = h.tuple(junction).side;
  m.instance.root = 0;
  m.instance.parent.push_back(-1);
  m.instance.weight.push_back(0.0);
  m.h_vertex.push_back(junction);
  m.dangling.push_back(false);
  m.length.push_back(0.0);
  // Preorder, children in id order.
  std::vector<std::pair<VertexId, int>> stack{{junction, 0}};
  while (!stack.empty()) {
    const auto [v, node] = stack.back();
    stack.pop_back();
    const auto& children = h.Children(v);
    for (auto it = children.rbegin(); it != children.rend(); ++it) {
      const Edge& arc = h.graph().edge(h.ParentArc(*it));
      const int child = m.instance.AddNode(node, arc.cost);
      m.h_vertex.push_back(*it);
      m.dangling.push_back(false);
      m.length.push_back(m.length[node] + arc.length);
      stack.push_back({*it, child});
    }
  }
  for (const auto& [pair, w] : terminals) AddGstTerminal(h, m, pair, w);
  return m;
}

int AddGstTerminal(const JunctionForest& h, GstMapping& m, int pair,
                   VertexId w) {
  std::vector<int> group;
  const int tree_nodes = m.instance.num_nodes();
  for (int node = 0; node < tree_nodes; ++node) {
    if (m.dangling[node]) continue;
    const VertexId v = m.h_vertex[node];
    if (h.tuple(v).level() != h.height() || h.BaseVertex(v) != w) continue;
    const int leaf = m.instance.AddNode(node, m.length[node]);
    m.h_vertex.push_back(v);
    m.dangling.push_back(true);
    m.length.push_back(m.length[node]);
    group.push_back(leaf);
  }
  m.instance.groups.push_back(std::move(group));
  m.group_pair.push_back(pair);
  m.group_terminal.push_back(w);
  return static_cast<int>(m.instance.groups.size()) - 1;
}

std::vector<EdgeId> GstMemberPath(const JunctionForest& h,
                                  const GstMapping& m, int dangling) {
  if (dangling < 0 || dangling >= m.instance.num_nodes() ||
      !m.dangling[dangling]) {
    throw InvalidInput("not a dangling GST node");
  }
  // Leaf-to-junction tree arcs, then orient.
  std::vector<EdgeId> path{h.AttachArc(m.h_vertex[dangling])};
  for (VertexId v = m.h_vertex[dangling]; v != m.junction; v = h.Parent(v)) {
    path.push_back(h.ParentArc(v));
  }
  if (m.side == Direction::kDown) std::reverse(path.begin(), path.end());
  return path;
}

SolutionLedger MapBack(const JunctionForest& h, const GstMapping& m,
                       const std::vector<bool>& bought) {
  auto is_bought = [&](int node) {
    return node < static_cast<int>(bought.size()) && bought[node];
  };
  SolutionLedger ledger;
  for (size_t g = 0; g < m.instance.groups.size(); ++g) {
    int member = -1;
    for (int d : m.instance.groups[g]) {
      bool connected = true;
      for (int v : TreePathToRoot(m.instance, d)) connected &= is_bought(v);
      if (connected && (member < 0 || d < member)) member = d;
    }
    if (member < 0) {
      throw InvalidInput("group of pair " + std::to_string(m.group_pair[g]) +
                         " is not connected");
    }
    const VertexId w = m.group_terminal[g];
    const bool up = m.side == Direction::kUp;
    ledger.Route(h.graph(), m.group_pair[g],
                 up ? h.SourceTerminal(w) : m.junction,
                 up ? m.junction : h.SinkTerminal(w),
                 GstMemberPath(h, m, member));
  }
  return ledger;
}

SolutionLedger PullBackH(const JunctionForest& h, const TwoMetricGraph& g,
                         const SolutionLedger& h_ledger) {
  SolutionLedger out;
  for (const auto& [pair, path] : h_ledger.paths()) {
    out.Route(g, pair, h.BaseVertex(path.source), h.BaseVertex(path.target),
              h.PullBackPath(path.edges));
  }
  return out;
}

nlohmann::json HToJson(const JunctionForest& h) {
  nlohmann::json out;
  out["height"] = h.height();
  out["vertices"] = nlohmann::json::array();
  for (VertexId v = 0; v < h.graph().num_vertices(); ++v) {
    out["vertices"].push_back(h.VertexName(v));
  }
  out["edges"] = nlohmann::json::array();
  for (const Edge& e : h.graph().edges()) {
    static constexpr const char* kKinds[] = {"tree", "root_link",
                                             "source_attach", "sink_attach"};
    out["edges"].push_back({{"id", e.id},
                            {"tail", h.VertexName(e.tail)},
                            {"head", h.VertexName(e.head)},
                            {"c", e.cost},
                            {"l", e.length},
                            {"kind", kKinds[static_cast<int>(
                                         h.arc_info(e.id).kind)]}});
  }
  return out;
}

}  // namespace bab
