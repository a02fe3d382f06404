#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "bab/errors.h"
#include "bab/harness.h"
#include "bab/single_sink.h"

namespace bab {
namespace {

int IntParam(const nlohmann::json& params, const char* key, int fallback,
             int lo) {
  const int v = params.value(key, fallback);
  if (v < lo) {
    throw InvalidInput(std::string("parameter '") + key + "' must be >= " +
                       std::to_string(lo));
  }
  return v;
}

class Builder {
 public:
  Builder(const nlohmann::json& params, uint64_t seed)
      : rng_(seed),
        max_c_(IntParam(params, "max_c", 8, 0)),
        max_l_(IntParam(params, "max_l", 4, 0)) {}

  int Uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  std::mt19937_64& rng() { return rng_; }

  void AddEdge(InstanceSpec& spec, VertexId u, VertexId v) {
    InstanceSpec::EdgeSpec e;
    e.id = static_cast<int>(spec.edges.size());
    e.tail = u;
    e.head = v;
    e.c = Uniform(std::min(1, max_c_), max_c_);
    e.l = Uniform(0, max_l_);
    spec.edges.push_back(e);
  }

  // k pairs with s != t drawn from `candidates`.
  void AddPairs(InstanceSpec& spec, int k,
                const std::vector<VertexId>& candidates) {
    if (candidates.size() < 2) throw InvalidInput("too few vertices for pairs");
    const int last = static_cast<int>(candidates.size()) - 1;
    for (int i = 0; i < k; ++i) {
      const VertexId s = candidates[Uniform(0, last)];
      VertexId t = s;
      while (t == s) t = candidates[Uniform(0, last)];
      spec.pairs.push_back({s, t, std::nullopt});
    }
  }

 private:
  std::mt19937_64 rng_;
  int max_c_;
  int max_l_;
};

std::vector<VertexId> AllVertices(int n) {
  std::vector<VertexId> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// Penalties and node weights shared by every kind.
void Decorate(InstanceSpec& spec, const nlohmann::json& params,
              Builder& builder) {
  if (params.contains("q")) {
    const double q = params["q"].get<double>();
    if (q < 0) throw InvalidInput("parameter 'q' must be >= 0");
    for (auto& p : spec.pairs) p.q = q;
    spec.mode = Mode::kPrize;
  } else if (params.contains("max_q")) {
    const int max_q = IntParam(params, "max_q", 0, 0);
    for (auto& p : spec.pairs) p.q = builder.Uniform(0, max_q);
    spec.mode = Mode::kPrize;
  }
  if (params.value("node_weighted", false)) {
    for (auto& e : spec.edges) e.c = e.l = 0.0;
    for (int v = 0; v < spec.n; ++v) {
      spec.node_costs.push_back({static_cast<double>(builder.Uniform(1, 8)),
                                 static_cast<double>(builder.Uniform(0, 4))});
    }
    spec.mode = Mode::kNode;
  }
  if (params.contains("mode")) {
    spec.mode = ParseMode(params["mode"].get<std::string>());
  }
}

InstanceSpec RandomDigraph(const nlohmann::json& params, Builder& b) {
  InstanceSpec spec;
  spec.n = IntParam(params, "n", 6, 2);
  spec.directed = params.value("directed", true);
  const int m = IntParam(params, "m", 2 * spec.n, 0);
  int added = 0;
  if (params.value("connected", true)) {
    std::vector<VertexId> order = AllVertices(spec.n);
    std::shuffle(order.begin(), order.end(), b.rng());
    for (int i = 0; i < spec.n; ++i) {
      b.AddEdge(spec, order[i], order[(i + 1) % spec.n]);
      ++added;
    }
  }
  for (; added < m; ++added) {
    const VertexId u = b.Uniform(0, spec.n - 1);
    VertexId v = u;
    while (v == u) v = b.Uniform(0, spec.n - 1);
    b.AddEdge(spec, u, v);
  }
  b.AddPairs(spec, IntParam(params, "k", 2, 0), AllVertices(spec.n));
  return spec;
}

InstanceSpec Grid(const nlohmann::json& params, Builder& b) {
  const int rows = IntParam(params, "rows", 2, 1);
  const int cols = IntParam(params, "cols", 2, 1);
  InstanceSpec spec;
  spec.n = rows * cols;
  spec.directed = false;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const VertexId v = r * cols + c;
      if (c + 1 < cols) b.AddEdge(spec, v, v + 1);
      if (r + 1 < rows) b.AddEdge(spec, v, v + cols);
    }
  }
  b.AddPairs(spec, IntParam(params, "k", 2, 0), AllVertices(spec.n));
  return spec;
}

// Center 0 with `arms` paths of `length` edges; pairs join arm tips and the
// center.
InstanceSpec StarOfPaths(const nlohmann::json& params, Builder& b) {
  const int arms = IntParam(params, "arms", 3, 1);
  const int length = IntParam(params, "length", 2, 1);
  InstanceSpec spec;
  spec.n = 1 + arms * length;
  spec.directed = false;
  std::vector<VertexId> tips = {0};
  for (int a = 0; a < arms; ++a) {
    VertexId prev = 0;
    for (int j = 0; j < length; ++j) {
      const VertexId v = 1 + a * length + j;
      b.AddEdge(spec, prev, v);
      prev = v;
    }
    tips.push_back(prev);
  }
  b.AddPairs(spec, IntParam(params, "k", 2, 0), tips);
  return spec;
}

}  // namespace

double GreedyRoutingCost(const Instance& instance) {
  GreedyRouter router(instance.graph);
  for (const TerminalPair& p : instance.pairs) {
    if (router.Plan(p.s, p.t)) router.Route(p.index, p.s, p.t);
  }
  return router.cost().total;
}

InstanceSpec AdversarialOrder(const InstanceSpec& spec) {
  const int k = static_cast<int>(spec.pairs.size());
  if (k > 6) throw InvalidInput("adversarial order needs at most 6 pairs");
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  InstanceSpec best = spec;
  double worst = -1.0;
  do {
    InstanceSpec candidate = spec;
    for (int i = 0; i < k; ++i) candidate.pairs[i] = spec.pairs[perm[i]];
    const double cost = GreedyRoutingCost(Materialize(candidate));
    if (cost > worst) {
      worst = cost;
      best = std::move(candidate);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

InstanceSpec Generate(const std::string& kind, const nlohmann::json& params,
                      uint64_t seed) {
  if (!params.is_object()) throw InvalidInput("params must be an object");
  if (kind == "adversarial") {
    const std::string inner = params.value("inner", "random-digraph");
    if (inner == "adversarial") throw InvalidInput("nested adversarial kind");
    return AdversarialOrder(Generate(inner, params, seed));
  }
  Builder builder(params, seed);
  InstanceSpec spec;
  if (kind == "random-digraph") {
    spec = RandomDigraph(params, builder);
  } else if (kind == "grid") {
    spec = Grid(params, builder);
  } else if (kind == "star-of-paths") {
    spec = StarOfPaths(params, builder);
  } else {
    throw InvalidInput("unknown instance kind '" + kind + "'");
  }
  Decorate(spec, params, builder);
  return spec;
}

}  // namespace bab
