#include "csb/graph.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>

#include "csb/error.h"

namespace csb {

FeedbackGraph::FeedbackGraph(int num_arms,
                             const std::vector<std::pair<int, int>>& edges) {
  if (num_arms < 1) {
    throw Error(ErrorCode::kInvalidGraph, "graph needs at least one arm");
  }
  out_.assign(num_arms, {});
  in_.assign(num_arms, {});
  for (const auto& [from, to] : edges) {
    if (from < 0 || from >= num_arms || to < 0 || to >= num_arms) {
      throw Error(ErrorCode::kInvalidGraph,
                  "edge (" + std::to_string(from) + ", " + std::to_string(to) +
                      ") outside [0, " + std::to_string(num_arms) + ")");
    }
    out_[from].push_back(to);
    in_[to].push_back(from);
  }
  for (int a = 0; a < num_arms; ++a) {
    std::sort(out_[a].begin(), out_[a].end());
    std::sort(in_[a].begin(), in_[a].end());
    if (std::adjacent_find(out_[a].begin(), out_[a].end()) != out_[a].end()) {
      throw Error(ErrorCode::kInvalidGraph,
                  "duplicate edge out of arm " + std::to_string(a));
    }
  }
}

bool FeedbackGraph::HasEdge(int from, int to) const {
  return std::binary_search(out_[from].begin(), out_[from].end(), to);
}

std::vector<std::pair<int, int>> FeedbackGraph::Edges() const {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < num_arms(); ++a) {
    for (int b : out_[a]) edges.emplace_back(a, b);
  }
  return edges;
}

std::size_t FeedbackGraph::num_edges() const {
  std::size_t n = 0;
  for (const auto& o : out_) n += o.size();
  return n;
}

std::string_view ObservabilityName(Observability o) {
  switch (o) {
    case Observability::kStronglyObservable: return "strongly_observable";
    case Observability::kWeaklyObservable: return "weakly_observable";
    case Observability::kUnobservable: return "unobservable";
  }
  return "unknown";
}

Observability ClassifyObservability(const FeedbackGraph& g) {
  const int k = g.num_arms();
  bool strong = true;
  for (int a = 0; a < k; ++a) {
    if (g.in(a).empty()) return Observability::kUnobservable;
    if (g.HasSelfLoop(a)) continue;
    // Without a self-loop, every other arm must observe a.
    if (static_cast<int>(g.in(a).size()) != k - 1) strong = false;
  }
  return strong ? Observability::kStronglyObservable
                : Observability::kWeaklyObservable;
}

namespace {

using Mask = std::uint32_t;

struct IndependenceSearch {
  std::vector<Mask> adjacency;  // symmetrized, no self-loops
  int best = 0;

  // Upper bound on the independent set inside `candidates`: each greedy
  // clique can contribute at most one member.
  int CliqueCoverBound(Mask candidates) const {
    int cliques = 0;
    while (candidates) {
      Mask clique_pool = candidates;
      while (clique_pool) {
        const int v = std::countr_zero(clique_pool);
        candidates &= ~(Mask{1} << v);
        clique_pool &= adjacency[v];
      }
      ++cliques;
    }
    return cliques;
  }

  void Expand(Mask candidates, int size) {
    if (candidates == 0) {
      best = std::max(best, size);
      return;
    }
    if (size + std::popcount(candidates) <= best) return;
    if (size + CliqueCoverBound(candidates) <= best) return;
    // Branch on the candidate with the most neighbours among candidates.
    int pivot = -1;
    int pivot_degree = -1;
    for (Mask rest = candidates; rest; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      const int d = std::popcount(adjacency[v] & candidates);
      if (d > pivot_degree) {
        pivot = v;
        pivot_degree = d;
      }
    }
    const Mask bit = Mask{1} << pivot;
    if (pivot_degree == 0) {
      // Every remaining candidate is isolated; take them all.
      best = std::max(best, size + std::popcount(candidates));
      return;
    }
    Expand(candidates & ~bit & ~adjacency[pivot], size + 1);
    Expand(candidates & ~bit, size);
  }
};

}  // namespace

int IndependenceNumberExact(const FeedbackGraph& g, int cap) {
  const int k = g.num_arms();
  if (k > cap || k > 32) {
    throw Error(ErrorCode::kCapExceeded,
                "exact independence number limited to K <= " +
                    std::to_string(std::min(cap, 32)) + ", got K = " +
                    std::to_string(k));
  }
  IndependenceSearch search;
  search.adjacency.assign(k, 0);
  for (int a = 0; a < k; ++a) {
    for (int b : g.out(a)) {
      if (a == b) continue;
      search.adjacency[a] |= Mask{1} << b;
      search.adjacency[b] |= Mask{1} << a;
    }
  }
  const Mask all = k == 32 ? ~Mask{0} : (Mask{1} << k) - 1;
  search.Expand(all, 0);
  return search.best;
}

std::vector<int> GreedyDominatingSet(const FeedbackGraph& g) {
  const int k = g.num_arms();
  for (int a = 0; a < k; ++a) {
    if (g.in(a).empty()) {
      throw Error(ErrorCode::kNotObservable,
                  "arm " + std::to_string(a) + " has no in-neighbor");
    }
  }
  std::vector<std::uint8_t> dominated(k, 0);
  int remaining = k;
  std::vector<int> chosen;
  while (remaining > 0) {
    int pick = -1;
    int gain = 0;
    for (int u = 0; u < k; ++u) {
      int covers = 0;
      for (int b : g.out(u)) covers += dominated[b] ? 0 : 1;
      if (covers > gain) {
        pick = u;
        gain = covers;
      }
    }
    if (pick < 0) {
      throw Error(ErrorCode::kNotObservable, "undominatable arm remains");
    }
    chosen.push_back(pick);
    for (int b : g.out(pick)) {
      if (!dominated[b]) {
        dominated[b] = 1;
        --remaining;
      }
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

Subgraph RestrictedSubgraph(const FeedbackGraph& g, std::vector<int> arms) {
  const int k = g.num_arms();
  std::sort(arms.begin(), arms.end());
  arms.erase(std::unique(arms.begin(), arms.end()), arms.end());
  std::vector<int> new_id(k, -1);
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (arms[i] < 0 || arms[i] >= k) {
      throw Error(ErrorCode::kInvalidArm,
                  "arm " + std::to_string(arms[i]) + " not in graph");
    }
    new_id[arms[i]] = static_cast<int>(i);
  }
  if (arms.empty()) {
    throw Error(ErrorCode::kInvalidArm, "restriction to an empty arm set");
  }
  std::vector<std::pair<int, int>> edges;
  for (int a : arms) {
    for (int b : g.out(a)) {
      if (new_id[b] >= 0) edges.emplace_back(new_id[a], new_id[b]);
    }
  }
  return {FeedbackGraph(static_cast<int>(arms.size()), edges), arms};
}

std::vector<int> OutNeighborhood(const FeedbackGraph& g, const Action& v) {
  std::vector<std::uint8_t> seen(g.num_arms(), 0);
  for (int a : v.arms()) {
    for (int b : g.out(a)) seen[b] = 1;
  }
  std::vector<int> result;
  for (int b = 0; b < g.num_arms(); ++b) {
    if (seen[b]) result.push_back(b);
  }
  return result;
}

GraphProfile ComputeProfile(const FeedbackGraph& g,
                            std::optional<int> alpha_hint, int cap) {
  GraphProfile profile;
  profile.observability = ClassifyObservability(g);
  if (g.num_arms() <= cap) {
    profile.alpha = IndependenceNumberExact(g, cap);
    profile.alpha_is_exact = true;
  } else {
    profile.alpha = alpha_hint.value_or(g.num_arms());
  }
  profile.delta_upper = profile.observability == Observability::kUnobservable
                            ? g.num_arms()
                            : static_cast<int>(GreedyDominatingSet(g).size());
  return profile;
}

FeedbackGraph CompleteGraph(int num_arms) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < num_arms; ++a) {
    for (int b = 0; b < num_arms; ++b) edges.emplace_back(a, b);
  }
  return FeedbackGraph(num_arms, edges);
}

FeedbackGraph SelfLoopGraph(int num_arms) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < num_arms; ++a) edges.emplace_back(a, a);
  return FeedbackGraph(num_arms, edges);
}

FeedbackGraph CycleGraph(int num_arms, bool self_loops) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < num_arms; ++a) {
    if (self_loops) edges.emplace_back(a, a);
    const int next = (a + 1) % num_arms;
    if (next == a) continue;
    edges.emplace_back(a, next);
    if (num_arms > 2) edges.emplace_back(next, a);
  }
  return FeedbackGraph(num_arms, edges);
}

FeedbackGraph HubGraph(int num_arms) {
  std::vector<std::pair<int, int>> edges;
  for (int b = 0; b < num_arms; ++b) edges.emplace_back(0, b);
  return FeedbackGraph(num_arms, edges);
}

FeedbackGraph CliquePartitionGraph(const FeedbackGraph& h, int block_size) {
  if (block_size < 1) {
    throw Error(ErrorCode::kBadShape, "block size must be positive");
  }
  const int n = h.num_arms();
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && !h.HasEdge(i, j)) continue;
      for (int a = 0; a < block_size; ++a) {
        for (int b = 0; b < block_size; ++b) {
          edges.emplace_back(i * block_size + a, j * block_size + b);
        }
      }
    }
  }
  return FeedbackGraph(n * block_size, edges);
}

}  // namespace csb
