#ifndef CSB_GRAPH_H_
#define CSB_GRAPH_H_

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "csb/action.h"

namespace csb {

// Directed feedback graph on arms [0, K). Playing arm a reveals the rewards
// of every arm in out(a). Self-loops are allowed. Immutable once built.
class FeedbackGraph {
 public:
  FeedbackGraph() = default;
  // Throws kInvalidGraph for K < 1, out-of-range endpoints or duplicate edges.
  FeedbackGraph(int num_arms, const std::vector<std::pair<int, int>>& edges);

  int num_arms() const { return static_cast<int>(out_.size()); }
  const std::vector<int>& out(int arm) const { return out_[arm]; }
  const std::vector<int>& in(int arm) const { return in_[arm]; }
  bool HasEdge(int from, int to) const;
  bool HasSelfLoop(int arm) const { return HasEdge(arm, arm); }
  std::vector<std::pair<int, int>> Edges() const;
  std::size_t num_edges() const;

  friend bool operator==(const FeedbackGraph& a, const FeedbackGraph& b) {
    return a.out_ == b.out_;
  }

 private:
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

enum class Observability { kStronglyObservable, kWeaklyObservable, kUnobservable };

std::string_view ObservabilityName(Observability o);

struct GraphProfile {
  int alpha = 1;
  bool alpha_is_exact = false;
  int delta_upper = 1;
  Observability observability = Observability::kUnobservable;
};

inline constexpr int kDefaultExactAlphaCap = 24;

Observability ClassifyObservability(const FeedbackGraph& g);

// Largest set of arms with no edge between any two distinct members in
// either direction (self-loops ignored). Branch and bound with a greedy
// clique-cover bound. Throws kCapExceeded when K > cap.
int IndependenceNumberExact(const FeedbackGraph& g,
                            int cap = kDefaultExactAlphaCap);

// Repeatedly takes the arm covering the most still-undominated arms (lowest
// index on ties). Throws kNotObservable if some arm has no in-neighbor.
std::vector<int> GreedyDominatingSet(const FeedbackGraph& g);

struct Subgraph {
  FeedbackGraph graph;
  // original_id[new_id]
  std::vector<int> original_id;
};

// Induced subgraph on the given arms, relabelled 0..|arms|-1 in increasing
// original order. Duplicates in `arms` are ignored. Throws kInvalidArm.
Subgraph RestrictedSubgraph(const FeedbackGraph& g, std::vector<int> arms);

// Union of out(a) over the arms of v, sorted.
std::vector<int> OutNeighborhood(const FeedbackGraph& g, const Action& v);

// alpha is exact when K <= cap; otherwise `alpha_hint` is used, falling back
// to K (the semi-bandit worst case) when no hint is given.
GraphProfile ComputeProfile(const FeedbackGraph& g,
                            std::optional<int> alpha_hint = std::nullopt,
                            int cap = kDefaultExactAlphaCap);

// Generators.
FeedbackGraph CompleteGraph(int num_arms);
FeedbackGraph SelfLoopGraph(int num_arms);
// Undirected cycle 0-1-...-(K-1)-0 (edges in both directions).
FeedbackGraph CycleGraph(int num_arms, bool self_loops);
// Arm 0 observes every arm (including itself); all other arms observe
// nothing. Weakly observable for K >= 3.
FeedbackGraph HubGraph(int num_arms);
// K = H.num_arms() * block_size arms in contiguous blocks; (a, b) is an edge
// iff a, b share a block or (block(a), block(b)) is an edge of H.
FeedbackGraph CliquePartitionGraph(const FeedbackGraph& h, int block_size);

}  // namespace csb

#endif  // CSB_GRAPH_H_
