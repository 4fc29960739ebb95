#ifndef CSB_ENVIRONMENT_H_
#define CSB_ENVIRONMENT_H_

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "csb/action.h"
#include "csb/graph.h"
#include "csb/rng.h"

namespace csb {

// ---------------------------------------------------------------------------
// Reward sources. Each run owns its own copy (Clone) and its own RNG stream.

class RewardSource {
 public:
  virtual ~RewardSource() = default;
  virtual int num_arms() const = 0;
  // Full reward vector r^t in [0, 1]^K for round t (0-based).
  virtual std::vector<double> Emit(int round, Rng& rng) = 0;
  virtual std::unique_ptr<RewardSource> Clone() const = 0;
  // Per-arm means for stochastic sources; empty otherwise.
  virtual std::vector<double> Means() const { return {}; }
  // Longest horizon the source can serve.
  virtual long MaxHorizon() const { return std::numeric_limits<long>::max(); }
};

// Replays rows[t]; throws kExhaustedSequence past the last row.
class FixedSequenceSource : public RewardSource {
 public:
  explicit FixedSequenceSource(std::vector<std::vector<double>> rows);

  int num_arms() const override { return num_arms_; }
  std::vector<double> Emit(int round, Rng& rng) override;
  std::unique_ptr<RewardSource> Clone() const override;
  long MaxHorizon() const override { return static_cast<long>(rows_->size()); }

 private:
  std::shared_ptr<const std::vector<std::vector<double>>> rows_;
  int num_arms_ = 0;
};

// Independent coordinates r_a = scale * Bernoulli(mu_a).
class BernoulliSource : public RewardSource {
 public:
  explicit BernoulliSource(std::vector<double> means, double scale = 1.0);

  int num_arms() const override { return static_cast<int>(means_.size()); }
  std::vector<double> Emit(int round, Rng& rng) override;
  std::unique_ptr<RewardSource> Clone() const override;
  std::vector<double> Means() const override;

 private:
  std::vector<double> means_;
  double scale_;
};

// Spreads a block-level sequence h^t in [0, S]^n over the arms:
// r_a = h_i / |V_i| for a in block V_i.
class CliqueAveragedSource : public RewardSource {
 public:
  CliqueAveragedSource(std::unique_ptr<RewardSource> base,
                       std::vector<std::vector<int>> blocks);

  int num_arms() const override { return num_arms_; }
  std::vector<double> Emit(int round, Rng& rng) override;
  std::unique_ptr<RewardSource> Clone() const override;
  std::vector<double> Means() const override;
  long MaxHorizon() const override { return base_->MaxHorizon(); }

 private:
  std::unique_ptr<RewardSource> base_;
  std::vector<std::vector<int>> blocks_;
  int num_arms_ = 0;
};

// Copies a K-arm source onto N arms through an arm -> original map.
class LiftedSource : public RewardSource {
 public:
  LiftedSource(std::unique_ptr<RewardSource> base, std::vector<int> original);

  int num_arms() const override { return static_cast<int>(original_.size()); }
  std::vector<double> Emit(int round, Rng& rng) override;
  std::unique_ptr<RewardSource> Clone() const override;
  std::vector<double> Means() const override;
  long MaxHorizon() const override { return base_->MaxHorizon(); }

 private:
  std::unique_ptr<RewardSource> base_;
  std::vector<int> original_;
};

inline std::vector<double> EmitRound(RewardSource& source, int round,
                                     Rng& rng) {
  return source.Emit(round, rng);
}

// ---------------------------------------------------------------------------
// Decision sets and instances

struct DecisionSet {
  enum class Kind { kFull, kExplicit, kPartition };

  Kind kind = Kind::kFull;
  // Explicit members (kExplicit, kPartition); empty for kFull.
  std::vector<Action> actions;

  static DecisionSet Full() { return {}; }
  static DecisionSet Explicit(std::vector<Action> actions) {
    return {Kind::kExplicit, std::move(actions)};
  }
  bool Contains(const Action& v, int budget) const;
};

struct Instance {
  // One graph, or one per round for time-varying feedback.
  std::vector<FeedbackGraph> graphs;
  int budget = 1;
  DecisionSet decisions;
  std::shared_ptr<const RewardSource> rewards;
  long horizon = 1;
  // Block partition when the instance has clique structure.
  std::vector<std::vector<int>> cliques;
  // User-supplied independence number, used when K is too large for the
  // exact search or the graph varies over time.
  std::optional<int> alpha_hint;

  int num_arms() const { return graphs.front().num_arms(); }
  const FeedbackGraph& graph_at(long round) const {
    return graphs.size() == 1 ? graphs.front() : graphs[round];
  }
  // Throws kInvalidConfig on inconsistent sizes or an empty decision set.
  void Validate() const;
};

// ---------------------------------------------------------------------------
// Instance constructions

struct LowerBoundInstance {
  FeedbackGraph graph;
  std::vector<double> means;
  double delta = 0.0;
  Action optimal;
  // groups[m] lists the arms of I_m; arms alpha..K-1 lie outside I.
  std::vector<std::vector<int>> groups;
};

// Arms 0..alpha-1 form the independent set I (self-loops only among
// themselves), split into S groups of n = alpha / S consecutive arms; the
// remaining arms form a clique joined both ways to every arm. The arm
// `choice[m]` (0-based, < n) of group m gets mean 1/4 + delta, the rest of I
// gets 1/4 and arms outside I get 0, with delta = sqrt(n / T) / 64 capped
// below 1/4. Throws kBadShape unless S | alpha, n >= 4 and alpha <= K.
LowerBoundInstance MakeLowerBoundInstance(int num_arms, int budget, int alpha,
                                          long horizon,
                                          const std::vector<int>& choice);

double LowerBoundGap(int group_size, long horizon);

struct CliquePartition {
  FeedbackGraph graph;
  std::vector<std::vector<int>> cliques;
};

CliquePartition MakeCliquePartitionInstance(const FeedbackGraph& h,
                                            int budget);

// The i-th action selects arms i*S .. i*S + S - 1. Throws kBadShape if S
// does not divide K.
std::vector<Action> PartitionDecisionSubset(int num_arms, int budget);

struct CapacityReduction {
  int total_arms = 0;
  FeedbackGraph graph;
  std::vector<int> original;             // copy arm -> original arm
  std::vector<std::vector<int>> copies;  // original arm -> copy arms

  std::vector<double> Lift(const std::vector<double>& rewards) const;
  // Per-original-arm multiplicities of a copy-space action.
  std::vector<int> Fold(const Action& v) const;
};

// Arm a becomes capacities[a] copies forming a clique with self-loops;
// distinct originals are mutually unobservable. Throws kBudgetExceeded if
// budget exceeds the number of copies and kBadShape for a zero capacity.
CapacityReduction MakeCapacityReduction(const std::vector<int>& capacities,
                                        int budget);

// Best fixed decision in hindsight for the given per-arm cumulative rewards:
// top-S arms (lowest index on ties) for the full set, exhaustive otherwise.
Action BestDecision(const DecisionSet& decisions, int budget,
                    const std::vector<double>& cumulative);

}  // namespace csb

#endif  // CSB_ENVIRONMENT_H_
