#ifndef CSB_POLICIES_H_
#define CSB_POLICIES_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csb/action.h"
#include "csb/graph.h"
#include "csb/polytope.h"
#include "csb/rng.h"
#include "csb/sampler.h"

namespace csb {

// Read-only view of one round's graph feedback. Reading an arm outside the
// observed set throws kFeedbackViolation; the harness relies on this to
// guarantee a policy never sees rewards it was not shown.
class FeedbackView {
 public:
  FeedbackView(std::span<const double> rewards, std::vector<int> observed);

  double reward(int arm) const;
  bool observed(int arm) const { return mask_[arm] != 0; }
  const std::vector<int>& observed_arms() const { return observed_; }
  long reads() const { return reads_; }

 private:
  std::span<const double> rewards_;
  std::vector<int> observed_;
  std::vector<std::uint8_t> mask_;
  mutable long reads_ = 0;
};

// Anything a policy wants to surface to the harness after a run.
struct EliminationEvent {
  int round = 0;
  long min_count = 0;
  double radius = 0.0;
  double best_empirical = 0.0;
  std::vector<int> eliminated;  // indices into the decision list
};

struct PolicyDiagnostics {
  long alignment_fallbacks = 0;
  std::vector<EliminationEvent> eliminations;
  std::vector<int> surviving;          // arm elimination: active indices
  std::optional<Action> committed;     // etc: the committed action
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view id() const = 0;
  virtual Action Select(int round, const FeedbackGraph& g, Rng& rng) = 0;
  virtual void Observe(int round, const FeedbackGraph& g, const Action& played,
                       const FeedbackView& feedback) = 0;
  virtual PolicyDiagnostics Diagnostics() const { return {}; }
};

// ---------------------------------------------------------------------------
// OSMD-G

struct OsmdgConfig {
  PolytopeSpec spec;
  double eta = 0.0;
  SamplerKind sampler;

  // Throws kInvalidConfig unless eta > 0 and the truncation lies in (0, S/K].
  void Validate() const;
};

struct OsmdgState {
  DecisionPoint x;
  int round = 0;
};

struct RewardEstimate {
  std::vector<double> estimate;    // r~, after the S = 1 shift if any
  std::vector<double> complement;  // h^, the loss-shaped estimate of 1 - r
  double shift = 0.0;              // r-bar; zero unless S = 1
};

std::pair<Action, VertexDecomposition> OsmdgSelect(const OsmdgState& state,
                                                   const OsmdgConfig& cfg,
                                                   Rng& rng);

// h^_a = sum_{i in in(a)} 1[v_i](1 - r_a) / sum_{i in in(a)} x_i and
// r~_a = 1 - h^_a. With S = 1 every coordinate is additionally shifted by
// r-bar = 1 + sum_{a : h^_a <= 1/((K-1) eps)} x_a h^_a.
RewardEstimate EstimateRewards(const FeedbackGraph& g, const Action& v,
                               const DecisionPoint& x,
                               const FeedbackView& feedback,
                               const PolytopeSpec& spec);

OsmdgState OsmdgUpdate(const OsmdgState& state, const OsmdgConfig& cfg,
                       std::span<const double> estimate);

struct Tuning {
  double epsilon = 0.0;
  double eta = 0.0;
};

// epsilon = 1/(KT), eta = sqrt(5 S log(K/S) / ((6S + 4 alpha log(4 S K^2 T /
// alpha)) T)). Throws kDegenerateTuning when S == K.
Tuning RecommendedParameters(int num_arms, int budget, long horizon,
                             int alpha);

class OsmdgPolicy : public Policy {
 public:
  OsmdgPolicy(OsmdgConfig cfg, std::string id = "osmdg");

  std::string_view id() const override { return id_; }
  Action Select(int round, const FeedbackGraph& g, Rng& rng) override;
  void Observe(int round, const FeedbackGraph& g, const Action& played,
               const FeedbackView& feedback) override;
  PolicyDiagnostics Diagnostics() const override;

  const OsmdgState& state() const { return state_; }
  const OsmdgConfig& config() const { return cfg_; }
  const VertexDecomposition& last_decomposition() const { return last_; }

 private:
  OsmdgConfig cfg_;
  std::string id_;
  OsmdgState state_;
  VertexDecomposition last_;
  long alignment_fallbacks_ = 0;
};

// ---------------------------------------------------------------------------
// Combinatorial arm elimination

struct EliminationState {
  std::vector<int> active;  // indices into the decision list
  std::vector<double> reward_sum;
  std::vector<long> count;
  long min_count = 0;
};

// 6 S sqrt(log(2T) log(K T / failure_prob) / N).
double EliminationRadius(int budget, long horizon, int num_arms,
                         double failure_prob, long min_count);

class ArmEliminationPolicy : public Policy {
 public:
  // Throws kInvalidConfig for an empty decision list or decisions of the
  // wrong size, and for failure_prob outside (0, 1).
  ArmEliminationPolicy(std::vector<Action> decisions, int budget, long horizon,
                       double failure_prob);

  std::string_view id() const override { return "arm-elimination"; }
  Action Select(int round, const FeedbackGraph& g, Rng& rng) override;
  void Observe(int round, const FeedbackGraph& g, const Action& played,
               const FeedbackView& feedback) override;
  PolicyDiagnostics Diagnostics() const override;

  const EliminationState& state() const { return state_; }
  const std::vector<Action>& decisions() const { return decisions_; }
  double EmpiricalMean(int arm) const;
  double EmpiricalReward(int decision) const;
  long DecisionCount(int decision) const;

 private:
  std::vector<Action> decisions_;
  int budget_;
  long horizon_;
  double failure_prob_;
  EliminationState state_;
  std::vector<int> least_observed_;  // A_N for the current round
  std::vector<EliminationEvent> events_;
};

// ---------------------------------------------------------------------------
// Explore-then-commit

// round(T^{2/3})
long DefaultExplorationLength(long horizon);

class EtcPolicy : public Policy {
 public:
  // Throws kNotObservable when g has an arm without in-neighbours.
  EtcPolicy(const FeedbackGraph& g, int budget, long exploration_rounds);

  std::string_view id() const override { return "etc"; }
  Action Select(int round, const FeedbackGraph& g, Rng& rng) override;
  void Observe(int round, const FeedbackGraph& g, const Action& played,
               const FeedbackView& feedback) override;
  PolicyDiagnostics Diagnostics() const override;

  const std::vector<int>& dominating_set() const { return dominating_; }
  // The size-S action that explores dominating arm `arm`: the arm plus the
  // lowest-index other arms.
  Action ExplorationAction(int arm) const;

 private:
  int num_arms_;
  int budget_;
  long exploration_rounds_;
  std::vector<int> dominating_;
  std::vector<double> reward_sum_;
  std::vector<long> count_;
  std::optional<Action> committed_;
};

// ---------------------------------------------------------------------------
// Uniformly random baseline: a uniform S-subset, or a uniform member of an
// explicit decision list when one is given.

class UniformPolicy : public Policy {
 public:
  UniformPolicy(int num_arms, int budget, std::vector<Action> decisions = {});

  std::string_view id() const override { return "uniform"; }
  Action Select(int round, const FeedbackGraph& g, Rng& rng) override;
  void Observe(int, const FeedbackGraph&, const Action&,
               const FeedbackView&) override {}

 private:
  int num_arms_;
  int budget_;
  std::vector<Action> decisions_;
};

}  // namespace csb

#endif  // CSB_POLICIES_H_
