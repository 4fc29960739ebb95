#include "csb/policies.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "csb/error.h"

namespace csb {

FeedbackView::FeedbackView(std::span<const double> rewards,
                           std::vector<int> observed)
    : rewards_(rewards), observed_(std::move(observed)),
      mask_(rewards.size(), 0) {
  for (int a : observed_) mask_[a] = 1;
}

double FeedbackView::reward(int arm) const {
  if (arm < 0 || arm >= static_cast<int>(mask_.size()) || !mask_[arm]) {
    throw Error(ErrorCode::kFeedbackViolation,
                "read of unobserved arm " + std::to_string(arm));
  }
  ++reads_;
  return rewards_[arm];
}

// ---------------------------------------------------------------------------
// OSMD-G

void OsmdgConfig::Validate() const {
  spec.Validate();
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorCode::kInvalidConfig, "learning rate must be positive");
  }
  if (!(spec.truncation > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "truncation must be positive");
  }
  if (sampler.type == SamplerKind::Type::kCliqueAligned) {
    ValidateCliques(sampler.cliques, spec.num_arms, spec.budget);
  }
}

std::pair<Action, VertexDecomposition> OsmdgSelect(const OsmdgState& state,
                                                   const OsmdgConfig& cfg,
                                                   Rng& rng) {
  SampleResult drawn = Sample(cfg.sampler, state.x, cfg.spec.budget, rng);
  return {std::move(drawn.action), std::move(drawn.decomposition)};
}

RewardEstimate EstimateRewards(const FeedbackGraph& g, const Action& v,
                               const DecisionPoint& x,
                               const FeedbackView& feedback,
                               const PolytopeSpec& spec) {
  const int k = g.num_arms();
  RewardEstimate out;
  out.estimate.assign(k, 1.0);
  out.complement.assign(k, 0.0);
  for (int a = 0; a < k; ++a) {
    int hits = 0;
    double denominator = 0.0;
    for (int i : g.in(a)) {
      hits += v.contains(i) ? 1 : 0;
      denominator += x[i];
    }
    if (!(denominator > 0.0)) {
      throw Error(ErrorCode::kDenominatorZero,
                  "arm " + std::to_string(a) + " has no probability mass "
                  "among its in-neighbours");
    }
    if (hits > 0) {
      out.complement[a] = hits * (1.0 - feedback.reward(a)) / denominator;
      out.estimate[a] = 1.0 - out.complement[a];
    }
  }
  if (spec.budget == 1 && k > 1) {
    const double threshold =
        spec.truncation > 0.0 ? 1.0 / ((k - 1) * spec.truncation)
                              : std::numeric_limits<double>::infinity();
    out.shift = 1.0;
    for (int a = 0; a < k; ++a) {
      if (out.complement[a] <= threshold) out.shift += x[a] * out.complement[a];
    }
    for (double& e : out.estimate) e -= out.shift;
  }
  return out;
}

OsmdgState OsmdgUpdate(const OsmdgState& state, const OsmdgConfig& cfg,
                       std::span<const double> estimate) {
  return {KlProject(DualStep(state.x, estimate, cfg.eta), cfg.spec),
          state.round + 1};
}

Tuning RecommendedParameters(int num_arms, int budget, long horizon,
                             int alpha) {
  if (budget < 1 || budget > num_arms || horizon < 1 || alpha < 1 ||
      alpha > num_arms) {
    throw Error(ErrorCode::kInvalidConfig,
                "need 1 <= S <= K, T >= 1 and 1 <= alpha <= K");
  }
  if (budget == num_arms) {
    throw Error(ErrorCode::kDegenerateTuning,
                "S == K: the decision set is a single action");
  }
  const double k = num_arms;
  const double s = budget;
  const double t = static_cast<double>(horizon);
  const double a = alpha;
  Tuning tuning;
  tuning.epsilon = 1.0 / (k * t);
  tuning.eta = std::sqrt(5.0 * s * std::log(k / s) /
                         ((6.0 * s + 4.0 * a * std::log(4.0 * s * k * k * t / a)) * t));
  return tuning;
}

OsmdgPolicy::OsmdgPolicy(OsmdgConfig cfg, std::string id)
    : cfg_(std::move(cfg)), id_(std::move(id)) {
  cfg_.Validate();
  state_.x = InitialPoint(cfg_.spec);
}

Action OsmdgPolicy::Select(int, const FeedbackGraph&, Rng& rng) {
  SampleResult drawn = Sample(cfg_.sampler, state_.x, cfg_.spec.budget, rng);
  if (!drawn.aligned) ++alignment_fallbacks_;
  last_ = std::move(drawn.decomposition);
  return std::move(drawn.action);
}

void OsmdgPolicy::Observe(int, const FeedbackGraph& g, const Action& played,
                          const FeedbackView& feedback) {
  const RewardEstimate est =
      EstimateRewards(g, played, state_.x, feedback, cfg_.spec);
  state_ = OsmdgUpdate(state_, cfg_, est.estimate);
}

PolicyDiagnostics OsmdgPolicy::Diagnostics() const {
  PolicyDiagnostics d;
  d.alignment_fallbacks = alignment_fallbacks_;
  return d;
}

// ---------------------------------------------------------------------------
// Combinatorial arm elimination

double EliminationRadius(int budget, long horizon, int num_arms,
                         double failure_prob, long min_count) {
  const double t = static_cast<double>(horizon);
  return 6.0 * budget *
         std::sqrt(std::log(2.0 * t) *
                   std::log(num_arms * t / failure_prob) /
                   static_cast<double>(min_count));
}

ArmEliminationPolicy::ArmEliminationPolicy(std::vector<Action> decisions,
                                           int budget, long horizon,
                                           double failure_prob)
    : decisions_(std::move(decisions)), budget_(budget), horizon_(horizon),
      failure_prob_(failure_prob) {
  if (decisions_.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "empty decision list");
  }
  if (!(failure_prob_ > 0.0 && failure_prob_ < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "failure probability not in (0, 1)");
  }
  const int k = decisions_.front().num_arms();
  for (const auto& v : decisions_) {
    if (v.size() != budget_ || v.num_arms() != k) {
      throw Error(ErrorCode::kInvalidConfig,
                  "decision " + v.ToString() + " does not have S arms");
    }
  }
  state_.active.resize(decisions_.size());
  std::iota(state_.active.begin(), state_.active.end(), 0);
  state_.reward_sum.assign(k, 0.0);
  state_.count.assign(k, 0);
}

double ArmEliminationPolicy::EmpiricalMean(int arm) const {
  return state_.count[arm] > 0 ? state_.reward_sum[arm] / state_.count[arm]
                               : 0.0;
}

double ArmEliminationPolicy::EmpiricalReward(int decision) const {
  double total = 0.0;
  for (int a : decisions_[decision].arms()) total += EmpiricalMean(a);
  return total;
}

long ArmEliminationPolicy::DecisionCount(int decision) const {
  long n = std::numeric_limits<long>::max();
  for (int a : decisions_[decision].arms()) n = std::min(n, state_.count[a]);
  return n;
}

Action ArmEliminationPolicy::Select(int, const FeedbackGraph& g, Rng&) {
  auto collect = [&] {
    least_observed_.clear();
    for (int d : state_.active) {
      if (DecisionCount(d) == state_.min_count) least_observed_.push_back(d);
    }
  };
  collect();
  if (least_observed_.empty()) {
    // The least-observed decision was eliminated; move N up to the new
    // minimum over the survivors.
    long n = std::numeric_limits<long>::max();
    for (int d : state_.active) n = std::min(n, DecisionCount(d));
    state_.min_count = n;
    collect();
  }

  std::vector<int> pool;
  for (int d : least_observed_) {
    for (int a : decisions_[d].arms()) pool.push_back(a);
  }
  const Subgraph sub = RestrictedSubgraph(g, pool);
  int best_local = 0;
  for (int i = 1; i < sub.graph.num_arms(); ++i) {
    if (sub.graph.out(i).size() > sub.graph.out(best_local).size()) {
      best_local = i;
    }
  }
  const int pivot = sub.original_id[best_local];

  int chosen = -1;
  for (int d : least_observed_) {
    if (!decisions_[d].contains(pivot)) continue;
    if (chosen < 0 || decisions_[d] < decisions_[chosen]) chosen = d;
  }
  return decisions_[chosen];
}

void ArmEliminationPolicy::Observe(int round, const FeedbackGraph&,
                                   const Action&,
                                   const FeedbackView& feedback) {
  for (int a : feedback.observed_arms()) {
    state_.reward_sum[a] += feedback.reward(a);
    ++state_.count[a];
  }
  long least = std::numeric_limits<long>::max();
  for (int d : least_observed_) least = std::min(least, DecisionCount(d));
  if (least <= state_.min_count) return;

  long n = std::numeric_limits<long>::max();
  double best = -std::numeric_limits<double>::infinity();
  for (int d : state_.active) {
    n = std::min(n, DecisionCount(d));
    best = std::max(best, EmpiricalReward(d));
  }
  state_.min_count = n;
  EliminationEvent event;
  event.round = round;
  event.min_count = n;
  event.radius = EliminationRadius(budget_, horizon_,
                                   decisions_.front().num_arms(),
                                   failure_prob_, n);
  event.best_empirical = best;
  std::vector<int> survivors;
  for (int d : state_.active) {
    if (EmpiricalReward(d) >= best - event.radius) {
      survivors.push_back(d);
    } else {
      event.eliminated.push_back(d);
    }
  }
  if (survivors.empty()) {
    throw Error(ErrorCode::kEmptyActive, "every decision was eliminated");
  }
  state_.active = std::move(survivors);
  events_.push_back(std::move(event));
}

PolicyDiagnostics ArmEliminationPolicy::Diagnostics() const {
  PolicyDiagnostics d;
  d.eliminations = events_;
  d.surviving = state_.active;
  return d;
}

// ---------------------------------------------------------------------------
// Explore-then-commit

long DefaultExplorationLength(long horizon) {
  return std::lround(std::pow(static_cast<double>(horizon), 2.0 / 3.0));
}

EtcPolicy::EtcPolicy(const FeedbackGraph& g, int budget,
                     long exploration_rounds)
    : num_arms_(g.num_arms()), budget_(budget),
      exploration_rounds_(exploration_rounds),
      dominating_(GreedyDominatingSet(g)),
      reward_sum_(g.num_arms(), 0.0), count_(g.num_arms(), 0) {
  if (budget < 1 || budget > num_arms_) {
    throw Error(ErrorCode::kInvalidConfig, "budget outside [1, K]");
  }
  if (exploration_rounds < 0) {
    throw Error(ErrorCode::kInvalidConfig, "negative exploration length");
  }
}

Action EtcPolicy::ExplorationAction(int arm) const {
  std::vector<int> arms{arm};
  for (int a = 0; static_cast<int>(arms.size()) < budget_; ++a) {
    if (a != arm) arms.push_back(a);
  }
  return Action(num_arms_, std::move(arms));
}

Action EtcPolicy::Select(int round, const FeedbackGraph&, Rng&) {
  if (round < exploration_rounds_) {
    return ExplorationAction(dominating_[round % dominating_.size()]);
  }
  if (!committed_) {
    std::vector<double> mean(num_arms_, 0.0);
    for (int a = 0; a < num_arms_; ++a) {
      if (count_[a] > 0) mean[a] = reward_sum_[a] / count_[a];
    }
    std::vector<int> order(num_arms_);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return mean[a] > mean[b]; });
    order.resize(budget_);
    committed_ = Action(num_arms_, order);
  }
  return *committed_;
}

void EtcPolicy::Observe(int round, const FeedbackGraph&, const Action&,
                        const FeedbackView& feedback) {
  if (round >= exploration_rounds_) return;
  for (int a : feedback.observed_arms()) {
    reward_sum_[a] += feedback.reward(a);
    ++count_[a];
  }
}

PolicyDiagnostics EtcPolicy::Diagnostics() const {
  PolicyDiagnostics d;
  d.committed = committed_;
  return d;
}

// ---------------------------------------------------------------------------

UniformPolicy::UniformPolicy(int num_arms, int budget,
                             std::vector<Action> decisions)
    : num_arms_(num_arms), budget_(budget), decisions_(std::move(decisions)) {}

Action UniformPolicy::Select(int, const FeedbackGraph&, Rng& rng) {
  if (!decisions_.empty()) {
    return decisions_[rng.UniformInt(decisions_.size())];
  }
  std::vector<int> arms(num_arms_);
  std::iota(arms.begin(), arms.end(), 0);
  for (int i = 0; i < budget_; ++i) {
    const int j = i + static_cast<int>(rng.UniformInt(num_arms_ - i));
    std::swap(arms[i], arms[j]);
  }
  arms.resize(budget_);
  return Action(num_arms_, std::move(arms));
}

}  // namespace csb
