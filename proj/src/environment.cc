#include "csb/environment.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "csb/error.h"

namespace csb {

namespace {

void CheckUnitInterval(const std::vector<double>& values, const char* what) {
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string(what) + " value " + std::to_string(v) +
                      " outside [0, 1]");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

FixedSequenceSource::FixedSequenceSource(std::vector<std::vector<double>> rows)
    : rows_(std::make_shared<const std::vector<std::vector<double>>>(
          std::move(rows))) {
  if (rows_->empty()) {
    throw Error(ErrorCode::kInvalidConfig, "empty reward sequence");
  }
  num_arms_ = static_cast<int>(rows_->front().size());
  for (const auto& row : *rows_) {
    if (static_cast<int>(row.size()) != num_arms_) {
      throw Error(ErrorCode::kInvalidConfig, "ragged reward sequence");
    }
    CheckUnitInterval(row, "reward");
  }
}

std::vector<double> FixedSequenceSource::Emit(int round, Rng&) {
  if (round < 0 || round >= static_cast<int>(rows_->size())) {
    throw Error(ErrorCode::kExhaustedSequence,
                "no reward row for round " + std::to_string(round));
  }
  return (*rows_)[round];
}

std::unique_ptr<RewardSource> FixedSequenceSource::Clone() const {
  return std::make_unique<FixedSequenceSource>(*this);
}

BernoulliSource::BernoulliSource(std::vector<double> means, double scale)
    : means_(std::move(means)), scale_(scale) {
  CheckUnitInterval(means_, "mean");
  if (means_.empty() || !(scale_ > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "bad Bernoulli source");
  }
}

std::vector<double> BernoulliSource::Emit(int, Rng& rng) {
  std::vector<double> r(means_.size());
  for (std::size_t a = 0; a < means_.size(); ++a) {
    r[a] = rng.Bernoulli(means_[a]) ? scale_ : 0.0;
  }
  return r;
}

std::unique_ptr<RewardSource> BernoulliSource::Clone() const {
  return std::make_unique<BernoulliSource>(*this);
}

std::vector<double> BernoulliSource::Means() const {
  std::vector<double> m = means_;
  for (double& v : m) v *= scale_;
  return m;
}

CliqueAveragedSource::CliqueAveragedSource(
    std::unique_ptr<RewardSource> base, std::vector<std::vector<int>> blocks)
    : base_(std::move(base)), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != base_->num_arms()) {
    throw Error(ErrorCode::kInvalidConfig,
                "block count does not match the base source");
  }
  for (const auto& block : blocks_) {
    if (block.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "empty block");
    }
    num_arms_ += static_cast<int>(block.size());
  }
}

std::vector<double> CliqueAveragedSource::Emit(int round, Rng& rng) {
  const std::vector<double> h = base_->Emit(round, rng);
  std::vector<double> r(num_arms_, 0.0);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const double value = h[i] / static_cast<double>(blocks_[i].size());
    for (int a : blocks_[i]) r[a] = value;
  }
  return r;
}

std::unique_ptr<RewardSource> CliqueAveragedSource::Clone() const {
  return std::make_unique<CliqueAveragedSource>(base_->Clone(), blocks_);
}

std::vector<double> CliqueAveragedSource::Means() const {
  const std::vector<double> h = base_->Means();
  if (h.empty()) return {};
  std::vector<double> m(num_arms_, 0.0);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    for (int a : blocks_[i]) m[a] = h[i] / blocks_[i].size();
  }
  return m;
}

LiftedSource::LiftedSource(std::unique_ptr<RewardSource> base,
                           std::vector<int> original)
    : base_(std::move(base)), original_(std::move(original)) {
  for (int a : original_) {
    if (a < 0 || a >= base_->num_arms()) {
      throw Error(ErrorCode::kInvalidConfig, "lift map out of range");
    }
  }
}

std::vector<double> LiftedSource::Emit(int round, Rng& rng) {
  const std::vector<double> base = base_->Emit(round, rng);
  std::vector<double> r(original_.size());
  for (std::size_t i = 0; i < original_.size(); ++i) r[i] = base[original_[i]];
  return r;
}

std::unique_ptr<RewardSource> LiftedSource::Clone() const {
  return std::make_unique<LiftedSource>(base_->Clone(), original_);
}

std::vector<double> LiftedSource::Means() const {
  const std::vector<double> base = base_->Means();
  if (base.empty()) return {};
  std::vector<double> m(original_.size());
  for (std::size_t i = 0; i < original_.size(); ++i) m[i] = base[original_[i]];
  return m;
}

// ---------------------------------------------------------------------------

bool DecisionSet::Contains(const Action& v, int budget) const {
  if (kind == Kind::kFull) return v.size() == budget;
  return std::find(actions.begin(), actions.end(), v) != actions.end();
}

void Instance::Validate() const {
  if (graphs.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "instance has no graph");
  }
  const int k = graphs.front().num_arms();
  for (const auto& g : graphs) {
    if (g.num_arms() != k) {
      throw Error(ErrorCode::kInvalidConfig, "graphs disagree on K");
    }
  }
  if (graphs.size() != 1 && static_cast<long>(graphs.size()) < horizon) {
    throw Error(ErrorCode::kInvalidConfig, "fewer graphs than rounds");
  }
  if (budget < 1 || budget > k) {
    throw Error(ErrorCode::kInvalidConfig, "budget outside [1, K]");
  }
  if (horizon < 1) {
    throw Error(ErrorCode::kInvalidConfig, "horizon must be positive");
  }
  if (!rewards || rewards->num_arms() != k) {
    throw Error(ErrorCode::kInvalidConfig,
                "reward source missing or has the wrong number of arms");
  }
  if (rewards->MaxHorizon() < horizon) {
    throw Error(ErrorCode::kExhaustedSequence,
                "reward sequence shorter than the horizon");
  }
  if (decisions.kind != DecisionSet::Kind::kFull) {
    if (decisions.actions.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "empty decision set");
    }
    for (const auto& v : decisions.actions) {
      if (v.num_arms() != k || v.size() != budget) {
        throw Error(ErrorCode::kInvalidConfig,
                    "decision " + v.ToString() + " is not an S-subset of [K]");
      }
    }
  }
}

// ---------------------------------------------------------------------------

double LowerBoundGap(int group_size, long horizon) {
  const double delta =
      std::sqrt(static_cast<double>(group_size) / static_cast<double>(horizon)) /
      64.0;
  return std::min(delta, std::nextafter(0.25, 0.0));
}

LowerBoundInstance MakeLowerBoundInstance(int num_arms, int budget, int alpha,
                                          long horizon,
                                          const std::vector<int>& choice) {
  if (budget < 1 || alpha % budget != 0 || alpha > num_arms || horizon < 1) {
    throw Error(ErrorCode::kBadShape,
                "need S | alpha and alpha <= K, got S = " +
                    std::to_string(budget) + ", alpha = " +
                    std::to_string(alpha));
  }
  const int n = alpha / budget;
  if (n < 4) {
    throw Error(ErrorCode::kBadShape, "alpha / S must be at least 4");
  }
  if (static_cast<int>(choice.size()) != budget) {
    throw Error(ErrorCode::kBadShape, "choice needs one entry per group");
  }
  for (int c : choice) {
    if (c < 0 || c >= n) {
      throw Error(ErrorCode::kBadShape,
                  "choice entry " + std::to_string(c) + " outside [0, n)");
    }
  }

  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < num_arms; ++a) {
    edges.emplace_back(a, a);
    for (int b = alpha; b < num_arms; ++b) {
      if (b == a) continue;
      edges.emplace_back(a, b);
      if (a < alpha) edges.emplace_back(b, a);
    }
  }

  LowerBoundInstance inst{FeedbackGraph(num_arms, edges), {}, 0.0, {}, {}};
  inst.delta = LowerBoundGap(n, horizon);
  inst.means.assign(num_arms, 0.0);
  std::fill(inst.means.begin(), inst.means.begin() + alpha, 0.25);
  std::vector<int> best;
  for (int m = 0; m < budget; ++m) {
    std::vector<int> group(n);
    std::iota(group.begin(), group.end(), m * n);
    inst.groups.push_back(group);
    const int arm = m * n + choice[m];
    inst.means[arm] = 0.25 + inst.delta;
    best.push_back(arm);
  }
  inst.optimal = Action(num_arms, best);
  return inst;
}

CliquePartition MakeCliquePartitionInstance(const FeedbackGraph& h,
                                            int budget) {
  CliquePartition out{CliquePartitionGraph(h, budget), {}};
  for (int i = 0; i < h.num_arms(); ++i) {
    std::vector<int> block(budget);
    std::iota(block.begin(), block.end(), i * budget);
    out.cliques.push_back(std::move(block));
  }
  return out;
}

std::vector<Action> PartitionDecisionSubset(int num_arms, int budget) {
  if (budget < 1 || budget > num_arms || num_arms % budget != 0) {
    throw Error(ErrorCode::kBadShape,
                "S = " + std::to_string(budget) + " does not divide K = " +
                    std::to_string(num_arms));
  }
  std::vector<Action> actions;
  for (int start = 0; start < num_arms; start += budget) {
    std::vector<int> arms(budget);
    std::iota(arms.begin(), arms.end(), start);
    actions.emplace_back(num_arms, std::move(arms));
  }
  return actions;
}

std::vector<double> CapacityReduction::Lift(
    const std::vector<double>& rewards) const {
  std::vector<double> lifted(original.size());
  for (std::size_t i = 0; i < original.size(); ++i) {
    lifted[i] = rewards[original[i]];
  }
  return lifted;
}

std::vector<int> CapacityReduction::Fold(const Action& v) const {
  std::vector<int> counts(copies.size(), 0);
  for (int a : v.arms()) ++counts[original[a]];
  return counts;
}

CapacityReduction MakeCapacityReduction(const std::vector<int>& capacities,
                                        int budget) {
  CapacityReduction out;
  std::vector<std::pair<int, int>> edges;
  for (std::size_t a = 0; a < capacities.size(); ++a) {
    if (capacities[a] < 1) {
      throw Error(ErrorCode::kBadShape, "capacities must be at least 1");
    }
    std::vector<int> block;
    for (int c = 0; c < capacities[a]; ++c) {
      block.push_back(out.total_arms++);
      out.original.push_back(static_cast<int>(a));
    }
    for (int i : block) {
      for (int j : block) edges.emplace_back(i, j);
    }
    out.copies.push_back(std::move(block));
  }
  if (out.total_arms == 0) {
    throw Error(ErrorCode::kBadShape, "no arms");
  }
  if (budget < 1 || budget > out.total_arms) {
    throw Error(ErrorCode::kBudgetExceeded,
                "budget " + std::to_string(budget) + " exceeds " +
                    std::to_string(out.total_arms) + " copy arms");
  }
  out.graph = FeedbackGraph(out.total_arms, edges);
  return out;
}

Action BestDecision(const DecisionSet& decisions, int budget,
                    const std::vector<double>& cumulative) {
  const int k = static_cast<int>(cumulative.size());
  if (decisions.kind == DecisionSet::Kind::kFull) {
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return cumulative[a] > cumulative[b];
    });
    order.resize(budget);
    return Action(k, std::move(order));
  }
  const Action* best = &decisions.actions.front();
  double best_value = best->Payoff(cumulative);
  for (const auto& v : decisions.actions) {
    const double value = v.Payoff(cumulative);
    if (value > best_value) {
      best = &v;
      best_value = value;
    }
  }
  return *best;
}

}  // namespace csb
