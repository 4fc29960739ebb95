#include "csb/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "csb/error.h"

namespace csb {

namespace {

constexpr std::uint64_t kEnvironmentStream = 1;
constexpr std::uint64_t kPolicyStream = 2;
constexpr std::size_t kMaxEnumeratedDecisions = 100000;

std::vector<Action> EnumerateDecisions(int num_arms, int budget) {
  std::vector<Action> all;
  std::vector<int> pick(budget);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    all.emplace_back(num_arms, pick);
    if (all.size() > kMaxEnumeratedDecisions) {
      throw Error(ErrorCode::kInvalidConfig,
                  "full decision set too large to enumerate");
    }
    int i = budget - 1;
    while (i >= 0 && pick[i] == num_arms - budget + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < budget; ++j) pick[j] = pick[j - 1] + 1;
  }
  return all;
}

std::vector<Action> ExplicitDecisions(const Instance& instance) {
  if (instance.decisions.kind != DecisionSet::Kind::kFull) {
    return instance.decisions.actions;
  }
  return EnumerateDecisions(instance.num_arms(), instance.budget);
}

template <typename Fn>
void ParallelFor(std::size_t count, int workers, Fn&& fn) {
  if (workers <= 0) {
    workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  workers = static_cast<int>(std::min<std::size_t>(workers, count));
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

bool IsOsmd(const std::string& id) {
  return id == "osmdg" || id == "osmd-vanilla" || id == "osmd-clique";
}

}  // namespace

int ResolveAlpha(const Instance& instance, std::optional<int> override_alpha) {
  if (override_alpha) return *override_alpha;
  if (instance.alpha_hint) return *instance.alpha_hint;
  const int k = instance.num_arms();
  if (k > kDefaultExactAlphaCap) return k;
  int alpha = 1;
  for (const auto& g : instance.graphs) {
    alpha = std::max(alpha, IndependenceNumberExact(g));
  }
  return alpha;
}

Tuning ResolveTuning(const Instance& instance, const PolicyConfig& cfg) {
  Tuning tuning;
  if (!cfg.eta || !cfg.epsilon) {
    tuning = RecommendedParameters(instance.num_arms(), instance.budget,
                                   instance.horizon,
                                   ResolveAlpha(instance, cfg.alpha));
  }
  if (cfg.eta) tuning.eta = *cfg.eta;
  if (cfg.epsilon) tuning.epsilon = *cfg.epsilon;
  return tuning;
}

std::unique_ptr<Policy> MakePolicy(const PolicyConfig& cfg,
                                   const Instance& instance) {
  const int k = instance.num_arms();
  const int s = instance.budget;
  if (IsOsmd(cfg.id)) {
    if (instance.decisions.kind != DecisionSet::Kind::kFull) {
      throw Error(ErrorCode::kInvalidConfig,
                  cfg.id + " runs on the full decision set only");
    }
    const Tuning tuning = ResolveTuning(instance, cfg);
    OsmdgConfig osmd;
    osmd.spec = {k, s, tuning.epsilon};
    osmd.eta = tuning.eta;
    if (cfg.id == "osmd-vanilla") {
      osmd.sampler = SamplerKind::MeanOnly();
    } else if (cfg.id == "osmd-clique") {
      if (instance.cliques.empty()) {
        throw Error(ErrorCode::kInvalidConfig,
                    "osmd-clique needs an instance with clique blocks");
      }
      osmd.sampler = SamplerKind::CliqueAligned(instance.cliques);
    }
    return std::make_unique<OsmdgPolicy>(std::move(osmd), cfg.id);
  }
  if (cfg.id == "arm-elimination") {
    return std::make_unique<ArmEliminationPolicy>(
        ExplicitDecisions(instance), s, instance.horizon, cfg.failure_prob);
  }
  if (cfg.id == "etc") {
    if (instance.decisions.kind != DecisionSet::Kind::kFull) {
      throw Error(ErrorCode::kInvalidConfig,
                  "etc runs on the full decision set only");
    }
    return std::make_unique<EtcPolicy>(
        instance.graph_at(0), s,
        cfg.exploration_rounds.value_or(
            DefaultExplorationLength(instance.horizon)));
  }
  if (cfg.id == "uniform") {
    return std::make_unique<UniformPolicy>(k, s, instance.decisions.actions);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown policy id '" + cfg.id + "'");
}

RegretTrace RunOnce(const Instance& instance, const PolicyConfig& policy_cfg,
                    std::uint64_t seed, const RunOptions& options) {
  instance.Validate();
  const int k = instance.num_arms();
  const Rng root(seed);
  Rng env_rng = root.Split(kEnvironmentStream);
  Rng policy_rng = root.Split(kPolicyStream);
  std::unique_ptr<RewardSource> source = instance.rewards->Clone();
  std::unique_ptr<Policy> policy = MakePolicy(policy_cfg, instance);

  RegretTrace trace;
  trace.seed = seed;
  trace.policy = policy_cfg.id;
  trace.horizon = instance.horizon;
  std::vector<double> cumulative(k, 0.0);
  std::vector<std::vector<double>> reward_rows;

  for (long t = 0; t < instance.horizon; ++t) {
    const int round = static_cast<int>(t);
    const FeedbackGraph& g = instance.graph_at(t);
    const std::vector<double> rewards = source->Emit(round, env_rng);
    for (double r : rewards) {
      if (!(r >= 0.0 && r <= 1.0)) {
        throw Error(ErrorCode::kInvalidConfig,
                    "reward outside [0, 1] at round " + std::to_string(t));
      }
    }
    const Action played = policy->Select(round, g, policy_rng);
    if (played.num_arms() != k ||
        !instance.decisions.Contains(played, instance.budget)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "policy played " + played.ToString() +
                      ", which is not in the decision set");
    }
    const FeedbackView view(rewards, OutNeighborhood(g, played));
    policy->Observe(round, g, played, view);

    const double payoff = played.Payoff(rewards);
    trace.total_payoff += payoff;
    for (int a = 0; a < k; ++a) cumulative[a] += rewards[a];
    if (options.keep_trace) {
      trace.actions.push_back(played);
      trace.payoffs.push_back(payoff);
      reward_rows.push_back(rewards);
    }
    if (options.on_round) options.on_round(seed, round, played, rewards);
  }

  trace.best = BestDecision(instance.decisions, instance.budget, cumulative);
  trace.best_payoff = trace.best.Payoff(cumulative);
  trace.final_regret = trace.best_payoff - trace.total_payoff;
  if (options.keep_trace) {
    trace.cumulative_regret.reserve(reward_rows.size());
    double best_running = 0.0;
    double played_running = 0.0;
    for (std::size_t t = 0; t < reward_rows.size(); ++t) {
      best_running += trace.best.Payoff(reward_rows[t]);
      played_running += trace.payoffs[t];
      trace.cumulative_regret.push_back(best_running - played_running);
    }
  }
  trace.diagnostics = policy->Diagnostics();
  return trace;
}

void ExperimentConfig::Validate() const {
  if (!instance) throw Error(ErrorCode::kInvalidConfig, "no instance");
  if (seeds.empty()) throw Error(ErrorCode::kInvalidConfig, "no seeds");
  for (std::size_t i = 1; i < horizons.size(); ++i) {
    if (horizons[i] <= horizons[i - 1]) {
      throw Error(ErrorCode::kInvalidConfig,
                  "horizon grid must be strictly increasing");
    }
  }
}

std::vector<RegretTrace> Run(const ExperimentConfig& config,
                             const RunOptions& options) {
  config.Validate();
  config.instance->Validate();
  std::vector<RegretTrace> traces(config.seeds.size());
  ParallelFor(config.seeds.size(), options.workers, [&](std::size_t i) {
    traces[i] = RunOnce(*config.instance, config.policy, config.seeds[i],
                        options);
  });
  return traces;
}

LineFit FitLogLogSlope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInsufficientData, "need at least two points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error(ErrorCode::kInsufficientData,
                  "log-log fit needs positive values");
    }
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) {
    throw Error(ErrorCode::kInsufficientData, "degenerate horizon grid");
  }
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

SweepResult SweepAndFit(const ExperimentConfig& config, int workers) {
  config.Validate();
  if (config.horizons.size() < 3 || config.seeds.size() < 10) {
    throw Error(ErrorCode::kInsufficientData,
                "sweep needs at least 3 horizons and 10 seeds");
  }
  SweepResult result;
  std::vector<double> xs;
  std::vector<double> ys;
  for (long horizon : config.horizons) {
    auto instance = std::make_shared<Instance>(*config.instance);
    instance->horizon = horizon;
    ExperimentConfig point = config;
    point.instance = instance;
    RunOptions options;
    options.workers = workers;
    const std::vector<RegretTrace> traces = Run(point, options);

    SweepRow row;
    row.horizon = horizon;
    for (const auto& t : traces) row.regrets.push_back(t.final_regret);
    const double n = static_cast<double>(row.regrets.size());
    row.mean_regret =
        std::accumulate(row.regrets.begin(), row.regrets.end(), 0.0) / n;
    double ss = 0.0;
    for (double r : row.regrets) ss += (r - row.mean_regret) * (r - row.mean_regret);
    row.std_regret = std::sqrt(ss / (n - 1.0));
    row.standard_error = row.std_regret / std::sqrt(n);
    xs.push_back(static_cast<double>(horizon));
    ys.push_back(row.mean_regret);
    result.rows.push_back(std::move(row));
  }
  result.fit = FitLogLogSlope(xs, ys);
  return result;
}

double SeparationLearningRate(int num_arms, int budget, long horizon) {
  return std::sqrt(std::log(static_cast<double>(num_arms) / budget) /
                   static_cast<double>(horizon));
}

double SeparationGap(int cliques, long horizon) {
  return 2.0 * std::sqrt(static_cast<double>(cliques) /
                         static_cast<double>(horizon));
}

Instance MakeSeparationInstance(const SeparationOptions& options) {
  const FeedbackGraph h =
      options.block_graph.value_or(SelfLoopGraph(options.cliques));
  if (h.num_arms() != options.cliques) {
    throw Error(ErrorCode::kInvalidConfig,
                "block graph must have one node per clique");
  }
  CliquePartition partition = MakeCliquePartitionInstance(h, options.budget);
  std::vector<double> block_means(options.cliques, options.base_mean);
  block_means[0] = options.base_mean +
                   options.gap.value_or(SeparationGap(options.cliques,
                                                      options.horizon));

  Instance instance;
  instance.graphs = {partition.graph};
  instance.budget = options.budget;
  instance.horizon = options.horizon;
  instance.cliques = partition.cliques;
  instance.alpha_hint = IndependenceNumberExact(h);
  instance.rewards = std::make_shared<CliqueAveragedSource>(
      std::make_unique<BernoulliSource>(block_means,
                                        static_cast<double>(options.budget)),
      partition.cliques);
  return instance;
}

SeparationReport SeparationExperiment(const SeparationOptions& options) {
  if (options.seeds.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "no seeds");
  }
  auto instance = std::make_shared<const Instance>(MakeSeparationInstance(options));
  const auto& cliques = instance->cliques;
  const int k = instance->num_arms();
  std::vector<int> block_of(k);
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    for (int a : cliques[i]) block_of[a] = static_cast<int>(i);
  }
  auto whole_clique = [&](const Action& v) {
    const int b = block_of[v.arms().front()];
    for (int a : v.arms()) {
      if (block_of[a] != b) return false;
    }
    return true;
  };

  SeparationReport report;
  report.num_arms = k;
  report.alpha = *instance->alpha_hint;

  ExperimentConfig config;
  config.instance = instance;
  config.seeds = options.seeds;
  config.policy.eta = options.eta.value_or(SeparationLearningRate(
      k, options.budget, options.horizon));

  std::atomic<long> mixed{0};
  RunOptions swap_options;
  swap_options.workers = options.workers;
  swap_options.on_round = [&](std::uint64_t, int, const Action& v,
                              std::span<const double>) {
    if (!whole_clique(v)) ++mixed;
  };
  config.policy.id = "osmdg";
  report.tuning = ResolveTuning(*instance, config.policy);
  for (const auto& t : Run(config, swap_options)) {
    report.regret_swap.push_back(t.final_regret);
  }

  std::atomic<long> broken{0};
  std::atomic<long> checked{0};
  RunOptions aligned_options;
  aligned_options.workers = options.workers;
  aligned_options.on_round = [&](std::uint64_t, int, const Action& v,
                                 std::span<const double>) {
    ++checked;
    if (!whole_clique(v)) ++broken;
  };
  config.policy.id = "osmd-clique";
  for (const auto& t : Run(config, aligned_options)) {
    report.regret_aligned.push_back(t.final_regret);
    broken += t.diagnostics.alignment_fallbacks;
  }

  const double n = static_cast<double>(options.seeds.size());
  report.mean_regret_swap =
      std::accumulate(report.regret_swap.begin(), report.regret_swap.end(), 0.0) / n;
  report.mean_regret_aligned =
      std::accumulate(report.regret_aligned.begin(), report.regret_aligned.end(), 0.0) / n;
  report.ratio = report.mean_regret_aligned / report.mean_regret_swap;
  report.aligned_rounds_checked = checked;
  report.alignment_held = broken == 0;
  report.swap_mixed_fraction =
      static_cast<double>(mixed) / (n * static_cast<double>(options.horizon));
  if (!report.alignment_held) {
    throw Error(ErrorCode::kAlignmentBroken,
                std::to_string(broken.load()) +
                    " rounds left the clique-aligned regime");
  }
  return report;
}

}  // namespace csb
