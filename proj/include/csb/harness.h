#ifndef CSB_HARNESS_H_
#define CSB_HARNESS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "csb/environment.h"
#include "csb/policies.h"

namespace csb {

struct PolicyConfig {
  // "osmdg", "osmd-vanilla", "osmd-clique", "arm-elimination", "etc",
  // "uniform".
  std::string id = "osmdg";
  std::optional<double> eta;
  std::optional<double> epsilon;
  std::optional<int> alpha;
  std::optional<long> exploration_rounds;
  double failure_prob = 0.05;
};

// Independence number used for tuning: the override, else the instance hint,
// else the exact value (maximum over per-round graphs), else K.
int ResolveAlpha(const Instance& instance, std::optional<int> override_alpha);

// The (epsilon, eta) an OSMD policy will run with on this instance.
Tuning ResolveTuning(const Instance& instance, const PolicyConfig& cfg);

std::unique_ptr<Policy> MakePolicy(const PolicyConfig& cfg,
                                   const Instance& instance);

struct RegretTrace {
  std::uint64_t seed = 0;
  std::string policy;
  long horizon = 0;
  // Per-round records; filled only when RunOptions::keep_trace is set.
  std::vector<Action> actions;
  std::vector<double> payoffs;
  std::vector<double> cumulative_regret;
  Action best;
  double best_payoff = 0.0;
  double total_payoff = 0.0;
  double final_regret = 0.0;
  PolicyDiagnostics diagnostics;
};

struct RunOptions {
  bool keep_trace = false;
  // Called after every round with the played action and the full reward
  // vector. May be invoked from several worker threads at once.
  std::function<void(std::uint64_t seed, int round, const Action& played,
                     std::span<const double> rewards)>
      on_round;
  // 0 picks std::thread::hardware_concurrency().
  int workers = 0;
};

// One seeded interaction. The environment and the policy draw from
// independent streams split off the seed, so two policies run with the same
// seed face the same reward sequence.
RegretTrace RunOnce(const Instance& instance, const PolicyConfig& policy,
                    std::uint64_t seed, const RunOptions& options = {});

struct ExperimentConfig {
  std::shared_ptr<const Instance> instance;
  PolicyConfig policy;
  std::vector<std::uint64_t> seeds;
  std::vector<long> horizons;
  std::string output_dir;

  // Throws kInvalidConfig for empty seeds or a non-increasing horizon grid.
  void Validate() const;
};

// Runs every seed (in parallel), returning traces in seed order.
std::vector<RegretTrace> Run(const ExperimentConfig& config,
                             const RunOptions& options = {});

struct SweepRow {
  long horizon = 0;
  double mean_regret = 0.0;
  double std_regret = 0.0;
  double standard_error = 0.0;
  std::vector<double> regrets;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least squares of log(y) on log(x). Throws kInsufficientData for fewer than
// two points or non-positive values.
LineFit FitLogLogSlope(std::span<const double> x, std::span<const double> y);

struct SweepResult {
  std::vector<SweepRow> rows;
  LineFit fit;
};

// Needs at least 3 horizons and 10 seeds (kInsufficientData otherwise).
SweepResult SweepAndFit(const ExperimentConfig& config, int workers = 0);

struct SeparationOptions {
  int cliques = 8;
  int budget = 4;
  long horizon = 1 << 14;
  std::vector<std::uint64_t> seeds;
  // Block-level Bernoulli means: block 0 gets base + gap, the rest base.
  // The gap defaults to 2 sqrt(n / T).
  double base_mean = 0.5;
  std::optional<double> gap;
  // Graph over the blocks; self-loops only when absent.
  std::optional<FeedbackGraph> block_graph;
  // Learning rate shared by both runs; SeparationLearningRate when absent.
  std::optional<double> eta;
  int workers = 0;
};

struct SeparationReport {
  int num_arms = 0;
  int alpha = 0;
  Tuning tuning;
  std::vector<double> regret_swap;
  std::vector<double> regret_aligned;
  double mean_regret_swap = 0.0;
  double mean_regret_aligned = 0.0;
  double ratio = 0.0;  // aligned / swap
  long aligned_rounds_checked = 0;
  bool alignment_held = true;
  // Fraction of swap-rounding rounds whose action was not a whole clique.
  double swap_mixed_fraction = 0.0;
};

// sqrt(log(K/S) / T), the full-information OSMD rate.
double SeparationLearningRate(int num_arms, int budget, long horizon);

// 2 sqrt(n / T)
double SeparationGap(int cliques, long horizon);

// Clique-averaged instance on blocks of `budget` arms; runs OSMD-G with swap
// rounding and with the clique-aligned sampler on identical reward streams.
// Throws kAlignmentBroken if an aligned run ever leaves the clique regime.
SeparationReport SeparationExperiment(const SeparationOptions& options);

// Instance used by the separation experiment.
Instance MakeSeparationInstance(const SeparationOptions& options);

}  // namespace csb

#endif  // CSB_HARNESS_H_
