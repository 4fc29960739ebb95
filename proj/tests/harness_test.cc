#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "doctest.h"

#include "csb/error.h"
#include "csb/harness.h"
#include "csb/io.h"

namespace csb {
namespace {

namespace fs = std::filesystem;

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected csb::Error");
  return ErrorCode::kIo;
}

std::shared_ptr<const Instance> BernoulliInstance(const FeedbackGraph& g, int budget,
                                                  std::vector<double> means,
                                                  long horizon) {
  auto inst = std::make_shared<Instance>();
  inst->graphs = {g};
  inst->budget = budget;
  inst->horizon = horizon;
  inst->rewards = std::make_shared<BernoulliSource>(std::move(means));
  return inst;
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("csb_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("regret under constant rewards is recomputable from the trace") {
  const std::vector<double> mu = {0.9, 0.2, 0.6, 0.4};
  auto inst = std::make_shared<Instance>();
  inst->graphs = {SelfLoopGraph(4)};
  inst->budget = 2;
  inst->horizon = 300;
  inst->rewards = std::make_shared<FixedSequenceSource>(
      std::vector<std::vector<double>>(300, mu));
  for (const char* id : {"osmdg", "uniform", "etc", "arm-elimination"}) {
    PolicyConfig cfg;
    cfg.id = id;
    RunOptions opt;
    opt.keep_trace = true;
    const RegretTrace t = RunOnce(*inst, cfg, 5, opt);
    CHECK(t.best == Action(4, {0, 2}));
    double regret = 0.0;
    for (const auto& v : t.actions) regret += Action(4, {0, 2}).Payoff(mu) - v.Payoff(mu);
    CHECK(std::abs(t.final_regret - regret) <= 1e-9);
    CHECK(t.final_regret >= 0.0);
    CHECK(std::abs(t.cumulative_regret.back() - t.final_regret) <= 1e-9);
    CHECK(std::abs(std::accumulate(t.payoffs.begin(), t.payoffs.end(), 0.0) -
                   t.total_payoff) <= 1e-9);
  }
}

TEST_CASE("a single-decision set has zero regret") {
  auto inst = std::make_shared<Instance>(
      *BernoulliInstance(SelfLoopGraph(5), 2, {0.1, 0.5, 0.9, 0.3, 0.7}, 400));
  inst->decisions = DecisionSet::Explicit({Action(5, {0, 3})});
  for (const char* id : {"arm-elimination", "uniform"}) {
    PolicyConfig cfg;
    cfg.id = id;
    CHECK(RunOnce(*inst, cfg, 3).final_regret == 0.0);
  }
}

TEST_CASE("final regret is non-negative and matches the trace on random runs") {
  const auto inst = BernoulliInstance(CycleGraph(6, true), 2,
                                      {0.3, 0.5, 0.7, 0.2, 0.6, 0.4}, 500);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    PolicyConfig cfg;
    RunOptions opt;
    opt.keep_trace = true;
    const RegretTrace t = RunOnce(*inst, cfg, seed, opt);
    CHECK(t.final_regret >= -1e-12);
    double best = 0.0;
    // Recompute the best payoff from the per-round regret column.
    for (std::size_t i = 0; i < t.actions.size(); ++i) best += t.payoffs[i];
    CHECK(std::abs(best + t.cumulative_regret.back() - t.best_payoff) <= 1e-9);
  }
}

TEST_CASE("policies with the same seed face the same rewards") {
  const auto inst = BernoulliInstance(SelfLoopGraph(5), 2, std::vector<double>(5, 0.5), 200);
  std::vector<std::vector<double>> seen_a, seen_b;
  RunOptions a, b;
  a.on_round = [&](std::uint64_t, int, const Action&, std::span<const double> r) {
    seen_a.emplace_back(r.begin(), r.end());
  };
  b.on_round = [&](std::uint64_t, int, const Action&, std::span<const double> r) {
    seen_b.emplace_back(r.begin(), r.end());
  };
  PolicyConfig osmd, uniform;
  uniform.id = "uniform";
  RunOnce(*inst, osmd, 42, a);
  RunOnce(*inst, uniform, 42, b);
  CHECK(seen_a == seen_b);
}

TEST_CASE("parallel runs return the serial results in seed order") {
  ExperimentConfig cfg;
  cfg.instance = BernoulliInstance(SelfLoopGraph(6), 2, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, 300);
  cfg.seeds = {9, 3, 7, 1, 5};
  RunOptions serial, parallel;
  serial.workers = 1;
  parallel.workers = 4;
  const auto s = Run(cfg, serial);
  const auto p = Run(cfg, parallel);
  REQUIRE(s.size() == 5);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].seed == cfg.seeds[i]);
    CHECK(p[i].seed == cfg.seeds[i]);
    CHECK(s[i].final_regret == p[i].final_regret);
  }
}

TEST_CASE("run errors carry their code") {
  ExperimentConfig cfg;
  cfg.instance = BernoulliInstance(SelfLoopGraph(3), 1, {0.1, 0.2, 0.3}, 10);
  CHECK(CodeOf([&] { Run(cfg); }) == ErrorCode::kInvalidConfig);  // no seeds
  cfg.seeds = {1};
  cfg.policy.id = "nope";
  CHECK(CodeOf([&] { Run(cfg); }) == ErrorCode::kInvalidConfig);
  cfg.policy.id = "osmdg";
  cfg.horizons = {100, 100};
  CHECK(CodeOf([&] { cfg.Validate(); }) == ErrorCode::kInvalidConfig);

  auto seq = std::make_shared<Instance>(*cfg.instance);
  seq->rewards = std::make_shared<FixedSequenceSource>(
      std::vector<std::vector<double>>(5, std::vector<double>(3, 0.5)));
  CHECK(CodeOf([&] { RunOnce(*seq, {}, 1); }) == ErrorCode::kExhaustedSequence);

  auto partition = std::make_shared<Instance>(
      *BernoulliInstance(SelfLoopGraph(4), 2, std::vector<double>(4, 0.5), 10));
  partition->decisions = {DecisionSet::Kind::kPartition, PartitionDecisionSubset(4, 2)};
  CHECK(CodeOf([&] { RunOnce(*partition, {}, 1); }) == ErrorCode::kInvalidConfig);
  PolicyConfig elim;
  elim.id = "arm-elimination";
  CHECK_NOTHROW(RunOnce(*partition, elim, 1));
}

TEST_CASE("tuning resolution") {
  const auto inst = BernoulliInstance(CycleGraph(8, true), 2, std::vector<double>(8, 0.5), 1000);
  CHECK(ResolveAlpha(*inst, std::nullopt) == 4);
  CHECK(ResolveAlpha(*inst, 2) == 2);
  PolicyConfig cfg;
  const Tuning t = ResolveTuning(*inst, cfg);
  const Tuning ref = RecommendedParameters(8, 2, 1000, 4);
  CHECK(t.eta == ref.eta);
  CHECK(t.epsilon == ref.epsilon);
  cfg.eta = 0.3;
  CHECK(ResolveTuning(*inst, cfg).eta == 0.3);
  CHECK(ResolveTuning(*inst, cfg).epsilon == ref.epsilon);

  // Time-varying graphs tune with the largest alpha.
  auto varying = std::make_shared<Instance>(*inst);
  varying->graphs.clear();
  for (int t = 0; t < 1000; ++t) {
    varying->graphs.push_back(t % 2 ? CompleteGraph(8) : CycleGraph(8, true));
  }
  CHECK(ResolveAlpha(*varying, std::nullopt) == 4);
}

TEST_CASE("log-log fit") {
  std::vector<double> x, y;
  for (long t : {1024L, 4096L, 16384L, 65536L}) {
    x.push_back(static_cast<double>(t));
    y.push_back(3.0 * std::sqrt(static_cast<double>(t)));
  }
  const LineFit fit = FitLogLogSlope(x, y);
  CHECK(std::abs(fit.slope - 0.5) <= 0.02);
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)));
  CHECK(CodeOf([] { FitLogLogSlope(std::vector<double>{1.0}, std::vector<double>{1.0}); }) ==
        ErrorCode::kInsufficientData);
  CHECK(CodeOf([] {
          FitLogLogSlope(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 0.0});
        }) == ErrorCode::kInsufficientData);
}

TEST_CASE("sweep needs enough data") {
  ExperimentConfig cfg;
  cfg.instance = BernoulliInstance(SelfLoopGraph(4), 2, {0.1, 0.2, 0.3, 0.4}, 100);
  cfg.seeds = {1, 2, 3};
  cfg.horizons = {64, 128, 256};
  CHECK(CodeOf([&] { SweepAndFit(cfg); }) == ErrorCode::kInsufficientData);
  cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  cfg.horizons = {64, 128};
  CHECK(CodeOf([&] { SweepAndFit(cfg); }) == ErrorCode::kInsufficientData);
  cfg.horizons = {64, 128, 256};
  const SweepResult r = SweepAndFit(cfg);
  CHECK(r.rows.size() == 3);
  CHECK(r.rows[2].horizon == 256);
  CHECK(r.rows[0].regrets.size() == 10);
}

TEST_CASE("separation on a small instance keeps the alignment invariant") {
  SeparationOptions opt;
  opt.cliques = 4;
  opt.budget = 2;
  opt.horizon = 1000;
  opt.seeds = {1, 2, 3};
  const SeparationReport r = SeparationExperiment(opt);
  CHECK(r.alignment_held);
  CHECK(r.aligned_rounds_checked == 3000);
  CHECK(r.swap_mixed_fraction > 0.0);
  CHECK(r.num_arms == 8);
  CHECK(r.alpha == 4);
  CHECK(r.tuning.eta == doctest::Approx(SeparationLearningRate(8, 2, 1000)));
  CHECK(r.regret_swap.size() == 3);
}

TEST_CASE("separation defaults") {
  CHECK(SeparationLearningRate(32, 4, 16384) ==
        doctest::Approx(std::sqrt(std::log(8.0) / 16384)));
  CHECK(SeparationGap(8, 16384) == doctest::Approx(2.0 * std::sqrt(8.0 / 16384)));
  SeparationOptions opt;
  opt.cliques = 3;
  opt.budget = 2;
  opt.horizon = 400;
  const Instance inst = MakeSeparationInstance(opt);
  CHECK(inst.num_arms() == 6);
  CHECK(inst.alpha_hint == 3);
  const auto means = inst.rewards->Means();
  CHECK(means[0] == doctest::Approx(0.5 + SeparationGap(3, 400)));
  CHECK(means[2] == doctest::Approx(0.5));
}

TEST_CASE("graph json") {
  const Json explicit_graph = Json::parse(R"({"num_arms": 3, "edges": [[0, 1], [1, 1]]})");
  const FeedbackGraph g = GraphFromJson(explicit_graph);
  CHECK(g == FeedbackGraph(3, {{0, 1}, {1, 1}}));
  CHECK(GraphFromJson(GraphToJson(g)) == g);
  CHECK(GraphFromJson(Json::parse(R"({"generator": "complete", "num_arms": 4})")) ==
        CompleteGraph(4));
  CHECK(GraphFromJson(Json::parse(R"({"generator": "cycle", "num_arms": 5})")) ==
        CycleGraph(5, true));
  std::vector<std::vector<int>> cliques;
  const FeedbackGraph cp = GraphFromJson(
      Json::parse(R"({"generator": "clique_partition", "cliques": 3, "clique_size": 2})"),
      &cliques);
  CHECK(cp.num_arms() == 6);
  CHECK(cliques.size() == 3);
  CHECK(CodeOf([] { GraphFromJson(Json::parse(R"({"generator": "nope"})")); }) ==
        ErrorCode::kInvalidConfig);
  CHECK(CodeOf([] { GraphFromJson(Json::parse(R"({"num_arms": 2})")); }) ==
        ErrorCode::kInvalidConfig);
}

TEST_CASE("reward csv round trip") {
  const fs::path dir = TempDir("csv");
  const std::vector<std::vector<double>> rows = {{0.1, 0.2}, {1.0, 0.0}, {1.0 / 3, 0.7}};
  WriteRewardCsv(dir / "r.csv", rows);
  CHECK(ReadRewardCsv(dir / "r.csv") == rows);
  {
    std::ofstream bad(dir / "bad.csv");
    bad << "0.1,0.2\n0.3\n";
  }
  CHECK(CodeOf([&] { ReadRewardCsv(dir / "bad.csv"); }) == ErrorCode::kInvalidConfig);
  CHECK(CodeOf([&] { ReadRewardCsv(dir / "missing.csv"); }) == ErrorCode::kIo);
}

TEST_CASE("instance json") {
  const fs::path dir = TempDir("instance");
  WriteRewardCsv(dir / "seq.csv", std::vector<std::vector<double>>(50, {0.2, 0.8, 0.5}));
  const Json spec = Json::parse(R"({
    "graph": {"generator": "self_loops", "num_arms": 3},
    "budget": 1, "horizon": 50,
    "decision_set": {"type": "explicit", "actions": [[0], [1]]},
    "rewards": {"type": "sequence", "file": "seq.csv"}
  })");
  const Instance inst = InstanceFromJson(spec, dir);
  CHECK(inst.decisions.actions.size() == 2);
  PolicyConfig cfg;
  cfg.id = "arm-elimination";
  const RegretTrace t = RunOnce(inst, cfg, 1);
  CHECK(t.best == Action(3, {1}));

  const Json cliques = Json::parse(R"({
    "graph": {"generator": "clique_partition", "cliques": 4, "clique_size": 2},
    "budget": 2, "horizon": 100,
    "rewards": {"type": "clique_averaged", "block_means": [0.6, 0.5, 0.5, 0.5]}
  })");
  const Instance ci = InstanceFromJson(cliques, dir);
  CHECK(ci.cliques.size() == 4);
  PolicyConfig clique_cfg;
  clique_cfg.id = "osmd-clique";
  CHECK(RunOnce(ci, clique_cfg, 2).diagnostics.alignment_fallbacks == 0);

  Json bad = spec;
  bad["rewards"]["type"] = "gaussian";
  CHECK(CodeOf([&] { InstanceFromJson(bad, dir); }) == ErrorCode::kInvalidConfig);
  bad = spec;
  bad.erase("budget");
  CHECK(CodeOf([&] { InstanceFromJson(bad, dir); }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("traces are byte-identical across reruns") {
  const fs::path dir = TempDir("repro");
  const Json spec = Json::parse(R"({
    "instance": {
      "graph": {"generator": "cycle", "num_arms": 6},
      "budget": 2, "horizon": 400,
      "rewards": {"type": "bernoulli", "means": [0.2, 0.4, 0.6, 0.8, 0.5, 0.3]}
    },
    "policy": {"id": "osmdg"},
    "seeds": [3, 4]
  })");
  const std::string hash = ConfigHash(spec);
  CHECK(hash.size() == 16);
  CHECK(hash == ConfigHash(Json::parse(spec.dump())));
  for (int rep = 0; rep < 2; ++rep) {
    const ExperimentConfig cfg = ExperimentConfigFromJson(spec, dir);
    RunOptions opt;
    opt.keep_trace = true;
    for (const auto& t : Run(cfg, opt)) {
      WriteTraceCsv(dir / (std::to_string(rep) + TraceFileName("osmdg", hash, t.seed)), t);
    }
  }
  for (int seed : {3, 4}) {
    const std::string name = TraceFileName("osmdg", hash, seed);
    const std::string a = Slurp(dir / ("0" + name));
    CHECK(a.size() > 1000);
    CHECK(a == Slurp(dir / ("1" + name)));
    CHECK(a.rfind("t,arms,payoff,cumulative_regret\n", 0) == 0);
  }
  CHECK(TraceFileName("etc", "abc", 7) == "etc_abc_seed7.csv");
}

TEST_CASE("osmdg beats the uniform baseline" * doctest::test_suite("monte_carlo_claims")) {
  // K = 6, S = 2, self-loop graph, Bernoulli gaps, T = 2^12, 20 paired seeds.
  ExperimentConfig cfg;
  cfg.instance = BernoulliInstance(SelfLoopGraph(6), 2, {0.8, 0.7, 0.5, 0.4, 0.3, 0.2}, 4096);
  for (std::uint64_t s = 1; s <= 20; ++s) cfg.seeds.push_back(s);
  auto mean = [](const std::vector<RegretTrace>& ts) {
    double m = 0.0;
    for (const auto& t : ts) m += t.final_regret;
    return m / ts.size();
  };
  const double osmd = mean(Run(cfg));
  cfg.policy.id = "uniform";
  const double uniform = mean(Run(cfg));
  MESSAGE("mean regret osmdg " << osmd << ", uniform " << uniform);
  CHECK(uniform >= 3.0 * osmd);
}

TEST_CASE("arm elimination drops a decision 0.3 worse" * doctest::test_suite("monte_carlo_claims")) {
  // Two disjoint decisions on a self-loop graph. The radius only falls below
  // the gap once each decision has about 8.7e4 observations, so the horizon
  // has to cover roughly 1.75e5 rounds.
  auto inst = std::make_shared<Instance>(*BernoulliInstance(SelfLoopGraph(2), 1, {0.8, 0.5}, 300000));
  inst->decisions = DecisionSet::Explicit({Action(2, {0}), Action(2, {1})});
  ExperimentConfig cfg;
  cfg.instance = inst;
  cfg.policy.id = "arm-elimination";
  for (std::uint64_t s = 1; s <= 100; ++s) cfg.seeds.push_back(s);
  int eliminated = 0;
  for (const auto& t : Run(cfg)) eliminated += t.diagnostics.surviving == std::vector<int>{0};
  MESSAGE("suboptimal decision eliminated in " << eliminated << "/100 runs");
  CHECK(eliminated >= 95);
}

}  // namespace
}  // namespace csb
