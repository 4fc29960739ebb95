#include "csb/io.h"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "csb/error.h"

namespace csb {

namespace fs = std::filesystem;

namespace {

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig,
                path.string() + ": " + e.what());
  }
}

template <typename T>
T Require(const Json& spec, const char* key) {
  if (!spec.contains(key)) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string("missing field '") + key + "'");
  }
  try {
    return spec.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T Optional(const Json& spec, const char* key, T fallback) {
  return spec.contains(key) ? Require<T>(spec, key) : fallback;
}

std::vector<std::vector<int>> Blocks(int count, int size) {
  std::vector<std::vector<int>> blocks(count);
  for (int i = 0; i < count; ++i) {
    blocks[i].resize(size);
    std::iota(blocks[i].begin(), blocks[i].end(), i * size);
  }
  return blocks;
}

}  // namespace

FeedbackGraph GraphFromJson(const Json& spec,
                            std::vector<std::vector<int>>* cliques) {
  if (!spec.is_object()) {
    throw Error(ErrorCode::kInvalidConfig, "graph must be a JSON object");
  }
  if (!spec.contains("generator")) {
    const int k = Require<int>(spec, "num_arms");
    const auto edges =
        Require<std::vector<std::pair<int, int>>>(spec, "edges");
    return FeedbackGraph(k, edges);
  }
  const auto name = Require<std::string>(spec, "generator");
  if (name == "complete") return CompleteGraph(Require<int>(spec, "num_arms"));
  if (name == "self_loops") return SelfLoopGraph(Require<int>(spec, "num_arms"));
  if (name == "hub") return HubGraph(Require<int>(spec, "num_arms"));
  if (name == "cycle") {
    return CycleGraph(Require<int>(spec, "num_arms"),
                      Optional<bool>(spec, "self_loops", true));
  }
  if (name == "clique_partition") {
    const int n = Require<int>(spec, "cliques");
    const int size = Require<int>(spec, "clique_size");
    const FeedbackGraph h = spec.contains("block_graph")
                                ? GraphFromJson(spec.at("block_graph"))
                                : SelfLoopGraph(n);
    if (h.num_arms() != n) {
      throw Error(ErrorCode::kInvalidConfig,
                  "block_graph must have 'cliques' nodes");
    }
    if (cliques) *cliques = Blocks(n, size);
    return CliquePartitionGraph(h, size);
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown graph generator '" + name + "'");
}

Json GraphToJson(const FeedbackGraph& g) {
  Json edges = Json::array();
  for (const auto& [a, b] : g.Edges()) edges.push_back({a, b});
  return {{"num_arms", g.num_arms()}, {"edges", edges}};
}

FeedbackGraph LoadGraphFile(const fs::path& path) {
  return GraphFromJson(ReadJsonFile(path));
}

std::vector<std::vector<double>> ReadRewardCsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    while (std::getline(cells, cell, ',')) {
      double value = 0.0;
      std::size_t used = 0;
      try {
        value = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || cell.find_first_not_of(" \t\r", used) != std::string::npos) {
        throw Error(ErrorCode::kInvalidConfig, where + ": bad number '" + cell + "'");
      }
      if (!(value >= 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::kInvalidConfig, where + ": reward outside [0, 1]");
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::kInvalidConfig, where + ": row width differs from the first row");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void WriteRewardCsv(const fs::path& path,
                    const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << FormatDouble(row[i]);
    }
    out << '\n';
  }
}

Instance InstanceFromJson(const Json& spec, const fs::path& base_dir) {
  Instance instance;
  std::vector<std::vector<int>> cliques;
  instance.graphs = {GraphFromJson(Require<Json>(spec, "graph"), &cliques)};
  instance.cliques = std::move(cliques);
  if (spec.contains("cliques")) {
    instance.cliques = Require<std::vector<std::vector<int>>>(spec, "cliques");
  }
  const int k = instance.graphs.front().num_arms();
  instance.budget = Require<int>(spec, "budget");
  instance.horizon = Require<long>(spec, "horizon");
  if (spec.contains("alpha")) instance.alpha_hint = Require<int>(spec, "alpha");

  const Json decisions = Optional<Json>(spec, "decision_set", Json{{"type", "full"}});
  const auto kind = Require<std::string>(decisions, "type");
  if (kind == "full") {
    instance.decisions = DecisionSet::Full();
  } else if (kind == "partition") {
    instance.decisions = {DecisionSet::Kind::kPartition,
                          PartitionDecisionSubset(k, instance.budget)};
  } else if (kind == "explicit") {
    std::vector<Action> actions;
    for (const auto& arms :
         Require<std::vector<std::vector<int>>>(decisions, "actions")) {
      actions.emplace_back(k, arms);
    }
    instance.decisions = DecisionSet::Explicit(std::move(actions));
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown decision_set type '" + kind + "'");
  }

  const Json rewards = Require<Json>(spec, "rewards");
  const auto source = Require<std::string>(rewards, "type");
  if (source == "bernoulli") {
    instance.rewards = std::make_shared<BernoulliSource>(
        Require<std::vector<double>>(rewards, "means"));
  } else if (source == "sequence") {
    fs::path file = Require<std::string>(rewards, "file");
    if (file.is_relative()) file = base_dir / file;
    instance.rewards = std::make_shared<FixedSequenceSource>(ReadRewardCsv(file));
  } else if (source == "clique_averaged") {
    if (instance.cliques.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "clique_averaged rewards need clique blocks");
    }
    const double scale =
        Optional<double>(rewards, "scale", static_cast<double>(instance.budget));
    instance.rewards = std::make_shared<CliqueAveragedSource>(
        std::make_unique<BernoulliSource>(
            Require<std::vector<double>>(rewards, "block_means"), scale),
        instance.cliques);
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown reward type '" + source + "'");
  }
  instance.Validate();
  return instance;
}

ExperimentConfig ExperimentConfigFromJson(const Json& spec,
                                          const fs::path& base_dir) {
  ExperimentConfig config;
  if (spec.contains("instance_file")) {
    fs::path file = Require<std::string>(spec, "instance_file");
    if (file.is_relative()) file = base_dir / file;
    config.instance = std::make_shared<const Instance>(
        InstanceFromJson(ReadJsonFile(file), file.parent_path()));
  } else {
    config.instance = std::make_shared<const Instance>(
        InstanceFromJson(Require<Json>(spec, "instance"), base_dir));
  }
  const Json policy = Optional<Json>(spec, "policy", Json::object());
  config.policy.id = Optional<std::string>(policy, "id", "osmdg");
  if (policy.contains("eta")) config.policy.eta = Require<double>(policy, "eta");
  if (policy.contains("epsilon")) {
    config.policy.epsilon = Require<double>(policy, "epsilon");
  }
  if (policy.contains("alpha")) config.policy.alpha = Require<int>(policy, "alpha");
  if (policy.contains("t0")) {
    config.policy.exploration_rounds = Require<long>(policy, "t0");
  }
  config.policy.failure_prob = Optional<double>(policy, "failure_prob", 0.05);
  config.seeds = Optional<std::vector<std::uint64_t>>(spec, "seeds", {1});
  config.horizons = Optional<std::vector<long>>(spec, "horizons", {});
  config.output_dir = Optional<std::string>(spec, "output_dir", "");
  config.Validate();
  return config;
}

ExperimentConfig LoadExperimentConfig(const fs::path& path) {
  return ExperimentConfigFromJson(ReadJsonFile(path), path.parent_path());
}

Json ProfileToJson(const GraphProfile& profile, int num_arms) {
  return {{"num_arms", num_arms},
          {"alpha", profile.alpha},
          {"alpha_is_exact", profile.alpha_is_exact},
          {"delta_upper", profile.delta_upper},
          {"observability", std::string(ObservabilityName(profile.observability))}};
}

Json DecompositionToJson(const VertexDecomposition& d) {
  Json terms = Json::array();
  for (const auto& term : d.terms) {
    terms.push_back({{"weight", term.weight}, {"arms", term.vertex.arms()}});
  }
  return {{"terms", terms}};
}

Json SamplerReportToJson(const SamplerReport& report) {
  auto pair_json = [](const PairCovariance& p) {
    return Json{{"i", p.i}, {"j", p.j}, {"covariance", p.covariance},
                {"standard_error", p.standard_error}, {"z", p.z}};
  };
  Json flagged = Json::array();
  for (const auto& p : report.flagged_pairs) flagged.push_back(pair_json(p));
  Json pairs = Json::array();
  for (const auto& p : report.pairs) pairs.push_back(pair_json(p));
  return {{"n_samples", report.n_samples},
          {"targets", report.targets},
          {"means", report.means},
          {"mean_z", report.mean_z},
          {"worst_mean_z", report.worst_mean_z},
          {"max_covariance_z", report.max_covariance_z},
          {"pairs", pairs},
          {"flagged_pairs", flagged}};
}

Json TraceSummaryToJson(const RegretTrace& trace) {
  Json j = {{"seed", trace.seed},
            {"policy", trace.policy},
            {"horizon", trace.horizon},
            {"best_action", trace.best.arms()},
            {"best_payoff", trace.best_payoff},
            {"total_payoff", trace.total_payoff},
            {"final_regret", trace.final_regret}};
  const auto& d = trace.diagnostics;
  if (d.alignment_fallbacks) j["alignment_fallbacks"] = d.alignment_fallbacks;
  if (!d.eliminations.empty()) {
    Json events = Json::array();
    for (const auto& e : d.eliminations) {
      events.push_back({{"round", e.round}, {"min_count", e.min_count},
                        {"radius", e.radius}, {"best_empirical", e.best_empirical},
                        {"eliminated", e.eliminated}});
    }
    j["eliminations"] = events;
    j["surviving"] = d.surviving;
  }
  if (d.committed) j["committed"] = d.committed->arms();
  return j;
}

Json SweepToJson(const SweepResult& sweep) {
  Json rows = Json::array();
  for (const auto& r : sweep.rows) {
    rows.push_back({{"horizon", r.horizon}, {"mean_regret", r.mean_regret},
                    {"std_regret", r.std_regret},
                    {"standard_error", r.standard_error}});
  }
  return {{"rows", rows},
          {"slope", sweep.fit.slope},
          {"intercept", sweep.fit.intercept}};
}

Json SeparationToJson(const SeparationReport& r) {
  return {{"num_arms", r.num_arms},
          {"alpha", r.alpha},
          {"epsilon", r.tuning.epsilon},
          {"eta", r.tuning.eta},
          {"mean_regret_swap", r.mean_regret_swap},
          {"mean_regret_aligned", r.mean_regret_aligned},
          {"ratio", r.ratio},
          {"aligned_rounds_checked", r.aligned_rounds_checked},
          {"alignment_held", r.alignment_held},
          {"swap_mixed_fraction", r.swap_mixed_fraction},
          {"regret_swap", r.regret_swap},
          {"regret_aligned", r.regret_aligned}};
}

std::string ConfigHash(const Json& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : spec.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

void WriteTraceCsv(const fs::path& path, const RegretTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "t,arms,payoff,cumulative_regret\n";
  for (std::size_t t = 0; t < trace.actions.size(); ++t) {
    out << (t + 1) << ',' << trace.actions[t].ToString() << ','
        << FormatDouble(trace.payoffs[t]) << ','
        << FormatDouble(trace.cumulative_regret[t]) << '\n';
  }
}

std::string TraceFileName(const std::string& policy, const std::string& hash,
                          std::uint64_t seed) {
  return policy + "_" + hash + "_seed" + std::to_string(seed) + ".csv";
}

}  // namespace csb
