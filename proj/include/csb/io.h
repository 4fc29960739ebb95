#ifndef CSB_IO_H_
#define CSB_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "csb/environment.h"
#include "csb/graph.h"
#include "csb/harness.h"
#include "csb/polytope.h"
#include "csb/sampler.h"

namespace csb {

using Json = nlohmann::json;

// Graphs are either explicit, {"num_arms": K, "edges": [[from, to], ...]},
// or named, {"generator": "complete" | "self_loops" | "cycle" | "hub" |
// "clique_partition", ...params}. For "clique_partition" the clique blocks
// are returned through `cliques` when non-null.
FeedbackGraph GraphFromJson(const Json& spec,
                            std::vector<std::vector<int>>* cliques = nullptr);
Json GraphToJson(const FeedbackGraph& g);
FeedbackGraph LoadGraphFile(const std::filesystem::path& path);

// T rows x K columns of rewards in [0, 1]; '#' starts a comment line.
std::vector<std::vector<double>> ReadRewardCsv(const std::filesystem::path& path);
void WriteRewardCsv(const std::filesystem::path& path,
                    const std::vector<std::vector<double>>& rows);

// Relative file paths inside the JSON resolve against `base_dir`.
Instance InstanceFromJson(const Json& spec,
                          const std::filesystem::path& base_dir);

ExperimentConfig ExperimentConfigFromJson(
    const Json& spec, const std::filesystem::path& base_dir);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

Json ProfileToJson(const GraphProfile& profile, int num_arms);
Json DecompositionToJson(const VertexDecomposition& d);
Json SamplerReportToJson(const SamplerReport& report);
Json TraceSummaryToJson(const RegretTrace& trace);
Json SweepToJson(const SweepResult& sweep);
Json SeparationToJson(const SeparationReport& report);

// Stable 16-hex-digit FNV-1a hash of the canonical JSON dump.
std::string ConfigHash(const Json& spec);

// Columns t, arms, payoff, cumulative_regret; arms as "a;b;c". Doubles use
// 17 significant digits so reruns compare byte for byte.
void WriteTraceCsv(const std::filesystem::path& path, const RegretTrace& trace);
std::string TraceFileName(const std::string& policy, const std::string& hash,
                          std::uint64_t seed);

}  // namespace csb

#endif  // CSB_IO_H_
