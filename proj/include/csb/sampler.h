#ifndef CSB_SAMPLER_H_
#define CSB_SAMPLER_H_

#include <vector>

#include "csb/action.h"
#include "csb/polytope.h"
#include "csb/rng.h"

namespace csb {

// How a fractional decision is realised as an action.
struct SamplerKind {
  enum class Type { kSwapRounding, kMeanOnly, kCliqueAligned };

  Type type = Type::kSwapRounding;
  // Only used by kCliqueAligned: a partition of [0, K) into blocks.
  std::vector<std::vector<int>> cliques;

  static SamplerKind SwapRounding() { return {Type::kSwapRounding, {}}; }
  static SamplerKind MeanOnly() { return {Type::kMeanOnly, {}}; }
  static SamplerKind CliqueAligned(std::vector<std::vector<int>> cliques) {
    return {Type::kCliqueAligned, std::move(cliques)};
  }
};

const char* SamplerName(SamplerKind::Type type);

// Randomised swap rounding over the full decision set: merges the vertices
// of `d` left to right, keeping the merged vertex with probability
// beta / (beta + w_next) at each exchange. The output has mean
// Reconstruct(d) and pairwise non-positive covariances.
Action SwapRound(const VertexDecomposition& d, Rng& rng);

// Returns vertex j with probability w_j. Correct mean, no correlation
// guarantee.
Action MeanOnlySample(const VertexDecomposition& d, Rng& rng);

// Throws kBadPartition unless `cliques` partitions [0, num_arms) into
// blocks of exactly `budget` arms.
void ValidateCliques(const std::vector<std::vector<int>>& cliques,
                     int num_arms, int budget);

bool IsCliqueAligned(const std::vector<double>& q,
                     const std::vector<std::vector<int>>& cliques,
                     double tol = kFeasibilityTol);

struct CliqueSample {
  Action action;
  // False when x was not clique-aligned and the mean-only fallback ran.
  bool aligned = true;
};

// If x is constant on every clique, plays clique i with probability equal to
// that common value; otherwise falls back to MeanOnlySample(Decompose(x)).
CliqueSample CliqueAlignedSample(const DecisionPoint& x,
                                 const std::vector<std::vector<int>>& cliques,
                                 int budget, Rng& rng);

struct SampleResult {
  Action action;
  VertexDecomposition decomposition;
  bool aligned = true;
};

// Decomposes x and draws with the given sampler.
SampleResult Sample(const SamplerKind& kind, const DecisionPoint& x,
                    int budget, Rng& rng);

struct PairCovariance {
  int i = 0;
  int j = 0;
  double covariance = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
};

struct SamplerReport {
  long n_samples = 0;
  std::vector<double> targets;
  std::vector<double> means;
  std::vector<double> mean_z;
  double worst_mean_z = 0.0;
  std::vector<PairCovariance> pairs;
  double max_covariance_z = 0.0;
  std::vector<PairCovariance> flagged_pairs;

  bool MeansWithin(double z) const { return worst_mean_z <= z; }
};

inline constexpr double kCertifyZ = 4.0;

// A random interior point of Conv(A): the projection of log-coordinates drawn
// uniformly from [-spread, spread].
DecisionPoint RandomTarget(int num_arms, int budget, Rng& rng,
                           double spread = 3.0);

// Monte Carlo check of the mean and negative-correlation conditions. Pairs
// whose covariance exceeds +kCertifyZ standard errors are flagged, with the
// standard error taken under zero covariance at the target marginals.
SamplerReport CertifySampler(const SamplerKind& kind, const DecisionPoint& x,
                             int budget, long n_samples, Rng& rng);

}  // namespace csb

#endif  // CSB_SAMPLER_H_
