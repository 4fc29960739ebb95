#include "csb/sampler.h"

#include <cmath>
#include <limits>
#include <string>

#include "csb/error.h"

namespace csb {

const char* SamplerName(SamplerKind::Type type) {
  switch (type) {
    case SamplerKind::Type::kSwapRounding: return "swap_rounding";
    case SamplerKind::Type::kMeanOnly: return "mean_only";
    case SamplerKind::Type::kCliqueAligned: return "clique_aligned";
  }
  return "unknown";
}

Action SwapRound(const VertexDecomposition& d, Rng& rng) {
  if (d.terms.empty()) {
    throw Error(ErrorCode::kInfeasiblePoint, "empty decomposition");
  }
  std::vector<std::uint8_t> merged = d.terms.front().vertex.bits();
  const int k = static_cast<int>(merged.size());
  double beta = d.terms.front().weight;
  for (std::size_t i = 1; i < d.terms.size(); ++i) {
    std::vector<std::uint8_t> candidate = d.terms[i].vertex.bits();
    const double w = d.terms[i].weight;
    const double keep_merged = beta / (beta + w);
    // Each exchange makes both vectors agree at the two swapped positions,
    // so the scan pointers only move forward.
    int a = 0;
    int a_prime = 0;
    while (true) {
      while (a < k && !(merged[a] && !candidate[a])) ++a;
      while (a_prime < k && !(candidate[a_prime] && !merged[a_prime])) {
        ++a_prime;
      }
      if (a == k && a_prime == k) break;
      if (a == k || a_prime == k) {
        throw Error(ErrorCode::kExchangeFailure,
                    "vertices of different sizes cannot be exchanged");
      }
      if (rng.Uniform() < keep_merged) {
        candidate[a_prime] = 0;
        candidate[a] = 1;
      } else {
        merged[a] = 0;
        merged[a_prime] = 1;
      }
    }
    beta += w;
  }
  return Action::FromBits(merged);
}

Action MeanOnlySample(const VertexDecomposition& d, Rng& rng) {
  if (d.terms.empty()) {
    throw Error(ErrorCode::kInfeasiblePoint, "empty decomposition");
  }
  const double u = rng.Uniform() * d.TotalWeight();
  double acc = 0.0;
  for (const auto& term : d.terms) {
    acc += term.weight;
    if (u < acc) return term.vertex;
  }
  return d.terms.back().vertex;
}

void ValidateCliques(const std::vector<std::vector<int>>& cliques,
                     int num_arms, int budget) {
  std::vector<int> seen(num_arms, 0);
  for (const auto& block : cliques) {
    if (static_cast<int>(block.size()) != budget) {
      throw Error(ErrorCode::kBadPartition,
                  "clique of size " + std::to_string(block.size()) +
                      " but budget is " + std::to_string(budget));
    }
    for (int a : block) {
      if (a < 0 || a >= num_arms || seen[a]++) {
        throw Error(ErrorCode::kBadPartition,
                    "arm " + std::to_string(a) + " repeated or out of range");
      }
    }
  }
  for (int a = 0; a < num_arms; ++a) {
    if (!seen[a]) {
      throw Error(ErrorCode::kBadPartition,
                  "arm " + std::to_string(a) + " not covered by any clique");
    }
  }
}

bool IsCliqueAligned(const std::vector<double>& q,
                     const std::vector<std::vector<int>>& cliques, double tol) {
  for (const auto& block : cliques) {
    for (int a : block) {
      if (std::abs(q[a] - q[block.front()]) > tol) return false;
    }
  }
  return true;
}

CliqueSample CliqueAlignedSample(const DecisionPoint& x,
                                 const std::vector<std::vector<int>>& cliques,
                                 int budget, Rng& rng) {
  ValidateCliques(cliques, x.num_arms(), budget);
  if (!IsCliqueAligned(x.coords, cliques)) {
    return {MeanOnlySample(Decompose(x.coords, budget), rng), false};
  }
  // Block probabilities are the common in-block values; they sum to
  // sum(x) / budget = 1.
  double total = 0.0;
  for (const auto& block : cliques) total += x[block.front()];
  const double u = rng.Uniform() * total;
  double acc = 0.0;
  const std::vector<int>* pick = &cliques.back();
  for (const auto& block : cliques) {
    acc += x[block.front()];
    if (u < acc) {
      pick = &block;
      break;
    }
  }
  return {Action(x.num_arms(), *pick), true};
}

SampleResult Sample(const SamplerKind& kind, const DecisionPoint& x,
                    int budget, Rng& rng) {
  SampleResult result;
  switch (kind.type) {
    case SamplerKind::Type::kSwapRounding:
      result.decomposition = Decompose(x.coords, budget);
      result.action = SwapRound(result.decomposition, rng);
      break;
    case SamplerKind::Type::kMeanOnly:
      result.decomposition = Decompose(x.coords, budget);
      result.action = MeanOnlySample(result.decomposition, rng);
      break;
    case SamplerKind::Type::kCliqueAligned: {
      CliqueSample drawn = CliqueAlignedSample(x, kind.cliques, budget, rng);
      result.action = std::move(drawn.action);
      result.aligned = drawn.aligned;
      break;
    }
  }
  return result;
}

SamplerReport CertifySampler(const SamplerKind& kind, const DecisionPoint& x,
                             int budget, long n_samples, Rng& rng) {
  if (n_samples < 1) {
    throw Error(ErrorCode::kInsufficientData, "need at least one sample");
  }
  const int k = x.num_arms();
  std::vector<long> single(k, 0);
  std::vector<long> joint(static_cast<std::size_t>(k) * k, 0);

  // The decomposition does not depend on the draw, so compute it once.
  VertexDecomposition decomposition;
  if (kind.type != SamplerKind::Type::kCliqueAligned) {
    decomposition = Decompose(x.coords, budget);
  }
  for (long s = 0; s < n_samples; ++s) {
    Action v;
    switch (kind.type) {
      case SamplerKind::Type::kSwapRounding:
        v = SwapRound(decomposition, rng);
        break;
      case SamplerKind::Type::kMeanOnly:
        v = MeanOnlySample(decomposition, rng);
        break;
      case SamplerKind::Type::kCliqueAligned:
        v = CliqueAlignedSample(x, kind.cliques, budget, rng).action;
        break;
    }
    if (v.size() != budget) {
      throw Error(ErrorCode::kExchangeFailure,
                  "sampled action has " + std::to_string(v.size()) +
                      " arms, expected " + std::to_string(budget));
    }
    const auto& arms = v.arms();
    for (std::size_t p = 0; p < arms.size(); ++p) {
      ++single[arms[p]];
      for (std::size_t q = p + 1; q < arms.size(); ++q) {
        ++joint[static_cast<std::size_t>(arms[p]) * k + arms[q]];
      }
    }
  }

  const double n = static_cast<double>(n_samples);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  SamplerReport report;
  report.n_samples = n_samples;
  report.targets = x.coords;
  report.means.resize(k);
  report.mean_z.resize(k);
  for (int a = 0; a < k; ++a) {
    report.means[a] = single[a] / n;
    const double deviation = std::abs(report.means[a] - x[a]);
    const double se = std::sqrt(std::max(0.0, x[a] * (1.0 - x[a])) / n);
    report.mean_z[a] =
        se > 0.0 ? deviation / se : (deviation <= kFeasibilityTol ? 0.0 : kInf);
    report.worst_mean_z = std::max(report.worst_mean_z, report.mean_z[a]);
  }

  report.max_covariance_z = -kInf;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double pi = report.means[i];
      const double pj = report.means[j];
      const double n11 = static_cast<double>(joint[static_cast<std::size_t>(i) * k + j]);
      const double n10 = single[i] - n11;
      const double n01 = single[j] - n11;
      const double n00 = n - n11 - n10 - n01;
      // Centered products (v_i - p_i)(v_j - p_j) over the 2x2 table.
      const double d11 = (1 - pi) * (1 - pj);
      const double d10 = (1 - pi) * (-pj);
      const double d01 = (-pi) * (1 - pj);
      const double d00 = pi * pj;
      const double cov = (n11 * d11 + n10 * d10 + n01 * d01 + n00 * d00) / n;
      // Standard error at zero covariance, from the target marginals. The
      // plug-in estimate collapses when a cell of the 2x2 table is rare.
      const double se = std::sqrt(std::max(
          0.0, x[i] * (1.0 - x[i]) * x[j] * (1.0 - x[j]) / n));
      PairCovariance pair{i, j, cov, se, 0.0};
      if (se > 0.0) {
        pair.z = cov / se;
      } else {
        pair.z = std::abs(cov) <= 1e-15 ? 0.0 : (cov > 0 ? kInf : -kInf);
      }
      report.max_covariance_z = std::max(report.max_covariance_z, pair.z);
      if (pair.z > kCertifyZ) report.flagged_pairs.push_back(pair);
      report.pairs.push_back(pair);
    }
  }
  if (report.pairs.empty()) report.max_covariance_z = 0.0;
  return report;
}

DecisionPoint RandomTarget(int num_arms, int budget, Rng& rng, double spread) {
  PolytopeSpec spec{num_arms, budget, 0.0};
  spec.Validate();
  DualPoint w;
  w.log_coords.resize(num_arms);
  for (double& v : w.log_coords) v = spread * (2.0 * rng.Uniform() - 1.0);
  return KlProject(w, spec);
}

}  // namespace csb
