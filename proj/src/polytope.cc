#include "csb/polytope.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "csb/error.h"

namespace csb {

void PolytopeSpec::Validate() const {
  if (num_arms < 1 || budget < 1 || budget > num_arms) {
    throw Error(ErrorCode::kBadShape,
                "budget S = " + std::to_string(budget) +
                    " must lie in [1, K = " + std::to_string(num_arms) + "]");
  }
  const double center = static_cast<double>(budget) / num_arms;
  if (!(truncation >= 0.0) || truncation > center + kFeasibilityTol) {
    throw Error(ErrorCode::kEmptyPolytope,
                "truncation " + std::to_string(truncation) +
                    " exceeds S / K = " + std::to_string(center));
  }
}

std::vector<double> DualPoint::coords() const {
  std::vector<double> w(log_coords.size());
  std::transform(log_coords.begin(), log_coords.end(), w.begin(),
                 [](double l) { return std::exp(l); });
  return w;
}

std::vector<double> VertexDecomposition::Reconstruct() const {
  if (terms.empty()) return {};
  std::vector<double> x(terms.front().vertex.num_arms(), 0.0);
  for (const auto& term : terms) {
    for (int a : term.vertex.arms()) x[a] += term.weight;
  }
  return x;
}

double VertexDecomposition::TotalWeight() const {
  double total = 0.0;
  for (const auto& term : terms) total += term.weight;
  return total;
}

bool IsFeasible(const DecisionPoint& x, const PolytopeSpec& spec, double tol) {
  if (x.num_arms() != spec.num_arms) return false;
  double sum = 0.0;
  for (double c : x.coords) {
    if (!(c >= spec.truncation - tol) || c > 1.0 + tol) return false;
    sum += c;
  }
  return std::abs(sum - spec.budget) <= tol;
}

DecisionPoint InitialPoint(const PolytopeSpec& spec) {
  spec.Validate();
  return {std::vector<double>(
      spec.num_arms, static_cast<double>(spec.budget) / spec.num_arms)};
}

DualPoint DualStep(const DecisionPoint& x, std::span<const double> estimate,
                   double eta) {
  DualPoint w;
  w.log_coords.resize(x.coords.size());
  for (std::size_t i = 0; i < x.coords.size(); ++i) {
    w.log_coords[i] = std::log(x.coords[i]) + eta * estimate[i];
  }
  return w;
}

namespace {

double LogSumExp(std::span<const double> values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : values) peak = std::max(peak, v);
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - peak);
  return peak + std::log(acc);
}

struct ClampedSum {
  double sum = 0.0;
  int at_floor = 0;
  int at_ceiling = 0;
};

}  // namespace

DecisionPoint KlProject(const DualPoint& w, const PolytopeSpec& spec) {
  spec.Validate();
  const int k = spec.num_arms;
  const double s = spec.budget;
  const double floor = spec.truncation;
  const auto& lw = w.log_coords;
  if (static_cast<int>(lw.size()) != k) {
    throw Error(ErrorCode::kBadShape, "dual point has wrong dimension");
  }
  for (double l : lw) {
    if (!std::isfinite(l)) {
      throw Error(ErrorCode::kNumericalFailure, "non-finite dual coordinate");
    }
  }
  if (spec.budget == k) return {std::vector<double>(k, 1.0)};
  if (floor * k >= s) return {std::vector<double>(k, floor)};

  auto coordinate = [&](int i, double theta) {
    return std::clamp(std::exp(lw[i] + theta), floor, 1.0);
  };
  auto total = [&](double theta) {
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += coordinate(i, theta);
    return sum;
  };

  const double lw_max = *std::max_element(lw.begin(), lw.end());
  const double lw_min = *std::min_element(lw.begin(), lw.end());
  // At theta_lo every coordinate sits at (or below) the floor, so the sum is
  // below S; at theta_hi every coordinate is capped at 1.
  double lo = (floor > 0.0 ? std::log(floor) : std::log(s / k) - 1.0) - lw_max;
  double hi = -lw_min;
  if (!(total(lo) <= s) || !(total(hi) >= s)) {
    throw Error(ErrorCode::kNumericalFailure, "projection root not bracketed");
  }
  double theta = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    theta = 0.5 * (lo + hi);
    const double excess = total(theta) - s;
    if (std::abs(excess) <= 1e-12) break;
    if (excess > 0.0) {
      hi = theta;
    } else {
      lo = theta;
    }
    if (hi - lo <= 0.0) break;
  }

  // Closed-form theta on the free set identified by bisection.
  ClampedSum fixed;
  std::vector<double> free_logs;
  for (int i = 0; i < k; ++i) {
    const double value = std::exp(lw[i] + theta);
    if (value <= floor) {
      fixed.sum += floor;
      ++fixed.at_floor;
    } else if (value >= 1.0) {
      fixed.sum += 1.0;
      ++fixed.at_ceiling;
    } else {
      free_logs.push_back(lw[i]);
    }
  }
  if (!free_logs.empty() && s - fixed.sum > 0.0) {
    const double exact = std::log(s - fixed.sum) - LogSumExp(free_logs);
    bool consistent = true;
    for (int i = 0; i < k && consistent; ++i) {
      const double before = std::exp(lw[i] + theta);
      const double after = std::exp(lw[i] + exact);
      const bool was_free = before > floor && before < 1.0;
      if (was_free != (after > floor && after < 1.0)) consistent = false;
    }
    if (consistent) theta = exact;
  }

  DecisionPoint x{std::vector<double>(k)};
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    x.coords[i] = coordinate(i, theta);
    sum += x.coords[i];
  }
  if (std::abs(sum - s) > kFeasibilityTol) {
    throw Error(ErrorCode::kNumericalFailure,
                "projection sum " + std::to_string(sum) + " != " +
                    std::to_string(s));
  }
  return x;
}

double BregmanDivergence(std::span<const double> x, std::span<const double> y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) d += x[i] * std::log(x[i] / y[i]);
    d += y[i] - x[i];
  }
  return d;
}

VertexDecomposition Decompose(std::span<const double> x, int budget) {
  const int k = static_cast<int>(x.size());
  if (budget < 1 || budget > k) {
    throw Error(ErrorCode::kInfeasiblePoint, "budget outside [1, K]");
  }
  double sum = 0.0;
  for (double c : x) {
    if (!(c >= -kFeasibilityTol) || c > 1.0 + kFeasibilityTol) {
      throw Error(ErrorCode::kInfeasiblePoint,
                  "coordinate " + std::to_string(c) + " outside [0, 1]");
    }
    sum += c;
  }
  if (std::abs(sum - budget) > kFeasibilityTol) {
    throw Error(ErrorCode::kInfeasiblePoint,
                "coordinates sum to " + std::to_string(sum) + ", expected " +
                    std::to_string(budget));
  }

  constexpr double kSnap = 1e-13;
  std::vector<double> residual(x.begin(), x.end());
  for (double& r : residual) r = std::clamp(r, 0.0, 1.0);
  double mass = 1.0;
  std::vector<int> order(k);
  std::vector<std::uint8_t> bits(k);
  VertexDecomposition result;

  for (int step = 0; step < 2 * k + 2 && mass > kSnap; ++step) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return residual[a] > residual[b];
    });
    std::fill(bits.begin(), bits.end(), 0);
    double gamma = mass;
    for (int j = 0; j < budget; ++j) {
      bits[order[j]] = 1;
      gamma = std::min(gamma, residual[order[j]]);
    }
    for (int j = budget; j < k; ++j) {
      gamma = std::min(gamma, mass - residual[order[j]]);
    }
    if (gamma <= 0.0) break;
    mass -= gamma;
    for (int a = 0; a < k; ++a) {
      if (bits[a]) residual[a] -= gamma;
      if (std::abs(residual[a]) <= kSnap) residual[a] = 0.0;
      if (std::abs(mass - residual[a]) <= kSnap) residual[a] = mass;
    }
    if (std::abs(mass) <= kSnap) mass = 0.0;
    result.terms.push_back({gamma, Action::FromBits(bits)});
  }
  if (mass > kFeasibilityTol) {
    throw Error(ErrorCode::kInfeasiblePoint,
                "decomposition left mass " + std::to_string(mass));
  }
  return result;
}

}  // namespace csb
