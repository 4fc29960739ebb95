#ifndef CSB_POLYTOPE_H_
#define CSB_POLYTOPE_H_

#include <span>
#include <vector>

#include "csb/action.h"

namespace csb {

// Absolute tolerance for every feasibility check in the library.
inline constexpr double kFeasibilityTol = 1e-9;

// Conv_eps(A) for A = {v in {0,1}^K : |v| = S}. truncation == 0 denotes the
// untruncated hull.
struct PolytopeSpec {
  int num_arms = 1;
  int budget = 1;
  double truncation = 0.0;

  // Throws kBadShape for S outside [1, K] and kEmptyPolytope when
  // truncation > S / K or truncation < 0.
  void Validate() const;
};

// A fractional decision x in Conv(A).
struct DecisionPoint {
  std::vector<double> coords;

  int num_arms() const { return static_cast<int>(coords.size()); }
  double operator[](int i) const { return coords[i]; }
};

// Pre-projection iterate w. Stored as log-coordinates so that large dual
// steps cannot overflow; coords() exponentiates.
struct DualPoint {
  std::vector<double> log_coords;

  std::vector<double> coords() const;
};

struct VertexTerm {
  double weight = 0.0;
  Action vertex;
};

// x = sum_j weight_j * vertex_j.
struct VertexDecomposition {
  std::vector<VertexTerm> terms;

  std::vector<double> Reconstruct() const;
  double TotalWeight() const;
};

// True when x satisfies the sum and box constraints of `spec` within tol.
bool IsFeasible(const DecisionPoint& x, const PolytopeSpec& spec,
                double tol = kFeasibilityTol);

// Negative-entropy minimiser over Conv_eps(A): the uniform point S/K.
DecisionPoint InitialPoint(const PolytopeSpec& spec);

// w_i = x_i * exp(eta * estimate_i), i.e. grad F(w) = grad F(x) + eta * estimate
// for F(x) = sum x log x - x.
DualPoint DualStep(const DecisionPoint& x, std::span<const double> estimate,
                   double eta);

// argmin over Conv_eps(A) of the Bregman divergence D_F(x, w). Uses the KKT
// form x_i = clamp(w_i * e^theta, eps, 1) with theta located by bisection
// and then solved in closed form on the identified free set.
DecisionPoint KlProject(const DualPoint& w, const PolytopeSpec& spec);

// D_F(x, y) = sum x log(x / y) - x + y, with 0 log 0 = 0.
double BregmanDivergence(std::span<const double> x, std::span<const double> y);

// Greedy peeling into at most K vertices of A; see decompose in the README.
// Throws kInfeasiblePoint when x is not in Conv(A) within tolerance.
VertexDecomposition Decompose(std::span<const double> x, int budget);

}  // namespace csb

#endif  // CSB_POLYTOPE_H_
