#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"

#include "csb/error.h"
#include "csb/polytope.h"
#include "csb/rng.h"
#include "oracles.h"

namespace csb {
namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected csb::Error");
  return ErrorCode::kIo;
}

DualPoint FromCoords(const std::vector<double>& w) {
  DualPoint d;
  for (double v : w) d.log_coords.push_back(std::log(v));
  return d;
}

double MaxAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Random feasible point of the truncated polytope: a random interior point
// of the untruncated hull pulled towards the centre until every coordinate
// clears eps.
std::vector<double> RandomFeasible(int k, int s, double eps, Rng& rng) {
  std::vector<double> y(k);
  for (double& v : y) v = rng.Uniform();
  // Water-fill y so that its clamp to [0, 1] sums to s.
  double lo = -2.0, hi = 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double sum = 0.0;
    for (double v : y) sum += std::clamp(v + mid, 0.0, 1.0);
    (sum < s ? lo : hi) = mid;
  }
  std::vector<double> x(k);
  const double c = static_cast<double>(s) / k;
  const double lambda = eps / c;  // convex weight on the centre
  for (int i = 0; i < k; ++i) {
    x[i] = (1.0 - lambda) * std::clamp(y[i] + lo, 0.0, 1.0) + lambda * c;
  }
  return x;
}

TEST_CASE("polytope spec validation") {
  CHECK(CodeOf([] { PolytopeSpec{4, 0, 0.0}.Validate(); }) == ErrorCode::kBadShape);
  CHECK(CodeOf([] { PolytopeSpec{4, 5, 0.0}.Validate(); }) == ErrorCode::kBadShape);
  CHECK(CodeOf([] { PolytopeSpec{4, 1, 0.3}.Validate(); }) ==
        ErrorCode::kEmptyPolytope);
  CHECK_NOTHROW(PolytopeSpec{4, 1, 0.25}.Validate());
}

TEST_CASE("initial point is the uniform point") {
  CHECK(InitialPoint({4, 2, 0.01}).coords == std::vector<double>(4, 0.5));
  CHECK(InitialPoint({3, 3, 0.5}).coords == std::vector<double>(3, 1.0));
  const auto x = InitialPoint({5, 1, 0.05}).coords;
  for (double v : x) CHECK(v == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(CodeOf([] { InitialPoint({4, 1, 0.5}); }) == ErrorCode::kEmptyPolytope);
}

TEST_CASE("dual step") {
  const DecisionPoint x{{0.5, 0.5}};
  const std::vector<double> r = {1.0, 0.0};
  CHECK(DualStep(x, r, 0.0).coords() == x.coords);
  const auto w = DualStep(x, r, std::log(2.0)).coords();
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-15));

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    DecisionPoint y;
    std::vector<double> est;
    for (int i = 0; i < 6; ++i) {
      y.coords.push_back(0.01 + rng.Uniform());
      est.push_back(20.0 * rng.Uniform() - 10.0);
    }
    const double eta = rng.Uniform();
    const DualPoint d = DualStep(y, est, eta);
    for (int i = 0; i < 6; ++i) {
      CHECK(std::abs(d.log_coords[i] - std::log(y[i]) - eta * est[i]) <= 1e-12);
    }
  }
}

TEST_CASE("dual step survives huge exponents") {
  const DecisionPoint x{{0.5, 0.5, 0.5, 0.5}};
  const std::vector<double> est = {1e6, 0.0, -1e6, 0.0};
  const DecisionPoint p = KlProject(DualStep(x, est, 1.0), {4, 2, 0.01});
  CHECK(IsFeasible(p, {4, 2, 0.01}));
  CHECK(p[0] == 1.0);
  CHECK(p[2] == doctest::Approx(0.01));
}

TEST_CASE("projection of a feasible point is itself") {
  const PolytopeSpec spec{4, 2, 0.05};
  const std::vector<double> w = {0.3, 0.7, 0.6, 0.4};
  CHECK(MaxAbsDiff(KlProject(FromCoords(w), spec).coords, w) <= 1e-9);
  std::vector<double> scaled = w;
  for (double& v : scaled) v *= 37.5;
  CHECK(MaxAbsDiff(KlProject(FromCoords(scaled), spec).coords, w) <= 1e-9);
}

TEST_CASE("projection example against face enumeration and a dense grid") {
  const PolytopeSpec spec{3, 1, 0.1};
  const std::vector<double> w = {0.8, 0.15, 0.05};
  const auto x = KlProject(FromCoords(w), spec).coords;
  const auto oracle = oracle::FaceEnumerationProjection(w, 1, 0.1);
  CHECK(MaxAbsDiff(x, oracle) <= 1e-9);

  // Grid over the slice x0 + x1 + x2 = 1, refined twice around the best cell.
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> arg;
  double c0 = 0.5, c1 = 0.25, half = 0.5;
  for (int level = 0; level < 4; ++level) {
    const int n = 2000;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; j += 1) {
        const double a = c0 - half + 2.0 * half * i / n;
        const double b = c1 - half + 2.0 * half * j / n;
        const double c = 1.0 - a - b;
        if (a < 0.1 || a > 1 || b < 0.1 || b > 1 || c < 0.1 - 1e-15 || c > 1) continue;
        const std::vector<double> y = {a, b, std::max(c, 0.1)};
        const double v = oracle::KlDivergence(y, w);
        if (v < best) {
          best = v;
          arg = y;
        }
      }
    }
    c0 = arg[0];
    c1 = arg[1];
    half /= 200.0;
  }
  CHECK(MaxAbsDiff(x, arg) <= 1e-6);
  CHECK(x[2] == doctest::Approx(0.1));
}

TEST_CASE("projection matches face enumeration on random instances") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng.UniformInt(5));
    const int s = 1 + static_cast<int>(rng.UniformInt(k));
    const double eps = (static_cast<double>(s) / k) * rng.Uniform() * 0.9;
    std::vector<double> w(k);
    for (double& v : w) v = std::exp(6.0 * rng.Uniform() - 3.0);
    const PolytopeSpec spec{k, s, eps};
    const DecisionPoint x = KlProject(FromCoords(w), spec);
    CHECK(IsFeasible(x, spec));
    CHECK(MaxAbsDiff(x.coords, oracle::FaceEnumerationProjection(w, s, eps)) <= 1e-9);
  }
}

TEST_CASE("projection properties") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.UniformInt(5));
    const int s = 1 + static_cast<int>(rng.UniformInt(k - 1));
    const double eps = 0.5 * static_cast<double>(s) / k * rng.Uniform();
    const PolytopeSpec spec{k, s, eps};
    std::vector<double> w(k);
    for (double& v : w) v = std::exp(8.0 * rng.Uniform() - 4.0);
    const DecisionPoint p = KlProject(FromCoords(w), spec);

    // Exact invariants.
    const double sum = std::accumulate(p.coords.begin(), p.coords.end(), 0.0);
    CHECK(std::abs(sum - s) <= 1e-9);
    for (double v : p.coords) {
      CHECK(v >= eps);
      CHECK(v <= 1.0);
    }

    // Idempotence.
    CHECK(MaxAbsDiff(KlProject(FromCoords(p.coords), spec).coords, p.coords) <= 1e-9);

    // Scale equivariance.
    std::vector<double> cw = w;
    const double c = std::exp(10.0 * rng.Uniform() - 5.0);
    for (double& v : cw) v *= c;
    CHECK(MaxAbsDiff(KlProject(FromCoords(cw), spec).coords, p.coords) <= 1e-9);

    // Generalised Pythagoras against a random feasible z.
    const std::vector<double> z = RandomFeasible(k, s, eps, rng);
    CHECK(IsFeasible(DecisionPoint{z}, spec));
    CHECK(BregmanDivergence(z, w) >=
          BregmanDivergence(z, p.coords) + BregmanDivergence(p.coords, w) - 1e-6);
  }
}

TEST_CASE("projection when S equals K") {
  const DecisionPoint p = KlProject(FromCoords({0.2, 5.0, 1.0}), {3, 3, 0.1});
  CHECK(p.coords == std::vector<double>{1.0, 1.0, 1.0});
}

TEST_CASE("bregman divergence") {
  const std::vector<double> x = {0.2, 0.8};
  CHECK(BregmanDivergence(x, x) == doctest::Approx(0.0));
  const std::vector<double> z = {0.0, 1.0};
  const std::vector<double> y = {0.5, 0.5};
  CHECK(BregmanDivergence(z, y) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("decomposition of the worked example") {
  const VertexDecomposition d = Decompose(std::vector<double>{1.0, 0.8, 0.2}, 2);
  REQUIRE(d.terms.size() == 2);
  CHECK(d.terms[0].weight == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(d.terms[0].vertex == Action(3, {0, 1}));
  CHECK(d.terms[1].weight == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(d.terms[1].vertex == Action(3, {0, 2}));
}

TEST_CASE("decomposition of a vertex and of the uniform point") {
  const VertexDecomposition v = Decompose(std::vector<double>{0, 1, 1, 0}, 2);
  REQUIRE(v.terms.size() == 1);
  CHECK(v.terms[0].weight == 1.0);
  CHECK(v.terms[0].vertex == Action(4, {1, 2}));

  const VertexDecomposition u = Decompose(std::vector<double>(4, 0.5), 2);
  CHECK(u.TotalWeight() == doctest::Approx(1.0));
  CHECK(MaxAbsDiff(u.Reconstruct(), std::vector<double>(4, 0.5)) <= 1e-12);
  CHECK(u.terms.size() <= 4);
}

TEST_CASE("decomposition rejects infeasible points") {
  CHECK(CodeOf([] { Decompose(std::vector<double>{0.5, 0.5, 0.5}, 2); }) ==
        ErrorCode::kInfeasiblePoint);
  CHECK(CodeOf([] { Decompose(std::vector<double>{1.2, 0.8, 0.0}, 2); }) ==
        ErrorCode::kInfeasiblePoint);
  CHECK(CodeOf([] { Decompose(std::vector<double>{-0.1, 1.1, 1.0}, 2); }) ==
        ErrorCode::kInfeasiblePoint);
}

TEST_CASE("decomposition reconstructs random points") {
  Rng rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + static_cast<int>(rng.UniformInt(10));
    const int s = 1 + static_cast<int>(rng.UniformInt(k));
    // Mix of interior and boundary points.
    const double eps = rng.Bernoulli(0.5) ? 0.0 : 0.5 * static_cast<double>(s) / k;
    std::vector<double> x = RandomFeasible(k, s, eps, rng);
    if (rng.Bernoulli(0.3)) {
      for (double& v : x) v = std::round(v * 4.0) / 4.0;
      const double sum = std::accumulate(x.begin(), x.end(), 0.0);
      if (std::abs(sum - s) > 1e-12) continue;
    }
    const VertexDecomposition d = Decompose(x, s);
    CHECK(d.terms.size() <= static_cast<std::size_t>(k));
    CHECK(std::abs(d.TotalWeight() - 1.0) <= 1e-9);
    CHECK(MaxAbsDiff(d.Reconstruct(), x) <= 1e-9);
    for (const auto& t : d.terms) {
      CHECK(t.weight > 0.0);
      CHECK(t.weight <= 1.0 + 1e-12);
      CHECK(t.vertex.size() == s);
    }
  }
}

}  // namespace
}  // namespace csb
