#pragma once

#include "polyconvex/combos.hpp"

namespace pcx {

// An evaluation contract over points of the space plus a deterministic
// barycentric sample grid density.
struct SampledFunc {
  PointFunc eval;
  int grid_density = 8;
};

SampledFunc sampled_from(const PAFunc& f, const Complex::Ptr& base,
                         int grid_density = 8);

// Deterministic barycentric grid on a bounded cell.
std::vector<Point> grid_points(const Complex& cx, const CellId& cell, int density);

// Metric induced by the standard-basis embedding of the barycentric
// triangulation of a compact subcomplex.
class PolyMetric {
 public:
  PolyMetric(Complex::Ptr complex, std::vector<CellId> compact);
  double distance(const Point& x, const Point& y) const;
  Vec embed(const Point& p) const;

 private:
  Complex::Ptr complex_;
  std::set<CellId> cells_;
  std::map<CellId, int> coord_;
};

PolyMetric polyhedral_metric(const Complex::Ptr& complex,
                             const std::vector<CellId>& compact);

// Empirical sup of |f(x)-f(y)| / d(x,y) over the sample grid of the compact.
double lipschitz_estimate(const SampledFunc& f, const Complex::Ptr& complex,
                          const std::vector<CellId>& compact,
                          const PolyMetric& metric);

struct C01Norm {
  double c0 = 0;
  double lip = 0;
  // one-sided derivatives D_v f(e), keyed facet-index|vertex-index
  std::map<std::string, double> directional;
};

// Sup norm, grid Lipschitz constant and Richardson-extrapolated one-sided
// derivatives on a bounded cell; f must be concave on it.
C01Norm c01_norm(const SampledFunc& f, const Complex::Ptr& complex,
                 const CellId& polytope);

struct Report {
  bool pass = false;
  std::string status;  // consistent | violation | refused
  std::vector<std::pair<std::string, std::string>> kv;
  std::string text() const;
  std::string machine() const;
};

// Minimum principle: a weakly concave function attaining its infimum at an
// interior point must be constant. The function is first certified weakly
// concave on sampled balanced combinations; the harness refuses otherwise.
Report minimum_principle_check(const SampledFunc& f, const Complex::Ptr& complex,
                               const CombOpen& open, const BalancingCondition& b,
                               const std::vector<CellId>& compact);

struct ConvergenceReport {
  bool pass = false;
  double max_lipschitz = 0;
  std::vector<double> sup_gaps;  // per family member against the reference
  double joint_modulus = 0;
  std::vector<std::string> notes;
};

// Family diagnostics: equi-Lipschitz bound, uniform convergence gaps against
// the limit (or the last member), and a joint-continuity modulus.
ConvergenceReport convergence_harness(const std::vector<PAFunc>& fs,
                                      const BalancingCondition& b,
                                      const Complex::Ptr& base,
                                      const std::vector<CellId>& compact,
                                      int grid_density,
                                      const PAFunc* limit = nullptr);

}  // namespace pcx
