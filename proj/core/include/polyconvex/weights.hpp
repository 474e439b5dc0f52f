#pragma once

#include <optional>

#include "polyconvex/pafun.hpp"

namespace pcx {

// A k-dimensional weight on the restriction of a complex to a combinatorial
// open: one real value per k-cell of the open (absent entries are zero).
struct Weight {
  Complex::Ptr complex;
  CombOpen open;
  int k = 0;
  std::map<CellId, double> values;

  double value(const CellId& id) const {
    auto it = values.find(id);
    return it == values.end() ? 0.0 : it->second;
  }
  std::vector<CellId> support() const;
};

// Top-dimensional Minkowski weight, strictly positive on the open's
// top-dimensional cells.
struct BalancingCondition {
  Weight w;
};

// A Minkowski weight considered up to pullback to subdivisions.
struct Cycle {
  Weight rep;
};

// Balancing at every (k-1)-cell of the open (weighted unit normals cancel).
bool is_minkowski(const Weight& c);

// Validates the balancing-condition invariants.
BalancingCondition make_balancing_condition(Weight w);

// The (k-1)-weight (f . c); both product formulas are evaluated and
// cross-checked.
Weight product(const PAFunc& f, const Weight& c);

Weight restrict_weight(const Weight& c, const CombOpen& smaller_open);

// Pullback to a subdivision: a fine k-cell inherits the value of its owner
// when the owner has equal dimension, else 0.
Weight pullback(const Weight& c, const Complex::Ptr& fine);

// Weight and complex transported to a new metric: each value scales by the
// Haar-measure ratio on its cell.
Weight change_structure(const Weight& c, const Mat& new_metric);

// Same complex rebuilt over a different metric.
Complex::Ptr with_metric(const Complex::Ptr& c, Mat new_metric);

// Sum of the extreme rays of the positive Minkowski cone in the top
// dimension; nullopt when no strictly positive element exists.
std::optional<BalancingCondition> find_balancing(const Complex::Ptr& complex,
                                                 const CombOpen& open);

bool is_locally_balanceable(const Complex::Ptr& complex);

// Extreme rays of {c >= 0 : c balanced at every (k-1)-cell of the open}.
std::vector<Weight> positive_cone_generators(const Complex::Ptr& complex,
                                             const CombOpen& open, int k);

bool cycles_equal(const Cycle& a, const Cycle& b);

// The subcomplex carried by the support of a positive Minkowski weight,
// with the restricted weight (a balancing condition on the support).
std::pair<Complex::Ptr, Weight> support_subcomplex(const Weight& c);

Weight weight_scale(const Weight& c, double t);
Weight weight_add(const Weight& a, const Weight& b);

}  // namespace pcx
