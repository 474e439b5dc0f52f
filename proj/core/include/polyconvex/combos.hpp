#pragma once

#include <functional>

#include "polyconvex/concavity.hpp"

namespace pcx {

// A convex combination: center, points and nonnegative coefficients with
// coefficient sum 1 and matching barycenter in the embedding.
struct Combo {
  Point center;
  std::vector<Point> points;
  std::vector<double> coeffs;
};

// Witness for the balanced level: the center's carrier tau, a
// beta-positive weight whose values match the coefficient-distance products
// on the cofaces of tau, and its beta-positivity certificate.
struct BalancedWitness {
  Complex::Ptr complex;
  CellId tau;
  std::map<int, CellId> assign;  // optional point index -> coface
  Weight weight;
  BetaPositiveWitness beta;
};

bool check_convex(const Complex& cx, const Combo& combo);

// The center's minimal carrier tau must see every point inside a coface of
// tau contained in the open.
bool check_polyhedral(const Complex& cx, const Combo& combo,
                      const CombOpen* open = nullptr);

// Coface completeness, the distance equations against the witness weight,
// and revalidation of the witness's beta-positive combination.
bool check_balanced(const Complex& cx, const Combo& combo,
                    const BalancedWitness& witness, const BalancingCondition& b,
                    std::string* why = nullptr);

struct GeneratedCombo {
  Complex::Ptr complex;  // witness complex (may subdivide the input)
  Combo combo;
  BalancedWitness witness;
  BalancingCondition balancing;  // on the witness complex
};

// The basic balanced combination across an (n-1)-cell: coefficients from the
// balancing condition, points pushed into the cofaces along unit normals.
GeneratedCombo generate_facet_combos(const Complex::Ptr& complex,
                                     const BalancingCondition& b,
                                     const CellId& tau,
                                     std::optional<double> epsilon = {});

// A balanced combination centered at an arbitrary point, built from the
// segment indicator subdivision and the (n-1)-fold product weight.
GeneratedCombo generate_point_combo(const Complex::Ptr& complex,
                                    const BalancingCondition& b, const Point& y,
                                    const Point& x0);

using PointFunc = std::function<double(const Point&)>;

// f(center) - sum_i nu_i f(x_i); nonnegative for the matching concavity
// level.
double concavity_inequality(const PointFunc& f, const Combo& combo);

}  // namespace pcx
