#pragma once

#include "polyconvex/weights.hpp"

namespace pcx {

enum class ConcavityClass { Strong, Concave, Weak, None };

const char* to_string(ConcavityClass c);

struct Classification {
  ConcavityClass cls = ConcavityClass::None;
  // certificate of the first failed stronger class (violating cell and
  // generator, or envelope gap location)
  std::string detail;
};

// f . b is nonnegative entrywise.
bool is_weakly_concave(const PAFunc& f, const BalancingCondition& b,
                       std::string* why = nullptr);

// For every cell tau and every generator of the positive cone on star(tau)
// in dimension dim(tau)+1, the product at tau is nonnegative.
bool is_concave(const PAFunc& f, std::string* why = nullptr);

// Strict positivity of the products at every cell of the open against the
// nonzero generators of the star cones.
bool is_strictly_concave(const PAFunc& f, const Complex::Ptr& complex,
                         const CombOpen& open);

// Fiber-consistent with envelope equality on the sample set.
bool is_strongly_concave(const PAFunc& f, const CombOpen& open);

// A certified beta-positive combination: gamma = sum_j alpha_j
// f_{1,j} ... f_{n-k,j} . b with concave factors.
struct BetaPositiveWitness {
  struct Term {
    double alpha = 1.0;
    std::vector<PAFunc> fns;  // n - k concave factors
  };
  std::vector<Term> terms;
  int k = 0;
};

// Evaluates the combination; throws WitnessNotConcave when a factor fails
// is_concave, and verifies positivity of the result.
Weight beta_positive_product(const BetaPositiveWitness& w,
                             const BalancingCondition& b);

// Strongest class satisfied, with the hierarchy enforced.
Classification classify(const PAFunc& f, const BalancingCondition& b);

}  // namespace pcx
