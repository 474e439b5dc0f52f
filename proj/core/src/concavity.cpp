#include "polyconvex/concavity.hpp"

#include <cmath>

namespace pcx {

const char* to_string(ConcavityClass c) {
  switch (c) {
    case ConcavityClass::Strong:
      return "Strong";
    case ConcavityClass::Concave:
      return "Concave";
    case ConcavityClass::Weak:
      return "Weak";
    default:
      return "None";
  }
}

namespace {

double cov_scale(const PAFunc& f) {
  double s = 1.0;
  for (const auto& [id, d] : f.data)
    s = std::max(s, d.cov.size() ? d.cov.cwiseAbs().maxCoeff() : 0.0);
  return s;
}

// aligns f and the balancing condition on a common complex
std::pair<PAFunc, Weight> align(const PAFunc& f, const BalancingCondition& b) {
  if (f.complex->same_cells(*b.w.complex)) return {f, b.w};
  // f on a subdivision of b's complex
  for (Complex::Ptr cur = f.complex; cur; cur = cur->parent())
    if (cur->same_cells(*b.w.complex)) return {f, pullback(b.w, f.complex)};
  // b on a subdivision of f's complex
  for (Complex::Ptr cur = b.w.complex; cur; cur = cur->parent())
    if (cur->same_cells(*f.complex))
      return {pa_pullback(f, b.w.complex), b.w};
  // last resort: image-based subdivision checks
  if (is_subdivision(*f.complex, *b.w.complex))
    return {f, pullback(b.w, f.complex)};
  if (is_subdivision(*b.w.complex, *f.complex))
    return {pa_pullback(f, b.w.complex), b.w};
  throw ComplexMismatch(
      "function and balancing condition are on unrelated complexes");
}

}  // namespace

bool is_weakly_concave(const PAFunc& f, const BalancingCondition& b,
                       std::string* why) {
  auto [fa, bw] = align(f, b);
  Weight prod = product(fa, bw);
  double s = cov_scale(fa);
  for (const auto& [id, v] : prod.values) {
    if (v < -1e-9 * s) {
      if (why)
        *why = "(f.b)(" + id + ") = " + std::to_string(v) + " < 0";
      return false;
    }
  }
  return true;
}

bool is_concave(const PAFunc& f, std::string* why) {
  const Complex::Ptr& cx = f.complex;
  double s = cov_scale(f);
  for (const auto& tau : cx->ids()) {
    int k = cx->cell_dim(tau) + 1;
    for (const Weight& gen : positive_cone_generators(cx, star_open(*cx, tau), k)) {
      double v = product(f, gen).value(tau);
      if (v < -1e-9 * s) {
        if (why)
          *why = "negative product " + std::to_string(v) +
                 " at cell " + tau + " against a star-cone generator";
        return false;
      }
    }
  }
  return true;
}

bool is_strictly_concave(const PAFunc& f, const Complex::Ptr& complex,
                         const CombOpen& open) {
  if (!f.complex->same_cells(*complex))
    throw FunctionNotDefinedOnComplex("function not defined on this complex");
  if (!is_upward_closed(*complex, open))
    throw NotASubOpen("open is not upward-closed");
  for (const auto& tau : open.cells) {
    int k = complex->cell_dim(tau) + 1;
    for (const Weight& gen :
         positive_cone_generators(complex, star_open(*complex, tau), k)) {
      if (gen.values.empty()) continue;
      if (product(f, gen).value(tau) <= tolerance()) return false;
    }
  }
  return true;
}

bool is_strongly_concave(const PAFunc& f, const CombOpen& open) {
  try {
    auto [env, rep] = concave_envelope(f, open);
    (void)env;
    return rep.equal_on_samples;
  } catch (const FiberInconsistent&) {
    return false;
  }
}

Weight beta_positive_product(const BetaPositiveWitness& w,
                             const BalancingCondition& b) {
  const int n = b.w.k;
  Weight acc;
  acc.complex = b.w.complex;
  acc.open = b.w.open;
  acc.k = w.k;
  for (const auto& term : w.terms) {
    if (static_cast<int>(term.fns.size()) != n - w.k)
      throw WitnessInvalid("term has the wrong number of factors");
    if (term.alpha <= 0) throw WitnessInvalid("term coefficient must be positive");
    for (const PAFunc& g : term.fns)
      if (!is_concave(g))
        throw WitnessNotConcave("a witness factor is not concave");
    Weight cur = b.w;
    for (auto it = term.fns.rbegin(); it != term.fns.rend(); ++it)
      cur = product(*it, cur);
    acc = weight_add(acc, weight_scale(cur, term.alpha));
  }
  for (const auto& [id, v] : acc.values)
    if (v < -1e-7 * (1.0 + std::abs(v)))
      throw Error("beta-positive combination came out negative at '" + id + "'");
  return acc;
}

Classification classify(const PAFunc& f, const BalancingCondition& b) {
  CombOpen open = f.complex->same_cells(*b.w.complex) ? b.w.open
                                                      : full_open(*f.complex);
  bool strong = is_strongly_concave(f, open);
  std::string why_concave, why_weak;
  bool concave = is_concave(f, &why_concave);
  bool weak = is_weakly_concave(f, b, &why_weak);
  if ((strong && !concave) || (concave && !weak))
    throw Error("concavity hierarchy violated; data is inconsistent");
  Classification out;
  if (strong) {
    out.cls = ConcavityClass::Strong;
  } else if (concave) {
    out.cls = ConcavityClass::Concave;
    out.detail = "not strongly concave: envelope gap on a sample";
  } else if (weak) {
    out.cls = ConcavityClass::Weak;
    out.detail = why_concave;
  } else {
    out.cls = ConcavityClass::None;
    out.detail = why_weak;
  }
  return out;
}

}  // namespace pcx
