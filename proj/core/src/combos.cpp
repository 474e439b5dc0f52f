#include "polyconvex/combos.hpp"

#include <algorithm>
#include <cmath>

namespace pcx {

namespace {

double coord_scale(const Combo& combo) {
  double s = combo.center.coords.cwiseAbs().maxCoeff();
  for (const auto& p : combo.points) s = std::max(s, p.coords.cwiseAbs().maxCoeff());
  return std::max(1.0, s);
}

// backtracking bijection points <-> cofaces honoring membership and pins
bool match_points(const Complex& cx, const Combo& combo,
                  const std::vector<CellId>& cofaces,
                  const std::map<int, CellId>& pins,
                  std::vector<int>& assignment) {
  const int n = static_cast<int>(combo.points.size());
  std::vector<std::vector<int>> candidates(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const CellId& sigma = cofaces[j];
      auto pin = pins.find(i);
      if (pin != pins.end() && pin->second != sigma) continue;
      if (cx.cell(sigma).poly.contains(combo.points[i].coords) &&
          cx.is_face(canonicalize(cx, combo.points[i]).carrier, sigma))
        candidates[i].push_back(j);
    }
  }
  assignment.assign(n, -1);
  std::vector<bool> used(n, false);
  std::function<bool(int)> rec = [&](int i) {
    if (i == n) return true;
    for (int j : candidates[i]) {
      if (used[j]) continue;
      used[j] = true;
      assignment[i] = j;
      if (rec(i + 1)) return true;
      used[j] = false;
    }
    return false;
  };
  return rec(0);
}

}  // namespace

bool check_convex(const Complex& cx, const Combo& combo) {
  if (combo.points.size() != combo.coeffs.size()) return false;
  if (combo.points.empty()) return false;
  double s = coord_scale(combo);
  double total = 0;
  Vec bary = Vec::Zero(cx.ambient().dim);
  for (size_t i = 0; i < combo.points.size(); ++i) {
    if (combo.coeffs[i] < -tolerance()) return false;
    if (!cx.cell(combo.points[i].carrier).poly.contains(combo.points[i].coords))
      return false;
    total += combo.coeffs[i];
    bary += combo.coeffs[i] * combo.points[i].coords;
  }
  if (!cx.cell(combo.center.carrier).poly.contains(combo.center.coords))
    return false;
  if (std::abs(total - 1.0) > 1e-9) return false;
  return (bary - combo.center.coords).cwiseAbs().maxCoeff() <= 1e-9 * s;
}

bool check_polyhedral(const Complex& cx, const Combo& combo,
                      const CombOpen* open) {
  if (!check_convex(cx, combo)) return false;
  CellId tau = canonicalize(cx, combo.center).carrier;
  auto cell_in_open = [&](const CellId& sigma) {
    if (!open) return true;
    for (const auto& f : cx.faces(sigma))
      if (!open->contains(f)) return false;
    return true;
  };
  for (const auto& p : combo.points) {
    CellId pc = canonicalize(cx, p).carrier;
    bool ok = false;
    for (const auto& sigma : cx.cofaces(tau)) {
      if (!cx.is_face(pc, sigma)) continue;
      if (!cx.cell(sigma).poly.contains(p.coords)) continue;
      if (!cell_in_open(sigma)) continue;
      ok = true;
      break;
    }
    if (!ok) return false;
  }
  return true;
}

bool check_balanced(const Complex& cx, const Combo& combo,
                    const BalancedWitness& witness, const BalancingCondition& b,
                    std::string* why) {
  auto fail = [&](const std::string& reason) {
    if (why) *why = reason;
    return false;
  };
  if (!check_polyhedral(cx, combo)) return fail("not a polyhedral combination");
  CellId tau = canonicalize(cx, combo.center).carrier;
  if (witness.tau != tau)
    throw WitnessInvalid("witness tau differs from the center's carrier");
  if (!witness.complex || !witness.complex->same_cells(cx))
    throw WitnessInvalid("witness complex differs from the checked complex");
  const int k = cx.cell_dim(tau) + 1;
  if (witness.weight.k != k)
    throw WitnessInvalid("witness weight has the wrong dimension");
  std::vector<CellId> cofaces = cx.cofaces_of_dim(tau, k);
  if (cofaces.size() != combo.points.size())
    return fail("points do not enumerate the k-dimensional cofaces");
  std::vector<int> assignment;
  if (!match_points(cx, combo, cofaces, witness.assign, assignment))
    return fail("no bijection between points and cofaces");
  // coefficient-distance equations
  const AffineFlat& tflat = cx.flat(tau);
  for (size_t i = 0; i < combo.points.size(); ++i) {
    double dist =
        point_flat_distance(cx.ambient(), combo.points[i].coords, tflat);
    double want = witness.weight.value(cofaces[assignment[i]]);
    double got = combo.coeffs[i] * dist;
    if (std::abs(got - want) > 1e-7 * (1.0 + std::abs(want)))
      return fail("coefficient-distance product mismatch on coface " +
                  cofaces[assignment[i]]);
  }
  // revalidate the beta-positivity certificate
  Weight claimed;
  try {
    claimed = beta_positive_product(witness.beta, b);
  } catch (const WitnessNotConcave&) {
    throw;
  }
  double s = 1.0;
  for (const auto& [id, v] : claimed.values) s = std::max(s, std::abs(v));
  for (const auto& id : cx.ids()) {
    if (cx.cell_dim(id) != k) continue;
    if (std::abs(claimed.value(id) - witness.weight.value(id)) > 1e-7 * s)
      return fail("witness weight is not the claimed beta-positive combination");
  }
  return true;
}

GeneratedCombo generate_facet_combos(const Complex::Ptr& complex,
                                     const BalancingCondition& b,
                                     const CellId& tau,
                                     std::optional<double> epsilon) {
  const Complex& cx = *complex;
  const int n = b.w.k;
  if (cx.cell_dim(tau) != n - 1)
    throw DimensionMismatch("facet combinations need an (n-1)-cell");
  std::vector<CellId> cofaces = cx.cofaces_of_dim(tau, n);
  if (cofaces.empty()) throw DegenerateInput("cell has no top-dimensional cofaces");
  Vec x = cx.cell(tau).poly.relint_point();
  double total = 0;
  for (const auto& s : cofaces) total += b.w.value(s);
  double eps = epsilon.value_or(1.0);
  for (const auto& s : cofaces) {
    double hit = cx.cell(s).poly.ray_hit(x, cx.facet_normal(tau, s));
    eps = std::min(eps, std::isfinite(hit) ? hit / 2 : 1.0);
  }
  if (eps <= 0) throw DegenerateInput("no feasible step into the cofaces");

  GeneratedCombo out;
  out.complex = complex;
  out.combo.center = Point{tau, x};
  for (const auto& s : cofaces) {
    out.combo.points.push_back(Point{s, x + eps * cx.facet_normal(tau, s)});
    out.combo.coeffs.push_back(b.w.value(s) / total);
  }
  out.witness.complex = complex;
  out.witness.tau = tau;
  out.witness.weight = weight_scale(b.w, eps / total);
  BetaPositiveWitness::Term term;
  term.alpha = eps / total;
  out.witness.beta.terms.push_back(term);
  out.witness.beta.k = n;
  out.balancing = b;
  return out;
}

GeneratedCombo generate_point_combo(const Complex::Ptr& complex,
                                    const BalancingCondition& b, const Point& y,
                                    const Point& x0) {
  const Complex& cx = *complex;
  Point yc = canonicalize(cx, y);
  Point x0c = canonicalize(cx, x0);
  // x0 must lie in the star of y's carrier
  bool in_star = false;
  for (const auto& sigma : cx.cofaces(yc.carrier))
    if (cx.is_face(x0c.carrier, sigma) &&
        cx.cell(sigma).poly.contains(x0c.coords))
      in_star = true;
  if (!in_star)
    throw StarNotContained("second point is outside the star of the center");
  if ((x0c.coords - yc.coords).cwiseAbs().maxCoeff() <= tolerance())
    throw DegenerateInput("center and target coincide");

  // indicator of the segment [y, x0]: min(0, facet functionals)
  Polyhedron seg({yc.coords, x0c.coords}, {});
  std::vector<AffData> pieces;
  pieces.push_back({Vec::Zero(cx.ambient().dim), 0.0});
  const HRep& h = seg.hrep();
  for (int i = 0; i < h.Ain.rows(); ++i)
    pieces.push_back({Vec(-h.Ain.row(i).transpose()), h.bin[i]});
  for (int i = 0; i < h.Aeq.rows(); ++i) {
    pieces.push_back({Vec(-h.Aeq.row(i).transpose()), h.beq[i]});
    pieces.push_back({Vec(h.Aeq.row(i).transpose()), -h.beq[i]});
  }
  MinAffine g;
  g.complex = complex;
  for (const auto& id : cx.ids()) g.pieces[id] = pieces;
  Subdivided sub = affinity_subdivision(g);

  Weight bs = pullback(b.w, sub.complex);
  const int n = b.w.k;
  Weight c = bs;
  for (int i = 0; i < n - 1; ++i) c = product(sub.func, c);

  Point yf = canonicalize(*sub.complex, locate(*sub.complex, cx, yc));
  if (sub.complex->cell_dim(yf.carrier) != 0)
    throw Error("center is not a vertex of the segment subdivision");

  std::vector<CellId> edges = sub.complex->cofaces_of_dim(yf.carrier, 1);
  GeneratedCombo out;
  out.complex = sub.complex;
  out.combo.center = yf;
  std::vector<double> raw;
  int idx_toward = -1;
  Vec dir = x0c.coords - yc.coords;
  for (const auto& e : edges) {
    const Polyhedron& p = sub.complex->cell(e).poly;
    Vec other;
    bool found = false;
    for (const Vec& v : p.vertices())
      if (!vec_near(v, yf.coords, v.cwiseAbs().maxCoeff())) {
        other = v;
        found = true;
      }
    if (!found) {
      if (p.rays().empty()) throw Error("degenerate edge in the subdivision");
      other = yf.coords + p.rays().front();
    }
    Vec step = other - yf.coords;
    double along = step.normalized().dot(dir.normalized());
    if (along > 1.0 - 1e-7 && idx_toward < 0) idx_toward = static_cast<int>(raw.size());
    double dist = cx.ambient().norm(step);
    out.combo.points.push_back(Point{e, other});
    raw.push_back(c.value(e) / dist);
  }
  if (idx_toward < 0) throw Error("no edge towards the target point");
  if (raw[idx_toward] <= tolerance())
    throw Error("segment edge received a nonpositive weight");
  double total = 0;
  for (double v : raw) total += v;
  if (total <= tolerance()) throw Error("empty combination");
  for (double v : raw) out.combo.coeffs.push_back(v / total);
  // rotate so the point towards x0 comes first
  std::rotate(out.combo.points.begin(), out.combo.points.begin() + idx_toward,
              out.combo.points.end());
  std::rotate(out.combo.coeffs.begin(), out.combo.coeffs.begin() + idx_toward,
              out.combo.coeffs.end());

  out.witness.complex = sub.complex;
  out.witness.tau = yf.carrier;
  out.witness.weight = weight_scale(c, 1.0 / total);
  BetaPositiveWitness::Term term;
  term.alpha = 1.0 / total;
  for (int i = 0; i < n - 1; ++i) term.fns.push_back(sub.func);
  out.witness.beta.terms.push_back(term);
  out.witness.beta.k = 1;
  out.balancing = make_balancing_condition(bs);
  return out;
}

double concavity_inequality(const PointFunc& f, const Combo& combo) {
  double acc = f(combo.center);
  for (size_t i = 0; i < combo.points.size(); ++i)
    acc -= combo.coeffs[i] * f(combo.points[i]);
  return acc;
}

}  // namespace pcx
