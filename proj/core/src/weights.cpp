#include "polyconvex/weights.hpp"

#include <algorithm>
#include <cmath>

namespace pcx {

namespace {

double weight_scale_of(const Weight& c) {
  double s = 0;
  for (const auto& [id, v] : c.values) s += std::abs(v);
  return s;
}

void check_weight_shape(const Weight& c) {
  if (!c.complex) throw Error("weight without a complex");
  if (!is_upward_closed(*c.complex, c.open))
    throw NotASubOpen("weight open is not upward-closed");
  for (const auto& [id, v] : c.values) {
    (void)v;
    if (!c.complex->has_cell(id))
      throw UnknownCell("weight value on unknown cell '" + id + "'");
    if (c.complex->cell_dim(id) != c.k)
      throw DimensionMismatch("weight value on cell of wrong dimension '" + id +
                              "'");
    if (!c.open.contains(id))
      throw NotASubOpen("weight value on cell outside its open");
  }
}

}  // namespace

std::vector<CellId> Weight::support() const {
  std::vector<CellId> out;
  for (const auto& [id, v] : values)
    if (std::abs(v) > tolerance()) out.push_back(id);
  return out;
}

bool is_minkowski(const Weight& c) {
  check_weight_shape(c);
  const Complex& cx = *c.complex;
  for (const auto& tau : restrict_cells(cx, c.open, c.k - 1)) {
    Vec resid = Vec::Zero(cx.ambient().dim);
    double mass = 0;
    for (const auto& sigma : cx.cofaces_of_dim(tau, c.k)) {
      if (!c.open.contains(sigma)) continue;
      double v = c.value(sigma);
      if (v == 0.0) continue;
      resid += v * cx.facet_normal(tau, sigma);
      mass += std::abs(v);
    }
    if (cx.ambient().norm(resid) > minkowski_tolerance() * mass + tolerance())
      return false;
  }
  return true;
}

BalancingCondition make_balancing_condition(Weight w) {
  check_weight_shape(w);
  const Complex& cx = *w.complex;
  int n = -1;
  for (const auto& id : w.open.cells) n = std::max(n, cx.cell_dim(id));
  if (w.k != n)
    throw DimensionMismatch("balancing condition must be top-dimensional");
  for (const auto& id : restrict_cells(cx, w.open, n))
    if (w.value(id) <= tolerance())
      throw NotPositive("balancing condition not strictly positive on '" + id +
                        "'");
  if (!is_minkowski(w)) throw NotMinkowski("weight is not a Minkowski weight");
  return BalancingCondition{std::move(w)};
}

Weight product(const PAFunc& f, const Weight& c) {
  if (!f.complex || !c.complex || !f.complex->same_cells(*c.complex))
    throw FunctionNotDefinedOnComplex(
        "function and weight live on different complexes");
  if (c.k < 1) throw DimensionMismatch("product needs a weight of dimension >= 1");
  check_weight_shape(c);
  const Complex& cx = *c.complex;
  Weight out;
  out.complex = c.complex;
  out.open = c.open;
  out.k = c.k - 1;
  for (const auto& tau : restrict_cells(cx, c.open, c.k - 1)) {
    double v1 = 0;  // -sum c(sigma) f_sigma(v_{sigma\tau})
    double scale = 0;
    std::vector<std::pair<CellId, Vec>> normals;
    for (const auto& sigma : cx.cofaces_of_dim(tau, c.k)) {
      if (!c.open.contains(sigma)) continue;
      double w = c.value(sigma);
      Vec nrm = cx.facet_normal(tau, sigma);
      normals.push_back({sigma, nrm});
      if (w == 0.0) continue;
      v1 -= w * f.data.at(sigma).cov.dot(nrm);
      scale += std::abs(w) * (1.0 + f.data.at(sigma).cov.cwiseAbs().maxCoeff());
    }
    // cross-check with the base-point form of the product
    Vec x = cx.cell(tau).poly.relint_point();
    double total = 0, v2 = 0;
    for (const auto& [sigma, nrm] : normals) {
      double w = c.value(sigma);
      total += w;
      const AffData& a = f.data.at(sigma);
      v2 -= w * (a.cov.dot(x + nrm) + a.cst);
    }
    v2 += total * evaluate(f, Point{tau, x});
    if (std::abs(v1 - v2) > 1e-6 * std::max(1.0, scale))
      throw FaceInconsistency(
          "product formulas disagree at '" + tau +
          "'; the function data are inconsistent across faces");
    if (v1 != 0.0) out.values[tau] = v1;
  }
  return out;
}

Weight restrict_weight(const Weight& c, const CombOpen& smaller_open) {
  check_weight_shape(c);
  for (const auto& id : smaller_open.cells)
    if (!c.open.contains(id))
      throw NotASubOpen("restriction target is not a sub-open");
  if (!is_upward_closed(*c.complex, smaller_open))
    throw NotASubOpen("restriction target is not upward-closed");
  Weight out;
  out.complex = c.complex;
  out.open = smaller_open;
  out.k = c.k;
  for (const auto& [id, v] : c.values)
    if (smaller_open.contains(id)) out.values[id] = v;
  return out;
}

namespace {

std::map<CellId, CellId> subdivision_owners(const Complex::Ptr& fine,
                                            const Complex& coarse) {
  if (fine->parent() && fine->parent()->same_cells(coarse)) return fine->owners();
  if (!is_subdivision(*fine, coarse))
    throw NotASubdivision("complex does not subdivide the weight's complex");
  if (!is_image_faithful(coarse))
    throw NotASubdivision(
        "coarse complex has duplicated images; pullback needs provenance");
  std::map<CellId, CellId> owners;
  for (const auto& id : fine->ids()) {
    auto o = minimal_container(coarse, fine->cell(id).poly);
    if (!o) throw NotASubdivision("fine cell not contained in any coarse cell");
    owners[id] = *o;
  }
  return owners;
}

}  // namespace

Weight pullback(const Weight& c, const Complex::Ptr& fine) {
  check_weight_shape(c);
  auto owners = subdivision_owners(fine, *c.complex);
  Weight out;
  out.complex = fine;
  out.k = c.k;
  std::set<CellId> seed;
  for (const auto& [f, o] : owners)
    if (c.open.contains(o)) seed.insert(f);
  out.open = upward_closure(*fine, seed);
  for (const auto& id : fine->ids()) {
    if (!out.open.contains(id) || fine->cell_dim(id) != c.k) continue;
    const CellId& o = owners.at(id);
    if (c.complex->cell_dim(o) == c.k) {
      double v = c.value(o);
      if (v != 0.0) out.values[id] = v;
    }
  }
  return out;
}

Complex::Ptr with_metric(const Complex::Ptr& c, Mat new_metric) {
  AmbientSpace amb(c->ambient().dim, c->ambient().hyperplane,
                   std::move(new_metric));
  std::vector<Cell> cells;
  for (const auto& id : c->ids()) cells.push_back(c->cell(id));
  return Complex::build(std::move(amb), std::move(cells), c->poset_pairs());
}

Weight change_structure(const Weight& c, const Mat& new_metric) {
  check_weight_shape(c);
  Weight out;
  out.complex = with_metric(c.complex, new_metric);
  out.open = c.open;
  out.k = c.k;
  for (const auto& [id, v] : c.values) {
    double ratio = gram_volume_ratio(c.complex->flat(id).directions, new_metric,
                                     c.complex->ambient().metric);
    out.values[id] = ratio * v;
  }
  return out;
}

std::vector<Weight> positive_cone_generators(const Complex::Ptr& complex,
                                             const CombOpen& open, int k) {
  if (!is_upward_closed(*complex, open))
    throw NotASubOpen("open is not upward-closed");
  std::vector<CellId> vars = restrict_cells(*complex, open, k);
  if (vars.empty()) return {};
  const int n = static_cast<int>(vars.size());
  std::map<CellId, int> index;
  for (int i = 0; i < n; ++i) index[vars[i]] = i;
  std::vector<Vec> eqs;
  for (const auto& tau : restrict_cells(*complex, open, k - 1)) {
    std::vector<std::pair<int, Vec>> cols;
    for (const auto& sigma : complex->cofaces_of_dim(tau, k))
      if (open.contains(sigma))
        cols.push_back({index.at(sigma), complex->facet_normal(tau, sigma)});
    for (int coord = 0; coord < complex->ambient().dim; ++coord) {
      Vec e = Vec::Zero(n);
      bool nonzero = false;
      for (const auto& [i, nrm] : cols) {
        e[i] = nrm[coord];
        if (e[i] != 0.0) nonzero = true;
      }
      if (nonzero) eqs.push_back(e);
    }
  }
  std::vector<Weight> out;
  for (const Vec& ray : cone_extreme_rays(n, eqs)) {
    Weight w;
    w.complex = complex;
    w.open = open;
    w.k = k;
    for (int i = 0; i < n; ++i)
      if (ray[i] > tolerance()) w.values[vars[i]] = ray[i];
    out.push_back(std::move(w));
  }
  return out;
}

std::optional<BalancingCondition> find_balancing(const Complex::Ptr& complex,
                                                 const CombOpen& open) {
  int n = -1;
  for (const auto& id : open.cells) n = std::max(n, complex->cell_dim(id));
  if (n < 0) return std::nullopt;
  for (const auto& id : open.cells) {
    bool maximal = true;
    for (const auto& up : complex->cofaces(id))
      if (up != id && open.contains(up)) maximal = false;
    if (maximal && complex->cell_dim(id) != n)
      throw NotPureDimensional("open is not pure-dimensional");
  }
  std::vector<CellId> vars = restrict_cells(*complex, open, n);
  if (vars.empty()) return std::nullopt;
  Weight sum;
  sum.complex = complex;
  sum.open = open;
  sum.k = n;
  for (const Weight& gen : positive_cone_generators(complex, open, n))
    for (const auto& [id, v] : gen.values) sum.values[id] += v;
  for (const auto& id : vars)
    if (sum.value(id) <= tolerance()) return std::nullopt;
  return make_balancing_condition(std::move(sum));
}

bool is_locally_balanceable(const Complex::Ptr& complex) {
  for (const auto& id : complex->minimal_cells())
    if (!find_balancing(complex, star_open(*complex, id))) return false;
  return true;
}

bool cycles_equal(const Cycle& a, const Cycle& b) {
  const Weight& wa = a.rep;
  const Weight& wb = b.rep;
  if (!wa.complex->ambient().same_space(wb.complex->ambient()))
    throw IncompatibleComplexes("cycles in different ambient spaces");
  if (wa.k != wb.k) return false;
  auto compare = [](const Weight& x, const Weight& y) {
    if (x.open != y.open) return false;
    double s = std::max(1.0, weight_scale_of(x) + weight_scale_of(y));
    std::set<CellId> keys;
    for (const auto& [id, v] : x.values) keys.insert(id);
    for (const auto& [id, v] : y.values) keys.insert(id);
    for (const auto& id : keys)
      if (std::abs(x.value(id) - y.value(id)) > 1e-9 * s) return false;
    return true;
  };
  if (wa.complex->same_cells(*wb.complex)) return compare(wa, wb);
  Refinement ref = common_refinement(wa.complex, wb.complex);
  Weight pa = pullback(wa, ref.complex);
  // the refinement's provenance points at the first input; reroute for b
  Weight pb;
  pb.complex = ref.complex;
  pb.k = wb.k;
  std::set<CellId> seed;
  for (const auto& [f, o] : ref.owner_second)
    if (wb.open.contains(o)) seed.insert(f);
  pb.open = upward_closure(*ref.complex, seed);
  for (const auto& id : ref.complex->ids()) {
    if (!pb.open.contains(id) || ref.complex->cell_dim(id) != wb.k) continue;
    const CellId& o = ref.owner_second.at(id);
    if (wb.complex->cell_dim(o) == wb.k) {
      double v = wb.value(o);
      if (v != 0.0) pb.values[id] = v;
    }
  }
  return compare(pa, pb);
}

std::pair<Complex::Ptr, Weight> support_subcomplex(const Weight& c) {
  check_weight_shape(c);
  for (const auto& [id, v] : c.values)
    if (v < -tolerance())
      throw NotPositive("weight is negative on '" + id + "'");
  if (!is_minkowski(c)) throw NotMinkowski("weight is not Minkowski");
  std::set<CellId> keep;
  for (const auto& id : c.support())
    for (const auto& f : c.complex->faces(id)) keep.insert(f);
  std::vector<Cell> cells;
  for (const auto& id : keep) cells.push_back(c.complex->cell(id));
  std::vector<std::pair<CellId, CellId>> poset;
  for (const auto& [x, y] : c.complex->poset_pairs())
    if (keep.count(x) && keep.count(y)) poset.push_back({x, y});
  auto sub = Complex::build(c.complex->ambient(), std::move(cells),
                            std::move(poset));
  Weight out;
  out.complex = sub;
  out.k = c.k;
  for (const auto& id : keep)
    if (c.open.contains(id)) out.open.cells.insert(id);
  for (const auto& id : c.support()) out.values[id] = c.value(id);
  return {sub, std::move(out)};
}

Weight weight_scale(const Weight& c, double t) {
  Weight out = c;
  for (auto& [id, v] : out.values) v *= t;
  return out;
}

Weight weight_add(const Weight& a, const Weight& b) {
  if (!a.complex->same_cells(*b.complex) || a.k != b.k || !(a.open == b.open))
    throw ComplexMismatch("weights are not addable");
  Weight out = a;
  for (const auto& [id, v] : b.values) out.values[id] += v;
  return out;
}

}  // namespace pcx
