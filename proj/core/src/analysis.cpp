#include "polyconvex/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pcx {

SampledFunc sampled_from(const PAFunc& f, const Complex::Ptr& base,
                         int grid_density) {
  SampledFunc s;
  s.grid_density = grid_density;
  s.eval = [f, base](const Point& p) { return evaluate_through(f, base, p); };
  return s;
}

std::vector<Point> grid_points(const Complex& cx, const CellId& cell,
                               int density) {
  const Polyhedron& p = cx.cell(cell).poly;
  if (!p.rays().empty() || !p.lines().empty())
    throw UnboundedCell("grid needs a bounded cell");
  const auto& verts = p.vertices();
  const int nv = static_cast<int>(verts.size());
  std::vector<Point> out;
  double scale = 1.0;
  for (const Vec& v : verts) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  std::vector<int> comp(nv, 0);
  comp[0] = density;
  while (true) {
    Vec x = Vec::Zero(cx.ambient().dim);
    for (int i = 0; i < nv; ++i)
      x += (static_cast<double>(comp[i]) / density) * verts[i];
    bool dup = false;
    for (const auto& q : out)
      if (vec_near(q.coords, x, scale)) dup = true;
    if (!dup) out.push_back(Point{cell, x});
    // next composition of `density` into nv nonnegative parts
    int i = nv - 2;
    while (i >= 0 && comp[i] == 0) --i;
    if (i < 0) break;
    int rest = comp[nv - 1];
    comp[i] -= 1;
    for (int j = i + 1; j < nv; ++j) comp[j] = 0;
    comp[i + 1] = rest + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polyhedral metric
// ---------------------------------------------------------------------------

PolyMetric::PolyMetric(Complex::Ptr complex, std::vector<CellId> compact)
    : complex_(std::move(complex)) {
  for (const auto& id : compact) {
    const Polyhedron& p = complex_->cell(id).poly;
    if (!p.rays().empty() || !p.lines().empty())
      throw UnboundedCell("polyhedral metric needs bounded cells");
    for (const auto& f : complex_->faces(id)) cells_.insert(f);
  }
  int i = 0;
  for (const auto& id : cells_) coord_[id] = i++;
}

Vec PolyMetric::embed(const Point& p) const {
  Point q = canonicalize(*complex_, p);
  if (!cells_.count(q.carrier))
    throw UnknownCell("point outside the metrized subcomplex");
  Vec out = Vec::Zero(static_cast<int>(coord_.size()));
  // walk the barycentric chain: bc -> boundary -> recurse
  CellId cur = q.carrier;
  Vec x = q.coords;
  double weight = 1.0;
  while (true) {
    const Polyhedron& poly = complex_->cell(cur).poly;
    if (poly.dim() == 0) {
      out[coord_.at(cur)] += weight;
      return out;
    }
    Vec bc = Vec::Zero(x.size());
    for (const Vec& v : poly.vertices()) bc += v;
    bc /= static_cast<double>(poly.vertices().size());
    Vec dir = x - bc;
    double dn = dir.cwiseAbs().maxCoeff();
    if (dn <= 1e-12 * std::max(1.0, bc.cwiseAbs().maxCoeff())) {
      out[coord_.at(cur)] += weight;
      return out;
    }
    double t = poly.ray_hit(bc, dir);  // >= 1
    Vec q_on_boundary = bc + t * dir;
    double lam = 1.0 / std::max(t, 1.0);  // barycentric weight on the boundary
    out[coord_.at(cur)] += weight * (1.0 - lam);
    weight *= lam;
    Point next = canonicalize(*complex_, Point{cur, q_on_boundary});
    if (next.carrier == cur)
      throw Error("barycentric walk failed to reach the boundary");
    cur = next.carrier;
    x = next.coords;
  }
}

double PolyMetric::distance(const Point& x, const Point& y) const {
  return (embed(x) - embed(y)).norm();
}

PolyMetric polyhedral_metric(const Complex::Ptr& complex,
                             const std::vector<CellId>& compact) {
  return PolyMetric(complex, compact);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Point> compact_grid(const Complex& cx,
                                const std::vector<CellId>& compact, int density) {
  std::vector<Point> pts;
  for (const auto& id : compact)
    for (auto& p : grid_points(cx, id, density)) pts.push_back(std::move(p));
  return pts;
}

}  // namespace

double lipschitz_estimate(const SampledFunc& f, const Complex::Ptr& complex,
                          const std::vector<CellId>& compact,
                          const PolyMetric& metric) {
  auto pts = compact_grid(*complex, compact, f.grid_density);
  std::vector<double> vals(pts.size());
  std::vector<Vec> emb(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    vals[i] = f.eval(pts[i]);
    emb[i] = metric.embed(pts[i]);
  }
  double lip = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      double d = (emb[i] - emb[j]).norm();
      if (d <= 1e-10) continue;
      lip = std::max(lip, std::abs(vals[i] - vals[j]) / d);
    }
  }
  return lip;
}

C01Norm c01_norm(const SampledFunc& f, const Complex::Ptr& complex,
                 const CellId& polytope) {
  const Complex& cx = *complex;
  const Polyhedron& poly = cx.cell(polytope).poly;
  if (!poly.rays().empty() || !poly.lines().empty())
    throw UnboundedCell("norms need a bounded cell");
  auto pts = grid_points(cx, polytope, f.grid_density);
  std::vector<double> vals(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) vals[i] = f.eval(pts[i]);

  // classical concavity test on sampled pairs
  double scale = 1.0;
  for (double v : vals) scale = std::max(scale, std::abs(v));
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      Vec mid = 0.5 * (pts[i].coords + pts[j].coords);
      double fm = f.eval(Point{polytope, mid});
      if (fm < 0.5 * (vals[i] + vals[j]) - 1e-7 * scale)
        throw NotConcaveOnCell("midpoint concavity violated on '" + polytope +
                               "'");
    }
  }

  C01Norm out;
  for (double v : vals) out.c0 = std::max(out.c0, std::abs(v));
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      Vec d = pts[i].coords - pts[j].coords;
      double dist = cx.ambient().norm(d);
      if (dist <= 1e-10) continue;
      out.lip = std::max(out.lip, std::abs(vals[i] - vals[j]) / dist);
    }
  }

  // one-sided derivatives at facet-interior points towards opposite vertices
  auto facets = poly.proper_faces();
  int fi = 0;
  for (const auto& facet : facets) {
    if (facet.dim() != poly.dim() - 1) continue;
    Vec v = facet.relint_point();
    int ei = 0;
    for (const Vec& e : poly.vertices()) {
      if (facet.contains(e)) {
        ++ei;
        continue;
      }
      auto deriv = [&](double t) {
        Vec p1 = (1 - t) * v + t * e;
        return (f.eval(Point{polytope, p1}) - f.eval(Point{polytope, v})) / t;
      };
      double d1 = deriv(1e-3), d2 = deriv(1e-4);
      double richardson = (1e-3 * d2 - 1e-4 * d1) / (1e-3 - 1e-4);
      out.directional["f" + std::to_string(fi) + "|v" + std::to_string(ei)] =
          richardson;
      ++ei;
    }
    ++fi;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string Report::text() const {
  std::ostringstream os;
  os << "status: " << status << "\n";
  for (const auto& [k, v] : kv) os << k << ": " << v << "\n";
  return os.str();
}

std::string Report::machine() const {
  std::ostringstream os;
  os << "status=" << status << "\n";
  for (const auto& [k, v] : kv) os << k << "=" << v << "\n";
  return os.str();
}

Report minimum_principle_check(const SampledFunc& f, const Complex::Ptr& complex,
                               const CombOpen& open, const BalancingCondition& b,
                               const std::vector<CellId>& compact) {
  Report rep;
  const Complex& cx = *complex;
  // poset connectivity of the open
  {
    std::vector<CellId> cells(open.cells.begin(), open.cells.end());
    if (cells.empty()) {
      rep.status = "refused";
      rep.kv.push_back({"reason", "empty open"});
      return rep;
    }
    std::set<CellId> seen{cells[0]};
    std::vector<CellId> todo{cells[0]};
    while (!todo.empty()) {
      CellId cur = todo.back();
      todo.pop_back();
      for (const auto& o : cells) {
        if (seen.count(o)) continue;
        if (cx.is_face(cur, o) || cx.is_face(o, cur)) {
          seen.insert(o);
          todo.push_back(o);
        }
      }
    }
    if (seen.size() != cells.size()) {
      rep.status = "refused";
      rep.kv.push_back({"reason", "open is not connected"});
      return rep;
    }
  }
  // weak concavity certificate on facet combinations
  const int n = b.w.k;
  for (const auto& tau : restrict_cells(cx, open, n - 1)) {
    bool all_in = true;
    for (const auto& s : cx.cofaces_of_dim(tau, n))
      if (!open.contains(s)) all_in = false;
    if (!all_in) continue;
    GeneratedCombo gen = generate_facet_combos(complex, b, tau);
    double gap = concavity_inequality(f.eval, gen.combo);
    if (gap < -1e-7 * (1.0 + std::abs(gap))) {
      rep.status = "refused";
      rep.kv.push_back({"reason", "not weakly concave across " + tau});
      rep.kv.push_back({"gap", std::to_string(gap)});
      return rep;
    }
  }
  // boundary facets of the compact: faces of exactly one maximal compact cell
  std::set<CellId> compact_set(compact.begin(), compact.end());
  std::set<CellId> boundary;
  for (const auto& id : cx.ids()) {
    int count = 0;
    for (const auto& m : compact)
      if (id != m && cx.is_face(id, m) &&
          cx.cell_dim(id) == cx.cell_dim(m) - 1)
        ++count;
    if (count == 1) boundary.insert(id);
  }
  auto pts = compact_grid(cx, compact, f.grid_density);
  double mn = std::numeric_limits<double>::infinity(), mx = -mn;
  for (const auto& p : pts) {
    double v = f.eval(p);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  bool violation = false;
  std::string where;
  for (const auto& p : pts) {
    double v = f.eval(p);
    if (v > mn + 1e-9 * (1.0 + std::abs(mn))) continue;
    Point q = canonicalize(cx, p);
    bool interior = true;
    for (const auto& bf : boundary)
      if (cx.is_face(q.carrier, bf)) interior = false;
    if (!open.contains(q.carrier)) interior = false;
    if (interior && mx > mn + 1e-7 * (1.0 + std::abs(mn))) {
      violation = true;
      where = q.carrier;
      break;
    }
  }
  rep.status = violation ? "violation" : "consistent";
  rep.pass = !violation;
  rep.kv.push_back({"grid_min", std::to_string(mn)});
  rep.kv.push_back({"grid_max", std::to_string(mx)});
  if (violation)
    rep.kv.push_back({"interior_minimum_at", where});
  return rep;
}

ConvergenceReport convergence_harness(const std::vector<PAFunc>& fs,
                                      const BalancingCondition& b,
                                      const Complex::Ptr& base,
                                      const std::vector<CellId>& compact,
                                      int grid_density, const PAFunc* limit) {
  if (fs.empty()) throw DegenerateInput("empty family");
  ConvergenceReport rep;
  for (size_t i = 0; i < fs.size(); ++i)
    if (!is_weakly_concave(fs[i], b))
      throw NotWeaklyConcaveMember("family member " + std::to_string(i) +
                                   " is not weakly concave");
  PolyMetric metric(base, compact);
  for (const auto& f : fs) {
    SampledFunc s = sampled_from(f, base, grid_density);
    rep.max_lipschitz =
        std::max(rep.max_lipschitz, lipschitz_estimate(s, base, compact, metric));
  }
  auto pts = compact_grid(*base, compact, grid_density);
  const PAFunc& ref = limit ? *limit : fs.back();
  for (const auto& f : fs) {
    double gap = 0;
    for (const auto& p : pts)
      gap = std::max(gap, std::abs(evaluate_through(f, base, p) -
                                   evaluate_through(ref, base, p)));
    rep.sup_gaps.push_back(gap);
  }
  for (size_t i = 0; i + 1 < fs.size(); ++i) {
    for (const auto& p : pts)
      rep.joint_modulus =
          std::max(rep.joint_modulus, std::abs(evaluate_through(fs[i], base, p) -
                                               evaluate_through(fs[i + 1], base, p)));
  }
  bool monotone = true;
  for (size_t i = 0; i + 1 < rep.sup_gaps.size(); ++i)
    if (rep.sup_gaps[i + 1] > rep.sup_gaps[i] + 1e-9) monotone = false;
  if (!monotone) rep.notes.push_back("sup gaps are not monotonically decreasing");
  rep.pass = true;
  return rep;
}

}  // namespace pcx
