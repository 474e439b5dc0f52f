#include "polyconvex/pafun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "polyconvex/weights.hpp"

namespace pcx {

namespace {

Mat dirs_matrix(const AffineFlat& flat, int d) {
  Mat B(d, static_cast<int>(flat.directions.size()));
  for (int j = 0; j < B.cols(); ++j) B.col(j) = flat.directions[j];
  return B;
}

double data_scale(const AffData& a) {
  return 1.0 + std::abs(a.cst) + (a.cov.size() ? a.cov.cwiseAbs().maxCoeff() : 0.0);
}

bool aff_near(const AffData& a, const AffData& b) {
  double s = data_scale(a) + data_scale(b);
  return (a.cov - b.cov).cwiseAbs().maxCoeff() <= 1e-8 * s &&
         std::abs(a.cst - b.cst) <= 1e-8 * s;
}

double eval_aff(const AffData& a, const Vec& x) { return a.cov.dot(x) + a.cst; }

// sample points pinning an affine function on a polyhedron
std::vector<Vec> pinning_samples(const Polyhedron& p) {
  std::vector<Vec> out = p.vertices();
  const Vec base = p.vertices().front();
  for (const Vec& r : p.rays()) out.push_back(base + r);
  for (const Vec& l : p.lines()) {
    out.push_back(base + l);
    out.push_back(base - l);
  }
  return out;
}

}  // namespace

AffData canonical_affine(const AmbientSpace& amb, const AffineFlat& flat,
                         const AffData& raw) {
  const int d = amb.dim;
  if (flat.directions.empty()) {
    AffData out;
    out.cov = Vec::Zero(d);
    out.cst = eval_aff(raw, flat.basepoint);
    return out;
  }
  Mat B = dirs_matrix(flat, d);
  Mat gram = B.transpose() * amb.metric * B;
  Vec rhs = B.transpose() * raw.cov;
  Vec alpha = gram.ldlt().solve(rhs);
  AffData out;
  out.cov = amb.metric * (B * alpha);
  out.cst = eval_aff(raw, flat.basepoint) - out.cov.dot(flat.basepoint);
  return out;
}

PAFunc make_pafunc(Complex::Ptr complex, std::map<CellId, AffData> data) {
  PAFunc f;
  f.complex = std::move(complex);
  for (const auto& id : f.complex->ids()) {
    auto it = data.find(id);
    if (it == data.end())
      throw FunctionNotDefinedOnComplex("no affine datum for cell '" + id + "'");
    f.data[id] = canonical_affine(f.complex->ambient(), f.complex->flat(id),
                                  it->second);
  }
  // face consistency
  for (const auto& [child, parent] : f.complex->poset_pairs()) {
    const AffData& dc = f.data.at(child);
    const AffData& dp = f.data.at(parent);
    double s = data_scale(dc) + data_scale(dp);
    for (const Vec& x : pinning_samples(f.complex->cell(child).poly)) {
      if (std::abs(eval_aff(dc, x) - eval_aff(dp, x)) >
          1e-7 * s * std::max(1.0, x.cwiseAbs().maxCoeff()))
        throw FaceInconsistency("cells '" + child + "' and '" + parent +
                                "' carry inconsistent affine data");
    }
  }
  return f;
}

double evaluate(const PAFunc& f, const Point& p) {
  if (!f.complex->has_cell(p.carrier))
    throw PointOutsideComplex("carrier '" + p.carrier + "' not in the complex");
  if (!f.complex->cell(p.carrier).poly.contains(p.coords))
    throw PointOutsideCarrier("coordinates outside carrier '" + p.carrier + "'");
  return eval_aff(f.data.at(p.carrier), p.coords);
}

double slope(const PAFunc& f, const CellId& sigma, const Vec& v) {
  if (!f.complex->has_cell(sigma))
    throw UnknownCell("unknown cell '" + sigma + "'");
  const AffineFlat& flat = f.complex->flat(sigma);
  Vec res = v;
  for (const Vec& b : flat.directions) res -= v.dot(b) * b;
  if (res.norm() > 1e-8 * std::max(1.0, v.norm()))
    throw DirectionOutsideCell("direction not in the cell's direction space");
  return f.data.at(sigma).cov.dot(v);
}

PAFunc pa_scale(const PAFunc& f, double t) {
  PAFunc out = f;
  for (auto& [id, d] : out.data) {
    d.cov *= t;
    d.cst *= t;
  }
  return out;
}

PAFunc pa_add(const PAFunc& f, const PAFunc& g) {
  if (!f.complex->same_cells(*g.complex))
    throw ComplexMismatch("functions live on different complexes");
  PAFunc out = f;
  for (auto& [id, d] : out.data) {
    d.cov += g.data.at(id).cov;
    d.cst += g.data.at(id).cst;
  }
  return out;
}

PAFunc pa_pullback(const PAFunc& f, const Complex::Ptr& fine) {
  std::map<CellId, CellId> owners;
  if (fine->parent() && fine->parent()->same_cells(*f.complex)) {
    owners = fine->owners();
  } else {
    if (!is_subdivision(*fine, *f.complex))
      throw NotASubdivision("target does not subdivide the function's complex");
    for (const auto& id : fine->ids()) {
      auto o = minimal_container(*f.complex, fine->cell(id).poly);
      if (!o) throw NotASubdivision("fine cell not contained in any coarse cell");
      owners[id] = *o;
    }
  }
  std::map<CellId, AffData> data;
  for (const auto& id : fine->ids()) data[id] = f.data.at(owners.at(id));
  return make_pafunc(fine, std::move(data));
}

double evaluate_through(const PAFunc& f, const Complex::Ptr& base, const Point& p) {
  if (f.complex->same_cells(*base)) return evaluate(f, p);
  std::vector<Complex::Ptr> chain;  // base subdivisions down to f.complex
  Complex::Ptr cur = f.complex;
  while (cur && !cur->same_cells(*base)) {
    chain.push_back(cur);
    cur = cur->parent();
  }
  if (!cur) throw ComplexMismatch("function complex does not descend from base");
  Point q = p;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    Complex::Ptr parent = (*it)->parent();
    q = locate(**it, *parent, q);
  }
  return evaluate(f, q);
}

double evaluate(const MinAffine& g, const Point& p) {
  auto it = g.pieces.find(p.carrier);
  if (it == g.pieces.end())
    throw PointOutsideComplex("carrier '" + p.carrier + "' has no pieces");
  double best = std::numeric_limits<double>::infinity();
  for (const AffData& a : it->second) best = std::min(best, eval_aff(a, p.coords));
  return best;
}

// ---------------------------------------------------------------------------
// Subdivision by affinity loci
// ---------------------------------------------------------------------------

namespace {

struct Region {
  Polyhedron poly;
  AffData acc;  // accumulated affine datum
};

// slice regions of one base cell by the affinity loci of one min-of-affine
// term; pieces equal on the cell are merged first so every wall is a genuine
// kink
std::vector<Region> slice_regions(const AmbientSpace& amb, const AffineFlat& flat,
                                  std::vector<Region> regions,
                                  const std::vector<AffData>& raw_pieces,
                                  int region_dim) {
  std::vector<AffData> pieces;
  for (const AffData& p : raw_pieces) {
    AffData c = canonical_affine(amb, flat, p);
    bool dup = false;
    for (const AffData& q : pieces)
      if (aff_near(c, q)) dup = true;
    if (!dup) pieces.push_back(c);
  }
  if (pieces.size() == 1) {
    for (auto& r : regions) {
      r.acc.cov += pieces[0].cov;
      r.acc.cst += pieces[0].cst;
    }
    return regions;
  }
  const int d = amb.dim;
  std::vector<Region> next;
  for (const Region& r : regions) {
    for (size_t j = 0; j < pieces.size(); ++j) {
      Mat A(static_cast<int>(pieces.size()) - 1, d);
      Vec b(static_cast<int>(pieces.size()) - 1);
      int row = 0;
      for (size_t i = 0; i < pieces.size(); ++i) {
        if (i == j) continue;
        A.row(row) = (pieces[j].cov - pieces[i].cov).transpose();
        b[row] = pieces[i].cst - pieces[j].cst;
        ++row;
      }
      auto piece = Polyhedron::intersect_hrep(r.poly, A, b);
      if (!piece || piece->dim() != region_dim) continue;
      Region nr;
      nr.poly = std::move(*piece);
      nr.acc.cov = r.acc.cov + pieces[j].cov;
      nr.acc.cst = r.acc.cst + pieces[j].cst;
      bool dup = false;
      for (const auto& o : next)
        if (o.poly.equals(nr.poly)) dup = true;
      if (!dup) next.push_back(std::move(nr));
    }
  }
  return next;
}

// the poset cell of `base` realizing the minimal face of rho's image that
// contains the polyhedron
CellId owner_cell(const Complex& base, const CellId& rho, const Polyhedron& piece) {
  const Polyhedron& carrier = base.cell(rho).poly;
  Polyhedron face = carrier.minimal_face_containing(piece.relint_point());
  for (const auto& id : base.faces(rho))
    if (base.cell(id).poly.equals(face)) return id;
  throw Error("face of cell '" + rho + "' missing from the poset");
}

struct PendingCell {
  CellId owner;
  Polyhedron poly;
  AffData data;
};

Subdivided assemble_subdivision(const Complex::Ptr& base,
                                std::map<CellId, std::vector<Region>> regions) {
  std::vector<PendingCell> pool;
  auto add = [&](CellId owner, Polyhedron poly, const AffData& data) {
    for (const auto& p : pool)
      if (p.owner == owner && p.poly.equals(poly)) return;
    pool.push_back({std::move(owner), std::move(poly), data});
  };
  for (const auto& [rho, regs] : regions) {
    for (const Region& r : regs) {
      add(owner_cell(*base, rho, r.poly), r.poly, r.acc);
      for (const Polyhedron& f : r.poly.proper_faces())
        add(owner_cell(*base, rho, f), f, r.acc);
    }
  }
  std::sort(pool.begin(), pool.end(), [](const PendingCell& a, const PendingCell& b) {
    if (a.poly.dim() != b.poly.dim()) return a.poly.dim() < b.poly.dim();
    if (a.owner != b.owner) return a.owner < b.owner;
    auto key = [](const Polyhedron& p) {
      std::vector<double> k;
      for (const Vec& v : p.vertices())
        for (int i = 0; i < v.size(); ++i) k.push_back(v[i]);
      for (const Vec& r : p.rays())
        for (int i = 0; i < r.size(); ++i) k.push_back(r[i]);
      return k;
    };
    return key(a.poly) < key(b.poly);
  });

  std::vector<Cell> cells;
  std::map<CellId, CellId> owners;
  std::map<CellId, AffData> data;
  for (size_t i = 0; i < pool.size(); ++i) {
    CellId id = "s" + std::to_string(i);
    cells.push_back({id, pool[i].poly});
    owners[id] = pool[i].owner;
    data[id] = pool[i].data;
  }
  std::vector<std::pair<CellId, CellId>> poset;
  for (size_t i = 0; i < pool.size(); ++i)
    for (size_t j = 0; j < pool.size(); ++j) {
      if (i == j || pool[j].poly.dim() <= pool[i].poly.dim()) continue;
      if (!base->is_face(pool[i].owner, pool[j].owner)) continue;
      if (pool[j].poly.has_face(pool[i].poly))
        poset.push_back({cells[i].id, cells[j].id});
    }
  Subdivided out;
  out.complex =
      Complex::build(base->ambient(), cells, poset, base, std::move(owners));
  out.func = make_pafunc(out.complex, std::move(data));
  return out;
}

std::vector<AffData> hrep_functionals(const Polyhedron& p) {
  std::vector<AffData> pieces;
  pieces.push_back({Vec::Zero(p.ambient_dim()), 0.0});
  const HRep& h = p.hrep();
  for (int i = 0; i < h.Ain.rows(); ++i)
    pieces.push_back({Vec(-h.Ain.row(i).transpose()), h.bin[i]});
  for (int i = 0; i < h.Aeq.rows(); ++i) {
    pieces.push_back({Vec(-h.Aeq.row(i).transpose()), h.beq[i]});
    pieces.push_back({Vec(h.Aeq.row(i).transpose()), -h.beq[i]});
  }
  return pieces;
}

}  // namespace

Subdivided affinity_subdivision(const MinAffine& g) {
  const Complex::Ptr& base = g.complex;
  // cross-face consistency of the min values
  for (const auto& [child, parent] : base->poset_pairs()) {
    auto itc = g.pieces.find(child);
    auto itp = g.pieces.find(parent);
    if (itc == g.pieces.end() || itp == g.pieces.end())
      throw FunctionNotDefinedOnComplex("missing pieces for a cell");
    for (const Vec& x : pinning_samples(base->cell(child).poly)) {
      double vc = std::numeric_limits<double>::infinity();
      for (const AffData& a : itc->second) vc = std::min(vc, eval_aff(a, x));
      double vp = std::numeric_limits<double>::infinity();
      for (const AffData& a : itp->second) vp = std::min(vp, eval_aff(a, x));
      if (std::abs(vc - vp) > 1e-7 * (1.0 + std::abs(vc) + std::abs(vp)))
        throw NotCellwiseConcave(
            "piece lists disagree on the face between '" + child + "' and '" +
            parent + "'");
    }
  }
  std::map<CellId, std::vector<Region>> regions;
  for (const auto& id : base->ids()) {
    Region r0;
    r0.poly = base->cell(id).poly;
    r0.acc = {Vec::Zero(base->ambient().dim), 0.0};
    regions[id] = slice_regions(base->ambient(), base->flat(id), {r0},
                                g.pieces.at(id), base->cell_dim(id));
  }
  return assemble_subdivision(base, std::move(regions));
}

Subdivided min_of_linear(const std::vector<Vec>& functionals,
                         const Complex::Ptr& complex) {
  std::vector<AffData> pieces;
  pieces.push_back({Vec::Zero(complex->ambient().dim), 0.0});
  for (const Vec& l : functionals) pieces.push_back({l, 0.0});
  MinAffine g;
  g.complex = complex;
  for (const auto& id : complex->ids()) g.pieces[id] = pieces;
  return affinity_subdivision(g);
}

Subdivided regularize(const Complex::Ptr& complex, const CombOpen& open) {
  std::map<CellId, std::vector<Region>> regions;
  for (const auto& id : complex->ids()) {
    Region r0;
    r0.poly = complex->cell(id).poly;
    r0.acc = {Vec::Zero(complex->ambient().dim), 0.0};
    std::vector<Region> regs = {r0};
    for (const auto& sigma : complex->ids()) {
      if (!open.contains(sigma)) continue;
      regs = slice_regions(complex->ambient(), complex->flat(id), std::move(regs),
                           hrep_functionals(complex->cell(sigma).poly),
                           complex->cell_dim(id));
    }
    regions[id] = std::move(regs);
  }
  return assemble_subdivision(complex, std::move(regions));
}

DcDecomposition dc_decompose(const PAFunc& g, const CombOpen& open) {
  Subdivided reg = regularize(g.complex, open);
  PAFunc gs = pa_pullback(g, reg.complex);
  CombOpen open_s = transfer_open(*reg.complex, open);
  double worst = 0.0;
  for (const auto& tau : reg.complex->ids()) {
    if (!open_s.contains(tau)) continue;
    int k = reg.complex->cell_dim(tau) + 1;
    for (const Weight& gen :
         positive_cone_generators(reg.complex, star_open(*reg.complex, tau), k)) {
      double den = product(reg.func, gen).value(tau);
      if (den <= tolerance())
        throw Error("regularized function is not strictly concave at '" + tau +
                    "'");
      double num = product(gs, gen).value(tau);
      worst = std::max(worst, -num / den);
    }
  }
  double t = worst > 0 ? 1.1 * worst : 0.0;
  DcDecomposition out;
  out.f2 = pa_scale(reg.func, t);
  out.f1 = pa_add(gs, out.f2);
  return out;
}

// ---------------------------------------------------------------------------
// Concave envelope
// ---------------------------------------------------------------------------

Envelope::Envelope(std::vector<Vec> lifted_points, std::vector<Vec> lifted_rays)
    : points_(std::move(lifted_points)), rays_(std::move(lifted_rays)) {}

EnvelopeValue Envelope::eval(const Vec& y) const {
  // membership in the (non-closed) hull, homogenized into the standard cone
  // {x >= 0 : E x = 0} with variables (lambda, mu, w)
  const int np = static_cast<int>(points_.size());
  const int nr = static_cast<int>(rays_.size());
  const int d = static_cast<int>(y.size());  // lifted dim is d+1
  const int nvars = np + nr + 1;
  std::vector<Vec> eqs;
  for (int coord = 0; coord < d; ++coord) {
    Vec e = Vec::Zero(nvars);
    for (int i = 0; i < np; ++i) e[i] = points_[i][coord];
    for (int j = 0; j < nr; ++j) e[np + j] = rays_[j][coord];
    e[np + nr] = -y[coord];
    eqs.push_back(e);
  }
  {
    Vec e = Vec::Zero(nvars);
    for (int i = 0; i < np; ++i) e[i] = 1.0;
    e[np + nr] = -1.0;
    eqs.push_back(e);
  }
  auto zval = [&](const Vec& x) {
    double z = 0;
    for (int i = 0; i < np; ++i) z += x[i] * points_[i][d];
    for (int j = 0; j < nr; ++j) z += x[np + j] * rays_[j][d];
    return z;
  };
  EnvelopeValue out;
  bool feasible = false;
  bool unbounded = false;
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& r : cone_extreme_rays(nvars, eqs)) {
    double w = r[np + nr];
    if (w > 1e-9) {
      feasible = true;
      best = std::max(best, zval(r) / w);
    } else if (zval(r) > 1e-9) {
      unbounded = true;
    }
  }
  if (!feasible) {
    out.kind = EnvelopeValue::MinusInfinity;
  } else if (unbounded) {
    out.kind = EnvelopeValue::PlusInfinity;
  } else {
    out.kind = EnvelopeValue::Finite;
    out.value = best;
  }
  return out;
}

std::pair<Envelope, EnvelopeReport> concave_envelope(const PAFunc& f,
                                                     const CombOpen& open) {
  const Complex& cx = *f.complex;
  const int d = cx.ambient().dim;
  std::vector<CellId> cells;
  for (const auto& id : cx.ids())
    if (open.contains(id)) cells.push_back(id);

  // fiber consistency across overlapping images
  for (size_t i = 0; i < cells.size(); ++i) {
    for (size_t j = i + 1; j < cells.size(); ++j) {
      Polyhedron inter =
          Polyhedron::intersect(cx.cell(cells[i]).poly, cx.cell(cells[j]).poly);
      if (inter.empty()) continue;
      const AffData& da = f.data.at(cells[i]);
      const AffData& db = f.data.at(cells[j]);
      for (const Vec& x : pinning_samples(inter)) {
        double s = data_scale(da) + data_scale(db);
        if (std::abs(eval_aff(da, x) - eval_aff(db, x)) >
            1e-7 * s * std::max(1.0, x.cwiseAbs().maxCoeff()))
          throw FiberInconsistent(
              "cells '" + cells[i] + "' and '" + cells[j] +
              "' overlap in the embedding but carry different values");
      }
    }
  }

  std::vector<Vec> pts, rays;
  auto lift_pt = [&](const Vec& x, double v) {
    Vec p(d + 1);
    p.head(d) = x;
    p[d] = v;
    for (const Vec& q : pts)
      if (vec_near(q, p, 1.0 + x.cwiseAbs().maxCoeff())) return;
    pts.push_back(p);
  };
  auto lift_ray = [&](const Vec& r, double s) {
    Vec q(d + 1);
    q.head(d) = r;
    q[d] = s;
    for (const Vec& o : rays)
      if (vec_near(o, q)) return;
    rays.push_back(q);
  };
  for (const auto& id : cells) {
    const Polyhedron& p = cx.cell(id).poly;
    const AffData& a = f.data.at(id);
    for (const Vec& v : p.vertices()) lift_pt(v, eval_aff(a, v));
    for (const Vec& r : p.rays()) lift_ray(r, a.cov.dot(r));
    for (const Vec& l : p.lines()) {
      lift_ray(l, a.cov.dot(l));
      Vec nl = -l;
      lift_ray(nl, a.cov.dot(nl));
    }
  }
  Vec down = Vec::Zero(d + 1);
  down[d] = -1.0;
  rays.push_back(down);

  Envelope env(pts, rays);
  EnvelopeReport rep;
  for (const auto& id : cells) {
    const Polyhedron& p = cx.cell(id).poly;
    std::vector<Vec> samples = p.vertices();
    samples.push_back(p.relint_point());
    for (const Vec& r : p.rays()) {
      samples.push_back(p.vertices().front() + r);
      samples.push_back(p.relint_point() + r);
    }
    for (const Vec& l : p.lines()) {
      samples.push_back(p.relint_point() + l);
      samples.push_back(p.relint_point() - l);
    }
    for (const Vec& x : samples) {
      EnvelopeSample s;
      s.at = Point{id, x};
      s.f_value = eval_aff(f.data.at(id), x);
      s.envelope = env.eval(x);
      if (s.envelope.finite()) {
        s.gap = s.envelope.value - s.f_value;
        if (std::abs(s.gap) > 1e-7 * (1.0 + std::abs(s.f_value)))
          rep.equal_on_samples = false;
      } else {
        rep.equal_on_samples = false;
      }
      rep.samples.push_back(std::move(s));
    }
  }
  return {std::move(env), std::move(rep)};
}

}  // namespace pcx
