#include "polyconvex/complex.hpp"

#include <algorithm>
#include <sstream>

namespace pcx {

namespace {

std::string cell_list(const std::vector<CellId>& ids) {
  std::ostringstream os;
  for (size_t i = 0; i < ids.size(); ++i) os << (i ? ", " : "") << ids[i];
  return os.str();
}

}  // namespace

Complex::Ptr Complex::build(AmbientSpace amb, std::vector<Cell> cells,
                            std::vector<std::pair<CellId, CellId>> poset_pairs,
                            Ptr parent, std::map<CellId, CellId> owners) {
  auto out = std::make_shared<Complex>(
      *build(std::move(amb), std::move(cells), std::move(poset_pairs)));
  out->parent_ = std::move(parent);
  out->owners_ = std::move(owners);
  return out;
}

Complex::Ptr Complex::build(AmbientSpace amb, std::vector<Cell> cells,
                            std::vector<std::pair<CellId, CellId>> poset_pairs) {
  Complex c;
  c.ambient_ = std::move(amb);
  for (auto& cell : cells) {
    if (cell.poly.empty()) throw DegenerateInput("cell '" + cell.id + "' is empty");
    if (c.cells_.count(cell.id))
      throw DegenerateInput("duplicate cell id '" + cell.id + "'");
    c.ids_.push_back(cell.id);
    c.cells_.emplace(cell.id, std::move(cell));
  }
  std::sort(c.ids_.begin(), c.ids_.end());
  for (const auto& [child, parent] : poset_pairs) {
    if (!c.cells_.count(child)) throw UnknownCell("poset references '" + child + "'");
    if (!c.cells_.count(parent))
      throw UnknownCell("poset references '" + parent + "'");
    c.face_le_.insert({child, parent});
  }
  for (const auto& id : c.ids_) c.face_le_.insert({id, id});
  // transitive closure
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::pair<CellId, CellId>> add;
    for (const auto& [a, b] : c.face_le_)
      for (const auto& [b2, d] : c.face_le_)
        if (b == b2 && !c.face_le_.count({a, d})) add.push_back({a, d});
    for (auto& p : add) {
      c.face_le_.insert(p);
      grew = true;
    }
  }
  c.dim_ = -1;
  for (const auto& id : c.ids_) {
    c.flats_[id] = c.cells_.at(id).poly.affine_hull();
    c.dim_ = std::max(c.dim_, c.cells_.at(id).poly.dim());
  }
  // facet normals for poset pairs of codimension one; invalid geometry is
  // skipped here and reported by validate()
  for (const auto& [t, s] : c.face_le_) {
    if (t == s) continue;
    const auto& pt = c.cells_.at(t).poly;
    const auto& ps = c.cells_.at(s).poly;
    if (ps.dim() != pt.dim() + 1) continue;
    try {
      Vec pointing = ps.relint_point() - pt.relint_point();
      c.normals_[{t, s}] =
          unit_normal(c.ambient_, c.flats_.at(t), c.flats_.at(s), pointing);
    } catch (const Error&) {
    }
  }
  return std::make_shared<Complex>(std::move(c));
}

const Cell& Complex::cell(const CellId& id) const {
  auto it = cells_.find(id);
  if (it == cells_.end()) throw UnknownCell("unknown cell '" + id + "'");
  return it->second;
}

bool Complex::is_face(const CellId& a, const CellId& b) const {
  return face_le_.count({a, b}) > 0;
}

std::vector<CellId> Complex::faces(const CellId& id) const {
  cell(id);
  std::vector<CellId> out;
  for (const auto& o : ids_)
    if (is_face(o, id)) out.push_back(o);
  return out;
}

std::vector<CellId> Complex::cofaces(const CellId& id) const {
  cell(id);
  std::vector<CellId> out;
  for (const auto& o : ids_)
    if (is_face(id, o)) out.push_back(o);
  return out;
}

std::vector<CellId> Complex::cofaces_of_dim(const CellId& id, int k) const {
  std::vector<CellId> out;
  for (const auto& o : cofaces(id))
    if (cell_dim(o) == k) out.push_back(o);
  return out;
}

std::vector<CellId> Complex::cells_of_dim(int k) const {
  std::vector<CellId> out;
  for (const auto& id : ids_)
    if (cell_dim(id) == k) out.push_back(id);
  return out;
}

std::vector<CellId> Complex::maximal_cells() const {
  std::vector<CellId> out;
  for (const auto& id : ids_) {
    bool maximal = true;
    for (const auto& o : ids_)
      if (o != id && is_face(id, o)) maximal = false;
    if (maximal) out.push_back(id);
  }
  return out;
}

std::vector<CellId> Complex::minimal_cells() const {
  std::vector<CellId> out;
  for (const auto& id : ids_) {
    bool minimal = true;
    for (const auto& o : ids_)
      if (o != id && is_face(o, id)) minimal = false;
    if (minimal) out.push_back(id);
  }
  return out;
}

const AffineFlat& Complex::flat(const CellId& id) const {
  auto it = flats_.find(id);
  if (it == flats_.end()) throw UnknownCell("unknown cell '" + id + "'");
  return it->second;
}

Vec Complex::facet_normal(const CellId& tau, const CellId& sigma) const {
  auto it = normals_.find({tau, sigma});
  if (it == normals_.end())
    throw DimensionMismatch("no facet normal for (" + tau + ", " + sigma + ")");
  return it->second;
}

bool Complex::same_cells(const Complex& o) const {
  if (ids_ != o.ids_) return false;
  if (face_le_ != o.face_le_) return false;
  for (const auto& id : ids_)
    if (!cells_.at(id).poly.equals(o.cells_.at(id).poly)) return false;
  return true;
}

std::vector<std::pair<CellId, CellId>> Complex::poset_pairs() const {
  std::vector<std::pair<CellId, CellId>> out;
  for (const auto& [a, b] : face_le_)
    if (a != b) out.push_back({a, b});
  return out;
}

ValidationReport Complex::validate() const {
  ValidationReport rep;
  auto flag = [&](const std::string& s) { rep.violations.push_back(s); };

  for (const auto& id : ids_) {
    const Polyhedron& p = cells_.at(id).poly;
    for (const Vec& v : p.vertices())
      if (!ambient_.on_hyperplane(v))
        flag("cell " + id + ": vertex off the hyperplane");
    for (const Vec& r : p.rays())
      if (!ambient_.is_direction(r))
        flag("cell " + id + ": ray is not a hyperplane direction");
    for (const Vec& l : p.lines())
      if (!ambient_.is_direction(l))
        flag("cell " + id + ": line is not a hyperplane direction");
  }

  // declared poset pairs must be geometric faces
  for (const auto& [a, b] : face_le_) {
    if (a == b) continue;
    if (!cells_.at(b).poly.has_face(cells_.at(a).poly))
      flag("cell " + a + " is declared a face of " + b +
           " but its image is not a face of the image");
  }

  // face completeness and uniqueness per cell
  for (const auto& id : ids_) {
    auto geo_faces = cells_.at(id).poly.proper_faces();
    std::vector<CellId> desc;
    for (const auto& o : ids_)
      if (o != id && is_face(o, id)) desc.push_back(o);
    for (const auto& gf : geo_faces) {
      int hits = 0;
      for (const auto& dcell : desc)
        if (cells_.at(dcell).poly.equals(gf)) ++hits;
      if (hits == 0)
        flag("cell " + id + ": a " + std::to_string(gf.dim()) +
             "-dimensional face of its image is missing from the poset");
      if (hits > 1)
        flag("cell " + id + ": a face of its image appears as " +
             std::to_string(hits) + " distinct poset children");
    }
    for (const auto& dcell : desc) {
      bool found = false;
      for (const auto& gf : geo_faces)
        if (cells_.at(dcell).poly.equals(gf)) found = true;
      if (!found)
        flag("cell " + dcell + " is a poset descendant of " + id +
             " but does not match any face of its image");
    }
  }

  // unique maximal common face
  for (size_t i = 0; i < ids_.size(); ++i) {
    for (size_t j = i + 1; j < ids_.size(); ++j) {
      std::vector<CellId> common;
      for (const auto& o : ids_)
        if (is_face(o, ids_[i]) && is_face(o, ids_[j])) common.push_back(o);
      if (common.empty()) continue;
      std::vector<CellId> maxima;
      for (const auto& a : common) {
        bool top = true;
        for (const auto& b : common)
          if (b != a && is_face(a, b)) top = false;
        if (top) maxima.push_back(a);
      }
      if (maxima.size() != 1)
        flag("cells " + ids_[i] + " and " + ids_[j] +
             " have no unique maximal common face (maxima: " + cell_list(maxima) +
             ")");
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Opens
// ---------------------------------------------------------------------------

CombOpen full_open(const Complex& c) {
  CombOpen o;
  for (const auto& id : c.ids()) o.cells.insert(id);
  return o;
}

CombOpen star_open(const Complex& c, const CellId& tau) {
  CombOpen o;
  for (const auto& id : c.cofaces(tau)) o.cells.insert(id);
  return o;
}

bool is_upward_closed(const Complex& c, const CombOpen& open) {
  for (const auto& id : open.cells) {
    if (!c.has_cell(id)) return false;
    for (const auto& up : c.cofaces(id))
      if (!open.contains(up)) return false;
  }
  return true;
}

CombOpen upward_closure(const Complex& c, const std::set<CellId>& seed) {
  CombOpen o;
  for (const auto& id : seed)
    for (const auto& up : c.cofaces(id)) o.cells.insert(up);
  return o;
}

std::vector<CellId> restrict_cells(const Complex& c, const CombOpen& open, int k) {
  std::vector<CellId> out;
  for (const auto& id : c.cells_of_dim(k))
    if (open.contains(id)) out.push_back(id);
  return out;
}

Point canonicalize(const Complex& c, const Point& p) {
  const Cell& carrier = c.cell(p.carrier);
  if (!carrier.poly.contains(p.coords))
    throw PointOutsideCarrier("point not inside its carrier '" + p.carrier + "'");
  Polyhedron face = carrier.poly.minimal_face_containing(p.coords);
  if (face.equals(carrier.poly)) return p;
  for (const auto& id : c.faces(p.carrier)) {
    if (id == p.carrier) continue;
    if (c.cell(id).poly.equals(face)) return Point{id, p.coords};
  }
  throw Error("carrier face missing from the poset; complex is invalid");
}

// ---------------------------------------------------------------------------
// Subdivision machinery
// ---------------------------------------------------------------------------

namespace {

std::pair<double, double> bounding_interval(const Complex& a, const Complex& b) {
  double lo = -1.0, hi = 1.0;
  for (const Complex* c : {&a, &b}) {
    for (const auto& id : c->ids()) {
      for (const Vec& v : c->cell(id).poly.vertices()) {
        lo = std::min(lo, v.minCoeff());
        hi = std::max(hi, v.maxCoeff());
      }
    }
  }
  double margin = 2.0 + 0.5 * (hi - lo);
  return {lo - margin, hi + margin};
}

bool image_contained(const Polyhedron& inner, const Polyhedron& outer) {
  for (const Vec& v : inner.vertices())
    if (!outer.contains(v)) return false;
  for (const Vec& r : inner.rays())
    if (!outer.recession_contains(r)) return false;
  for (const Vec& l : inner.lines()) {
    Vec neg = -l;
    if (!outer.recession_contains(l) || !outer.recession_contains(neg)) return false;
  }
  return true;
}

}  // namespace

bool is_subdivision(const Complex& fine, const Complex& coarse) {
  if (!fine.ambient().same_space(coarse.ambient())) return false;
  for (const auto& fid : fine.ids()) {
    bool inside = false;
    for (const auto& cid : coarse.ids())
      if (image_contained(fine.cell(fid).poly, coarse.cell(cid).poly)) {
        inside = true;
        break;
      }
    if (!inside) return false;
  }
  auto [lo, hi] = bounding_interval(fine, coarse);
  for (const auto& cid : coarse.maximal_cells()) {
    const Polyhedron& big = coarse.cell(cid).poly;
    int k = big.dim();
    double target = big.truncated_volume(lo, hi);
    // distinct fine images of dimension k inside the cell
    std::vector<const Polyhedron*> pieces;
    for (const auto& fid : fine.ids()) {
      const Polyhedron& p = fine.cell(fid).poly;
      if (p.dim() != k || !image_contained(p, big)) continue;
      bool dup = false;
      for (const auto* q : pieces)
        if (q->equals(p)) dup = true;
      if (!dup) pieces.push_back(&p);
    }
    double got = 0;
    for (const auto* p : pieces) got += p->truncated_volume(lo, hi);
    if (std::abs(got - target) > 1e-7 * std::max(1.0, target)) return false;
  }
  return true;
}

std::optional<CellId> minimal_container(const Complex& c, const Polyhedron& p) {
  std::optional<CellId> best;
  for (const auto& id : c.ids()) {
    if (!image_contained(p, c.cell(id).poly)) continue;
    if (!best || c.cell_dim(id) < c.cell_dim(*best)) best = id;
  }
  return best;
}

bool is_image_faithful(const Complex& c) {
  for (size_t i = 0; i < c.ids().size(); ++i) {
    for (size_t j = i + 1; j < c.ids().size(); ++j) {
      const CellId &a = c.ids()[i], &b = c.ids()[j];
      Polyhedron inter =
          Polyhedron::intersect(c.cell(a).poly, c.cell(b).poly);
      // maximal common face
      std::optional<CellId> maxcf;
      for (const auto& o : c.ids()) {
        if (!c.is_face(o, a) || !c.is_face(o, b)) continue;
        if (!maxcf || c.is_face(*maxcf, o)) maxcf = o;
      }
      if (!maxcf) {
        if (!inter.empty()) return false;
      } else if (!inter.equals(c.cell(*maxcf).poly)) {
        return false;
      }
    }
  }
  return true;
}

namespace {

std::string fresh_cell_name(int i) { return "c" + std::to_string(i); }

// deterministic order: by dimension, then lexicographic generators
bool pending_less(const Polyhedron& a, const Polyhedron& b) {
  if (a.dim() != b.dim()) return a.dim() < b.dim();
  auto key = [](const Polyhedron& p) {
    std::vector<double> k;
    for (const Vec& v : p.vertices())
      for (int i = 0; i < v.size(); ++i) k.push_back(v[i]);
    for (const Vec& r : p.rays())
      for (int i = 0; i < r.size(); ++i) k.push_back(r[i]);
    return k;
  };
  return key(a) < key(b);
}

}  // namespace

Complex::Ptr complex_from_maximal(AmbientSpace amb,
                                  const std::vector<Polyhedron>& maximal,
                                  const std::string& id_prefix) {
  std::vector<Polyhedron> pool;
  auto add = [&](const Polyhedron& p) {
    if (p.empty()) return;
    for (const auto& q : pool)
      if (q.equals(p)) return;
    pool.push_back(p);
  };
  for (const auto& m : maximal) {
    add(m);
    for (const auto& f : m.proper_faces()) add(f);
  }
  std::sort(pool.begin(), pool.end(), pending_less);
  std::vector<Cell> cells;
  for (size_t i = 0; i < pool.size(); ++i)
    cells.push_back({id_prefix + std::to_string(i), pool[i]});
  std::vector<std::pair<CellId, CellId>> poset;
  for (size_t i = 0; i < pool.size(); ++i)
    for (size_t j = 0; j < pool.size(); ++j)
      if (i != j && pool[j].dim() > pool[i].dim() && pool[j].has_face(pool[i]))
        poset.push_back({cells[i].id, cells[j].id});
  return Complex::build(std::move(amb), std::move(cells), std::move(poset));
}

Refinement common_refinement(const Complex::Ptr& a, const Complex::Ptr& b) {
  if (!a->ambient().same_space(b->ambient()) ||
      !vec_near(Vec(a->ambient().metric.reshaped()),
                Vec(b->ambient().metric.reshaped())))
    throw IncompatibleComplexes("different ambient spaces");

  Refinement out;
  if (a->same_cells(*b)) {
    std::vector<Cell> cells;
    std::vector<std::pair<CellId, CellId>> poset;
    for (const auto& id : a->ids()) cells.push_back(a->cell(id));
    for (const auto& s : a->ids())
      for (const auto& t : a->ids())
        if (s != t && a->is_face(s, t)) poset.push_back({s, t});
    std::map<CellId, CellId> owners;
    for (const auto& id : a->ids()) owners[id] = id;
    out.complex = Complex::build(a->ambient(), cells, poset, a, owners);
    out.owner_first = owners;
    out.owner_second = owners;
    return out;
  }

  if (!is_image_faithful(*a) || !is_image_faithful(*b))
    throw IncompatibleComplexes(
        "inputs are not image-faithful; pairwise intersection is undefined");

  std::vector<Polyhedron> pool;
  auto add = [&](const Polyhedron& p) {
    if (p.empty()) return;
    for (const auto& q : pool)
      if (q.equals(p)) return;
    pool.push_back(p);
  };
  for (const auto& sa : a->ids())
    for (const auto& sb : b->ids())
      add(Polyhedron::intersect(a->cell(sa).poly, b->cell(sb).poly));
  // defensive face closure
  for (size_t i = 0; i < pool.size(); ++i)
    for (const auto& f : pool[i].proper_faces()) add(f);

  std::sort(pool.begin(), pool.end(), pending_less);
  std::vector<Cell> cells;
  for (size_t i = 0; i < pool.size(); ++i)
    cells.push_back({fresh_cell_name(static_cast<int>(i)), pool[i]});
  std::vector<std::pair<CellId, CellId>> poset;
  for (size_t i = 0; i < pool.size(); ++i)
    for (size_t j = 0; j < pool.size(); ++j)
      if (i != j && pool[j].dim() > pool[i].dim() && pool[j].has_face(pool[i]))
        poset.push_back({cells[i].id, cells[j].id});

  auto built = Complex::build(a->ambient(), cells, poset);
  std::map<CellId, CellId> owner_a, owner_b;
  for (const auto& id : built->ids()) {
    auto oa = minimal_container(*a, built->cell(id).poly);
    auto ob = minimal_container(*b, built->cell(id).poly);
    if (!oa || !ob)
      throw IncompatibleComplexes("refinement cell not contained in both inputs");
    owner_a[id] = *oa;
    owner_b[id] = *ob;
  }
  if (!is_subdivision(*built, *a) || !is_subdivision(*built, *b))
    throw IncompatibleComplexes("inputs do not subdivide a common complex");

  out.complex = Complex::build(a->ambient(), cells, poset, a, owner_a);
  out.owner_first = owner_a;
  out.owner_second = owner_b;
  return out;
}

CombOpen transfer_open(const Complex& fine, const CombOpen& coarse_open) {
  std::set<CellId> seed;
  for (const auto& [f, o] : fine.owners())
    if (coarse_open.contains(o)) seed.insert(f);
  return upward_closure(fine, seed);
}

Point locate(const Complex& fine, const Complex& base, const Point& p) {
  std::optional<CellId> best;
  for (const auto& [fid, owner] : fine.owners()) {
    if (!base.is_face(owner, p.carrier)) continue;
    if (!fine.cell(fid).poly.contains(p.coords)) continue;
    if (!best || fine.cell_dim(fid) < fine.cell_dim(*best)) best = fid;
  }
  if (!best)
    throw PointOutsideComplex("point not found in the subdivided complex");
  return Point{*best, p.coords};
}

}  // namespace pcx
