#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "polyconvex/geom.hpp"

namespace pcx {

using CellId = std::string;

// A cell of a complex: an identifier plus the image polyhedron in the
// ambient hyperplane H. Distinct cells may carry identical images (the
// quasi-embedding need not be globally injective); identification across
// cells is carried by the face poset alone.
struct Cell {
  CellId id;
  Polyhedron poly;
};

// A combinatorial open subset: an upward-closed family of cells. This is
// simultaneously the restriction of the complex to the open subset.
struct CombOpen {
  std::set<CellId> cells;
  bool contains(const CellId& id) const { return cells.count(id) > 0; }
  bool operator==(const CombOpen&) const = default;
};

// A point of the abstract space: ambient coordinates plus the cell whose
// image carries them. Canonical form has the carrier minimal.
struct Point {
  CellId carrier;
  Vec coords;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

class Complex {
 public:
  using Ptr = std::shared_ptr<const Complex>;

  static Ptr build(AmbientSpace amb, std::vector<Cell> cells,
                   std::vector<std::pair<CellId, CellId>> poset_pairs);
  // Same, recording that the complex subdivides `parent` with the given
  // owner map (fine cell -> minimal containing parent cell).
  static Ptr build(AmbientSpace amb, std::vector<Cell> cells,
                   std::vector<std::pair<CellId, CellId>> poset_pairs, Ptr parent,
                   std::map<CellId, CellId> owners);

  const AmbientSpace& ambient() const { return ambient_; }
  const std::vector<CellId>& ids() const { return ids_; }
  bool has_cell(const CellId& id) const { return cells_.count(id) > 0; }
  const Cell& cell(const CellId& id) const;
  int dim() const { return dim_; }
  int cell_dim(const CellId& id) const { return cell(id).poly.dim(); }

  // reflexive face order
  bool is_face(const CellId& a, const CellId& b) const;
  std::vector<CellId> faces(const CellId& id) const;    // includes id
  std::vector<CellId> cofaces(const CellId& id) const;  // includes id
  std::vector<CellId> cofaces_of_dim(const CellId& id, int k) const;
  std::vector<CellId> cells_of_dim(int k) const;
  std::vector<CellId> maximal_cells() const;
  std::vector<CellId> minimal_cells() const;

  const AffineFlat& flat(const CellId& id) const;
  // Unit normal to tau pointing into sigma; (tau, sigma) must be a facet
  // pair of the poset. Recomputed per metric change via the flats.
  Vec facet_normal(const CellId& tau, const CellId& sigma) const;

  ValidationReport validate() const;

  // Provenance: set when this complex was produced by subdividing another.
  Ptr parent() const { return parent_; }
  // fine cell id -> minimal containing cell of the parent
  const std::map<CellId, CellId>& owners() const { return owners_; }

  bool same_cells(const Complex& o) const;
  // strict face pairs (child, parent)
  std::vector<std::pair<CellId, CellId>> poset_pairs() const;

 private:
  AmbientSpace ambient_;
  std::map<CellId, Cell> cells_;
  std::vector<CellId> ids_;
  std::set<std::pair<CellId, CellId>> face_le_;  // closed, reflexive
  std::map<CellId, AffineFlat> flats_;
  std::map<std::pair<CellId, CellId>, Vec> normals_;
  int dim_ = -1;
  Ptr parent_;
  std::map<CellId, CellId> owners_;
};

// The whole complex as a combinatorial open.
CombOpen full_open(const Complex& c);
// Upward closure of {tau}: the minimal combinatorial open containing tau.
CombOpen star_open(const Complex& c, const CellId& tau);
bool is_upward_closed(const Complex& c, const CombOpen& open);
CombOpen upward_closure(const Complex& c, const std::set<CellId>& seed);

// k-dimensional cells of the restriction to the open.
std::vector<CellId> restrict_cells(const Complex& c, const CombOpen& open, int k);

// Replace the carrier by the minimal face of the carrier containing the
// coordinates.
Point canonicalize(const Complex& c, const Point& p);

// Subdivision test: every fine cell image inside some coarse cell image and
// the supports coincide.
bool is_subdivision(const Complex& fine, const Complex& coarse);

// Any two cells intersect, as images, exactly in the image of their unique
// maximal common face. Fails for quasi-embeddings with duplicated images.
bool is_image_faithful(const Complex& c);

// Minimal cell whose image contains the polyhedron (unique on image-faithful
// complexes).
std::optional<CellId> minimal_container(const Complex& c, const Polyhedron& p);

struct Refinement {
  Complex::Ptr complex;                   // parent() == first input
  std::map<CellId, CellId> owner_first;   // result cell -> first-input cell
  std::map<CellId, CellId> owner_second;  // result cell -> second-input cell
};

// Common refinement by pairwise image intersections. Inputs must be
// image-faithful (cells intersect, as images, in the image of their maximal
// common face); throws IncompatibleComplexes otherwise or when the result
// fails to subdivide both inputs.
Refinement common_refinement(const Complex::Ptr& a, const Complex::Ptr& b);

// Complex generated by a family of maximal polyhedra (all faces added, face
// poset geometric). The embedding must be injective on the union.
Complex::Ptr complex_from_maximal(AmbientSpace amb,
                                  const std::vector<Polyhedron>& maximal,
                                  const std::string& id_prefix = "c");

// Open transferred to a subdivision through its provenance owners.
CombOpen transfer_open(const Complex& fine, const CombOpen& coarse_open);

// Locate a point of the parent complex inside the subdivision.
Point locate(const Complex& fine, const Complex& base, const Point& p);

}  // namespace pcx
