#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "polyconvex/errors.hpp"
#include "polyconvex/tolerance.hpp"

namespace pcx {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Ambient Euclidean data: the vector space N with a symmetric
// positive-definite bilinear form and the affine hyperplane H = {a(x) = 1}
// carrying every embedded polyhedron.
struct AmbientSpace {
  int dim = 0;
  Mat metric;      // dim x dim SPD, identity by default
  Vec hyperplane;  // covector a; H = {x : a.x == 1}

  AmbientSpace() = default;
  AmbientSpace(int d, Vec a);
  AmbientSpace(int d, Vec a, Mat g);

  double inner(const Vec& u, const Vec& v) const { return u.dot(metric * v); }
  double norm(const Vec& u) const;
  bool on_hyperplane(const Vec& x) const;
  bool is_direction(const Vec& x) const;  // a(x) == 0
  bool same_space(const AmbientSpace& o) const;  // ignores metric

  static AmbientSpace standard(int d);  // identity metric, a = last coordinate
};

// An affine flat: basepoint plus linearly independent direction basis.
struct AffineFlat {
  Vec basepoint;
  std::vector<Vec> directions;

  int dim() const { return static_cast<int>(directions.size()); }
};

// Unit vector orthogonal to tau inside sigma's direction space, pointing
// towards `pointing`, in the ambient metric. tau must have codimension one
// in sigma.
Vec unit_normal(const AmbientSpace& amb, const AffineFlat& tau,
                const AffineFlat& sigma, const Vec& pointing);

// Metric distance from a point to an affine flat.
double point_flat_distance(const AmbientSpace& amb, const Vec& p,
                           const AffineFlat& flat);

// sqrt(det(B^T G' B) / det(B^T G B)) for the span of `basis`: the ratio of
// the Haar measures induced by the two metrics.
double gram_volume_ratio(const std::vector<Vec>& basis, const Mat& metric_new,
                         const Mat& metric_old);

// Extreme rays of the cone {x >= 0 : E x = 0}, double description method.
// Rays are scaled so the maximum entry is 1 and sorted lexicographically.
// The zero cone yields an empty list.
std::vector<Vec> cone_extreme_rays(int nonneg_vars,
                                   const std::vector<Vec>& equalities);

// ---------------------------------------------------------------------------
// Polyhedron engine (V-representation canonical form, brute-force dual
// descriptions; desk scale).
// ---------------------------------------------------------------------------

// H-representation: { x : Aeq x = beq, Ain x <= bin }. Rows of Aeq define the
// affine hull, rows of Ain the facets.
struct HRep {
  Mat Aeq;  // (#eq) x d
  Vec beq;
  Mat Ain;  // (#facets) x d
  Vec bin;
  int d = 0;
};

class Polyhedron {
 public:
  Polyhedron() = default;
  // Canonicalizes: duplicate generators removed, redundant points dropped,
  // rays normalized, opposite ray pairs turned into lineality directions.
  // Empty `vertices` means the empty polyhedron.
  Polyhedron(std::vector<Vec> vertices, std::vector<Vec> rays);

  bool empty() const { return verts_.empty(); }
  int ambient_dim() const;
  int dim() const { return dim_; }
  const std::vector<Vec>& vertices() const { return verts_; }
  const std::vector<Vec>& rays() const { return rays_; }
  const std::vector<Vec>& lines() const { return lines_; }
  // rays and lineality flattened back into plain ray directions
  std::vector<Vec> rays_with_lines() const;

  const HRep& hrep() const;  // lazily computed, cached

  bool contains(const Vec& p) const;
  bool recession_contains(const Vec& r) const;
  // A point of the relative interior (throws on empty).
  Vec relint_point() const;
  // Affine hull as basepoint + orthonormal direction basis.
  AffineFlat affine_hull() const;

  bool equals(const Polyhedron& o) const;
  // True when `face` equals the smallest face of *this containing it.
  bool has_face(const Polyhedron& face) const;
  // All proper nonempty faces (each as a polyhedron).
  std::vector<Polyhedron> proper_faces() const;
  // The smallest face containing p (p must be contained).
  Polyhedron minimal_face_containing(const Vec& p) const;

  // Largest t >= 0 with p + t*dir inside (infinity when unbounded); p must
  // be contained.
  double ray_hit(const Vec& p, const Vec& dir) const;

  // k-dimensional Euclidean volume of the polyhedron intersected with
  // [lo,hi]^d, measured inside its affine hull (standard metric).
  double truncated_volume(double lo, double hi) const;

  static Polyhedron intersect(const Polyhedron& a, const Polyhedron& b);
  static Polyhedron from_hrep(const HRep& h);
  static std::optional<Polyhedron> intersect_hrep(const Polyhedron& a,
                                                  const Mat& Ain,
                                                  const Vec& bin);

 private:
  std::vector<Vec> verts_;
  std::vector<Vec> rays_;
  std::vector<Vec> lines_;
  int dim_ = -1;
  mutable std::optional<HRep> hrep_;

  void canonicalize();
};

// Scale-aware comparisons used across the geometry kernels.
bool vec_near(const Vec& a, const Vec& b, double scale = 1.0);

}  // namespace pcx
