#pragma once

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "polyconvex/complex.hpp"

namespace pcx {

// Affine datum on a cell: covector plus constant, f(x) = cov.x + cst on the
// cell image. Canonical form minimizes the covector's dual metric norm among
// all covectors inducing the same values on the cell's affine hull.
struct AffData {
  Vec cov;
  double cst = 0;
};

AffData canonical_affine(const AmbientSpace& amb, const AffineFlat& flat,
                         const AffData& raw);

// A piecewise affine function defined on a polyhedral complex: one affine
// datum per cell, consistent across faces.
struct PAFunc {
  Complex::Ptr complex;
  std::map<CellId, AffData> data;
};

// Builds a PAFunc with canonicalized data; throws FaceInconsistency when the
// per-cell data disagree on a shared face, FunctionNotDefinedOnComplex when a
// cell has no datum.
PAFunc make_pafunc(Complex::Ptr complex, std::map<CellId, AffData> data);

double evaluate(const PAFunc& f, const Point& p);
// Directional derivative of f along v inside the cell.
double slope(const PAFunc& f, const CellId& sigma, const Vec& v);

PAFunc pa_scale(const PAFunc& f, double t);
PAFunc pa_add(const PAFunc& f, const PAFunc& g);

// f carried to a subdivision of its complex (each fine cell inherits the
// datum of its owner).
PAFunc pa_pullback(const PAFunc& f, const Complex::Ptr& fine);

// Evaluate f at a point of a coarser complex that f's complex subdivides
// (walks the provenance chain).
double evaluate_through(const PAFunc& f, const Complex::Ptr& base, const Point& p);

// A function given per cell as a finite min of affine pieces; concave on
// each cell by construction.
struct MinAffine {
  Complex::Ptr complex;
  std::map<CellId, std::vector<AffData>> pieces;  // nonempty per cell
};

double evaluate(const MinAffine& g, const Point& p);

struct Subdivided {
  Complex::Ptr complex;  // parent() == the input complex
  PAFunc func;
};

// The subdivision of the complex by the affinity loci of g, together with g
// as a piecewise affine function on it. Throws NotCellwiseConcave when the
// piece lists are inconsistent across faces.
Subdivided affinity_subdivision(const MinAffine& g);

// min(0, l_1, ..., l_m) of linear functionals pulled back through the
// embedding; strongly concave by construction.
Subdivided min_of_linear(const std::vector<Vec>& functionals,
                         const Complex::Ptr& complex);

// A strongly concave function that is strictly concave on the subdivision it
// induces (sum over the open's cells of the min of their facet functionals).
Subdivided regularize(const Complex::Ptr& complex, const CombOpen& open);

struct DcDecomposition {
  PAFunc f1, f2;  // concave, with f1 - f2 equal to the input
};

DcDecomposition dc_decompose(const PAFunc& g, const CombOpen& open);

// ---------------------------------------------------------------------------
// Concave envelope of the lifted graph over H
// ---------------------------------------------------------------------------

struct EnvelopeValue {
  enum Kind { Finite, PlusInfinity, MinusInfinity } kind = MinusInfinity;
  double value = 0;
  bool finite() const { return kind == Finite; }
};

class Envelope {
 public:
  Envelope(std::vector<Vec> lifted_points, std::vector<Vec> lifted_rays);
  // Exact sup over the (non-closed) hull of the lifted generators;
  // MinusInfinity marks points outside the domain of finiteness.
  EnvelopeValue eval(const Vec& y) const;

 private:
  std::vector<Vec> points_, rays_;
};

struct EnvelopeSample {
  Point at;
  double f_value = 0;
  EnvelopeValue envelope;
  double gap = 0;  // envelope - f when finite
};

struct EnvelopeReport {
  bool equal_on_samples = true;
  std::vector<EnvelopeSample> samples;
};

// Envelope of f over the open's cells plus the equality report (the strong
// concavity witness). Throws FiberInconsistent when two cells with
// overlapping images disagree.
std::pair<Envelope, EnvelopeReport> concave_envelope(const PAFunc& f,
                                                     const CombOpen& open);

}  // namespace pcx
