#pragma once

namespace pcx {

// Global absolute/relative tolerance for zero tests. Set once at startup
// (CLI flag or POLYCONVEX_TOL); all kernels read it.
double tolerance();
void set_tolerance(double tol);

// Balancing residuals are judged relative to the local weight mass with
// this looser threshold.
double minkowski_tolerance();
void set_minkowski_tolerance(double tol);

inline bool near_zero(double x) { return x <= tolerance() && x >= -tolerance(); }

}  // namespace pcx
