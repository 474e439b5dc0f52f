#include "polyconvex/geom.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>

namespace pcx {

namespace {

std::atomic<double> g_tol{1e-9};
std::atomic<double> g_mink_tol{1e-7};

double geo_eps(double scale) { return tolerance() * std::max(1.0, scale); }

double max_abs(const std::vector<Vec>& vs) {
  double m = 0;
  for (const auto& v : vs) m = std::max(m, v.size() ? v.cwiseAbs().maxCoeff() : 0.0);
  return m;
}

bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-12) return true;
    if (a[i] > b[i] + 1e-12) return false;
  }
  return false;
}

int mat_rank(const Mat& m, double eps) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  double thr = eps * std::max(1.0, s.size() ? s[0] : 0.0);
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > thr) ++r;
  return r;
}

// Orthonormal basis of the column span (U) and of its complement.
std::pair<Mat, Mat> span_and_complement(const Mat& dirs, int d) {
  if (dirs.cols() == 0) {
    return {Mat(d, 0), Mat::Identity(d, d)};
  }
  Eigen::JacobiSVD<Mat> svd(dirs, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  double thr = 1e-10 * std::max(1.0, s.size() ? s[0] : 0.0);
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > thr) ++r;
  Mat U = svd.matrixU();
  return {U.leftCols(r), U.rightCols(d - r)};
}

Mat cols_from(const std::vector<Vec>& vs, int d) {
  Mat m(d, static_cast<int>(vs.size()));
  for (int i = 0; i < static_cast<int>(vs.size()); ++i) m.col(i) = vs[i];
  return m;
}

}  // namespace

double tolerance() { return g_tol.load(std::memory_order_relaxed); }
void set_tolerance(double tol) { g_tol.store(tol, std::memory_order_relaxed); }
double minkowski_tolerance() { return g_mink_tol.load(std::memory_order_relaxed); }
void set_minkowski_tolerance(double tol) {
  g_mink_tol.store(tol, std::memory_order_relaxed);
}

bool vec_near(const Vec& a, const Vec& b, double scale) {
  if (a.size() != b.size()) return false;
  return (a - b).cwiseAbs().maxCoeff() <= geo_eps(scale);
}

// ---------------------------------------------------------------------------
// AmbientSpace
// ---------------------------------------------------------------------------

AmbientSpace::AmbientSpace(int d, Vec a)
    : AmbientSpace(d, std::move(a), Mat::Identity(d, d)) {}

AmbientSpace::AmbientSpace(int d, Vec a, Mat g) : dim(d) {
  if (d <= 0) throw DegenerateInput("ambient dimension must be positive");
  if (a.size() != d) throw DimensionMismatch("hyperplane covector size != dim");
  if (g.rows() != d || g.cols() != d)
    throw DimensionMismatch("metric size != dim x dim");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > geo_eps(g.cwiseAbs().maxCoeff()))
    throw DegenerateInput("metric is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  if (es.eigenvalues().minCoeff() <= tolerance())
    throw DegenerateInput("metric is not positive definite");
  if (a.cwiseAbs().maxCoeff() <= tolerance())
    throw DegenerateInput("hyperplane covector is zero");
  metric = std::move(g);
  hyperplane = std::move(a);
}

double AmbientSpace::norm(const Vec& u) const {
  return std::sqrt(std::max(0.0, inner(u, u)));
}

bool AmbientSpace::on_hyperplane(const Vec& x) const {
  return std::abs(hyperplane.dot(x) - 1.0) <= geo_eps(x.cwiseAbs().maxCoeff());
}

bool AmbientSpace::is_direction(const Vec& x) const {
  return std::abs(hyperplane.dot(x)) <= geo_eps(x.cwiseAbs().maxCoeff());
}

bool AmbientSpace::same_space(const AmbientSpace& o) const {
  return dim == o.dim && vec_near(hyperplane, o.hyperplane);
}

AmbientSpace AmbientSpace::standard(int d) {
  Vec a = Vec::Zero(d);
  a[d - 1] = 1.0;
  return AmbientSpace(d, a);
}

// ---------------------------------------------------------------------------
// Metric linear algebra
// ---------------------------------------------------------------------------

namespace {

// Gram-Schmidt in the ambient metric; drops dependent vectors.
std::vector<Vec> metric_orthonormalize(const AmbientSpace& amb,
                                       const std::vector<Vec>& vs) {
  std::vector<Vec> basis;
  for (const Vec& v : vs) {
    Vec w = v;
    for (const Vec& b : basis) w -= amb.inner(w, b) * b;
    double n = amb.norm(w);
    if (n > 1e-10 * std::max(1.0, v.cwiseAbs().maxCoeff())) basis.push_back(w / n);
  }
  return basis;
}

}  // namespace

Vec unit_normal(const AmbientSpace& amb, const AffineFlat& tau,
                const AffineFlat& sigma, const Vec& pointing) {
  auto tau_basis = metric_orthonormalize(amb, tau.directions);
  auto sigma_basis = metric_orthonormalize(amb, sigma.directions);
  if (static_cast<int>(tau_basis.size()) + 1 != static_cast<int>(sigma_basis.size()))
    throw DimensionMismatch("tau is not of codimension 1 in sigma");
  // tau's span must sit inside sigma's.
  for (const Vec& b : tau_basis) {
    Vec r = b;
    for (const Vec& s : sigma_basis) r -= amb.inner(r, s) * s;
    if (amb.norm(r) > 1e-8)
      throw DimensionMismatch("tau direction space not contained in sigma's");
  }
  Vec inside = Vec::Zero(amb.dim);
  for (const Vec& s : sigma_basis) inside += amb.inner(pointing, s) * s;
  if (amb.norm(pointing - inside) > 1e-8 * std::max(1.0, amb.norm(pointing)))
    throw DegenerateInput("pointing vector lies outside sigma's direction space");
  Vec w = inside;
  for (const Vec& b : tau_basis) w -= amb.inner(w, b) * b;
  double n = amb.norm(w);
  if (n <= 1e-10 * std::max(1.0, amb.norm(pointing)))
    throw DegenerateInput("pointing vector lies in tau's direction space");
  return w / n;
}

double point_flat_distance(const AmbientSpace& amb, const Vec& p,
                           const AffineFlat& flat) {
  Vec r = p - flat.basepoint;
  for (const Vec& b : metric_orthonormalize(amb, flat.directions))
    r -= amb.inner(r, b) * b;
  double d = amb.norm(r);
  return d <= geo_eps(p.cwiseAbs().maxCoeff()) ? 0.0 : d;
}

double gram_volume_ratio(const std::vector<Vec>& basis, const Mat& metric_new,
                         const Mat& metric_old) {
  if (basis.empty()) return 1.0;
  Mat B = cols_from(basis, static_cast<int>(basis[0].size()));
  double det_old = (B.transpose() * metric_old * B).determinant();
  double det_new = (B.transpose() * metric_new * B).determinant();
  if (det_old <= tolerance() || det_new <= tolerance())
    throw DegenerateInput("degenerate Gram determinant");
  return std::sqrt(det_new / det_old);
}

// ---------------------------------------------------------------------------
// Double description on {x >= 0 : E x = 0}
// ---------------------------------------------------------------------------

namespace {

// nullity of the system {rows of E_active; coordinate rows for Z}
int tight_nullity(const std::vector<Vec>& eqs, int upto, const std::vector<int>& zero,
                  int n) {
  Mat m(upto + static_cast<int>(zero.size()), n);
  for (int i = 0; i < upto; ++i) m.row(i) = eqs[i].transpose();
  for (int j = 0; j < static_cast<int>(zero.size()); ++j) {
    m.row(upto + j).setZero();
    m(upto + j, zero[j]) = 1.0;
  }
  return n - mat_rank(m, 1e-10);
}

Vec normalize_ray(Vec r) {
  double m = r.cwiseAbs().maxCoeff();
  if (m > 0) r /= m;
  for (int i = 0; i < r.size(); ++i)
    if (std::abs(r[i]) < 1e-12) r[i] = 0.0;
  return r;
}

std::vector<int> zero_set(const Vec& r) {
  std::vector<int> z;
  for (int i = 0; i < r.size(); ++i)
    if (std::abs(r[i]) <= 1e-9) z.push_back(i);
  return z;
}

}  // namespace

std::vector<Vec> cone_extreme_rays(int nonneg_vars,
                                   const std::vector<Vec>& equalities) {
  const int n = nonneg_vars;
  if (n <= 0) return {};
  std::vector<Vec> rays;
  rays.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    rays.push_back(e);
  }
  for (int step = 0; step < static_cast<int>(equalities.size()); ++step) {
    const Vec& a = equalities[step];
    if (a.size() != n) throw DimensionMismatch("equality row size != variable count");
    double thr = 1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff());
    std::vector<Vec> zero_r, pos_r, neg_r;
    std::vector<double> pos_s, neg_s;
    for (const Vec& r : rays) {
      double s = a.dot(r);
      if (std::abs(s) <= thr) {
        zero_r.push_back(r);
      } else if (s > 0) {
        pos_r.push_back(r);
        pos_s.push_back(s);
      } else {
        neg_r.push_back(r);
        neg_s.push_back(s);
      }
    }
    std::vector<Vec> next = zero_r;
    for (size_t i = 0; i < pos_r.size(); ++i) {
      for (size_t j = 0; j < neg_r.size(); ++j) {
        // adjacency of the pair in the cone cut out so far
        std::vector<int> zu = zero_set(pos_r[i]), zv = zero_set(neg_r[j]), zz;
        std::set_intersection(zu.begin(), zu.end(), zv.begin(), zv.end(),
                              std::back_inserter(zz));
        if (tight_nullity(equalities, step, zz, n) != 2) continue;
        Vec comb = pos_s[i] * neg_r[j] - neg_s[j] * pos_r[i];
        next.push_back(normalize_ray(comb));
      }
    }
    rays = std::move(next);
  }
  // final extremality and cleanup pass
  std::vector<Vec> out;
  for (Vec& r : rays) {
    r = normalize_ray(r);
    if (r.cwiseAbs().maxCoeff() < 0.5) continue;
    if (r.minCoeff() < -1e-9) continue;
    if (tight_nullity(equalities, static_cast<int>(equalities.size()), zero_set(r),
                      n) != 1)
      continue;
    bool dup = false;
    for (const Vec& o : out)
      if ((o - r).cwiseAbs().maxCoeff() <= 1e-8) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(r);
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

// ---------------------------------------------------------------------------
// Polyhedron: H-representation by brute-force facet search
// ---------------------------------------------------------------------------

namespace {

struct LocalFrame {
  Vec p0;
  Mat span;        // d x k, orthonormal
  Mat complement;  // d x (d-k), orthonormal
};

LocalFrame local_frame(const std::vector<Vec>& verts, const std::vector<Vec>& rays,
                       const std::vector<Vec>& lines) {
  LocalFrame f;
  f.p0 = verts[0];
  int d = static_cast<int>(f.p0.size());
  std::vector<Vec> dirs;
  for (size_t i = 1; i < verts.size(); ++i) dirs.push_back(verts[i] - f.p0);
  for (const Vec& r : rays) dirs.push_back(r);
  for (const Vec& l : lines) dirs.push_back(l);
  auto [span, comp] = span_and_complement(cols_from(dirs, d), d);
  f.span = span;
  f.complement = comp;
  return f;
}

struct CandidateFacet {
  Vec n;  // local coords, unit
  double b;
};

void push_unique_facet(std::vector<CandidateFacet>& fs, Vec n, double b,
                       double scale) {
  double nn = n.norm();
  if (nn < 1e-12) return;
  n /= nn;
  b /= nn;
  for (const auto& f : fs)
    if ((f.n - n).cwiseAbs().maxCoeff() <= 1e-8 &&
        std::abs(f.b - b) <= 1e-8 * std::max(1.0, scale))
      return;
  fs.push_back({std::move(n), b});
}

// Iterate over all size-r subsets of {0..m-1}.
template <class F>
void for_subsets(int m, int r, F&& fn) {
  if (r < 0 || r > m) return;
  std::vector<int> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    int i = r - 1;
    while (i >= 0 && idx[i] == m - r + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

HRep compute_hrep(const std::vector<Vec>& verts, const std::vector<Vec>& rays,
                  const std::vector<Vec>& lines) {
  HRep h;
  const int d = static_cast<int>(verts[0].size());
  h.d = d;
  LocalFrame f = local_frame(verts, rays, lines);
  const int k = static_cast<int>(f.span.cols());

  // affine hull equalities
  h.Aeq = f.complement.transpose();
  h.beq = h.Aeq * f.p0;

  if (k == 0) {
    h.Ain = Mat(0, d);
    h.bin = Vec(0);
    return h;
  }

  // local coordinates
  std::vector<Vec> vloc, rloc, lloc;
  for (const Vec& v : verts) vloc.push_back(f.span.transpose() * (v - f.p0));
  for (const Vec& r : rays) rloc.push_back(f.span.transpose() * r);
  for (const Vec& l : lines) lloc.push_back(f.span.transpose() * l);
  double scale = std::max(max_abs(vloc), 1.0);

  // generator directions available for spanning facet hyperplanes
  struct Gen {
    Vec dir;     // direction relative to the anchor (for vertices: w - v)
    bool isdir;  // already a direction (ray)
    int vert;    // vertex index or -1
  };

  std::vector<CandidateFacet> facets;
  const int nl = static_cast<int>(lloc.size());
  const int need = k - 1 - nl;
  if (need >= 0) {
    for (size_t anchor = 0; anchor < vloc.size(); ++anchor) {
      std::vector<Vec> pool;
      for (size_t w = 0; w < vloc.size(); ++w)
        if (w != anchor) pool.push_back(vloc[w] - vloc[anchor]);
      for (const Vec& r : rloc) pool.push_back(r);
      const int m = static_cast<int>(pool.size());
      for_subsets(m, need, [&](const std::vector<int>& idx) {
        Vec n;
        if (need + nl == 0) {
          if (k != 1) return;
          n = Vec::Ones(1);
        } else {
          Mat D(k, need + nl);
          for (int j = 0; j < need; ++j) D.col(j) = pool[idx[j]];
          for (int j = 0; j < nl; ++j) D.col(need + j) = lloc[j];
          if (mat_rank(D, 1e-10) != k - 1) return;
          Eigen::JacobiSVD<Mat> svd(D.transpose(), Eigen::ComputeFullV);
          n = svd.matrixV().col(k - 1);
        }
        double b = n.dot(vloc[anchor]);
        double eps = 1e-9 * scale;
        bool all_le = true, all_ge = true;
        for (const Vec& v : vloc) {
          double s = n.dot(v) - b;
          if (s > eps) all_le = false;
          if (s < -eps) all_ge = false;
        }
        for (const Vec& r : rloc) {
          double s = n.dot(r);
          if (s > eps) all_le = false;
          if (s < -eps) all_ge = false;
        }
        if (all_le && all_ge) return;  // spans the whole hull; not a facet
        if (all_le) push_unique_facet(facets, n, b, scale);
        if (all_ge) push_unique_facet(facets, -n, -b, scale);
      });
    }
  }

  h.Ain = Mat(static_cast<int>(facets.size()), d);
  h.bin = Vec(static_cast<int>(facets.size()));
  for (int i = 0; i < static_cast<int>(facets.size()); ++i) {
    Vec a_glob = f.span * facets[i].n;
    h.Ain.row(i) = a_glob.transpose();
    h.bin[i] = facets[i].b + a_glob.dot(f.p0);
  }
  return h;
}

// Vertex/ray/line enumeration from an H-representation.
struct VRep {
  std::vector<Vec> verts, rays, lines;
};

VRep enumerate_hrep(const HRep& h) {
  VRep out;
  const int d = h.d;

  // solve the affine hull
  Mat K;    // d x k, basis of ker(Aeq)
  Vec p0;   // particular solution
  if (h.Aeq.rows() == 0) {
    K = Mat::Identity(d, d);
    p0 = Vec::Zero(d);
  } else {
    Eigen::JacobiSVD<Mat> svd(h.Aeq, Eigen::ComputeFullV | Eigen::ComputeFullU);
    p0 = svd.solve(h.beq);
    if ((h.Aeq * p0 - h.beq).cwiseAbs().maxCoeff() >
        1e-7 * std::max(1.0, h.beq.cwiseAbs().maxCoeff()))
      return out;  // inconsistent equalities: empty
    const auto& s = svd.singularValues();
    double thr = 1e-10 * std::max(1.0, s.size() ? s[0] : 0.0);
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s[i] > thr) ++r;
    K = svd.matrixV().rightCols(d - r);
  }
  const int k = static_cast<int>(K.cols());

  Mat C = h.Ain * K;
  Vec dd = h.bin - h.Ain * p0;
  // normalize rows
  for (int i = 0; i < C.rows(); ++i) {
    double n = C.row(i).norm();
    if (n > 1e-12) {
      C.row(i) /= n;
      dd[i] /= n;
    }
  }
  double scale = std::max(1.0, dd.size() ? dd.cwiseAbs().maxCoeff() : 0.0);
  double eps = 1e-9 * scale;

  if (k == 0) {
    bool ok = true;
    for (int i = 0; i < dd.size(); ++i)
      if (dd[i] < -eps) ok = false;
    if (ok) out.verts.push_back(p0);
    return out;
  }

  // lineality: kernel of C
  Mat L;
  if (C.rows() == 0) {
    L = Mat::Identity(k, k);
  } else {
    Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    double thr = 1e-10 * std::max(1.0, s.size() ? s[0] : 0.0);
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s[i] > thr) ++r;
    L = svd.matrixV().rightCols(k - r);
  }
  const int nl = static_cast<int>(L.cols());
  for (int j = 0; j < nl; ++j) out.lines.push_back(K * L.col(j));

  // quotient coordinates
  Mat M;
  if (nl == 0) {
    M = Mat::Identity(k, k);
  } else {
    Eigen::JacobiSVD<Mat> svd(L.transpose(), Eigen::ComputeFullV);
    M = svd.matrixV().rightCols(k - nl);
  }
  const int kz = static_cast<int>(M.cols());
  Mat Cz = C * M;
  const int m = static_cast<int>(Cz.rows());

  if (kz == 0) {
    bool ok = true;
    for (int i = 0; i < dd.size(); ++i)
      if (dd[i] < -eps) ok = false;
    if (ok) out.verts.push_back(p0);
    return out;
  }

  auto feasible_point = [&](const Vec& z) {
    for (int i = 0; i < m; ++i)
      if (Cz.row(i).dot(z) > dd[i] + eps) return false;
    return true;
  };
  auto feasible_dir = [&](const Vec& z) {
    for (int i = 0; i < m; ++i)
      if (Cz.row(i).dot(z) > eps) return false;
    return true;
  };

  std::vector<Vec> zverts, zrays;
  for_subsets(m, kz, [&](const std::vector<int>& idx) {
    Mat A(kz, kz);
    Vec b(kz);
    for (int j = 0; j < kz; ++j) {
      A.row(j) = Cz.row(idx[j]);
      b[j] = dd[idx[j]];
    }
    if (mat_rank(A, 1e-10) != kz) return;
    Vec z = A.fullPivLu().solve(b);
    if (!feasible_point(z)) return;
    for (const Vec& o : zverts)
      if ((o - z).cwiseAbs().maxCoeff() <= 1e-7 * std::max(1.0, scale)) return;
    zverts.push_back(z);
  });
  for_subsets(m, kz - 1, [&](const std::vector<int>& idx) {
    Vec w;
    if (idx.empty()) {
      if (kz != 1) return;
      w = Vec::Ones(1);
    } else {
      Mat A(static_cast<int>(idx.size()), kz);
      for (int j = 0; j < static_cast<int>(idx.size()); ++j)
        A.row(j) = Cz.row(idx[j]);
      if (mat_rank(A, 1e-10) != kz - 1) return;
      Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
      w = svd.matrixV().col(kz - 1);
    }
    for (Vec cand : {Vec(w), Vec(-w)}) {
      if (!feasible_dir(cand)) continue;
      // extremality: all tight rows must have rank kz-1
      std::vector<int> tight;
      for (int i = 0; i < m; ++i)
        if (std::abs(Cz.row(i).dot(cand)) <= eps) tight.push_back(i);
      Mat T(static_cast<int>(tight.size()), kz);
      for (int j = 0; j < static_cast<int>(tight.size()); ++j)
        T.row(j) = Cz.row(tight[j]);
      if (mat_rank(T, 1e-10) != kz - 1) continue;
      cand.normalize();
      bool dup = false;
      for (const Vec& o : zrays)
        if ((o - cand).cwiseAbs().maxCoeff() <= 1e-7) dup = true;
      if (!dup) zrays.push_back(cand);
    }
  });

  if (zverts.empty()) return out;  // empty (a pointed nonempty set has a vertex)
  for (const Vec& z : zverts) out.verts.push_back(p0 + K * (M * z));
  for (const Vec& z : zrays) out.rays.push_back(K * (M * z));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Polyhedron
// ---------------------------------------------------------------------------

Polyhedron::Polyhedron(std::vector<Vec> vertices, std::vector<Vec> rays)
    : verts_(std::move(vertices)), rays_(std::move(rays)) {
  canonicalize();
}

void Polyhedron::canonicalize() {
  if (verts_.empty()) {
    rays_.clear();
    lines_.clear();
    dim_ = -1;
    return;
  }
  HRep h = compute_hrep(verts_, rays_, lines_);
  VRep v = enumerate_hrep(h);
  verts_ = std::move(v.verts);
  rays_ = std::move(v.rays);
  lines_ = std::move(v.lines);
  std::sort(verts_.begin(), verts_.end(), lex_less);
  std::sort(rays_.begin(), rays_.end(), lex_less);
  std::sort(lines_.begin(), lines_.end(), lex_less);
  if (verts_.empty()) {
    dim_ = -1;
    hrep_.reset();
    return;
  }
  std::vector<Vec> dirs;
  for (size_t i = 1; i < verts_.size(); ++i) dirs.push_back(verts_[i] - verts_[0]);
  for (const Vec& r : rays_) dirs.push_back(r);
  for (const Vec& l : lines_) dirs.push_back(l);
  dim_ = dirs.empty() ? 0
                      : mat_rank(cols_from(dirs, ambient_dim()), 1e-10);
  hrep_ = std::move(h);
}

int Polyhedron::ambient_dim() const {
  return verts_.empty() ? 0 : static_cast<int>(verts_[0].size());
}

std::vector<Vec> Polyhedron::rays_with_lines() const {
  std::vector<Vec> out = rays_;
  for (const Vec& l : lines_) {
    out.push_back(l);
    out.push_back(-l);
  }
  return out;
}

const HRep& Polyhedron::hrep() const {
  if (!hrep_) hrep_ = compute_hrep(verts_, rays_, lines_);
  return *hrep_;
}

bool Polyhedron::contains(const Vec& p) const {
  if (empty()) return false;
  const HRep& h = hrep();
  double eps = geo_eps(p.cwiseAbs().maxCoeff() + max_abs(verts_));
  if (h.Aeq.rows() && (h.Aeq * p - h.beq).cwiseAbs().maxCoeff() > eps) return false;
  for (int i = 0; i < h.Ain.rows(); ++i)
    if (h.Ain.row(i).dot(p) > h.bin[i] + eps) return false;
  return true;
}

bool Polyhedron::recession_contains(const Vec& r) const {
  if (empty()) return false;
  const HRep& h = hrep();
  double eps = geo_eps(r.cwiseAbs().maxCoeff());
  if (h.Aeq.rows() && (h.Aeq * r).cwiseAbs().maxCoeff() > eps) return false;
  for (int i = 0; i < h.Ain.rows(); ++i)
    if (h.Ain.row(i).dot(r) > eps) return false;
  return true;
}

Vec Polyhedron::relint_point() const {
  if (empty()) throw DegenerateInput("relative interior of empty polyhedron");
  Vec p = Vec::Zero(ambient_dim());
  for (const Vec& v : verts_) p += v;
  p /= static_cast<double>(verts_.size());
  double step = 1.0 / (2.0 * (rays_.size() + 1));
  for (const Vec& r : rays_) p += step * r;
  return p;
}

AffineFlat Polyhedron::affine_hull() const {
  if (empty()) throw DegenerateInput("affine hull of empty polyhedron");
  LocalFrame f = local_frame(verts_, rays_, lines_);
  AffineFlat flat;
  flat.basepoint = f.p0;
  for (int j = 0; j < f.span.cols(); ++j) flat.directions.push_back(f.span.col(j));
  return flat;
}

bool Polyhedron::equals(const Polyhedron& o) const {
  if (empty() || o.empty()) return empty() == o.empty();
  if (verts_.size() != o.verts_.size() || rays_.size() != o.rays_.size() ||
      lines_.size() != o.lines_.size())
    return false;
  double scale = max_abs(verts_) + max_abs(o.verts_);
  auto match_sets = [&](const std::vector<Vec>& a, const std::vector<Vec>& b,
                        double s) {
    std::vector<bool> used(b.size(), false);
    for (const Vec& x : a) {
      bool ok = false;
      for (size_t j = 0; j < b.size(); ++j) {
        if (used[j]) continue;
        if (vec_near(x, b[j], s)) {
          used[j] = true;
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  };
  if (!match_sets(verts_, o.verts_, scale)) return false;
  if (!match_sets(rays_, o.rays_, 1.0)) return false;
  // line spans compared as subspaces
  if (!lines_.empty()) {
    std::vector<Vec> all = lines_;
    for (const Vec& l : o.lines_) all.push_back(l);
    if (mat_rank(cols_from(all, ambient_dim()), 1e-10) !=
        static_cast<int>(lines_.size()))
      return false;
  }
  return true;
}

bool Polyhedron::has_face(const Polyhedron& face) const {
  if (face.empty()) return true;
  if (empty()) return false;
  for (const Vec& v : face.vertices())
    if (!contains(v)) return false;
  for (const Vec& r : face.rays())
    if (!recession_contains(r)) return false;
  for (const Vec& l : face.lines())
    if (!recession_contains(l) || !recession_contains(Vec(-l))) return false;
  Polyhedron mf = minimal_face_containing(face.relint_point());
  return mf.equals(face);
}

Polyhedron Polyhedron::minimal_face_containing(const Vec& p) const {
  if (!contains(p)) throw PointOutsideCarrier("point not in polyhedron");
  const HRep& h = hrep();
  double eps = geo_eps(p.cwiseAbs().maxCoeff() + max_abs(verts_));
  std::vector<int> tight;
  for (int i = 0; i < h.Ain.rows(); ++i)
    if (std::abs(h.Ain.row(i).dot(p) - h.bin[i]) <= eps) tight.push_back(i);
  if (tight.empty()) return *this;
  HRep hf = h;
  int ne = static_cast<int>(h.Aeq.rows());
  hf.Aeq.conservativeResize(ne + static_cast<int>(tight.size()), h.d);
  hf.beq.conservativeResize(ne + static_cast<int>(tight.size()));
  for (int j = 0; j < static_cast<int>(tight.size()); ++j) {
    hf.Aeq.row(ne + j) = h.Ain.row(tight[j]);
    hf.beq[ne + j] = h.bin[tight[j]];
  }
  return from_hrep(hf);
}

std::vector<Polyhedron> Polyhedron::proper_faces() const {
  std::vector<Polyhedron> acc;
  if (empty() || dim() == 0) return acc;
  const HRep& h = hrep();
  for (int i = 0; i < h.Ain.rows(); ++i) {
    HRep hf = h;
    int ne = static_cast<int>(h.Aeq.rows());
    hf.Aeq.conservativeResize(ne + 1, h.d);
    hf.beq.conservativeResize(ne + 1);
    hf.Aeq.row(ne) = h.Ain.row(i);
    hf.beq[ne] = h.bin[i];
    Polyhedron facet = from_hrep(hf);
    if (facet.empty()) continue;
    bool dup = false;
    for (const auto& f : acc)
      if (f.equals(facet)) dup = true;
    if (dup) continue;
    std::vector<Polyhedron> below = facet.proper_faces();
    acc.push_back(std::move(facet));
    for (auto& f : below) {
      bool d2 = false;
      for (const auto& g : acc)
        if (g.equals(f)) d2 = true;
      if (!d2) acc.push_back(std::move(f));
    }
  }
  return acc;
}

double Polyhedron::ray_hit(const Vec& p, const Vec& dir) const {
  const HRep& h = hrep();
  double eps = geo_eps(p.cwiseAbs().maxCoeff());
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < h.Ain.rows(); ++i) {
    double ad = h.Ain.row(i).dot(dir);
    if (ad > eps) {
      double t = (h.bin[i] - h.Ain.row(i).dot(p)) / ad;
      best = std::min(best, std::max(0.0, t));
    }
  }
  return best;
}

namespace {

// k-volume of a bounded polytope inside its affine hull (standard metric).
double polytope_volume(const Polyhedron& q, int k) {
  if (q.empty()) return 0.0;
  if (q.dim() < k) return 0.0;
  if (k == 0) return 1.0;
  if (k == 1) {
    double len = 0;
    const auto& v = q.vertices();
    for (size_t i = 0; i < v.size(); ++i)
      for (size_t j = i + 1; j < v.size(); ++j)
        len = std::max(len, (v[i] - v[j]).norm());
    return len;
  }
  // fan from the centroid over facets
  Vec c = Vec::Zero(q.ambient_dim());
  for (const Vec& v : q.vertices()) c += v;
  c /= static_cast<double>(q.vertices().size());
  double vol = 0;
  const HRep& h = q.hrep();
  for (int i = 0; i < h.Ain.rows(); ++i) {
    HRep hf = h;
    int ne = static_cast<int>(h.Aeq.rows());
    hf.Aeq.conservativeResize(ne + 1, h.d);
    hf.beq.conservativeResize(ne + 1);
    hf.Aeq.row(ne) = h.Ain.row(i);
    hf.beq[ne] = h.bin[i];
    Polyhedron facet = Polyhedron::from_hrep(hf);
    if (facet.empty() || facet.dim() < k - 1) continue;
    double height = std::abs(h.bin[i] - h.Ain.row(i).dot(c)) / h.Ain.row(i).norm();
    vol += height * polytope_volume(facet, k - 1) / static_cast<double>(k);
  }
  return vol;
}

}  // namespace

double Polyhedron::truncated_volume(double lo, double hi) const {
  if (empty()) return 0.0;
  const int d = ambient_dim();
  Mat box_a(2 * d, d);
  Vec box_b(2 * d);
  box_a.topRows(d) = Mat::Identity(d, d);
  box_b.head(d).setConstant(hi);
  box_a.bottomRows(d) = -Mat::Identity(d, d);
  box_b.tail(d).setConstant(-lo);
  auto q = intersect_hrep(*this, box_a, box_b);
  if (!q) return 0.0;
  return polytope_volume(*q, dim());
}

Polyhedron Polyhedron::from_hrep(const HRep& h) {
  VRep v = enumerate_hrep(h);
  Polyhedron p;
  p.verts_ = std::move(v.verts);
  p.rays_ = std::move(v.rays);
  p.lines_ = std::move(v.lines);
  if (!p.verts_.empty()) p.canonicalize();
  return p;
}

namespace {

Mat vstack(const Mat& a, const Mat& b, int d) {
  Mat m(a.rows() + b.rows(), d);
  if (a.rows()) m.topRows(a.rows()) = a;
  if (b.rows()) m.bottomRows(b.rows()) = b;
  return m;
}

Vec vcat(const Vec& a, const Vec& b) {
  Vec v(a.size() + b.size());
  if (a.size()) v.head(a.size()) = a;
  if (b.size()) v.tail(b.size()) = b;
  return v;
}

}  // namespace

Polyhedron Polyhedron::intersect(const Polyhedron& a, const Polyhedron& b) {
  if (a.empty() || b.empty()) return Polyhedron();
  const HRep& ha = a.hrep();
  const HRep& hb = b.hrep();
  HRep h;
  h.d = ha.d;
  h.Aeq = vstack(ha.Aeq, hb.Aeq, h.d);
  h.beq = vcat(ha.beq, hb.beq);
  h.Ain = vstack(ha.Ain, hb.Ain, h.d);
  h.bin = vcat(ha.bin, hb.bin);
  return from_hrep(h);
}

std::optional<Polyhedron> Polyhedron::intersect_hrep(const Polyhedron& a,
                                                     const Mat& Ain,
                                                     const Vec& bin) {
  if (a.empty()) return std::nullopt;
  const HRep& ha = a.hrep();
  HRep h;
  h.d = ha.d;
  h.Aeq = ha.Aeq;
  h.beq = ha.beq;
  h.Ain = vstack(ha.Ain, Ain, h.d);
  h.bin = vcat(ha.bin, bin);
  Polyhedron p = from_hrep(h);
  if (p.empty()) return std::nullopt;
  return p;
}

}  // namespace pcx
