#include "nashapprox/geometry.hpp"

#include "nashapprox/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace nashapprox {

using Index = Eigen::Index;

namespace {

constexpr double kDdTol = 1e-10;

class Bits {
 public:
  explicit Bits(std::size_t n = 0) : w_((n + 63) / 64, 0) {}
  void set(std::size_t i) { w_[i / 64] |= (uint64_t{1} << (i % 64)); }
  bool test(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1U; }
  Bits operator&(const Bits& o) const {
    Bits r;
    r.w_.resize(w_.size());
    for (std::size_t k = 0; k < w_.size(); ++k) r.w_[k] = w_[k] & o.w_[k];
    return r;
  }
  bool subset_of(const Bits& o) const {
    for (std::size_t k = 0; k < w_.size(); ++k)
      if (w_[k] & ~o.w_[k]) return false;
    return true;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(__builtin_popcountll(w));
    return c;
  }

 private:
  std::vector<uint64_t> w_;
};

struct DdRay {
  Vec t;
  Bits zeros;
};

void scale_inf(Vec& v) {
  const double m = v.cwiseAbs().maxCoeff();
  if (m > 0) v /= m;
}

bool same_point(const Vec& a, const Vec& b, double tol) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

std::vector<Vec> dedupe(std::vector<Vec> pts, double tol) {
  std::vector<Vec> out;
  for (auto& p : pts) {
    bool dup = false;
    for (const auto& q : out) dup = dup || same_point(p, q, tol);
    if (!dup) out.push_back(std::move(p));
  }
  return out;
}

// Orthonormal bases of span(directions) and its complement.
void span_split(const Mat& D, Index n, Mat* U, Mat* W) {
  if (D.cols() == 0) {
    *U = Mat(n, 0);
    *W = Mat::Identity(n, n);
    return;
  }
  Eigen::JacobiSVD<Mat> svd(D, Eigen::ComputeFullU);
  const Vec& s = svd.singularValues();
  const double tol = kGeoTol * std::max(1.0, s.size() ? s(0) : 0.0);
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) ++r;
  *U = svd.matrixU().leftCols(r);
  *W = svd.matrixU().rightCols(n - r);
  for (Index i = 0; i < W->size(); ++i)
    if (std::abs(W->data()[i]) < 1e-15) W->data()[i] = 0.0;
}

Index matrix_rank(const Mat& M, double tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(M);
  Index r = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++r;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------------------------------------------
// Polytope

Polytope Polytope::from_vertices(std::vector<Vec> vertices, std::vector<Vec> rays) {
  Polytope p;
  if (vertices.empty()) fail(ErrorKind::Invalid, "from_vertices: no vertices");
  p.dim = static_cast<std::size_t>(vertices.front().size());
  for (const auto& v : vertices)
    if (static_cast<std::size_t>(v.size()) != p.dim) fail(ErrorKind::Dimension, "vertex dimensions differ");
  for (const auto& r : rays)
    if (static_cast<std::size_t>(r.size()) != p.dim) fail(ErrorKind::Dimension, "ray dimension differs");
  p.vrep = VRep{std::move(vertices), std::move(rays)};
  return p;
}

Polytope Polytope::from_halfspaces(std::size_t dim, std::vector<Halfspace> hs) {
  Polytope p;
  p.dim = dim;
  for (const auto& h : hs) {
    if (static_cast<std::size_t>(h.normal.size()) != dim) fail(ErrorKind::Dimension, "halfspace dimension differs");
    if (h.normal.cwiseAbs().maxCoeff() == 0.0) fail(ErrorKind::Invalid, "halfspace with zero normal");
  }
  p.hrep = std::move(hs);
  return p;
}

Polytope Polytope::box(const Vec& lower, const Vec& upper) {
  const auto n = static_cast<std::size_t>(lower.size());
  std::vector<Halfspace> hs;
  for (std::size_t k = 0; k < n; ++k) {
    Vec e = Vec::Zero(lower.size());
    e(static_cast<Index>(k)) = 1.0;
    hs.push_back({e, upper(static_cast<Index>(k))});
    hs.push_back({-e, -lower(static_cast<Index>(k))});
  }
  return from_halfspaces(n, std::move(hs));
}

Polytope Polytope::empty(std::size_t dim) {
  Polytope p;
  p.dim = dim;
  Vec e = Vec::Zero(static_cast<Index>(dim));
  e(0) = 1.0;
  p.hrep = std::vector<Halfspace>{{e, -1.0}, {-e, -1.0}};
  p.vrep = VRep{};
  return p;
}

const std::vector<Halfspace>& Polytope::halfspaces() const {
  if (!hrep) fail(ErrorKind::Invalid, "polytope has no halfspace representation");
  return *hrep;
}

const std::vector<Vec>& Polytope::vertices() const {
  if (!vrep) fail(ErrorKind::Invalid, "polytope has no vertex representation");
  return vrep->vertices;
}

const std::vector<Vec>& Polytope::rays() const {
  if (!vrep) fail(ErrorKind::Invalid, "polytope has no vertex representation");
  return vrep->rays;
}

bool Polytope::is_empty() const { return vertices().empty(); }

bool Polytope::bounded() const { return rays().empty(); }

bool Polytope::contains(const Vec& y, double tol) const {
  if (static_cast<std::size_t>(y.size()) != dim) fail(ErrorKind::Dimension, "point dimension differs");
  if (hrep) {
    for (const auto& h : *hrep)
      if (h.slack(y) < -tol) return false;
    return true;
  }
  if (vrep->vertices.empty()) return false;
  return l1_distance(y, *this).distance <= tol;
}

Mat Polytope::A() const {
  const auto& hs = halfspaces();
  Mat a(static_cast<Index>(hs.size()), static_cast<Index>(dim));
  for (std::size_t k = 0; k < hs.size(); ++k) a.row(static_cast<Index>(k)) = hs[k].normal.transpose();
  return a;
}

Vec Polytope::b() const {
  const auto& hs = halfspaces();
  Vec v(static_cast<Index>(hs.size()));
  for (std::size_t k = 0; k < hs.size(); ++k) v(static_cast<Index>(k)) = hs[k].offset;
  return v;
}

std::pair<Vec, Vec> Polytope::bounding_box() const {
  const auto& vs = vertices();
  if (vs.empty() || !bounded()) fail(ErrorKind::Invalid, "bounding box of an empty or unbounded set");
  Vec lo = vs.front(), hi = vs.front();
  for (const auto& v : vs) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

int Polytope::affine_dim() const {
  const auto& vs = vertices();
  if (vs.empty()) return -1;
  Mat D(static_cast<Index>(dim), static_cast<Index>(vs.size() - 1 + rays().size()));
  Index c = 0;
  for (std::size_t k = 1; k < vs.size(); ++k) D.col(c++) = vs[k] - vs[0];
  for (const auto& r : rays()) D.col(c++) = r;
  Mat U, W;
  span_split(D, static_cast<Index>(dim), &U, &W);
  return static_cast<int>(U.cols());
}

// ---------------------------------------------------------------------------------------------------------------
// Double description

ConeGenerators cone_generators(const Mat& Min) {
  const Index D = Min.cols();
  std::vector<Index> keep;
  for (Index i = 0; i < Min.rows(); ++i)
    if (Min.row(i).norm() > 1e-14) keep.push_back(i);
  Mat M(static_cast<Index>(keep.size()), D);
  for (std::size_t i = 0; i < keep.size(); ++i) M.row(static_cast<Index>(i)) = Min.row(keep[i]) / Min.row(keep[i]).norm();

  ConeGenerators out;
  if (M.rows() == 0) {
    out.lineality = Mat::Identity(D, D);
    return out;
  }
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > 1e-12 * std::max(1.0, s(0))) ++r;
  out.lineality = svd.matrixV().rightCols(D - r);
  if (r == 0) return out;
  const Mat Q = svd.matrixV().leftCols(r);
  const Mat Mr = M * Q;
  const Index rows = Mr.rows();

  Eigen::ColPivHouseholderQR<Mat> qr(Mr.transpose());
  std::vector<Index> basis;
  for (Index j = 0; j < r; ++j) basis.push_back(qr.colsPermutation().indices()(j));
  Mat B(r, r);
  for (Index j = 0; j < r; ++j) B.row(j) = Mr.row(basis[static_cast<std::size_t>(j)]);
  const Mat Binv = B.inverse();

  const auto nrows = static_cast<std::size_t>(rows);
  std::vector<DdRay> rays;
  for (Index j = 0; j < r; ++j) {
    DdRay ray{Binv.col(j), Bits(nrows)};
    scale_inf(ray.t);
    for (Index k = 0; k < r; ++k)
      if (k != j) ray.zeros.set(static_cast<std::size_t>(basis[static_cast<std::size_t>(k)]));
    rays.push_back(std::move(ray));
  }
  std::vector<bool> in_basis(nrows, false);
  for (auto b : basis) in_basis[static_cast<std::size_t>(b)] = true;

  for (Index i = 0; i < rows; ++i) {
    if (in_basis[static_cast<std::size_t>(i)]) continue;
    const auto row = Mr.row(i);
    std::vector<double> val(rays.size());
    std::vector<std::size_t> pos, neg;
    for (std::size_t k = 0; k < rays.size(); ++k) {
      val[k] = row.dot(rays[k].t);
      if (val[k] > kDdTol)
        pos.push_back(k);
      else if (val[k] < -kDdTol)
        neg.push_back(k);
    }
    if (neg.empty()) {
      for (std::size_t k = 0; k < rays.size(); ++k)
        if (val[k] <= kDdTol) rays[k].zeros.set(static_cast<std::size_t>(i));
      continue;
    }
    std::vector<DdRay> next;
    for (std::size_t p : pos)
      for (std::size_t n : neg) {
        Bits z = rays[p].zeros & rays[n].zeros;
        if (z.count() + 2 < static_cast<std::size_t>(r)) continue;
        bool adjacent = true;
        for (std::size_t q = 0; q < rays.size() && adjacent; ++q)
          if (q != p && q != n && z.subset_of(rays[q].zeros)) adjacent = false;
        if (!adjacent) continue;
        DdRay nr{val[p] * rays[n].t - val[n] * rays[p].t, z};
        scale_inf(nr.t);
        nr.zeros.set(static_cast<std::size_t>(i));
        next.push_back(std::move(nr));
      }
    std::vector<DdRay> kept;
    for (std::size_t k = 0; k < rays.size(); ++k) {
      if (val[k] < -kDdTol) continue;
      if (val[k] <= kDdTol) rays[k].zeros.set(static_cast<std::size_t>(i));
      kept.push_back(std::move(rays[k]));
    }
    for (auto& nr : next) kept.push_back(std::move(nr));
    rays = std::move(kept);
  }
  std::vector<Vec> gens;
  for (auto& ray : rays) {
    Vec x = Q * ray.t;
    scale_inf(x);
    gens.push_back(x);
  }
  out.rays = dedupe(std::move(gens), 1e-9);
  return out;
}

// ---------------------------------------------------------------------------------------------------------------
// Conversions

std::vector<Halfspace> normalize_halfspaces(std::vector<Halfspace> hs) {
  std::vector<Halfspace> out;
  for (auto& h : hs) {
    const double n = h.normal.norm();
    if (n == 0.0) fail(ErrorKind::Invalid, "halfspace with zero normal");
    h.normal /= n;
    h.offset /= n;
    bool merged = false;
    for (auto& o : out) {
      if ((o.normal - h.normal).cwiseAbs().maxCoeff() <= 1e-12) {
        o.offset = std::min(o.offset, h.offset);
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(std::move(h));
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if ((out[i].normal + out[j].normal).cwiseAbs().maxCoeff() > kGeoTol) continue;
      if (std::abs(out[i].offset + out[j].offset) > kGeoTol) continue;
      out[j].normal = -out[i].normal;
      out[j].offset = -out[i].offset;
    }
  return out;
}

Polytope to_vrep(const Polytope& p) {
  if (!p.hrep) fail(ErrorKind::Invalid, "to_vrep needs a halfspace representation");
  Polytope out;
  out.dim = p.dim;
  auto hs = normalize_halfspaces(*p.hrep);
  const Index n = static_cast<Index>(p.dim);
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = i + 1; j < hs.size(); ++j)
      if ((hs[i].normal + hs[j].normal).cwiseAbs().maxCoeff() <= 1e-12 && hs[i].offset + hs[j].offset < -kGeoTol) {
        out.hrep = hs;
        out.vrep = VRep{};
        return out;
      }
  Mat M(static_cast<Index>(hs.size()) + 1, n + 1);
  for (std::size_t k = 0; k < hs.size(); ++k) {
    M(static_cast<Index>(k), 0) = hs[k].offset;
    M.row(static_cast<Index>(k)).tail(n) = -hs[k].normal.transpose();
  }
  M.row(M.rows() - 1).setZero();
  M(M.rows() - 1, 0) = 1.0;
  ConeGenerators g = cone_generators(M);
  if (g.lineality.cols() > 0) fail(ErrorKind::Assumption, "polyhedron contains a line");
  VRep v;
  for (const auto& ray : g.rays) {
    if (ray(0) > 1e-12)
      v.vertices.push_back(ray.tail(n) / ray(0));
    else {
      Vec d = ray.tail(n);
      if (d.cwiseAbs().maxCoeff() > 1e-12) {
        scale_inf(d);
        v.rays.push_back(d);
      }
    }
  }
  v.vertices = dedupe(std::move(v.vertices), kGeoTol);
  v.rays = dedupe(std::move(v.rays), kGeoTol);
  if (v.vertices.empty()) v.rays.clear();
  out.hrep = std::move(hs);
  out.vrep = std::move(v);
  return out;
}

Polytope to_hrep(const Polytope& p) {
  if (!p.vrep) fail(ErrorKind::Invalid, "to_hrep needs a vertex representation");
  const Index n = static_cast<Index>(p.dim);
  for (const auto& v : p.vrep->vertices)
    if (v.size() != n) fail(ErrorKind::Dimension, "vertex dimensions differ");
  for (const auto& r : p.vrep->rays)
    if (r.size() != n) fail(ErrorKind::Dimension, "ray dimensions differ");
  if (p.vrep->vertices.empty()) return Polytope::empty(p.dim);

  const auto& V = p.vrep->vertices;
  std::vector<Vec> R;
  for (const auto& r : p.vrep->rays)
    if (r.cwiseAbs().maxCoeff() > 1e-14) R.push_back(r);
  const Vec v0 = V.front();
  Mat Dm(n, static_cast<Index>(V.size() - 1 + R.size()));
  Index c = 0;
  for (std::size_t k = 1; k < V.size(); ++k) Dm.col(c++) = V[k] - v0;
  for (const auto& r : R) Dm.col(c++) = r;
  Mat U, W;
  span_split(Dm, n, &U, &W);
  const Index k = U.cols();

  std::vector<Halfspace> hs;
  std::vector<Vec> local_normals;  // a in local coordinates (unit)
  std::vector<double> local_offsets;
  if (k > 0) {
    Mat G(static_cast<Index>(V.size() + R.size()), k + 1);
    Index row = 0;
    for (const auto& v : V) {
      G(row, 0) = 1.0;
      G.row(row++).tail(k) = (U.transpose() * (v - v0)).transpose();
    }
    for (const auto& r : R) {
      G(row, 0) = 0.0;
      G.row(row++).tail(k) = (U.transpose() * r).transpose();
    }
    ConeGenerators dual = cone_generators(G);
    for (const auto& ray : dual.rays) {
      Vec a = ray.tail(k);
      const double na = a.norm();
      if (na <= 1e-12) continue;
      a /= na;
      const double alpha = ray(0) / na;
      const Vec ua = U * a;
      hs.push_back({-ua, alpha - ua.dot(v0)});
      local_normals.push_back(a);
      local_offsets.push_back(alpha);
    }
  }
  for (Index j = 0; j < W.cols(); ++j) {
    const Vec w = W.col(j);
    hs.push_back({w, w.dot(v0)});
    hs.push_back({-w, -w.dot(v0)});
  }

  // Keep only extreme generators.
  VRep vr;
  auto tight_rank = [&](const Vec& loc, bool is_ray) {
    std::vector<Vec> tight;
    for (std::size_t f = 0; f < local_normals.size(); ++f) {
      const double s = local_normals[f].dot(loc) + (is_ray ? 0.0 : local_offsets[f]);
      if (std::abs(s) <= kGeoTol * std::max(1.0, loc.cwiseAbs().maxCoeff())) tight.push_back(local_normals[f]);
    }
    Mat T(static_cast<Index>(tight.size()), k);
    for (std::size_t f = 0; f < tight.size(); ++f) T.row(static_cast<Index>(f)) = tight[f].transpose();
    return matrix_rank(T, 1e-9);
  };
  for (const auto& v : V) {
    const Vec loc = U.transpose() * (v - v0);
    if (k == 0 || tight_rank(loc, false) == k) vr.vertices.push_back(v);
  }
  for (const auto& r : R) {
    const Vec loc = U.transpose() * r;
    if (loc.norm() <= 1e-12) continue;
    if (tight_rank(loc, true) == k - 1) {
      Vec d = r;
      scale_inf(d);
      vr.rays.push_back(d);
    }
  }
  vr.vertices = dedupe(std::move(vr.vertices), kGeoTol);
  vr.rays = dedupe(std::move(vr.rays), kGeoTol);
  Polytope out;
  out.dim = p.dim;
  out.hrep = normalize_halfspaces(std::move(hs));
  out.vrep = std::move(vr);
  return out;
}

Polytope complete(const Polytope& p) {
  if (p.vrep && !p.hrep) return to_hrep(p);
  if (p.hrep && !p.vrep) {
    Polytope v = to_vrep(p);
    if (v.is_empty()) return Polytope::empty(p.dim);
    return to_hrep(v);
  }
  return p;
}

// ---------------------------------------------------------------------------------------------------------------
// Faces

Incidence::Incidence(const Polytope& p, double tol) : p_(&p) {
  const auto& hs = p.halfspaces();
  const auto& V = p.vertices();
  const auto& R = p.rays();
  vt_.assign(hs.size(), std::vector<bool>(V.size(), false));
  rt_.assign(hs.size(), std::vector<bool>(R.size(), false));
  for (std::size_t h = 0; h < hs.size(); ++h) {
    for (std::size_t v = 0; v < V.size(); ++v)
      vt_[h][v] = std::abs(hs[h].slack(V[v])) <= tol * std::max(1.0, V[v].cwiseAbs().maxCoeff());
    for (std::size_t r = 0; r < R.size(); ++r) rt_[h][r] = std::abs(hs[h].normal.dot(R[r])) <= tol;
  }
}

FaceDescriptor Incidence::whole() const {
  FaceDescriptor f;
  f.vertices.resize(p_->vertices().size());
  std::iota(f.vertices.begin(), f.vertices.end(), 0);
  f.rays.resize(p_->rays().size());
  std::iota(f.rays.begin(), f.rays.end(), 0);
  fill_active(f);
  return f;
}

void Incidence::fill_active(FaceDescriptor& f) const {
  f.active.clear();
  for (std::size_t h = 0; h < vt_.size(); ++h) {
    bool all = true;
    for (auto v : f.vertices) all = all && vt_[h][v];
    for (auto r : f.rays) all = all && rt_[h][r];
    if (all) f.active.push_back(h);
  }
}

FaceDescriptor Incidence::restrict(std::size_t h, const FaceDescriptor* within) const {
  FaceDescriptor base = within ? *within : whole();
  FaceDescriptor f;
  for (auto v : base.vertices)
    if (vt_[h][v]) f.vertices.push_back(v);
  for (auto r : base.rays)
    if (rt_[h][r]) f.rays.push_back(r);
  fill_active(f);
  return f;
}

namespace {

bool generator_subset(const FaceDescriptor& a, const FaceDescriptor& b) {
  return std::includes(b.vertices.begin(), b.vertices.end(), a.vertices.begin(), a.vertices.end()) &&
         std::includes(b.rays.begin(), b.rays.end(), a.rays.begin(), a.rays.end());
}

bool same_generators(const FaceDescriptor& a, const FaceDescriptor& b) {
  return a.vertices == b.vertices && a.rays == b.rays;
}

}  // namespace

std::vector<FaceDescriptor> subfaces(const Incidence& inc, const FaceDescriptor* face) {
  const FaceDescriptor base = face ? *face : inc.whole();
  std::vector<FaceDescriptor> cand;
  std::set<std::size_t> act(base.active.begin(), base.active.end());
  for (std::size_t h = 0; h < inc.n_halfspaces(); ++h) {
    if (act.count(h)) continue;
    FaceDescriptor f = inc.restrict(h, &base);
    if (f.vertices.empty() || same_generators(f, base)) continue;
    bool dup = false;
    for (const auto& c : cand) dup = dup || same_generators(c, f);
    if (!dup) cand.push_back(std::move(f));
  }
  std::vector<FaceDescriptor> out;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < cand.size() && maximal; ++j)
      if (i != j && generator_subset(cand[i], cand[j]) && !same_generators(cand[i], cand[j])) maximal = false;
    if (maximal) out.push_back(cand[i]);
  }
  return out;
}

std::vector<FaceDescriptor> faces(const Polytope& p0) {
  const Polytope p = complete(p0);
  if (p.is_empty()) return {};
  Incidence inc(p);
  std::vector<FaceDescriptor> out;
  std::set<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> seen;
  std::vector<FaceDescriptor> queue = subfaces(inc);
  while (!queue.empty()) {
    FaceDescriptor f = std::move(queue.back());
    queue.pop_back();
    if (!seen.insert({f.vertices, f.rays}).second) continue;
    for (auto& s : subfaces(inc, &f)) queue.push_back(std::move(s));
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(), [](const FaceDescriptor& a, const FaceDescriptor& b) {
    if (a.vertices.size() + a.rays.size() != b.vertices.size() + b.rays.size())
      return a.vertices.size() + a.rays.size() > b.vertices.size() + b.rays.size();
    return std::tie(a.vertices, a.rays) < std::tie(b.vertices, b.rays);
  });
  return out;
}

Polytope face_polytope(const Polytope& parent, const FaceDescriptor& f) {
  std::vector<Vec> V, R;
  for (auto v : f.vertices) V.push_back(parent.vertices()[v]);
  for (auto r : f.rays) R.push_back(parent.rays()[r]);
  return to_hrep(Polytope::from_vertices(std::move(V), std::move(R)));
}

// ---------------------------------------------------------------------------------------------------------------
// Intersections and distances

std::vector<Halfspace> remove_redundant(const std::vector<Halfspace>& hs0, std::size_t dim) {
  std::vector<Halfspace> hs = normalize_halfspaces(hs0);
  const Index n = static_cast<Index>(dim);
  std::vector<bool> alive(hs.size(), true);
  auto has_opposite = [&](std::size_t i) {
    for (std::size_t j = 0; j < hs.size(); ++j)
      if (j != i && alive[j] && hs[j].normal == -hs[i].normal && hs[j].offset == -hs[i].offset) return true;
    return false;
  };
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (has_opposite(i)) continue;
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < hs.size(); ++j)
      if (j != i && alive[j]) others.push_back(j);
    Mat A(static_cast<Index>(others.size()), n);
    Vec b(static_cast<Index>(others.size()));
    for (std::size_t r = 0; r < others.size(); ++r) {
      A.row(static_cast<Index>(r)) = hs[others[r]].normal.transpose();
      b(static_cast<Index>(r)) = hs[others[r]].offset;
    }
    NlpSolution s = lp_solve(-hs[i].normal, A, b);
    if (s.status == SolveStatus::Optimal && -s.value <= hs[i].offset + 1e-12) alive[i] = false;
  }
  std::vector<Halfspace> out;
  for (std::size_t i = 0; i < hs.size(); ++i)
    if (alive[i]) out.push_back(hs[i]);
  return out;
}

std::optional<Polytope> intersect(const Polytope& a, const Polytope& b) {
  if (a.dim != b.dim) fail(ErrorKind::Dimension, "intersect: dimensions differ");
  const Polytope ha = a.hrep ? a : to_hrep(a);
  const Polytope hb = b.hrep ? b : to_hrep(b);
  if ((ha.vrep && ha.vrep->vertices.empty()) || (hb.vrep && hb.vrep->vertices.empty())) return std::nullopt;
  std::vector<Halfspace> hs = *ha.hrep;
  hs.insert(hs.end(), hb.hrep->begin(), hb.hrep->end());
  hs = normalize_halfspaces(std::move(hs));
  Polytope p = Polytope::from_halfspaces(a.dim, hs);
  NlpSolution f = lp_solve(Vec::Zero(static_cast<Index>(a.dim)), p.A(), p.b());
  if (f.status == SolveStatus::Infeasible) return std::nullopt;
  p.hrep = remove_redundant(hs, a.dim);
  Polytope v = to_vrep(p);
  if (v.is_empty()) return std::nullopt;
  return v;
}

Polytope minkowski_l1_ball(const Polytope& p0, double r) {
  if (r < 0) fail(ErrorKind::Invalid, "minkowski_l1_ball: negative radius");
  const Polytope p = p0.vrep ? p0 : to_vrep(p0);
  if (!p.bounded()) fail(ErrorKind::Invalid, "minkowski_l1_ball: unbounded polytope");
  if (p.is_empty()) return Polytope::empty(p.dim);
  if (r == 0) return complete(p);
  std::vector<Vec> pts;
  for (const auto& v : p.vertices())
    for (std::size_t k = 0; k < p.dim; ++k)
      for (double s : {-r, r}) {
        Vec w = v;
        w(static_cast<Index>(k)) += s;
        pts.push_back(w);
      }
  return to_hrep(Polytope::from_vertices(std::move(pts)));
}

L1Distance l1_distance(const Vec& q, const Polytope& p) {
  const Index n = static_cast<Index>(p.dim);
  if (q.size() != n) fail(ErrorKind::Dimension, "l1_distance: dimension differs");
  L1Distance out;
  if (p.vrep) {
    const auto& V = p.vertices();
    if (V.empty()) fail(ErrorKind::Invalid, "l1_distance to an empty polytope");
    if (!p.bounded()) fail(ErrorKind::Invalid, "l1_distance needs a bounded polytope");
    const Index K = static_cast<Index>(V.size());
    // Variables (lambda, t): min 1·t,  V lambda - t <= q,  -V lambda - t <= -q,  lambda >= 0,  1·lambda = 1.
    Mat Vm(n, K);
    for (Index k = 0; k < K; ++k) Vm.col(k) = V[static_cast<std::size_t>(k)];
    Mat A = Mat::Zero(2 * n + K, K + n);
    Vec b = Vec::Zero(2 * n + K);
    A.block(0, 0, n, K) = Vm;
    A.block(0, K, n, n) = -Mat::Identity(n, n);
    b.head(n) = q;
    A.block(n, 0, n, K) = -Vm;
    A.block(n, K, n, n) = -Mat::Identity(n, n);
    b.segment(n, n) = -q;
    A.block(2 * n, 0, K, K) = -Mat::Identity(K, K);
    Mat E = Mat::Zero(1, K + n);
    E.leftCols(K).setOnes();
    Vec c = Vec::Zero(K + n);
    c.tail(n).setOnes();
    NlpSolution s = lp_solve(c, A, b, E, Vec::Ones(1));
    if (s.status != SolveStatus::Optimal) fail(ErrorKind::Invalid, "l1_distance: LP " + to_string(s.status));
    out.distance = std::max(0.0, s.value);
    out.nearest = Vm * s.x.head(K);
    out.direction = s.ineq_multipliers.head(n) - s.ineq_multipliers.segment(n, n);
    return out;
  }
  const auto& hs = p.halfspaces();
  const Index m = static_cast<Index>(hs.size());
  // Variables (x, t): A x <= b,  x - t <= q,  -x - t <= -q.
  Mat A = Mat::Zero(m + 2 * n, 2 * n);
  Vec b = Vec::Zero(m + 2 * n);
  A.block(0, 0, m, n) = p.A();
  b.head(m) = p.b();
  A.block(m, 0, n, n) = Mat::Identity(n, n);
  A.block(m, n, n, n) = -Mat::Identity(n, n);
  b.segment(m, n) = q;
  A.block(m + n, 0, n, n) = -Mat::Identity(n, n);
  A.block(m + n, n, n, n) = -Mat::Identity(n, n);
  b.segment(m + n, n) = -q;
  Vec c = Vec::Zero(2 * n);
  c.tail(n).setOnes();
  NlpSolution s = lp_solve(c, A, b);
  if (s.status != SolveStatus::Optimal) fail(ErrorKind::Invalid, "l1_distance: LP failed (empty polytope?)");
  out.distance = std::max(0.0, s.value);
  out.nearest = s.x.head(n);
  out.direction = s.ineq_multipliers.segment(m, n) - s.ineq_multipliers.segment(m + n, n);
  return out;
}

double l1_distance_to_polytope(const Vec& q, const Polytope& p) { return l1_distance(q, p).distance; }

// ---------------------------------------------------------------------------------------------------------------
// Plot helpers

namespace {

std::vector<std::size_t> angular_order(const std::vector<Vec>& pts, const std::vector<std::size_t>& idx, const Vec& e1,
                                       const Vec& e2) {
  Vec c = Vec::Zero(pts.front().size());
  for (auto i : idx) c += pts[i];
  c /= static_cast<double>(idx.size());
  std::vector<std::pair<double, std::size_t>> ang;
  for (auto i : idx) {
    const Vec d = pts[i] - c;
    ang.push_back({std::atan2(d.dot(e2), d.dot(e1)), i});
  }
  std::sort(ang.begin(), ang.end());
  std::vector<std::size_t> out;
  for (auto& a : ang) out.push_back(a.second);
  return out;
}

}  // namespace

std::vector<std::size_t> polygon_cycle(const Polytope& p) {
  if (p.dim != 2) fail(ErrorKind::Dimension, "polygon_cycle needs a planar polytope");
  const auto& V = p.vertices();
  std::vector<std::size_t> idx(V.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (V.size() < 3) return idx;
  return angular_order(V, idx, Vec::Unit(2, 0), Vec::Unit(2, 1));
}

std::vector<std::vector<std::size_t>> facet_cycles(const Polytope& p0) {
  if (p0.dim != 3) fail(ErrorKind::Dimension, "facet_cycles needs a polytope in 3D");
  const Polytope p = complete(p0);
  std::vector<std::vector<std::size_t>> out;
  if (p.is_empty()) return out;
  const auto& V = p.vertices();
  for (const auto& h : p.halfspaces()) {
    std::vector<std::size_t> idx;
    for (std::size_t v = 0; v < V.size(); ++v)
      if (std::abs(h.slack(V[v])) <= kGeoTol) idx.push_back(v);
    if (idx.size() < 3) continue;
    const Vec nrm = h.normal.normalized();
    Vec e1 = V[idx[1]] - V[idx[0]];
    e1 -= nrm * nrm.dot(e1);
    if (e1.norm() < 1e-15) continue;
    e1.normalize();
    Vec e2(3);
    e2 << nrm(1) * e1(2) - nrm(2) * e1(1), nrm(2) * e1(0) - nrm(0) * e1(2), nrm(0) * e1(1) - nrm(1) * e1(0);
    out.push_back(angular_order(V, idx, e1, e2));
  }
  return out;
}

}  // namespace nashapprox
