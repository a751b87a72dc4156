#include "nashapprox/faces.hpp"

#include "nashapprox/solver.hpp"

#include <algorithm>
#include <set>

namespace nashapprox {

using Index = Eigen::Index;

std::optional<Vec> is_efficient(const FaceDescriptor& face, const Polytope& p) {
  if (face.vertices.empty()) return std::nullopt;
  const auto& hs = p.halfspaces();
  const Index m = static_cast<Index>(p.dim);
  // w = -sum mu_h a_h over the active halfspaces (w in the negated normal cone of the face), mu >= 0, w >= 1.
  const Index k = static_cast<Index>(face.active.size());
  if (k == 0) return std::nullopt;
  Mat N(m, k);
  for (Index j = 0; j < k; ++j) N.col(j) = hs[face.active[static_cast<std::size_t>(j)]].normal;
  Mat A(m + k, k);
  Vec b(m + k);
  A.topRows(m) = N;
  b.head(m).setConstant(-1.0);
  A.bottomRows(k) = -Mat::Identity(k, k);
  b.tail(k).setZero();
  const NlpSolution s = lp_solve(Vec::Ones(k), A, b);
  if (s.status != SolveStatus::Optimal) return std::nullopt;
  Vec w = -N * s.x;
  // Guard against rounding: certify w >= 1 - tol and that the face is exactly the minimizing set.
  if (w.minCoeff() < 1.0 - 1e-7) return std::nullopt;
  for (const auto& r : p.rays())
    if (w.dot(r) < -kGeoTol) return std::nullopt;
  if (!face.rays.empty()) return std::nullopt;
  return w;
}

namespace {

bool subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

std::vector<EfficientFace> maximal_efficient_faces(const Polytope& p0) {
  const Polytope p = (p0.has_hrep() && p0.has_vrep()) ? p0 : complete(p0);
  if (p.is_empty()) return {};
  const Incidence inc(p);
  std::vector<EfficientFace> found;
  std::set<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> seen;
  std::vector<FaceDescriptor> level = subfaces(inc);
  while (!level.empty()) {
    std::vector<FaceDescriptor> next;
    for (auto& f : level) {
      if (!seen.insert({f.vertices, f.rays}).second) continue;
      bool covered = false;
      for (const auto& e : found) covered = covered || subset(f.vertices, e.face.vertices);
      if (covered && f.rays.empty()) continue;
      if (f.rays.empty()) {
        if (auto w = is_efficient(f, p)) {
          found.push_back({f, complete(face_polytope(p, f)), *w});
          continue;
        }
      }
      for (auto& s : subfaces(inc, &f)) next.push_back(std::move(s));
    }
    // Deduplicate the next level by generators.
    std::sort(next.begin(), next.end(),
              [](const FaceDescriptor& a, const FaceDescriptor& b) { return std::tie(a.vertices, a.rays) < std::tie(b.vertices, b.rays); });
    next.erase(std::unique(next.begin(), next.end(),
                           [](const FaceDescriptor& a, const FaceDescriptor& b) {
                             return a.vertices == b.vertices && a.rays == b.rays;
                           }),
               next.end());
    level = std::move(next);
  }
  std::vector<EfficientFace> out;
  for (std::size_t i = 0; i < found.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < found.size() && maximal; ++j)
      if (i != j && subset(found[i].face.vertices, found[j].face.vertices) &&
          (found[i].face.vertices != found[j].face.vertices || j < i))
        maximal = false;
    if (maximal) out.push_back(std::move(found[i]));
  }
  std::sort(out.begin(), out.end(),
            [](const EfficientFace& a, const EfficientFace& b) { return a.face.vertices < b.face.vertices; });
  return out;
}

}  // namespace nashapprox
