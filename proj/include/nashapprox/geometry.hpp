#pragma once

#include "nashapprox/core.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace nashapprox {

// {y : normal·y <= offset}
struct Halfspace {
  Vec normal;
  double offset = 0.0;

  double slack(const Vec& y) const { return offset - normal.dot(y); }
};

struct VRep {
  std::vector<Vec> vertices;
  std::vector<Vec> rays;
};

// Convex polyhedron held in halfspace form, generator form, or both. A generator form without vertices
// denotes the empty set.
struct Polytope {
  std::size_t dim = 0;
  std::optional<std::vector<Halfspace>> hrep;
  std::optional<VRep> vrep;

  static Polytope from_vertices(std::vector<Vec> vertices, std::vector<Vec> rays = {});
  static Polytope from_halfspaces(std::size_t dim, std::vector<Halfspace> hs);
  static Polytope box(const Vec& lower, const Vec& upper);
  static Polytope empty(std::size_t dim);

  bool has_hrep() const { return hrep.has_value(); }
  bool has_vrep() const { return vrep.has_value(); }
  const std::vector<Halfspace>& halfspaces() const;
  const std::vector<Vec>& vertices() const;
  const std::vector<Vec>& rays() const;
  bool is_empty() const;  // needs vrep
  bool bounded() const;   // needs vrep
  bool contains(const Vec& y, double tol = kGeoTol) const;
  Mat A() const;
  Vec b() const;
  // Componentwise bounds of a bounded polytope (needs vrep).
  std::pair<Vec, Vec> bounding_box() const;
  // Affine dimension of the set (needs vrep); -1 for the empty set.
  int affine_dim() const;
};

// Generators of the cone {x : M x >= 0}: a basis of its lineality space and its extreme rays.
struct ConeGenerators {
  Mat lineality;
  std::vector<Vec> rays;
};
ConeGenerators cone_generators(const Mat& M);

// Unit normals, merged duplicates, and near-opposite pairs snapped to exact equality pairs.
std::vector<Halfspace> normalize_halfspaces(std::vector<Halfspace> hs);

Polytope to_hrep(const Polytope& p);
Polytope to_vrep(const Polytope& p);
// Both representations, with the halfspace list reduced to facets and equality pairs.
Polytope complete(const Polytope& p);

struct FaceDescriptor {
  std::vector<std::size_t> active;    // halfspace indices tight on the face
  std::vector<std::size_t> vertices;  // vertex indices of the parent on the face
  std::vector<std::size_t> rays;      // ray indices of the parent in the face's recession cone

  bool operator==(const FaceDescriptor&) const = default;
};

// Tightness table of a polytope with both representations.
class Incidence {
 public:
  explicit Incidence(const Polytope& p, double tol = kGeoTol);
  const Polytope& parent() const { return *p_; }
  bool vertex_tight(std::size_t h, std::size_t v) const { return vt_[h][v]; }
  bool ray_tight(std::size_t h, std::size_t r) const { return rt_[h][r]; }
  // Face cut out by the given halfspace from `within` (or from p when `within` is null).
  FaceDescriptor restrict(std::size_t h, const FaceDescriptor* within) const;
  // Completes the active set of a face given by its generators.
  void fill_active(FaceDescriptor& f) const;
  FaceDescriptor whole() const;
  std::size_t n_halfspaces() const { return vt_.size(); }

 private:
  const Polytope* p_;
  std::vector<std::vector<bool>> vt_, rt_;
};

// Facets of p, or maximal proper faces of `face` when given.
std::vector<FaceDescriptor> subfaces(const Incidence& inc, const FaceDescriptor* face = nullptr);
// All nonempty proper faces.
std::vector<FaceDescriptor> faces(const Polytope& p);
// The face as a standalone polyhedron.
Polytope face_polytope(const Polytope& parent, const FaceDescriptor& f);

std::vector<Halfspace> remove_redundant(const std::vector<Halfspace>& hs, std::size_t dim);
std::optional<Polytope> intersect(const Polytope& a, const Polytope& b);
Polytope minkowski_l1_ball(const Polytope& p, double r);

struct L1Distance {
  double distance = 0.0;
  Vec nearest;
  // g with g·(x - q) >= distance for all x in p, ||g||_inf <= 1.
  Vec direction;
};
L1Distance l1_distance(const Vec& q, const Polytope& p);
double l1_distance_to_polytope(const Vec& q, const Polytope& p);

// Vertex cycle of a 2D polygon in counter-clockwise order.
std::vector<std::size_t> polygon_cycle(const Polytope& p);
// Facet vertex cycles of a 3D polytope, counter-clockwise seen from outside.
std::vector<std::vector<std::size_t>> facet_cycles(const Polytope& p);

}  // namespace nashapprox
