#pragma once

#include "nashapprox/benson.hpp"
#include "nashapprox/faces.hpp"

#include <vector>

namespace nashapprox {

// The set {x in domain : x_{-i} = Y_{1:a} mu, f_i(x) <= Y_m mu, mu in the simplex} for a face with vertex
// images Y, whose x-shadow is approximated to eps2 in the L1 norm.
struct ProjectionInstance {
  const Game* game = nullptr;
  std::size_t player = 0;
  FeasibleSet domain;
  std::vector<Vec> face_images;     // vertices of the face
  std::vector<Vec> face_preimages;  // points whose images are the face vertices
  double eps2 = 0.0;
};

ProjectionInstance make_instance(const Game& g, const UpperImageApprox& ua, const EfficientFace& face, double eps2);

struct SupportStep {
  Vec x;          // feasible point, d.x within the Kelley tolerance of the minimum
  Vec mu;
  Halfspace cut;  // {x : -d.x <= -lower bound}, contains the whole shadow
  int iterations = 0;
};

// Minimizes d.x over the lifted set by cutting planes; the point is pulled back into the set along the segment
// to the face-vertex preimage combination with the same weights.
SupportStep support_step(const ProjectionInstance& pi, const Vec& d);

struct ProjectionResult {
  std::vector<Vec> inner_points;
  Polytope inner_hull;              // conv(inner_points), both representations
  std::vector<Halfspace> outer;     // halfspace form of the outer approximation
  std::vector<Vec> outer_vertices;
  double certified_eps = 0.0;       // max L1 distance of an outer vertex to the inner hull
  int iterations = 0;
  int support_steps = 0;
};

ProjectionResult approximate_projection(const ProjectionInstance& pi, int max_iterations = 300);

// Whether x lies in the lifted set's shadow, with tolerance on the cost inequality and linear constraints.
bool in_shadow(const ProjectionInstance& pi, const Vec& x, double tol);

}  // namespace nashapprox
