#pragma once

#include "nashapprox/geometry.hpp"

#include <optional>
#include <vector>

namespace nashapprox {

struct EfficientFace {
  FaceDescriptor face;
  Polytope polytope;  // bounded, both representations
  Vec weight;         // w >= 1 minimized over the parent exactly on the face
};

// Weight w >= 1 whose linear function is minimized over p exactly on the face, if one exists. p must have both
// representations and recession cone inside the nonnegative orthant's dual (as for conv(V) + R^m_+).
std::optional<Vec> is_efficient(const FaceDescriptor& face, const Polytope& p);

// All inclusion-maximal efficient faces, found top-down from the facets.
std::vector<EfficientFace> maximal_efficient_faces(const Polytope& p);

}  // namespace nashapprox
