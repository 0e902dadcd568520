#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tncarve/netgraph.hpp"

namespace tncarve {

using FaceId = std::uint32_t;

// Directed occurrence of an edge: dir 0 runs u -> v, dir 1 runs v -> u.
struct Dart {
  EdgeId e = 0;
  int dir = 0;
};

// Combinatorial embedding of a connected simple planar graph: a rotation
// system (cyclic edge order around every vertex) whose induced face count
// satisfies Euler's formula.  Faces are traced with the next-dart rule
// "arrive at v along e, continue along the successor of e in rotation(v)".
class Embedding {
 public:
  // Validates that rotation covers exactly the incidences of g and that the
  // traced faces satisfy V - E + F = 2; throws NotPlanarEmbedding otherwise.
  Embedding(const NetworkGraph& g, std::vector<std::vector<EdgeId>> rotation);

  std::size_t face_count() const { return faces_.size(); }
  const std::vector<std::vector<EdgeId>>& rotation() const { return rotation_; }
  const std::vector<Dart>& face(FaceId f) const { return faces_[f]; }

  // The two faces bordering e: side(e)[d] lies to the left of the dart
  // (e, d).  A bridge has both sides equal.
  const std::array<FaceId, 2>& sides(EdgeId e) const { return sides_[e]; }

  // Vertices on the boundary walk of f, deduplicated and sorted.
  const std::vector<VertexId>& face_vertices(FaceId f) const {
    return face_vertices_[f];
  }

 private:
  std::vector<std::vector<EdgeId>> rotation_;
  std::vector<std::vector<Dart>> faces_;
  std::vector<std::array<FaceId, 2>> sides_;
  std::vector<std::vector<VertexId>> face_vertices_;
};

// Planarity test plus embedding via Boyer-Myrvold.  Requires a connected
// simple graph; throws NotPlanar if no planar embedding exists.
Embedding planar_embedding(const NetworkGraph& g);

bool is_planar(const NetworkGraph& g);

}  // namespace tncarve
