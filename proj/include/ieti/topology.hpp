#pragma once
// Multi-patch topology: interface and vertex extraction from patch geometry,
// admissibility checking, Dirichlet boundary tagging, and the sampled
// regularity report.
#include <array>
#include <optional>
#include <vector>

#include "ieti/geometry.hpp"

namespace ieti {

struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonAdmissibleDecomposition : TopologyError {
  using TopologyError::TopologyError;
};

// Sides of the parameter square; the edge parameter t in [0,1] traverses
// South:(t,0), East:(1,t), North:(t,1), West:(0,t).
enum class Side : int { South = 0, East = 1, North = 2, West = 3 };

Point2 side_point(const GeometryMap& g, Side s, double t);
// Parameter-square coordinates of the point at edge parameter t.
std::array<double, 2> side_param(Side s, double t);

// Shared segment between patch k and patch l. Exactly one of the two sides is
// a full edge when the interface is a T-junction sub-edge; both are full for
// matching or fully nested edges. The segment occupies [a_k,b_k] in k's edge
// parameter and [a_l,b_l] in l's; `flipped` means the traversal directions
// disagree.
struct Interface {
  int k = -1, l = -1;
  Side side_k = Side::South, side_l = Side::South;
  double a_k = 0.0, b_k = 1.0;
  double a_l = 0.0, b_l = 1.0;
  bool flipped = false;
  Point2 midpoint;  // physical midpoint of the shared segment (sort anchor)
};

struct VertexIncidence {
  int patch = -1;
  int corner = -1;            // 0:(0,0) 1:(1,0) 2:(1,1) 3:(0,1); -1 if edge-interior
  Side side = Side::South;    // valid when corner == -1
  double t = 0.0;             // edge parameter when corner == -1
};

struct Vertex {
  Point2 position;
  std::vector<VertexIncidence> incidences;
  bool t_junction = false;  // lies in the interior of some patch edge
};

struct MultiPatchTopology {
  std::vector<Patch> patches;
  std::vector<Interface> interfaces;
  std::vector<Vertex> vertices;
  // (patch, side) pairs forming the outer boundary; all are Dirichlet.
  std::vector<std::pair<int, Side>> dirichlet_edges;

  bool is_dirichlet(int patch, Side side) const;
  // Interfaces incident to a given patch (either role).
  std::vector<int> interfaces_of(int patch) const;
};

MultiPatchTopology build_topology(std::vector<Patch> patches, double tol = 1e-9);

struct PatchRegularity {
  double c_geometry = 0.0;         // sampled sup of ||J||/H and ||J^-1||*H
  double c_quasi_uniformity = 0.0; // min span / max span over both directions
  bool jacobian_one_signed = false;
};

struct AssumptionsReport {
  std::vector<PatchRegularity> per_patch;
  bool admissible = false;
};

AssumptionsReport check_assumptions(const MultiPatchTopology& topo);

}  // namespace ieti
