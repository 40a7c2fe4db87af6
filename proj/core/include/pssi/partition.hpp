#pragma once

#include <limits>
#include <set>
#include <vector>

#include "pssi/graph.hpp"

namespace pssi {

struct SpanningTree {
  int vertex_count = 0;
  int n_segments = 0;
  std::vector<Edge> edges;  // in selection order
  double total_finite_weight = 0.0;

  int source() const { return n_segments; }
  int sink() const { return n_segments + 1; }
};

struct CutResult {
  std::set<int> fg_segments;
  std::set<int> bg_segments;
  Edge removed_edge;
  std::vector<Edge> boundary_edges;
  double energy = 0.0;
};

// Kruskal over edges sorted by (weight desc, u asc, v asc). Throws
// DisconnectedGraph when the graph does not span all vertices.
SpanningTree max_spanning_tree(const SegmentGraph& graph);

// Vertices on the unique tree path from S to T, S first.
std::vector<int> terminal_path(const SpanningTree& tree);

// Removes the minimum-weight edge on the S-T tree path (first minimum from S)
// and labels the S side foreground. Energy is scored on `graph`.
CutResult terminal_cut(const SpanningTree& tree, const SegmentGraph& graph);

constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

// labels[i] is true when segment i is foreground.
double boundary_energy(const SegmentGraph& graph, const std::vector<bool>& labels, const SeedAssignment& seeds);

// Finite graph edges whose endpoints carry different labels.
std::vector<Edge> crossing_edges(const SegmentGraph& graph, const std::vector<bool>& labels);

struct BruteForceResult {
  std::vector<bool> min_energy_labels;
  double min_energy = kInfiniteEnergy;

  // Restricted to labelings whose foreground side (with S) and background
  // side (with T) each induce a connected subgraph.
  std::vector<bool> connected_min_energy_labels;
  double connected_min_energy = kInfiniteEnergy;

  // Labeling maximizing the lightest crossing edge.
  std::vector<bool> maximin_labels;
  double maximin_value = -kInfiniteEnergy;

  // Labeling minimizing the heaviest crossing edge.
  std::vector<bool> minimax_labels;
  double minimax_value = kInfiniteEnergy;

  std::size_t labelings_enumerated = 0;
};

// Exhaustive search over seed-respecting labelings; N <= 20.
BruteForceResult brute_force_cut(const SegmentGraph& graph, const SeedAssignment& seeds);

Mask segments_to_mask(const SegmentMap& segmap, const CutResult& cut);

}  // namespace pssi
