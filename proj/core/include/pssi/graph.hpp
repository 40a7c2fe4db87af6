#pragma once

#include <compare>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "pssi/image.hpp"
#include "pssi/lowlevel.hpp"
#include "pssi/similarity.hpp"

namespace pssi {

// Edge weight; the infinite tag orders above every finite value.
class Weight {
 public:
  static Weight finite(double value) { return Weight(false, value); }
  static Weight infinite() { return Weight(true, 0.0); }

  bool is_infinite() const { return infinite_; }
  double value() const { return value_; }

  friend std::partial_ordering operator<=>(const Weight& a, const Weight& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.value_ <=> b.value_;
  }
  friend bool operator==(const Weight& a, const Weight& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  Weight(bool infinite, double value) : infinite_(infinite), value_(value) {}
  bool infinite_;
  double value_;
};

struct Edge {
  int u = 0;  // always u < v
  int v = 0;
  Weight weight = Weight::finite(0.0);

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct SeedAssignment {
  std::set<int> fg_segments;
  std::set<int> bg_segments;

  friend bool operator==(const SeedAssignment&, const SeedAssignment&) = default;
};

// Segment vertices 0..N-1 plus the foreground terminal S = N and the
// background terminal T = N + 1.
class SegmentGraph {
 public:
  explicit SegmentGraph(int n_segments);

  int n_segments() const { return n_segments_; }
  int vertex_count() const { return n_segments_ + 2; }
  int source() const { return n_segments_; }
  int sink() const { return n_segments_ + 1; }
  bool is_terminal(int v) const { return v >= n_segments_; }

  void add_edge(int a, int b, Weight w);
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& incident(int v) const { return incident_[static_cast<std::size_t>(v)]; }
  std::optional<Weight> weight(int a, int b) const;

  // Largest finite edge weight; 0 if there are no finite edges.
  double max_finite_weight() const;
  std::size_t finite_edge_count() const;

  const SeedAssignment& seeds() const { return seeds_; }

  friend SegmentGraph attach_terminals(const SegmentGraph& graph, const SeedAssignment& seeds);

 private:
  void clear_terminal_edges();

  int n_segments_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> incident_;
  SeedAssignment seeds_;
};

enum class Connectivity { Four = 4, Eight = 8 };

// Unordered segment pairs (a < b) that touch under the given connectivity,
// sorted ascending.
std::vector<std::pair<int, int>> build_adjacency(const SegmentMap& segmap, Connectivity connectivity);

SegmentGraph build_graph(const std::vector<SegmentFeatures>& features,
                         const std::vector<std::pair<int, int>>& adjacency, const SimilarityConfig& config);

SegmentGraph build_graph(const Image& image, const SegmentMap& segmap, const SimilarityConfig& config,
                         Connectivity connectivity = Connectivity::Eight);

// Segments containing a foreground (background) scribble become foreground
// (background) seeds; with a bbox, segments entirely outside it are
// background seeds.
SeedAssignment scribbles_to_seeds(const SegmentMap& segmap, const Scribbles& scribbles);

// Replaces any existing terminal edges with infinite S-p / T-q edges.
SegmentGraph attach_terminals(const SegmentGraph& graph, const SeedAssignment& seeds);

}  // namespace pssi
