#include "pssi/graph.hpp"

#include <algorithm>
#include <string>

namespace pssi {

SegmentGraph::SegmentGraph(int n_segments)
    : n_segments_(n_segments), incident_(static_cast<std::size_t>(n_segments) + 2) {
  if (n_segments < 1) {
    throw Error(ErrorCode::InvalidArgument, "graph needs at least one segment");
  }
}

void SegmentGraph::add_edge(int a, int b, Weight w) {
  if (a == b) {
    throw Error(ErrorCode::InvalidArgument, "self-loop on vertex " + std::to_string(a));
  }
  if (a > b) std::swap(a, b);
  if (a < 0 || b >= vertex_count()) {
    throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
  }
  if (w.is_infinite() && !is_terminal(b)) {
    throw Error(ErrorCode::InvalidArgument, "infinite edges must touch a terminal");
  }
  if (weight(a, b)) {
    throw Error(ErrorCode::InvalidArgument,
                "duplicate edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
  }
  incident_[static_cast<std::size_t>(a)].push_back(edges_.size());
  incident_[static_cast<std::size_t>(b)].push_back(edges_.size());
  edges_.push_back({a, b, w});
}

std::optional<Weight> SegmentGraph::weight(int a, int b) const {
  if (a < 0 || b < 0 || a >= vertex_count() || b >= vertex_count()) return std::nullopt;
  const auto& ia = incident_[static_cast<std::size_t>(a)];
  const auto& ib = incident_[static_cast<std::size_t>(b)];
  const int other = ia.size() <= ib.size() ? b : a;
  for (auto e : ia.size() <= ib.size() ? ia : ib) {
    if (edges_[e].u == other || edges_[e].v == other) return edges_[e].weight;
  }
  return std::nullopt;
}

double SegmentGraph::max_finite_weight() const {
  double best = 0.0;
  for (const auto& e : edges_) {
    if (!e.weight.is_infinite()) best = std::max(best, e.weight.value());
  }
  return best;
}

std::size_t SegmentGraph::finite_edge_count() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const Edge& e) { return !e.weight.is_infinite(); }));
}

void SegmentGraph::clear_terminal_edges() {
  std::vector<Edge> kept;
  kept.reserve(edges_.size());
  for (const auto& e : edges_) {
    if (!is_terminal(e.v)) kept.push_back(e);
  }
  edges_.clear();
  for (auto& inc : incident_) inc.clear();
  for (const auto& e : kept) {
    incident_[static_cast<std::size_t>(e.u)].push_back(edges_.size());
    incident_[static_cast<std::size_t>(e.v)].push_back(edges_.size());
    edges_.push_back(e);
  }
  seeds_ = {};
}

std::vector<std::pair<int, int>> build_adjacency(const SegmentMap& segmap, Connectivity connectivity) {
  const int w = segmap.width;
  const int h = segmap.height;
  std::vector<std::pair<int, int>> pairs;
  auto visit = [&](std::int32_t a, std::int32_t b) {
    if (a != b) pairs.emplace_back(std::min(a, b), std::max(a, b));
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto l = segmap.at(r, c);
      if (c + 1 < w) visit(l, segmap.at(r, c + 1));
      if (r + 1 < h) {
        visit(l, segmap.at(r + 1, c));
        if (connectivity == Connectivity::Eight) {
          if (c + 1 < w) visit(l, segmap.at(r + 1, c + 1));
          if (c > 0) visit(l, segmap.at(r + 1, c - 1));
        }
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

SegmentGraph build_graph(const std::vector<SegmentFeatures>& features,
                         const std::vector<std::pair<int, int>>& adjacency, const SimilarityConfig& config) {
  SegmentGraph graph(static_cast<int>(features.size()));
  for (const auto& [a, b] : adjacency) {
    const double w = similarity(features[static_cast<std::size_t>(a)], features[static_cast<std::size_t>(b)], config);
    graph.add_edge(a, b, Weight::finite(w));
  }
  return graph;
}

SegmentGraph build_graph(const Image& image, const SegmentMap& segmap, const SimilarityConfig& config,
                         Connectivity connectivity) {
  return build_graph(segment_features(image, segmap, config), build_adjacency(segmap, connectivity), config);
}

SeedAssignment scribbles_to_seeds(const SegmentMap& segmap, const Scribbles& scribbles) {
  check_bounds(scribbles, segmap.width, segmap.height);
  SeedAssignment seeds;
  for (const Pixel& p : scribbles.fg_pixels) seeds.fg_segments.insert(segmap.at(p.row, p.col));
  for (const Pixel& p : scribbles.bg_pixels) seeds.bg_segments.insert(segmap.at(p.row, p.col));
  if (scribbles.bbox) {
    std::vector<char> touches_box(static_cast<std::size_t>(segmap.n_segments), 0);
    for (int r = 0; r < segmap.height; ++r) {
      for (int c = 0; c < segmap.width; ++c) {
        if (scribbles.bbox->contains(r, c)) touches_box[static_cast<std::size_t>(segmap.at(r, c))] = 1;
      }
    }
    for (int s = 0; s < segmap.n_segments; ++s) {
      if (!touches_box[static_cast<std::size_t>(s)]) seeds.bg_segments.insert(s);
    }
  }
  for (int s : seeds.fg_segments) {
    if (seeds.bg_segments.count(s)) {
      throw Error(ErrorCode::SeedConflict,
                  "segment " + std::to_string(s) + " holds both foreground and background seeds");
    }
  }
  return seeds;
}

SegmentGraph attach_terminals(const SegmentGraph& graph, const SeedAssignment& seeds) {
  if (seeds.fg_segments.empty()) {
    throw Error(ErrorCode::EmptySeeds, "no foreground seeds");
  }
  if (seeds.bg_segments.empty()) {
    throw Error(ErrorCode::EmptySeeds, "no background seeds");
  }
  for (int s : seeds.fg_segments) {
    if (seeds.bg_segments.count(s)) {
      throw Error(ErrorCode::SeedConflict, "segment " + std::to_string(s) + " seeded on both sides");
    }
  }
  auto in_range = [&](int s) { return s >= 0 && s < graph.n_segments(); };
  if (!std::all_of(seeds.fg_segments.begin(), seeds.fg_segments.end(), in_range) ||
      !std::all_of(seeds.bg_segments.begin(), seeds.bg_segments.end(), in_range)) {
    throw Error(ErrorCode::InvalidArgument, "seed segment id out of range");
  }
  SegmentGraph out = graph;
  out.clear_terminal_edges();
  for (int s : seeds.fg_segments) out.add_edge(s, out.source(), Weight::infinite());
  for (int s : seeds.bg_segments) out.add_edge(s, out.sink(), Weight::infinite());
  out.seeds_ = seeds;
  return out;
}

}  // namespace pssi
