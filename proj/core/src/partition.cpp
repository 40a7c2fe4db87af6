#include "pssi/partition.hpp"

#include <algorithm>
#include <queue>

#include "pssi/union_find.hpp"

namespace pssi {

SpanningTree max_spanning_tree(const SegmentGraph& graph) {
  std::vector<Edge> order = graph.edges();
  std::stable_sort(order.begin(), order.end(), [](const Edge& a, const Edge& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });

  SpanningTree tree;
  tree.vertex_count = graph.vertex_count();
  tree.n_segments = graph.n_segments();
  UnionFind uf(static_cast<std::size_t>(tree.vertex_count));
  for (const Edge& e : order) {
    if (static_cast<int>(tree.edges.size()) == tree.vertex_count - 1) break;
    if (uf.unite(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v))) {
      tree.edges.push_back(e);
      if (!e.weight.is_infinite()) tree.total_finite_weight += e.weight.value();
    }
  }
  if (static_cast<int>(tree.edges.size()) != tree.vertex_count - 1) {
    throw Error(ErrorCode::DisconnectedGraph, "graph does not connect all segments and terminals");
  }
  return tree;
}

namespace {

struct TreeAdjacency {
  // Per vertex: (neighbor, edge index into tree.edges).
  std::vector<std::vector<std::pair<int, std::size_t>>> links;

  explicit TreeAdjacency(const SpanningTree& tree) : links(static_cast<std::size_t>(tree.vertex_count)) {
    for (std::size_t i = 0; i < tree.edges.size(); ++i) {
      links[static_cast<std::size_t>(tree.edges[i].u)].push_back({tree.edges[i].v, i});
      links[static_cast<std::size_t>(tree.edges[i].v)].push_back({tree.edges[i].u, i});
    }
  }
};

// BFS from `root`; returns parent edge per vertex (npos for root/unreached).
std::vector<std::size_t> bfs_parent_edges(const TreeAdjacency& adj, int root, std::size_t skip_edge,
                                          std::vector<char>& reached) {
  constexpr auto npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(adj.links.size(), npos);
  reached.assign(adj.links.size(), 0);
  std::queue<int> queue;
  queue.push(root);
  reached[static_cast<std::size_t>(root)] = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    for (const auto& [n, e] : adj.links[static_cast<std::size_t>(v)]) {
      if (e == skip_edge || reached[static_cast<std::size_t>(n)]) continue;
      reached[static_cast<std::size_t>(n)] = 1;
      parent[static_cast<std::size_t>(n)] = e;
      queue.push(n);
    }
  }
  return parent;
}

std::vector<std::size_t> terminal_path_edges(const SpanningTree& tree, const TreeAdjacency& adj) {
  std::vector<char> reached;
  const auto parent = bfs_parent_edges(adj, tree.source(), static_cast<std::size_t>(-1), reached);
  if (!reached[static_cast<std::size_t>(tree.sink())]) {
    throw Error(ErrorCode::DisconnectedGraph, "terminals are not connected in the tree");
  }
  std::vector<std::size_t> path;
  int v = tree.sink();
  while (v != tree.source()) {
    const std::size_t e = parent[static_cast<std::size_t>(v)];
    path.push_back(e);
    v = tree.edges[e].u == v ? tree.edges[e].v : tree.edges[e].u;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<int> terminal_path(const SpanningTree& tree) {
  const TreeAdjacency adj(tree);
  std::vector<int> vertices{tree.source()};
  for (std::size_t e : terminal_path_edges(tree, adj)) {
    const Edge& edge = tree.edges[e];
    vertices.push_back(edge.u == vertices.back() ? edge.v : edge.u);
  }
  return vertices;
}

std::vector<Edge> crossing_edges(const SegmentGraph& graph, const std::vector<bool>& labels) {
  std::vector<Edge> out;
  for (const Edge& e : graph.edges()) {
    if (e.weight.is_infinite()) continue;
    if (labels[static_cast<std::size_t>(e.u)] != labels[static_cast<std::size_t>(e.v)]) out.push_back(e);
  }
  return out;
}

double boundary_energy(const SegmentGraph& graph, const std::vector<bool>& labels, const SeedAssignment& seeds) {
  if (labels.size() != static_cast<std::size_t>(graph.n_segments())) {
    throw Error(ErrorCode::InvalidArgument, "labeling does not cover all segments");
  }
  for (int s : seeds.fg_segments) {
    if (!labels[static_cast<std::size_t>(s)]) return kInfiniteEnergy;
  }
  for (int s : seeds.bg_segments) {
    if (labels[static_cast<std::size_t>(s)]) return kInfiniteEnergy;
  }
  // With every finite weight at zero each cut edge costs the full unit.
  const double w_max = graph.max_finite_weight();
  double energy = 0.0;
  for (const Edge& e : crossing_edges(graph, labels)) {
    energy += w_max > 0.0 ? 1.0 - e.weight.value() / w_max : 1.0;
  }
  return energy;
}

CutResult terminal_cut(const SpanningTree& tree, const SegmentGraph& graph) {
  const TreeAdjacency adj(tree);
  const auto path = terminal_path_edges(tree, adj);
  std::size_t removed = path.front();
  for (std::size_t e : path) {
    if (tree.edges[e].weight < tree.edges[removed].weight) removed = e;
  }
  if (tree.edges[removed].weight.is_infinite()) {
    throw Error(ErrorCode::SeedConflict, "terminal path has no finite edge");
  }

  std::vector<char> fg_side;
  bfs_parent_edges(adj, tree.source(), removed, fg_side);
  CutResult cut;
  cut.removed_edge = tree.edges[removed];
  std::vector<bool> labels(static_cast<std::size_t>(tree.n_segments));
  for (int s = 0; s < tree.n_segments; ++s) {
    labels[static_cast<std::size_t>(s)] = fg_side[static_cast<std::size_t>(s)] != 0;
    (labels[static_cast<std::size_t>(s)] ? cut.fg_segments : cut.bg_segments).insert(s);
  }
  cut.boundary_edges = crossing_edges(graph, labels);
  cut.energy = boundary_energy(graph, labels, graph.seeds());
  return cut;
}

namespace {

// True when `members` (segment flags) plus terminal `terminal` induce a
// connected subgraph of `graph`.
bool side_connected(const SegmentGraph& graph, const std::vector<bool>& labels, bool side, int terminal) {
  const int n = graph.n_segments();
  std::vector<char> seen(static_cast<std::size_t>(graph.vertex_count()), 0);
  auto member = [&](int v) {
    if (v == terminal) return true;
    return v < n && labels[static_cast<std::size_t>(v)] == side;
  };
  std::vector<int> stack{terminal};
  seen[static_cast<std::size_t>(terminal)] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (auto ei : graph.incident(v)) {
      const Edge& e = graph.edges()[ei];
      const int o = e.u == v ? e.v : e.u;
      if (!member(o) || seen[static_cast<std::size_t>(o)]) continue;
      seen[static_cast<std::size_t>(o)] = 1;
      ++count;
      stack.push_back(o);
    }
  }
  int expected = 1;
  for (int s = 0; s < n; ++s) expected += labels[static_cast<std::size_t>(s)] == side ? 1 : 0;
  return count == expected;
}

}  // namespace

BruteForceResult brute_force_cut(const SegmentGraph& graph, const SeedAssignment& seeds) {
  const int n = graph.n_segments();
  if (n > 20) {
    throw Error(ErrorCode::TooLarge, "exhaustive cut search is limited to 20 segments");
  }
  std::vector<int> free;
  std::vector<bool> labels(static_cast<std::size_t>(n), false);
  for (int s = 0; s < n; ++s) {
    if (seeds.fg_segments.count(s)) {
      labels[static_cast<std::size_t>(s)] = true;
    } else if (!seeds.bg_segments.count(s)) {
      free.push_back(s);
    }
  }
  // A graph copy carrying the seeds' terminal edges drives connectivity.
  const SegmentGraph terminal_graph =
      !seeds.fg_segments.empty() && !seeds.bg_segments.empty() ? attach_terminals(graph, seeds) : graph;

  BruteForceResult result;
  const std::size_t combos = std::size_t{1} << free.size();
  for (std::size_t mask = 0; mask < combos; ++mask) {
    for (std::size_t i = 0; i < free.size(); ++i) {
      labels[static_cast<std::size_t>(free[i])] = ((mask >> i) & 1U) != 0;
    }
    ++result.labelings_enumerated;
    const double energy = boundary_energy(graph, labels, seeds);
    if (energy < result.min_energy || result.min_energy_labels.empty()) {
      result.min_energy = energy;
      result.min_energy_labels = labels;
    }
    if (energy < result.connected_min_energy &&
        side_connected(terminal_graph, labels, true, terminal_graph.source()) &&
        side_connected(terminal_graph, labels, false, terminal_graph.sink())) {
      result.connected_min_energy = energy;
      result.connected_min_energy_labels = labels;
    }
    const auto crossing = crossing_edges(graph, labels);
    if (crossing.empty()) continue;
    double lightest = kInfiniteEnergy;
    double heaviest = -kInfiniteEnergy;
    for (const Edge& e : crossing) {
      lightest = std::min(lightest, e.weight.value());
      heaviest = std::max(heaviest, e.weight.value());
    }
    if (lightest > result.maximin_value) {
      result.maximin_value = lightest;
      result.maximin_labels = labels;
    }
    if (heaviest < result.minimax_value) {
      result.minimax_value = heaviest;
      result.minimax_labels = labels;
    }
  }
  return result;
}

Mask segments_to_mask(const SegmentMap& segmap, const CutResult& cut) {
  std::vector<char> fg(static_cast<std::size_t>(segmap.n_segments), 0);
  for (int s : cut.fg_segments) {
    if (s >= 0 && s < segmap.n_segments) fg[static_cast<std::size_t>(s)] = 1;
  }
  Mask mask(segmap.width, segmap.height);
  for (std::size_t i = 0; i < segmap.labels.size(); ++i) {
    mask.bits[i] = fg[static_cast<std::size_t>(segmap.labels[i])];
  }
  return mask;
}

}  // namespace pssi
