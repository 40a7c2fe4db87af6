#include "pssi/lowlevel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>
#include <utility>

#include "pssi/union_find.hpp"

namespace pssi {

std::vector<std::size_t> SegmentMap::areas() const {
  std::vector<std::size_t> out(static_cast<std::size_t>(n_segments), 0);
  for (auto l : labels) ++out[static_cast<std::size_t>(l)];
  return out;
}

void MeanShiftParams::validate() const {
  if (!(hs > 0) || !(hr > 0) || min_size < 1 || !(eps > 0) || max_iter < 1) {
    throw Error(ErrorCode::InvalidArgument, "mean shift parameters out of range");
  }
}

namespace {

double srgb_to_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }

constexpr double kXn = 0.95047;
constexpr double kYn = 1.0;
constexpr double kZn = 1.08883;

double range_dist2(const Luv& a, const Luv& b) {
  const double dl = a[0] - b[0];
  const double du = a[1] - b[1];
  const double dv = a[2] - b[2];
  return dl * dl + du * du + dv * dv;
}

// Visits the 4-neighbors to the right and below of every pixel.
template <typename F>
void for_each_forward_pair(int width, int height, F&& f) {
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * width + c;
      if (c + 1 < width) f(i, i + 1);
      if (r + 1 < height) f(i, i + static_cast<std::size_t>(width));
    }
  }
}

}  // namespace

Luv rgb_to_luv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = srgb_to_linear(r8 / 255.0);
  const double g = srgb_to_linear(g8 / 255.0);
  const double b = srgb_to_linear(b8 / 255.0);
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

  const double yr = y / kYn;
  const double l = yr > 0.008856 ? 116.0 * std::cbrt(yr) - 16.0 : 903.3 * yr;
  const double denom = x + 15.0 * y + 3.0 * z;
  if (denom <= 0.0) {
    return {l, 0.0, 0.0};
  }
  const double un = 4.0 * kXn / (kXn + 15.0 * kYn + 3.0 * kZn);
  const double vn = 9.0 * kYn / (kXn + 15.0 * kYn + 3.0 * kZn);
  const double up = 4.0 * x / denom;
  const double vp = 9.0 * y / denom;
  return {l, 13.0 * l * (up - un), 13.0 * l * (vp - vn)};
}

std::vector<Luv> image_to_luv(const Image& image) {
  std::vector<Luv> out(image.pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto* px = image.data.data() + 3 * i;
    out[i] = rgb_to_luv(px[0], px[1], px[2]);
  }
  return out;
}

std::vector<Mode> meanshift_filter(const Image& image, const MeanShiftParams& params, unsigned threads) {
  params.validate();
  const auto luv = image_to_luv(image);
  const int w = image.width;
  const int h = image.height;
  const double hs2 = params.hs * params.hs;
  const double hr2 = params.hr * params.hr;
  const double eps2 = params.eps * params.eps;
  std::vector<Mode> modes(luv.size());

  auto process_rows = [&](int row_begin, int row_end) {
    for (int r = row_begin; r < row_end; ++r) {
      for (int c = 0; c < w; ++c) {
        const std::size_t idx = static_cast<std::size_t>(r) * w + c;
        Mode m{static_cast<double>(c), static_cast<double>(r), luv[idx]};
        for (int iter = 0; iter < params.max_iter; ++iter) {
          const int r0 = std::max(0, static_cast<int>(std::ceil(m.y - params.hs)));
          const int r1 = std::min(h - 1, static_cast<int>(std::floor(m.y + params.hs)));
          const int c0 = std::max(0, static_cast<int>(std::ceil(m.x - params.hs)));
          const int c1 = std::min(w - 1, static_cast<int>(std::floor(m.x + params.hs)));
          double sx = 0, sy = 0, sl = 0, su = 0, sv = 0;
          std::size_t n = 0;
          for (int pr = r0; pr <= r1; ++pr) {
            const double dy = pr - m.y;
            for (int pc = c0; pc <= c1; ++pc) {
              const double dx = pc - m.x;
              if (dx * dx + dy * dy > hs2) continue;
              const Luv& p = luv[static_cast<std::size_t>(pr) * w + pc];
              if (range_dist2(p, m.color) > hr2) continue;
              sx += pc;
              sy += pr;
              sl += p[0];
              su += p[1];
              sv += p[2];
              ++n;
            }
          }
          if (n == 0) break;
          const double inv = 1.0 / static_cast<double>(n);
          Mode next{sx * inv, sy * inv, {sl * inv, su * inv, sv * inv}};
          const double shift2 = (next.x - m.x) * (next.x - m.x) + (next.y - m.y) * (next.y - m.y) +
                                range_dist2(next.color, m.color);
          m = next;
          if (shift2 < eps2) break;
        }
        modes[idx] = m;
      }
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(h)));
  if (workers == 1) {
    process_rows(0, h);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      const int b = static_cast<int>(static_cast<long>(h) * t / workers);
      const int e = static_cast<int>(static_cast<long>(h) * (t + 1) / workers);
      pool.emplace_back(process_rows, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return modes;
}

void compact_labels(SegmentMap& segmap) {
  std::vector<std::int32_t> remap;
  std::int32_t next = 0;
  for (auto& l : segmap.labels) {
    if (static_cast<std::size_t>(l) >= remap.size()) remap.resize(static_cast<std::size_t>(l) + 1, -1);
    auto& slot = remap[static_cast<std::size_t>(l)];
    if (slot < 0) slot = next++;
    l = slot;
  }
  segmap.n_segments = next;
}

namespace {

SegmentMap label_components(int width, int height, UnionFind& uf) {
  SegmentMap out;
  out.width = width;
  out.height = height;
  out.labels.resize(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    out.labels[i] = static_cast<std::int32_t>(uf.find(i));
  }
  compact_labels(out);
  return out;
}

struct Region {
  std::size_t area = 0;
  Luv sum{};
  std::set<std::int32_t> neighbors;

  Luv mean() const {
    const double a = static_cast<double>(area);
    return {sum[0] / a, sum[1] / a, sum[2] / a};
  }
};

// Merges regions below min_size into their closest-color 4-neighbor,
// smallest region first, until none remain or only two regions are left.
void merge_small_regions(SegmentMap& segmap, const std::vector<Luv>& colors, int min_size) {
  const int w = segmap.width;
  std::vector<Region> regions(static_cast<std::size_t>(segmap.n_segments));
  for (std::size_t i = 0; i < segmap.labels.size(); ++i) {
    Region& reg = regions[static_cast<std::size_t>(segmap.labels[i])];
    ++reg.area;
    for (int ch = 0; ch < 3; ++ch) reg.sum[ch] += colors[i][ch];
  }
  for_each_forward_pair(w, segmap.height, [&](std::size_t a, std::size_t b) {
    const auto la = segmap.labels[a];
    const auto lb = segmap.labels[b];
    if (la != lb) {
      regions[static_cast<std::size_t>(la)].neighbors.insert(lb);
      regions[static_cast<std::size_t>(lb)].neighbors.insert(la);
    }
  });

  const auto min_area = static_cast<std::size_t>(min_size);
  std::set<std::pair<std::size_t, std::int32_t>> small;
  for (std::int32_t id = 0; id < segmap.n_segments; ++id) {
    if (regions[static_cast<std::size_t>(id)].area < min_area) small.insert({regions[static_cast<std::size_t>(id)].area, id});
  }
  std::vector<std::int32_t> owner(regions.size());
  std::iota(owner.begin(), owner.end(), 0);
  int alive = segmap.n_segments;

  while (!small.empty() && alive > 2) {
    const auto [area, id] = *small.begin();
    small.erase(small.begin());
    Region& src = regions[static_cast<std::size_t>(id)];
    if (src.neighbors.empty()) continue;
    const Luv mean = src.mean();
    std::int32_t target = -1;
    double best = std::numeric_limits<double>::infinity();
    for (auto n : src.neighbors) {
      const double d = range_dist2(mean, regions[static_cast<std::size_t>(n)].mean());
      if (d < best) {
        best = d;
        target = n;
      }
    }
    Region& dst = regions[static_cast<std::size_t>(target)];
    small.erase({dst.area, target});
    dst.area += src.area;
    for (int ch = 0; ch < 3; ++ch) dst.sum[ch] += src.sum[ch];
    for (auto n : src.neighbors) {
      auto& nn = regions[static_cast<std::size_t>(n)].neighbors;
      nn.erase(id);
      if (n != target) {
        nn.insert(target);
        dst.neighbors.insert(n);
      }
    }
    dst.neighbors.erase(id);
    src.neighbors.clear();
    src.area = 0;
    owner[static_cast<std::size_t>(id)] = target;
    --alive;
    if (dst.area < min_area) small.insert({dst.area, target});
  }

  auto resolve = [&](std::int32_t l) {
    while (owner[static_cast<std::size_t>(l)] != l) l = owner[static_cast<std::size_t>(l)];
    return l;
  };
  for (auto& l : segmap.labels) l = resolve(l);
  compact_labels(segmap);
}

}  // namespace

SegmentMap meanshift_segment(const Image& image, const MeanShiftParams& params, unsigned threads) {
  const auto modes = meanshift_filter(image, params, threads);
  const int w = image.width;
  const double hs2 = params.hs * params.hs;
  const double hr2 = params.hr * params.hr;

  UnionFind uf(modes.size());
  for_each_forward_pair(w, image.height, [&](std::size_t a, std::size_t b) {
    const Mode& ma = modes[a];
    const Mode& mb = modes[b];
    const double ds2 = (ma.x - mb.x) * (ma.x - mb.x) + (ma.y - mb.y) * (ma.y - mb.y);
    if (ds2 <= hs2 && range_dist2(ma.color, mb.color) <= hr2) uf.unite(a, b);
  });
  SegmentMap segmap = label_components(w, image.height, uf);

  std::vector<Luv> colors(modes.size());
  std::transform(modes.begin(), modes.end(), colors.begin(), [](const Mode& m) { return m.color; });
  merge_small_regions(segmap, colors, params.min_size);
  return segmap;
}

namespace {

struct Component {
  std::int32_t label = 0;
  std::vector<std::size_t> pixels;
};

// Splits the label image into 4-connected components, in row-major order of
// each component's first pixel.
std::vector<Component> connected_components(const SegmentMap& segmap, std::vector<std::int32_t>& comp_of) {
  const int w = segmap.width;
  const int h = segmap.height;
  comp_of.assign(segmap.labels.size(), -1);
  std::vector<Component> comps;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < segmap.labels.size(); ++start) {
    if (comp_of[start] >= 0) continue;
    const auto id = static_cast<std::int32_t>(comps.size());
    Component comp{segmap.labels[start], {}};
    stack.push_back(start);
    comp_of[start] = id;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      comp.pixels.push_back(p);
      const int r = static_cast<int>(p / w);
      const int c = static_cast<int>(p % w);
      const int nr[4] = {r - 1, r + 1, r, r};
      const int nc[4] = {c, c, c - 1, c + 1};
      for (int k = 0; k < 4; ++k) {
        if (nr[k] < 0 || nr[k] >= h || nc[k] < 0 || nc[k] >= w) continue;
        const std::size_t q = static_cast<std::size_t>(nr[k]) * w + nc[k];
        if (comp_of[q] < 0 && segmap.labels[q] == comp.label) {
          comp_of[q] = id;
          stack.push_back(q);
        }
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

// Keeps the largest fragment of every label; other fragments take the label
// most common among their already-settled 4-neighbors.
void enforce_connectivity(SegmentMap& segmap) {
  const int w = segmap.width;
  const int h = segmap.height;
  std::vector<std::int32_t> comp_of;
  auto comps = connected_components(segmap, comp_of);

  std::vector<std::int32_t> main_comp(static_cast<std::size_t>(segmap.n_segments), -1);
  for (std::size_t i = 0; i < comps.size(); ++i) {
    auto& m = main_comp[static_cast<std::size_t>(comps[i].label)];
    if (m < 0 || comps[i].pixels.size() > comps[static_cast<std::size_t>(m)].pixels.size()) {
      m = static_cast<std::int32_t>(i);
    }
  }
  std::vector<char> settled(comps.size(), 0);
  for (auto m : main_comp) {
    if (m >= 0) settled[static_cast<std::size_t>(m)] = 1;
  }

  bool pending = true;
  while (pending) {
    pending = false;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (settled[i]) continue;
      std::vector<std::pair<std::int32_t, int>> votes;
      for (std::size_t p : comps[i].pixels) {
        const int r = static_cast<int>(p / w);
        const int c = static_cast<int>(p % w);
        const int nr[4] = {r - 1, r + 1, r, r};
        const int nc[4] = {c, c, c - 1, c + 1};
        for (int k = 0; k < 4; ++k) {
          if (nr[k] < 0 || nr[k] >= h || nc[k] < 0 || nc[k] >= w) continue;
          const std::size_t q = static_cast<std::size_t>(nr[k]) * w + nc[k];
          const auto qc = static_cast<std::size_t>(comp_of[q]);
          if (qc == i || !settled[qc]) continue;
          const auto l = segmap.labels[q];
          auto it = std::find_if(votes.begin(), votes.end(), [l](const auto& v) { return v.first == l; });
          if (it == votes.end()) {
            votes.push_back({l, 1});
          } else {
            ++it->second;
          }
        }
      }
      if (votes.empty()) {
        pending = true;
        continue;
      }
      const auto best = std::max_element(votes.begin(), votes.end(), [](const auto& a, const auto& b) {
        return a.second < b.second || (a.second == b.second && a.first > b.first);
      });
      for (std::size_t p : comps[i].pixels) segmap.labels[p] = best->first;
      comps[i].label = best->first;
      settled[i] = 1;
    }
  }
  compact_labels(segmap);
}

}  // namespace

SegmentMap slic_segment(const Image& image, int k, double compactness) {
  const int w = image.width;
  const int h = image.height;
  const long n_pixels = static_cast<long>(w) * h;
  if (k < 1 || k > n_pixels) {
    throw Error(ErrorCode::InvalidK, "SLIC cluster count must lie in [1, pixel count]");
  }
  const auto luv = image_to_luv(image);
  const double step = std::sqrt(static_cast<double>(n_pixels) / k);

  int nx = std::max(1, static_cast<int>(std::lround(w / step)));
  int ny = std::max(1, static_cast<int>(std::lround(h / step)));
  nx = std::min(nx, w);
  ny = std::min(ny, h);
  while (static_cast<long>(nx) * ny > k) {
    if (nx >= ny) {
      --nx;
    } else {
      --ny;
    }
  }

  struct Center {
    double l, u, v, x, y;
  };
  std::vector<Center> centers;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double x = (i + 0.5) * w / nx;
      const double y = (j + 0.5) * h / ny;
      const auto& c = luv[static_cast<std::size_t>(std::min(h - 1, static_cast<int>(y))) * w +
                          static_cast<std::size_t>(std::min(w - 1, static_cast<int>(x)))];
      centers.push_back({c[0], c[1], c[2], x, y});
    }
  }

  const double spatial_scale = (compactness / step) * (compactness / step);
  auto distance2 = [&](const Center& c, int r, int col) {
    const Luv& p = luv[static_cast<std::size_t>(r) * w + col];
    const double dc2 = (p[0] - c.l) * (p[0] - c.l) + (p[1] - c.u) * (p[1] - c.u) + (p[2] - c.v) * (p[2] - c.v);
    const double ds2 = (col - c.x) * (col - c.x) + (r - c.y) * (r - c.y);
    return dc2 + ds2 * spatial_scale;
  };

  SegmentMap segmap;
  segmap.width = w;
  segmap.height = h;
  segmap.labels.assign(static_cast<std::size_t>(n_pixels), -1);
  std::vector<double> dist(static_cast<std::size_t>(n_pixels));
  const int radius = static_cast<int>(std::ceil(step));

  for (int iter = 0; iter < 10; ++iter) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::fill(segmap.labels.begin(), segmap.labels.end(), -1);
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      const Center& c = centers[ci];
      const int r0 = std::max(0, static_cast<int>(c.y) - radius);
      const int r1 = std::min(h - 1, static_cast<int>(c.y) + radius);
      const int c0 = std::max(0, static_cast<int>(c.x) - radius);
      const int c1 = std::min(w - 1, static_cast<int>(c.x) + radius);
      for (int r = r0; r <= r1; ++r) {
        for (int col = c0; col <= c1; ++col) {
          const double d = distance2(c, r, col);
          const std::size_t idx = static_cast<std::size_t>(r) * w + col;
          if (d < dist[idx]) {
            dist[idx] = d;
            segmap.labels[idx] = static_cast<std::int32_t>(ci);
          }
        }
      }
    }
    // Pixels beyond every search window fall back to the globally nearest center.
    for (int r = 0; r < h; ++r) {
      for (int col = 0; col < w; ++col) {
        const std::size_t idx = static_cast<std::size_t>(r) * w + col;
        if (segmap.labels[idx] >= 0) continue;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t ci = 0; ci < centers.size(); ++ci) {
          const double d = distance2(centers[ci], r, col);
          if (d < best) {
            best = d;
            segmap.labels[idx] = static_cast<std::int32_t>(ci);
          }
        }
      }
    }
    std::vector<Center> sums(centers.size(), Center{0, 0, 0, 0, 0});
    std::vector<std::size_t> counts(centers.size(), 0);
    for (int r = 0; r < h; ++r) {
      for (int col = 0; col < w; ++col) {
        const std::size_t idx = static_cast<std::size_t>(r) * w + col;
        const auto ci = static_cast<std::size_t>(segmap.labels[idx]);
        sums[ci].l += luv[idx][0];
        sums[ci].u += luv[idx][1];
        sums[ci].v += luv[idx][2];
        sums[ci].x += col;
        sums[ci].y += r;
        ++counts[ci];
      }
    }
    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
      if (counts[ci] == 0) continue;
      const double inv = 1.0 / static_cast<double>(counts[ci]);
      centers[ci] = {sums[ci].l * inv, sums[ci].u * inv, sums[ci].v * inv, sums[ci].x * inv, sums[ci].y * inv};
    }
  }

  segmap.n_segments = static_cast<int>(centers.size());
  compact_labels(segmap);
  enforce_connectivity(segmap);
  return segmap;
}

bool is_valid_segment_map(const SegmentMap& segmap) {
  if (segmap.width < 1 || segmap.height < 1 || segmap.n_segments < 1 ||
      segmap.labels.size() != static_cast<std::size_t>(segmap.width) * segmap.height) {
    return false;
  }
  std::vector<char> seen(static_cast<std::size_t>(segmap.n_segments), 0);
  for (auto l : segmap.labels) {
    if (l < 0 || l >= segmap.n_segments) return false;
    seen[static_cast<std::size_t>(l)] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return false;
  std::vector<std::int32_t> comp_of;
  return connected_components(segmap, comp_of).size() == static_cast<std::size_t>(segmap.n_segments);
}

}  // namespace pssi
