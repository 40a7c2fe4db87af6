#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pssi/graph.hpp"
#include "pssi/image.hpp"
#include "pssi/lowlevel.hpp"
#include "pssi/metrics.hpp"
#include "pssi/partition.hpp"
#include "pssi/similarity.hpp"

namespace pssi {

enum class LowLevelMethod { MeanShift, Slic };

struct EngineConfig {
  SimilarityConfig similarity;
  LowLevelMethod lowlevel = LowLevelMethod::MeanShift;
  MeanShiftParams meanshift;
  SlicParams slic;
  Connectivity connectivity = Connectivity::Eight;
  double beta_sq = 0.3;
  double overlay_alpha = 0.6;
  unsigned threads = 1;

  void validate() const;
};

SegmentMap low_level_segment(const Image& image, const EngineConfig& config);

struct CutOutput {
  Mask mask;
  Image overlay;
  CutResult cut;
  double seconds = 0;
};

// One interactive segmentation: segmentation, features and the terminal-free
// graph are computed once at construction; scribbles accumulate until reset.
// Not internally synchronized; callers serialize mutations.
class Session {
 public:
  Session(Image image, EngineConfig config);

  const Image& image() const { return image_; }
  const EngineConfig& config() const { return config_; }
  const SegmentMap& segmap() const { return segmap_; }
  const std::vector<SegmentFeatures>& features() const { return features_; }
  const SegmentGraph& base_graph() const { return base_graph_; }
  const Scribbles& scribbles() const { return scribbles_; }
  const std::optional<CutResult>& last_cut() const { return last_cut_; }
  std::uint64_t revision() const { return revision_; }
  int n_segments() const { return segmap_.n_segments; }

  // Number of times the base graph was built; stays 1 for the session's life.
  std::uint64_t graph_builds() const { return graph_builds_; }

  // Union-accumulates strokes; a later bbox replaces an earlier one. Throws
  // ConflictError (state unchanged) if a pixel would end up in both classes.
  std::uint64_t add_scribbles(const Scribbles& delta);

  // Clears scribbles and the last cut; the revision still advances.
  std::uint64_t reset();

  SeedAssignment seeds() const;

  // Throws SingleSegment, SeedConflict or EmptySeeds.
  CutOutput run_cut();

 private:
  SegmentGraph build_base_graph();

  std::uint64_t graph_builds_ = 0;
  Image image_;
  EngineConfig config_;
  SegmentMap segmap_;
  std::vector<SegmentFeatures> features_;
  SegmentGraph base_graph_;
  Scribbles scribbles_;
  std::optional<CutResult> last_cut_;
  std::uint64_t revision_ = 0;
};

struct ImageResult {
  std::string name;
  ConfusionCounts counts;
  MetricsReport metrics;
  int n_segments = 0;
  double seconds = 0;
};

struct SkippedItem {
  std::string name;
  std::string reason;
};

struct BatchResult {
  std::vector<ImageResult> images;  // sorted by name
  std::vector<SkippedItem> skipped;
  MetricsAggregate aggregate;
  Summary seconds;
};

// Items per image <name>: <name>.png (or .ppm), scribbles as
// <name>-scribbles.png or <name>-fg.png + <name>-bg.png, truth <name>-gt.png,
// optional <name>-bbox.txt holding "row0 col0 row1 col1".
BatchResult batch_evaluate(const std::filesystem::path& dataset_dir, const EngineConfig& config,
                           unsigned workers = 1);

std::string to_string(Measure measure);
std::string to_string(LowLevelMethod method);

// One JSON object per line: each image, then the aggregate row.
std::string batch_to_jsonl(const BatchResult& result, const EngineConfig& config);
std::string batch_to_table(const BatchResult& result, const EngineConfig& config);

}  // namespace pssi
