#include "pssi/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <variant>

#include "json.hpp"

namespace pssi {

void EngineConfig::validate() const {
  similarity.validate();
  meanshift.validate();
  if (slic.k < 1 || !(slic.compactness > 0)) {
    throw Error(ErrorCode::InvalidArgument, "SLIC parameters out of range");
  }
  if (!(beta_sq > 0)) {
    throw Error(ErrorCode::InvalidArgument, "beta^2 must be positive");
  }
  if (!(overlay_alpha >= 0 && overlay_alpha <= 1)) {
    throw Error(ErrorCode::InvalidArgument, "overlay alpha must lie in [0, 1]");
  }
}

SegmentMap low_level_segment(const Image& image, const EngineConfig& config) {
  if (config.lowlevel == LowLevelMethod::Slic) {
    const long pixels = static_cast<long>(image.width) * image.height;
    return slic_segment(image, static_cast<int>(std::min<long>(config.slic.k, pixels)), config.slic.compactness);
  }
  return meanshift_segment(image, config.meanshift, config.threads);
}

Session::Session(Image image, EngineConfig config)
    : image_(std::move(image)),
      config_((config.validate(), config)),
      segmap_(low_level_segment(image_, config_)),
      features_(segment_features(image_, segmap_, config_.similarity)),
      base_graph_(build_base_graph()) {}

SegmentGraph Session::build_base_graph() {
  ++graph_builds_;
  return build_graph(features_, build_adjacency(segmap_, config_.connectivity), config_.similarity);
}

std::uint64_t Session::add_scribbles(const Scribbles& delta) {
  check_bounds(delta, image_.width, image_.height);
  auto conflict = [](const Pixel& p) {
    return ConflictError(p, "pixel (" + std::to_string(p.row) + ", " + std::to_string(p.col) +
                                ") would be both foreground and background");
  };
  for (const Pixel& p : delta.fg_pixels) {
    if (delta.bg_pixels.count(p) || scribbles_.bg_pixels.count(p)) throw conflict(p);
  }
  for (const Pixel& p : delta.bg_pixels) {
    if (scribbles_.fg_pixels.count(p)) throw conflict(p);
  }
  scribbles_.fg_pixels.insert(delta.fg_pixels.begin(), delta.fg_pixels.end());
  scribbles_.bg_pixels.insert(delta.bg_pixels.begin(), delta.bg_pixels.end());
  if (delta.bbox) scribbles_.bbox = delta.bbox;
  return ++revision_;
}

std::uint64_t Session::reset() {
  scribbles_ = {};
  last_cut_.reset();
  return ++revision_;
}

SeedAssignment Session::seeds() const { return scribbles_to_seeds(segmap_, scribbles_); }

CutOutput Session::run_cut() {
  const auto start = std::chrono::steady_clock::now();
  if (segmap_.n_segments < 2) {
    throw Error(ErrorCode::SingleSegment, "image produced a single segment; nothing to partition");
  }
  const SegmentGraph graph = attach_terminals(base_graph_, seeds());
  const SpanningTree tree = max_spanning_tree(graph);
  CutOutput out;
  out.cut = terminal_cut(tree, graph);
  out.mask = segments_to_mask(segmap_, out.cut);
  out.overlay = render_overlay(image_, out.mask, config_.overlay_alpha);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  last_cut_ = out.cut;
  return out;
}

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct DatasetItem {
  std::string name;
  std::filesystem::path image;
};

std::vector<DatasetItem> discover(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::DatasetLayoutError, "dataset directory not found: " + dir.string());
  }
  std::vector<DatasetItem> items;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension().string();
    if (ext != ".png" && ext != ".ppm") continue;
    const std::string stem = entry.path().stem().string();
    if (has_suffix(stem, "-scribbles") || has_suffix(stem, "-fg") || has_suffix(stem, "-bg") ||
        has_suffix(stem, "-gt")) {
      continue;
    }
    items.push_back({stem, entry.path()});
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  if (items.empty()) {
    throw Error(ErrorCode::DatasetLayoutError, "no images found in " + dir.string());
  }
  return items;
}

std::optional<BoundingBox> read_bbox(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path);
  BoundingBox b;
  if (!(in >> b.row0 >> b.col0 >> b.row1 >> b.col1)) {
    throw Error(ErrorCode::DatasetLayoutError, "malformed bounding box file " + path.string());
  }
  return b;
}

// Runs one item; returns a skip reason instead of a result on failure.
std::variant<ImageResult, std::string> evaluate_item(const std::filesystem::path& dir, const DatasetItem& item,
                                                     const EngineConfig& config) {
  const auto gt_path = dir / (item.name + "-gt.png");
  const auto overlay_path = dir / (item.name + "-scribbles.png");
  const auto fg_path = dir / (item.name + "-fg.png");
  const auto bg_path = dir / (item.name + "-bg.png");
  if (!std::filesystem::exists(gt_path)) return "missing ground truth " + gt_path.filename().string();
  const bool overlay = std::filesystem::exists(overlay_path);
  if (!overlay && !(std::filesystem::exists(fg_path) && std::filesystem::exists(bg_path))) {
    return std::string("missing scribbles");
  }
  try {
    const auto start = std::chrono::steady_clock::now();
    Image image = load_image(item.image);
    Scribbles scribbles = overlay ? load_scribbles(overlay_path) : load_scribbles(fg_path, bg_path);
    scribbles.bbox = read_bbox(dir / (item.name + "-bbox.txt"));
    const Mask truth = load_mask(gt_path);
    if (truth.width != image.width || truth.height != image.height) {
      return std::string("ground truth size differs from image");
    }
    Session session(std::move(image), config);
    session.add_scribbles(scribbles);
    const CutOutput out = session.run_cut();
    ImageResult r;
    r.name = item.name;
    r.counts = confusion(out.mask, truth);
    r.metrics = report(r.counts, config.beta_sq);
    r.n_segments = session.n_segments();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  } catch (const Error& e) {
    return std::string(to_string(e.code())) + ": " + e.what();
  }
}

}  // namespace

BatchResult batch_evaluate(const std::filesystem::path& dataset_dir, const EngineConfig& config, unsigned workers) {
  config.validate();
  const auto items = discover(dataset_dir);
  std::vector<std::variant<ImageResult, std::string>> outcomes(items.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      outcomes[i] = evaluate_item(dataset_dir, items[i], config);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(items.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  BatchResult result;
  std::vector<MetricsReport> reports;
  std::vector<double> times;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (auto* r = std::get_if<ImageResult>(&outcomes[i])) {
      reports.push_back(r->metrics);
      times.push_back(r->seconds);
      result.images.push_back(std::move(*r));
    } else {
      result.skipped.push_back({items[i].name, std::get<std::string>(outcomes[i])});
    }
  }
  result.aggregate = aggregate(reports);
  result.seconds = summarize(times);
  return result;
}

std::string to_string(Measure measure) { return measure == Measure::Bha ? "bha" : "pssi"; }

std::string to_string(LowLevelMethod method) { return method == LowLevelMethod::Slic ? "slic" : "meanshift"; }

namespace {

nlohmann::json config_json(const EngineConfig& config) {
  return {{"measure", to_string(config.similarity.measure)},
          {"bins", config.similarity.bins},
          {"lambda", config.similarity.lambda},
          {"lowlevel", to_string(config.lowlevel)},
          {"connectivity", static_cast<int>(config.connectivity)},
          {"beta_sq", config.beta_sq}};
}

nlohmann::json summary_json(const Summary& s) {
  return {{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}};
}

}  // namespace

std::string batch_to_jsonl(const BatchResult& result, const EngineConfig& config) {
  std::string out;
  for (const auto& r : result.images) {
    nlohmann::json j = {{"name", r.name},
                        {"jaccard", r.metrics.jaccard},
                        {"precision", r.metrics.precision},
                        {"recall", r.metrics.recall},
                        {"f1", r.metrics.f1},
                        {"fbeta", r.metrics.fbeta},
                        {"me", r.metrics.me},
                        {"n_segments", r.n_segments},
                        {"seconds", r.seconds}};
    out += j.dump() + "\n";
  }
  for (const auto& s : result.skipped) {
    out += nlohmann::json{{"name", s.name}, {"skipped", s.reason}}.dump() + "\n";
  }
  const auto& a = result.aggregate;
  nlohmann::json agg = {{"aggregate", true},
                        {"config", config_json(config)},
                        {"images", result.images.size()},
                        {"skipped", result.skipped.size()},
                        {"jaccard", summary_json(a.jaccard)},
                        {"precision", summary_json(a.precision)},
                        {"recall", summary_json(a.recall)},
                        {"f1", summary_json(a.f1)},
                        {"fbeta", summary_json(a.fbeta)},
                        {"me", summary_json(a.me)},
                        {"seconds", summary_json(result.seconds)}};
  out += agg.dump() + "\n";
  return out;
}

std::string batch_to_table(const BatchResult& result, const EngineConfig& config) {
  std::ostringstream os;
  char line[160];
  os << "measure=" << to_string(config.similarity.measure) << " bins=" << config.similarity.bins
     << " lambda=" << config.similarity.lambda << " lowlevel=" << to_string(config.lowlevel)
     << " images=" << result.images.size() << " skipped=" << result.skipped.size() << "\n";
  std::snprintf(line, sizeof(line), "%-10s %8s %8s %8s %8s\n", "metric", "avg", "std", "min", "max");
  os << line;
  auto row = [&](const char* name, const Summary& s) {
    std::snprintf(line, sizeof(line), "%-10s %8.4f %8.4f %8.4f %8.4f\n", name, s.mean, s.stddev, s.min, s.max);
    os << line;
  };
  row("jaccard", result.aggregate.jaccard);
  row("precision", result.aggregate.precision);
  row("recall", result.aggregate.recall);
  row("f1", result.aggregate.f1);
  row("fbeta", result.aggregate.fbeta);
  row("me", result.aggregate.me);
  row("seconds", result.seconds);
  for (const auto& s : result.skipped) os << "skipped " << s.name << ": " << s.reason << "\n";
  return os.str();
}

}  // namespace pssi
