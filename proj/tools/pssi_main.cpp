// pssi: scribble-driven foreground extraction from the command line.
//
//   pssi segment --image a.png --scribbles a-scribbles.png --out mask.png
//   pssi eval data/ --bins 4,8,16 --measure pssi,bha --report rows.jsonl
//   pssi bench-similarity --bins 8,16,32,64 --iterations 10000
//   pssi serve --port 8080

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pssi/complexity.hpp"
#include "pssi/pipeline.hpp"
#include "pssi/service.hpp"

namespace {

struct EngineFlags {
  std::string measure = "pssi";
  std::string lowlevel = "meanshift";
  std::string bins = "8";
  double lambda = 0.2;
  int connectivity = 8;
  double hs = 8;
  double hr = 8;
  int min_size = 50;
  int slic_k = 400;
  double compactness = 10;
  double beta_sq = 0.3;
  double alpha = 0.6;
  unsigned threads = 1;

  void add_to(CLI::App& app, bool lists) {
    const char* list_note = lists ? " (comma list sweeps)" : "";
    app.add_option("--measure", measure, std::string("Edge similarity: pssi or bha") + list_note)->capture_default_str();
    app.add_option("--lowlevel", lowlevel, std::string("Low-level segmentation: meanshift or slic") + list_note)
        ->capture_default_str();
    app.add_option("--bins", bins, std::string("Histogram bins per channel") + list_note)->capture_default_str();
    app.add_option("--lambda", lambda, "Neighborhood importance factor")->capture_default_str();
    app.add_option("--connectivity", connectivity, "Segment adjacency: 4 or 8")
        ->check(CLI::IsMember({4, 8}))
        ->capture_default_str();
    app.add_option("--hs", hs, "Mean-shift spatial bandwidth (pixels)")->capture_default_str();
    app.add_option("--hr", hr, "Mean-shift range bandwidth (Luv)")->capture_default_str();
    app.add_option("--min-size", min_size, "Minimum segment area (pixels)")->capture_default_str();
    app.add_option("--slic-k", slic_k, "SLIC target segment count")->capture_default_str();
    app.add_option("--compactness", compactness, "SLIC compactness")->capture_default_str();
    app.add_option("--beta-sq", beta_sq, "F-beta weight beta^2")->capture_default_str();
    app.add_option("--alpha", alpha, "Overlay background tint in [0,1]")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads")->capture_default_str();
  }
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split(s)) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw pssi::Error(pssi::ErrorCode::InvalidArgument, "not an integer: " + item);
    }
  }
  if (out.empty()) throw pssi::Error(pssi::ErrorCode::InvalidArgument, "empty integer list");
  return out;
}

pssi::Measure parse_measure(const std::string& s) {
  if (s == "pssi") return pssi::Measure::Pssi;
  if (s == "bha") return pssi::Measure::Bha;
  throw pssi::Error(pssi::ErrorCode::InvalidArgument, "unknown measure " + s);
}

pssi::LowLevelMethod parse_lowlevel(const std::string& s) {
  if (s == "meanshift") return pssi::LowLevelMethod::MeanShift;
  if (s == "slic") return pssi::LowLevelMethod::Slic;
  throw pssi::Error(pssi::ErrorCode::InvalidArgument, "unknown low-level method " + s);
}

pssi::EngineConfig base_config(const EngineFlags& f) {
  pssi::EngineConfig c;
  c.similarity.lambda = f.lambda;
  c.connectivity = f.connectivity == 4 ? pssi::Connectivity::Four : pssi::Connectivity::Eight;
  c.meanshift.hs = f.hs;
  c.meanshift.hr = f.hr;
  c.meanshift.min_size = f.min_size;
  c.slic.k = f.slic_k;
  c.slic.compactness = f.compactness;
  c.beta_sq = f.beta_sq;
  c.overlay_alpha = f.alpha;
  c.threads = f.threads;
  return c;
}

pssi::BoundingBox parse_bbox(const std::string& s) {
  const auto v = parse_ints(s);
  if (v.size() != 4) throw pssi::Error(pssi::ErrorCode::InvalidArgument, "--bbox expects row0,col0,row1,col1");
  return {v[0], v[1], v[2], v[3]};
}

struct SegmentArgs {
  EngineFlags engine;
  std::string image;
  std::string scribbles;
  std::string fg;
  std::string bg;
  std::string bbox;
  std::string out;
  std::string overlay;
};

int cmd_segment(const SegmentArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  pssi::EngineConfig config = base_config(args.engine);
  config.similarity.measure = parse_measure(args.engine.measure);
  config.lowlevel = parse_lowlevel(args.engine.lowlevel);
  const auto bins = parse_ints(args.engine.bins);
  if (bins.size() != 1) throw pssi::Error(pssi::ErrorCode::InvalidArgument, "segment takes a single --bins value");
  config.similarity.bins = bins.front();

  pssi::Scribbles scribbles;
  if (!args.scribbles.empty()) {
    scribbles = pssi::load_scribbles(args.scribbles);
  } else if (!args.fg.empty() && !args.bg.empty()) {
    scribbles = pssi::load_scribbles(args.fg, args.bg);
  } else {
    throw pssi::Error(pssi::ErrorCode::InvalidArgument, "give --scribbles or both --fg and --bg");
  }
  if (!args.bbox.empty()) scribbles.bbox = parse_bbox(args.bbox);

  pssi::Session session(pssi::load_image(args.image), config);
  session.add_scribbles(scribbles);
  const pssi::CutOutput out = session.run_cut();
  pssi::save_mask(out.mask, args.out);
  if (!args.overlay.empty()) pssi::save_image(out.overlay, args.overlay);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("segments %d\nremoved_edge %d-%d weight %.9g\nforeground_segments %zu\nseconds %.3f\n",
              session.n_segments(), out.cut.removed_edge.u, out.cut.removed_edge.v,
              out.cut.removed_edge.weight.value(), out.cut.fg_segments.size(), seconds);
  return 0;
}

void write_text(const std::string& path, const std::string& text) {
  pssi::write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

struct EvalArgs {
  EngineFlags engine;
  std::string dataset;
  std::string report;
  std::string out;
  unsigned jobs = 1;
};

int cmd_eval(const EvalArgs& args) {
  std::string jsonl;
  std::string tables;
  std::size_t skipped = 0;
  for (const auto& lowlevel : split(args.engine.lowlevel)) {
    for (const auto& measure : split(args.engine.measure)) {
      for (int b : parse_ints(args.engine.bins)) {
        pssi::EngineConfig config = base_config(args.engine);
        config.lowlevel = parse_lowlevel(lowlevel);
        config.similarity.measure = parse_measure(measure);
        config.similarity.bins = b;
        const auto result = pssi::batch_evaluate(args.dataset, config, args.jobs);
        jsonl += pssi::batch_to_jsonl(result, config);
        tables += pssi::batch_to_table(result, config) + "\n";
        skipped += result.skipped.size();
      }
    }
  }
  std::cout << tables;
  if (!args.report.empty()) write_text(args.report, jsonl);
  if (!args.out.empty()) write_text(args.out, tables);
  if (skipped > 0) std::fprintf(stderr, "%zu item(s) skipped\n", skipped);
  return 0;
}

int cmd_bench(const std::string& bins_list, int iterations) {
  const auto bins = parse_ints(bins_list);
  for (int b : bins) {
    if (b < 2) throw pssi::Error(pssi::ErrorCode::InvalidArgument, "bins must be >= 2");
  }
  const auto timings = pssi::time_similarity_kernels(bins, iterations);
  std::vector<double> x, yp, yb;
  std::printf("%6s %14s %14s\n", "bins", "pssi_ns", "bha_ns");
  for (const auto& t : timings) {
    std::printf("%6d %14.2f %14.2f\n", t.bins, t.pssi_seconds * 1e9, t.bha_seconds * 1e9);
    x.push_back(t.bins);
    yp.push_back(t.pssi_seconds);
    yb.push_back(t.bha_seconds);
  }
  const auto sp = pssi::loglog_slope(x, yp);
  const auto sb = pssi::loglog_slope(x, yb);
  if (sp && sb) {
    std::printf("pssi_slope %.3f\nbha_slope %.3f\n", *sp, *sb);
  } else {
    std::printf("pssi_slope undefined\nbha_slope undefined\n");
  }
  return 0;
}

int cmd_serve(const EngineFlags& flags, const std::string& host, int port) {
  pssi::service::ServiceConfig config;
  config.engine = base_config(flags);
  config.engine.similarity.measure = parse_measure(flags.measure);
  config.engine.lowlevel = parse_lowlevel(flags.lowlevel);
  config.engine.similarity.bins = parse_ints(flags.bins).front();
  pssi::service::Server server(config);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    std::fprintf(stderr, "cannot bind %s:%d\n", host.c_str(), port);
    return 1;
  }
  std::printf("listening on %s:%d\n", host.c_str(), bound);
  std::fflush(stdout);
  return server.listen() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive foreground extraction on a maximum spanning tree of mean-shift segments"};
  app.require_subcommand(1);

  SegmentArgs seg;
  auto* segment = app.add_subcommand("segment", "Segment one image from scribbles");
  seg.engine.add_to(*segment, false);
  segment->add_option("--image", seg.image, "Input image (PNG or PPM)")->required();
  segment->add_option("--scribbles", seg.scribbles, "RGBA scribble overlay (red fg, blue bg)");
  segment->add_option("--fg", seg.fg, "Binary foreground scribble mask");
  segment->add_option("--bg", seg.bg, "Binary background scribble mask");
  segment->add_option("--bbox", seg.bbox, "Bounding box row0,col0,row1,col1");
  segment->add_option("--out", seg.out, "Output mask PNG")->required();
  segment->add_option("--overlay", seg.overlay, "Output overlay PNG");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score a dataset directory");
  ev.engine.add_to(*eval, true);
  eval->add_option("dataset", ev.dataset, "Dataset directory")->required();
  eval->add_option("--report", ev.report, "Per-image and aggregate rows (JSON lines)");
  eval->add_option("--out", ev.out, "Aggregate table output");
  eval->add_option("--jobs", ev.jobs, "Images processed in parallel")->capture_default_str();

  std::string bench_bins = "8,16,32,64";
  int iterations = 10000;
  auto* bench = app.add_subcommand("bench-similarity", "Time PSSI against Bhattacharyya over bin counts");
  bench->add_option("--bins", bench_bins, "Bin counts")->capture_default_str();
  bench->add_option("--iterations", iterations, "Evaluations per bin count")->capture_default_str();

  EngineFlags serve_flags;
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the HTTP session API");
  serve_flags.add_to(*serve, false);
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (segment->parsed()) return cmd_segment(seg);
    if (eval->parsed()) return cmd_eval(ev);
    if (bench->parsed()) return cmd_bench(bench_bins, iterations);
    if (serve->parsed()) return cmd_serve(serve_flags, host, port);
  } catch (const pssi::Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", std::string(pssi::to_string(e.code())).c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
