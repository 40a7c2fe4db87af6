#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pssi/pipeline.hpp"

namespace pssi::service {

struct ServiceConfig {
  EngineConfig engine;
  std::size_t max_upload_bytes = 32u << 20;
  std::size_t max_pixels = 16'000'000;
  std::chrono::seconds idle_timeout{30 * 60};
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct StrokePoint {
  double x = 0;  // column
  double y = 0;  // row
};

struct Stroke {
  bool foreground = true;
  std::vector<StrokePoint> points;
  double radius = 1;
};

// Round brush of `radius` stamped along the polyline at <= 1 px spacing,
// clipped to the image.
std::set<Pixel> rasterize_stroke(const Stroke& stroke, int width, int height);
Scribbles rasterize_strokes(const std::vector<Stroke>& strokes, int width, int height);

// Request handlers independent of the HTTP transport. Sessions are
// serialized individually; the store lock is held only for lookup.
class Api {
 public:
  using Clock = std::chrono::steady_clock;

  explicit Api(ServiceConfig config);
  ~Api();

  // body: raw PNG/PPM bytes, or JSON {"image": base64, "config": {...}}.
  Response create_session(std::string_view body, std::string_view content_type);
  // body: {"strokes": [{"class": "fg"|"bg", "points": [{"x","y"}], "radius"}], "bbox": {...}}
  Response add_scribbles(const std::string& id, std::string_view body);
  Response run_cut(const std::string& id);
  Response reset(const std::string& id);
  Response remove(const std::string& id);
  Response segments(const std::string& id);

  std::size_t session_count() const;
  // Drops sessions idle longer than the configured timeout as of `now`.
  std::size_t evict_idle(Clock::time_point now);

 private:
  struct Entry;
  std::shared_ptr<Entry> find(const std::string& id);
  std::string next_id();

  ServiceConfig config_;
  mutable std::mutex store_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_ = 0;
};

// HTTP binding of Api on cpp-httplib.
class Server {
 public:
  explicit Server(ServiceConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds to host:port (port 0 picks a free port) and returns the port, or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  bool listen();
  void stop();

  Api& api();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pssi::service
