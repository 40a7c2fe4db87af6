#include "pssi/service.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>

#include "httplib.h"
#include "json.hpp"
#include "pssi/base64.hpp"

namespace pssi::service {

using nlohmann::json;

std::set<Pixel> rasterize_stroke(const Stroke& stroke, int width, int height) {
  std::set<Pixel> out;
  if (stroke.points.empty()) return out;
  const double r = std::max(0.0, stroke.radius);
  const int reach = static_cast<int>(std::ceil(r));
  auto stamp = [&](double x, double y) {
    const int cx = static_cast<int>(std::lround(x));
    const int cy = static_cast<int>(std::lround(y));
    for (int dy = -reach; dy <= reach; ++dy) {
      for (int dx = -reach; dx <= reach; ++dx) {
        if (dx * dx + dy * dy > r * r) continue;
        const int row = cy + dy;
        const int col = cx + dx;
        if (row >= 0 && row < height && col >= 0 && col < width) out.insert({row, col});
      }
    }
  };
  stamp(stroke.points.front().x, stroke.points.front().y);
  for (std::size_t i = 1; i < stroke.points.size(); ++i) {
    const StrokePoint& a = stroke.points[i - 1];
    const StrokePoint& b = stroke.points[i];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int steps = std::max(1, static_cast<int>(std::ceil(len)));
    for (int s = 1; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      stamp(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
    }
  }
  return out;
}

Scribbles rasterize_strokes(const std::vector<Stroke>& strokes, int width, int height) {
  Scribbles s;
  for (const Stroke& stroke : strokes) {
    auto pixels = rasterize_stroke(stroke, width, height);
    (stroke.foreground ? s.fg_pixels : s.bg_pixels).merge(pixels);
  }
  return s;
}

struct Api::Entry {
  std::mutex mutex;
  std::string id;
  std::chrono::system_clock::time_point created_at;
  std::atomic<Clock::rep> last_used;
  Session session;

  Entry(std::string id_, Session s)
      : id(std::move(id_)),
        created_at(std::chrono::system_clock::now()),
        last_used(Clock::now().time_since_epoch().count()),
        session(std::move(s)) {}

  void touch() { last_used = Clock::now().time_since_epoch().count(); }
};

namespace {

Response json_response(int status, const json& body) { return {status, body.dump(), "application/json"}; }

Response error_response(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  return json_response(status, extra);
}

Response not_found(const std::string& id) { return error_response(404, "unknown session " + id); }

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::DecodeError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::OutOfBounds:
    case ErrorCode::InvalidK:
      return 400;
    case ErrorCode::ConflictError:
    case ErrorCode::SeedConflict:
      return 409;
    case ErrorCode::EmptySeeds:
    case ErrorCode::SingleSegment:
      return 422;
    default:
      return 500;
  }
}

Response from_error(const Error& e) {
  json extra = {{"code", std::string(to_string(e.code()))}};
  if (const auto* c = dynamic_cast<const ConflictError*>(&e)) {
    extra["pixel"] = {{"x", c->pixel().col}, {"y", c->pixel().row}};
  }
  return error_response(status_for(e.code()), e.what(), extra);
}

void apply_overrides(EngineConfig& config, const json& j) {
  if (j.contains("measure")) {
    const auto m = j.at("measure").get<std::string>();
    if (m != "pssi" && m != "bha") throw Error(ErrorCode::InvalidArgument, "measure must be pssi or bha");
    config.similarity.measure = m == "bha" ? Measure::Bha : Measure::Pssi;
  }
  if (j.contains("lowlevel")) {
    const auto m = j.at("lowlevel").get<std::string>();
    if (m != "meanshift" && m != "slic") throw Error(ErrorCode::InvalidArgument, "lowlevel must be meanshift or slic");
    config.lowlevel = m == "slic" ? LowLevelMethod::Slic : LowLevelMethod::MeanShift;
  }
  if (j.contains("connectivity")) {
    const int c = j.at("connectivity").get<int>();
    if (c != 4 && c != 8) throw Error(ErrorCode::InvalidArgument, "connectivity must be 4 or 8");
    config.connectivity = c == 4 ? Connectivity::Four : Connectivity::Eight;
  }
  config.similarity.bins = j.value("bins", config.similarity.bins);
  config.similarity.lambda = j.value("lambda", config.similarity.lambda);
  config.meanshift.hs = j.value("hs", config.meanshift.hs);
  config.meanshift.hr = j.value("hr", config.meanshift.hr);
  config.meanshift.min_size = j.value("min_size", config.meanshift.min_size);
  config.slic.k = j.value("slic_k", config.slic.k);
  config.slic.compactness = j.value("compactness", config.slic.compactness);
  config.overlay_alpha = j.value("alpha", config.overlay_alpha);
  config.beta_sq = j.value("beta_sq", config.beta_sq);
}

std::vector<std::uint8_t> boundary_png(const SegmentMap& segmap) {
  std::vector<std::uint8_t> gray(segmap.labels.size(), 0);
  for (int r = 0; r < segmap.height; ++r) {
    for (int c = 0; c < segmap.width; ++c) {
      const auto l = segmap.at(r, c);
      const bool edge = (c + 1 < segmap.width && segmap.at(r, c + 1) != l) ||
                        (r + 1 < segmap.height && segmap.at(r + 1, c) != l);
      if (edge) gray[static_cast<std::size_t>(r) * segmap.width + c] = 255;
    }
  }
  return encode_gray_png(segmap.width, segmap.height, gray);
}

}  // namespace

Api::Api(ServiceConfig config) : config_(std::move(config)) {
  std::random_device rd;
  salt_ = (std::uint64_t{rd()} << 32) ^ rd();
}

Api::~Api() = default;

std::string Api::next_id() {
  // Counter guarantees uniqueness; the salted mix makes ids hard to guess.
  std::uint64_t x = salt_ + 0x9e3779b97f4a7c15ULL * ++counter_;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x ^= x >> 31;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%016llx%08llx", static_cast<unsigned long long>(x),
                static_cast<unsigned long long>(counter_));
  return buf;
}

std::shared_ptr<Api::Entry> Api::find(const std::string& id) {
  std::lock_guard lock(store_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return nullptr;
  it->second->touch();
  return it->second;
}

std::size_t Api::session_count() const {
  std::lock_guard lock(store_mutex_);
  return sessions_.size();
}

std::size_t Api::evict_idle(Clock::time_point now) {
  std::lock_guard lock(store_mutex_);
  const auto limit = std::chrono::duration_cast<Clock::duration>(config_.idle_timeout).count();
  std::size_t removed = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (now.time_since_epoch().count() - it->second->last_used.load() > limit) {
      it = sessions_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

Response Api::create_session(std::string_view body, std::string_view content_type) {
  if (body.size() > config_.max_upload_bytes) {
    return error_response(413, "upload exceeds " + std::to_string(config_.max_upload_bytes) + " bytes");
  }
  try {
    EngineConfig engine = config_.engine;
    std::vector<std::uint8_t> bytes;
    if (content_type.starts_with("application/json")) {
      const json j = json::parse(body);
      if (!j.contains("image") || !j.at("image").is_string()) {
        return error_response(400, "missing base64 \"image\" field");
      }
      bytes = base64_decode(j.at("image").get<std::string>());
      if (j.contains("config")) apply_overrides(engine, j.at("config"));
    } else {
      bytes.assign(body.begin(), body.end());
    }
    Image image = decode_image(bytes);
    if (image.pixel_count() > config_.max_pixels) {
      return error_response(413, "image exceeds " + std::to_string(config_.max_pixels) + " pixels");
    }
    Session session(std::move(image), engine);
    const int n = session.n_segments();
    const SegmentMap& segmap = session.segmap();
    json out = {{"n_segments", n},
                {"width", segmap.width},
                {"height", segmap.height},
                {"revision", session.revision()},
                {"boundary_png", base64_encode(boundary_png(segmap))}};
    std::lock_guard lock(store_mutex_);
    const std::string id = next_id();
    out["id"] = id;
    sessions_.emplace(id, std::make_shared<Entry>(id, std::move(session)));
    return json_response(201, out);
  } catch (const json::exception& e) {
    return error_response(400, std::string("malformed JSON: ") + e.what());
  } catch (const Error& e) {
    return from_error(e);
  }
}

Response Api::add_scribbles(const std::string& id, std::string_view body) {
  auto entry = find(id);
  if (!entry) return not_found(id);
  try {
    const json j = json::parse(body);
    std::vector<Stroke> strokes;
    for (const auto& s : j.value("strokes", json::array())) {
      Stroke stroke;
      const auto cls = s.at("class").get<std::string>();
      if (cls != "fg" && cls != "bg") return error_response(400, "stroke class must be fg or bg");
      stroke.foreground = cls == "fg";
      stroke.radius = s.value("radius", 1.0);
      for (const auto& p : s.at("points")) stroke.points.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
      strokes.push_back(std::move(stroke));
    }
    std::lock_guard lock(entry->mutex);
    const Image& image = entry->session.image();
    Scribbles delta = rasterize_strokes(strokes, image.width, image.height);
    if (j.contains("bbox")) {
      const auto& b = j.at("bbox");
      delta.bbox = BoundingBox{b.at("row0").get<int>(), b.at("col0").get<int>(), b.at("row1").get<int>(),
                               b.at("col1").get<int>()};
    }
    const auto revision = entry->session.add_scribbles(delta);
    return json_response(200, {{"revision", revision},
                               {"fg_pixels", entry->session.scribbles().fg_pixels.size()},
                               {"bg_pixels", entry->session.scribbles().bg_pixels.size()}});
  } catch (const json::exception& e) {
    return error_response(400, std::string("malformed JSON: ") + e.what());
  } catch (const Error& e) {
    return from_error(e);
  }
}

Response Api::run_cut(const std::string& id) {
  auto entry = find(id);
  if (!entry) return not_found(id);
  try {
    std::lock_guard lock(entry->mutex);
    const CutOutput out = entry->session.run_cut();
    const Edge& e = out.cut.removed_edge;
    return json_response(200, {{"mask_png", base64_encode(encode_png(out.mask))},
                               {"overlay_png", base64_encode(encode_png(out.overlay))},
                               {"removed_edge", {{"u", e.u}, {"v", e.v}, {"weight", e.weight.value()}}},
                               {"n_fg_segments", out.cut.fg_segments.size()},
                               {"n_bg_segments", out.cut.bg_segments.size()},
                               {"energy", out.cut.energy},
                               {"seconds", out.seconds},
                               {"revision", entry->session.revision()}});
  } catch (const Error& e) {
    return from_error(e);
  }
}

Response Api::reset(const std::string& id) {
  auto entry = find(id);
  if (!entry) return not_found(id);
  std::lock_guard lock(entry->mutex);
  return json_response(200, {{"revision", entry->session.reset()}});
}

Response Api::remove(const std::string& id) {
  std::lock_guard lock(store_mutex_);
  if (sessions_.erase(id) == 0) return not_found(id);
  return {204, "", "application/json"};
}

Response Api::segments(const std::string& id) {
  auto entry = find(id);
  if (!entry) return not_found(id);
  std::lock_guard lock(entry->mutex);
  const SegmentMap& segmap = entry->session.segmap();
  return json_response(200, {{"n_segments", segmap.n_segments},
                             {"width", segmap.width},
                             {"height", segmap.height},
                             {"revision", entry->session.revision()},
                             {"boundary_png", base64_encode(boundary_png(segmap))},
                             {"labels", segmap.labels}});
}

struct Server::Impl {
  explicit Impl(ServiceConfig config) : api(config) {}

  Api api;
  httplib::Server http;
};

namespace {

void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  if (!r.body.empty()) res.set_content(r.body, r.content_type);
}

}  // namespace

Server::Server(ServiceConfig config) : impl_(std::make_unique<Impl>(config)) {
  auto& http = impl_->http;
  Api& api = impl_->api;
  http.set_payload_max_length(config.max_upload_bytes + 1024);
  http.set_pre_routing_handler([&api](const httplib::Request&, httplib::Response&) {
    api.evict_idle(Api::Clock::now());
    return httplib::Server::HandlerResponse::Unhandled;
  });
  http.Post("/sessions", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.create_session(req.body, req.get_header_value("Content-Type")));
  });
  http.Post(R"(/sessions/([^/]+)/scribbles)", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.add_scribbles(req.matches[1], req.body));
  });
  http.Post(R"(/sessions/([^/]+)/cut)", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.run_cut(req.matches[1]));
  });
  http.Post(R"(/sessions/([^/]+)/reset)", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.reset(req.matches[1]));
  });
  http.Delete(R"(/sessions/([^/]+))", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.remove(req.matches[1]));
  });
  http.Get(R"(/sessions/([^/]+)/segments)", [&api](const httplib::Request& req, httplib::Response& res) {
    send(res, api.segments(req.matches[1]));
  });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() { impl_->http.stop(); }

Api& Server::api() { return impl_->api; }

}  // namespace pssi::service
