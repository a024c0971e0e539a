#include "squarecut/service.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <json.hpp>

#include "squarecut/error.hpp"
#include "squarecut/pipeline.hpp"
#include "squarecut/service_http.hpp"

namespace squarecut {

using json = nlohmann::json;

ImageStore::ImageStore(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(Errc::invalid_argument, "image store capacity must be positive");
}

SessionImage ImageStore::insert(const std::string& id, GrayImage image) {
  std::lock_guard lock(mutex_);
  if (auto it = slots_.find(id); it != slots_.end()) {
    recency_.splice(recency_.begin(), recency_, it->second.position);
    return it->second.entry;
  }
  while (slots_.size() >= capacity_) {
    slots_.erase(recency_.back());
    recency_.pop_back();
  }
  recency_.push_front(id);
  SessionImage entry{id, std::make_shared<const GrayImage>(std::move(image)), std::chrono::system_clock::now()};
  slots_.emplace(id, Slot{entry, recency_.begin()});
  return entry;
}

std::optional<SessionImage> ImageStore::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = slots_.find(id);
  if (it == slots_.end()) return std::nullopt;
  recency_.splice(recency_.begin(), recency_, it->second.position);
  return it->second.entry;
}

std::size_t ImageStore::size() const {
  std::lock_guard lock(mutex_);
  return slots_.size();
}

std::string content_id(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::io_error, "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::vector<std::size_t> run_length_encode(const BinaryMask& mask) {
  std::vector<std::size_t> runs;
  std::uint8_t current = 0;
  std::size_t length = 0;
  for (std::uint8_t bit : mask.bits()) {
    if (bit != current) {
      runs.push_back(length);
      current = bit;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

std::vector<std::uint8_t> display_bytes(const GrayImage& img) {
  const auto px = img.pixels();
  std::vector<std::uint8_t> out(px.size());
  if (img.bit_depth() == 8) {
    std::transform(px.begin(), px.end(), out.begin(),
                   [](std::uint16_t v) { return static_cast<std::uint8_t>(std::min<std::uint16_t>(v, 255)); });
    return out;
  }
  const std::uint64_t max = px.empty() ? 0 : *std::max_element(px.begin(), px.end());
  if (max == 0) return out;
  // floor(v * 255 / max + 1/2) in integers.
  std::transform(px.begin(), px.end(), out.begin(), [max](std::uint16_t v) {
    return static_cast<std::uint8_t>((std::uint64_t{v} * 510 + max) / (2 * max));
  });
  return out;
}

namespace {

HttpReply json_reply(int status, const json& body) { return {status, "application/json", body.dump(), {}}; }

HttpReply error_reply(int status, std::string_view code, const std::string& message) {
  return json_reply(status, json{{"error", code}, {"message", message}});
}

struct BadParam {
  std::string message;
};

int int_field(const json& req, const char* key, int fallback) {
  auto it = req.find(key);
  if (it == req.end()) return fallback;
  if (!it->is_number_integer()) throw BadParam{std::string(key) + " must be an integer"};
  const auto v = it->get<std::int64_t>();
  if (v < -1'000'000 || v > 1'000'000) throw BadParam{std::string(key) + " is out of range"};
  return static_cast<int>(v);
}

double number_field(const json& req, const char* key, double fallback) {
  auto it = req.find(key);
  if (it == req.end()) return fallback;
  if (!it->is_number()) throw BadParam{std::string(key) + " must be a number"};
  return it->get<double>();
}

struct SegmentRequest {
  std::string image_id;
  Point2 seed;
  SegParams params;
};

SegmentRequest parse_segment_request(const json& req) {
  SegmentRequest out;
  auto id = req.find("image_id");
  if (id == req.end() || !id->is_string()) throw BadParam{"image_id must be a string"};
  out.image_id = id->get<std::string>();

  auto seed = req.find("seed");
  if (seed == req.end() || !seed->is_object()) throw BadParam{"seed must be an object {x, y}"};
  auto sx = seed->find("x");
  auto sy = seed->find("y");
  if (sx == seed->end() || sy == seed->end() || !sx->is_number() || !sy->is_number()) {
    throw BadParam{"seed.x and seed.y must be numbers"};
  }
  out.seed = {sx->get<double>(), sy->get<double>()};

  SegParams& p = out.params;
  p.rays = int_field(req, "rays", p.rays);
  p.nodes = int_field(req, "nodes", p.nodes);
  p.delta = int_field(req, "delta", p.delta);
  p.radius_scale = number_field(req, "radius", p.radius_scale);
  p.patch = int_field(req, "patch", p.patch);
  p.smoothing_iterations = int_field(req, "smooth_iters", p.smoothing_iterations);
  if (auto it = req.find("sampling"); it != req.end()) {
    if (*it == "nearest") {
      p.sampling = Sampling::nearest;
    } else if (*it == "bilinear") {
      p.sampling = Sampling::bilinear;
    } else {
      throw BadParam{"sampling must be \"nearest\" or \"bilinear\""};
    }
  }
  if (p.rays > 100'000 || p.nodes > 100'000) throw BadParam{"rays and nodes are limited to 100000"};
  return out;
}

json segment_body(const SegResult& r) {
  json contour = json::array();
  for (const Point2& p : r.contour.points) contour.push_back({{"x", p.x}, {"y", p.y}});
  return json{
      {"contour", std::move(contour)},
      {"boundary", r.boundary},
      {"mask_rle", run_length_encode(r.mask)},
      {"cut_cost", r.cut_cost},
      {"mean_intensity", r.mean_intensity},
      {"width", r.mask.width()},
      {"height", r.mask.height()},
      {"timings_ms",
       {{"graph", r.timings.graph_ms},
        {"solve", r.timings.solve_ms},
        {"rasterize", r.timings.rasterize_ms},
        {"total", r.timings.total_ms()}}},
  };
}

}  // namespace

Service::Service(ServiceConfig config) : config_(config), store_(config.max_images) {}

HttpReply Service::upload(std::string_view body) {
  return upload(std::span(reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));
}

HttpReply Service::upload(std::span<const std::uint8_t> body) {
  if (body.size() > config_.max_upload_bytes) {
    return error_reply(413, "payload_too_large",
                       "upload exceeds " + std::to_string(config_.max_upload_bytes) + " bytes");
  }
  GrayImage img;
  try {
    img = decode_image(body);
  } catch (const Error& e) {
    return error_reply(400, "malformed_image", e.what());
  }
  const SessionImage entry = store_.insert(content_id(body), std::move(img));
  return json_reply(200, json{{"id", entry.id}, {"width", entry.image->width()}, {"height", entry.image->height()}});
}

HttpReply Service::segment(std::string_view json_body) {
  json req;
  try {
    req = json::parse(json_body);
  } catch (const json::parse_error& e) {
    return error_reply(400, "malformed_json", e.what());
  }
  if (!req.is_object()) return error_reply(400, "malformed_json", "request body must be a JSON object");

  SegmentRequest parsed;
  try {
    parsed = parse_segment_request(req);
  } catch (const BadParam& e) {
    return error_reply(422, "invalid_params", e.message);
  }

  const auto entry = store_.find(parsed.image_id);
  if (!entry) return error_reply(404, "unknown_image", "no image with id " + parsed.image_id);

  try {
    const SegResult result = squarecut::segment(*entry->image, parsed.seed, parsed.params);
    return json_reply(200, segment_body(result));
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::seed_out_of_image:
        return error_reply(422, "seed_out_of_image", e.what());
      case Errc::solver_invariant:
      case Errc::empty_ray:
      case Errc::unbounded:
        return error_reply(500, "solver_invariant", e.what());
      default:
        return error_reply(422, "invalid_params", e.what());
    }
  }
}

HttpReply Service::pixels(const std::string& id) {
  const auto entry = store_.find(id);
  if (!entry) return error_reply(404, "unknown_image", "no image with id " + id);
  const auto bytes = display_bytes(*entry->image);
  HttpReply reply{200, "application/octet-stream", std::string(bytes.begin(), bytes.end()), {}};
  reply.headers.emplace_back("X-Image-Width", std::to_string(entry->image->width()));
  reply.headers.emplace_back("X-Image-Height", std::to_string(entry->image->height()));
  return reply;
}

ServeOptions parse_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == listen.size()) {
    throw Error(Errc::invalid_argument, "listen address must look like host:port, got '" + listen + "'");
  }
  ServeOptions out;
  out.host = listen.substr(0, colon);
  const std::string port = listen.substr(colon + 1);
  if (port.find_first_not_of("0123456789") != std::string::npos || port.size() > 5) {
    throw Error(Errc::invalid_argument, "invalid port '" + port + "'");
  }
  out.port = std::stoi(port);
  if (out.port > 65535) throw Error(Errc::invalid_argument, "invalid port '" + port + "'");
  return out;
}

namespace {

void send(const HttpReply& reply, httplib::Response& res) {
  res.status = reply.status;
  for (const auto& [name, value] : reply.headers) res.set_header(name, value);
  res.set_content(reply.body, reply.content_type);
}

}  // namespace

void install_routes(httplib::Server& server, Service& service) {
  // Oversized bodies are rejected by httplib before reaching the handler.
  server.set_payload_max_length(service.config().max_upload_bytes);
  server.Post("/images", [&service](const httplib::Request& req, httplib::Response& res) {
    send(service.upload(std::string_view(req.body)), res);
  });
  server.Post("/segment", [&service](const httplib::Request& req, httplib::Response& res) {
    send(service.segment(req.body), res);
  });
  server.Get(R"(/images/([0-9A-Za-z]+)/pixels)", [&service](const httplib::Request& req, httplib::Response& res) {
    send(service.pixels(req.matches[1]), res);
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string code = res.status == 413 ? "payload_too_large" : res.status == 404 ? "not_found" : "http_error";
    res.set_content(json{{"error", code}, {"message", httplib::status_message(res.status)}}.dump(),
                    "application/json");
  });
}

bool run_server(Service& service, const ServeOptions& options) {
  httplib::Server server;
  install_routes(server, service);
  if (!options.static_dir.empty() && !server.set_mount_point("/", options.static_dir)) {
    throw Error(Errc::io_error, "static directory not found: " + options.static_dir);
  }
  return server.listen(options.host, options.port);
}

}  // namespace squarecut
