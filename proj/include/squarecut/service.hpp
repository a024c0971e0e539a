#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "squarecut/imaging.hpp"

namespace squarecut {

struct SessionImage {
  std::string id;
  std::shared_ptr<const GrayImage> image;
  std::chrono::system_clock::time_point uploaded;
};

/// Bounded in-memory image store. Lookups refresh recency; inserting beyond
/// the capacity evicts the least recently used image.
class ImageStore {
 public:
  explicit ImageStore(std::size_t capacity = 32);

  /// Stores the image under id unless it is already present. Returns the
  /// stored entry either way.
  SessionImage insert(const std::string& id, GrayImage image);
  std::optional<SessionImage> find(const std::string& id);

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }

 private:
  using Recency = std::list<std::string>;

  struct Slot {
    SessionImage entry;
    Recency::iterator position;
  };

  std::size_t capacity_;
  mutable std::mutex mutex_;
  Recency recency_;  // front is most recent
  std::unordered_map<std::string, Slot> slots_;
};

/// Lowercase hex SHA-256.
std::string content_id(std::span<const std::uint8_t> bytes);

/// Alternating off/on run lengths over the row-major bits, starting with an
/// off run (which is 0 when the first pixel is set).
std::vector<std::size_t> run_length_encode(const BinaryMask& mask);

/// 8-bit rendering. 8-bit images pass through; 16-bit images are scaled by
/// 255 / max with round-half-up.
std::vector<std::uint8_t> display_bytes(const GrayImage& img);

struct HttpReply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::vector<std::pair<std::string, std::string>> headers;
};

struct ServiceConfig {
  std::size_t max_images = 32;
  std::size_t max_upload_bytes = std::size_t{16} << 20;
};

/// Request handlers, independent of the HTTP transport.
class Service {
 public:
  explicit Service(ServiceConfig config = {});

  /// POST /images
  HttpReply upload(std::span<const std::uint8_t> body);
  HttpReply upload(std::string_view body);
  /// POST /segment
  HttpReply segment(std::string_view json_body);
  /// GET /images/{id}/pixels
  HttpReply pixels(const std::string& id);

  const ServiceConfig& config() const { return config_; }
  ImageStore& store() { return store_; }

 private:
  ServiceConfig config_;
  ImageStore store_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8071;
  std::string static_dir;  // empty: no static files
};

/// Parses "host:port".
ServeOptions parse_listen(const std::string& listen);

/// Blocks serving HTTP until the process ends. Returns false if the address
/// could not be bound.
bool run_server(Service& service, const ServeOptions& options);

}  // namespace squarecut
