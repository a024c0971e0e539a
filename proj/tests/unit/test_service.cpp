#include <doctest.h>

#include <json.hpp>
#include <thread>

#include "squarecut/error.hpp"
#include "squarecut/pipeline.hpp"
#include "squarecut/service.hpp"
#include "squarecut/service_http.hpp"
#include "support/errors.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace squarecut;
using json = nlohmann::json;

namespace {

std::string as_string(const std::vector<std::uint8_t>& b) { return {b.begin(), b.end()}; }

std::string upload_ok(Service& svc, const GrayImage& img) {
  const HttpReply r = svc.upload(as_string(encode_pgm(img)));
  REQUIRE(r.status == 200);
  return json::parse(r.body).at("id").get<std::string>();
}

json segment_request(const std::string& id, double x, double y, int delta) {
  return {{"image_id", id}, {"seed", {{"x", x}, {"y", y}}}, {"rays", 24}, {"nodes", 30},
          {"delta", delta}, {"radius", 25},                   {"patch", 5}, {"smooth_iters", 0}};
}

std::vector<bool> decode_rle(const json& runs, std::size_t total) {
  std::vector<bool> bits;
  bool on = false;
  for (const auto& run : runs) {
    bits.insert(bits.end(), run.get<std::size_t>(), on);
    on = !on;
  }
  CHECK(bits.size() == total);
  return bits;
}

std::string error_code(const HttpReply& r) { return json::parse(r.body).at("error").get<std::string>(); }

}  // namespace

TEST_CASE("upload") {
  Service svc;
  const GrayImage img = fixture::bright_square().image;
  const std::string pgm = as_string(encode_pgm(img));

  const HttpReply ok = svc.upload(pgm);
  CHECK(ok.status == 200);
  const json body = json::parse(ok.body);
  CHECK(body.at("width") == 100);
  CHECK(body.at("height") == 100);
  CHECK(body.at("id").get<std::string>().size() == 64);

  SUBCASE("same bytes, same id") {
    CHECK(json::parse(svc.upload(pgm).body).at("id") == body.at("id"));
    CHECK(svc.store().size() == 1);
  }
  SUBCASE("truncated payload") {
    const HttpReply bad = svc.upload(std::string_view(pgm).substr(0, pgm.size() - 10));
    CHECK(bad.status == 400);
    CHECK(error_code(bad) == "malformed_image");
  }
  SUBCASE("png payload") {
    const std::vector<std::uint16_t> px{0, 128, 255, 7};
    const HttpReply png = svc.upload(oracle::encode_png_gray(2, 2, px, 8));
    CHECK(png.status == 200);
    CHECK(json::parse(png.body).at("width") == 2);
  }
  SUBCASE("size limit") {
    Service small(ServiceConfig{4, 64});
    const HttpReply big = small.upload(pgm);
    CHECK(big.status == 413);
    CHECK(error_code(big) == "payload_too_large");
  }
}

TEST_CASE("content ids are SHA-256") {
  CHECK(content_id(std::vector<std::uint8_t>{}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const std::string abc = "abc";
  CHECK(content_id(std::span(reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size())) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("segment endpoint") {
  Service svc;
  const std::string id = upload_ok(svc, fixture::bright_square().image);

  SUBCASE("delta 0 on the square gives equal levels") {
    const HttpReply r = svc.segment(segment_request(id, 49.5, 49.5, 0).dump());
    REQUIRE(r.status == 200);
    const json body = json::parse(r.body);
    const auto boundary = body.at("boundary").get<std::vector<int>>();
    REQUIRE(boundary.size() == 24);
    for (int b : boundary) CHECK(b == boundary.front());
    CHECK(body.at("contour").size() == 24);
    CHECK(body.at("contour")[0].contains("x"));
    CHECK(body.at("timings_ms").contains("solve"));
  }

  SUBCASE("mask run lengths match the pipeline mask") {
    const HttpReply r = svc.segment(segment_request(id, 49.5, 49.5, 2).dump());
    REQUIRE(r.status == 200);
    const json body = json::parse(r.body);
    const auto bits = decode_rle(body.at("mask_rle"), 100 * 100);

    SegParams p;
    p.rays = 24;
    p.nodes = 30;
    p.delta = 2;
    p.radius_scale = 25;
    p.smoothing_iterations = 0;
    const SegResult expected = segment(fixture::bright_square().image, {49.5, 49.5}, p);
    bool same = true;
    for (int y = 0; y < 100; ++y) {
      for (int x = 0; x < 100; ++x) same &= bits[y * 100 + x] == expected.mask.at(x, y);
    }
    CHECK(same);
    CHECK(body.at("cut_cost").get<double>() == expected.cut_cost);
  }

  SUBCASE("identical requests give identical bodies apart from timings") {
    json a = json::parse(svc.segment(segment_request(id, 47, 51, 3).dump()).body);
    json b = json::parse(svc.segment(segment_request(id, 47, 51, 3).dump()).body);
    a.erase("timings_ms");
    b.erase("timings_ms");
    CHECK(a.dump() == b.dump());
  }

  SUBCASE("errors") {
    const HttpReply outside = svc.segment(segment_request(id, 150, 20, 2).dump());
    CHECK(outside.status == 422);
    CHECK(error_code(outside) == "seed_out_of_image");

    json few_rays = segment_request(id, 50, 50, 2);
    few_rays["rays"] = 2;
    const HttpReply rays = svc.segment(few_rays.dump());
    CHECK(rays.status == 422);
    CHECK(error_code(rays) == "invalid_params");

    json wrong_type = segment_request(id, 50, 50, 2);
    wrong_type["nodes"] = "many";
    CHECK(svc.segment(wrong_type.dump()).status == 422);

    json no_seed = segment_request(id, 50, 50, 2);
    no_seed.erase("seed");
    CHECK(svc.segment(no_seed.dump()).status == 422);

    const HttpReply unknown = svc.segment(segment_request("feed", 50, 50, 2).dump());
    CHECK(unknown.status == 404);
    CHECK(error_code(unknown) == "unknown_image");

    CHECK(svc.segment("{not json").status == 400);
    CHECK(svc.segment("[1, 2]").status == 400);
  }
}

TEST_CASE("pixels endpoint") {
  Service svc;
  const std::string id = upload_ok(svc, GrayImage(2, 2, std::vector<std::uint16_t>{0, 128, 255, 7}));
  const HttpReply r = svc.pixels(id);
  CHECK(r.status == 200);
  CHECK(r.body == std::string("\x00\x80\xff\x07", 4));
  CHECK(r.headers == std::vector<std::pair<std::string, std::string>>{{"X-Image-Width", "2"}, {"X-Image-Height", "2"}});

  CHECK(svc.pixels("0123").status == 404);

  // 16-bit: v * 255 / 1024 rounded half up.
  GrayImage wide(5, 1, std::vector<std::uint16_t>{2, 3, 512, 1000, 1024});
  wide.set_bit_depth(16);
  const HttpReply w = svc.pixels(upload_ok(svc, wide));
  const std::vector<std::uint8_t> got(w.body.begin(), w.body.end());
  CHECK(got == std::vector<std::uint8_t>{0, 1, 128, 249, 255});
}

TEST_CASE("run length encoding") {
  BinaryMask m(3, 2);
  CHECK(run_length_encode(m) == std::vector<std::size_t>{6});
  m.set(0, 0, true);
  m.set(1, 0, true);
  m.set(1, 1, true);
  CHECK(run_length_encode(m) == std::vector<std::size_t>{0, 2, 2, 1, 1});
}

TEST_CASE("store evicts the least recently used image") {
  ImageStore store(2);
  store.insert("a", GrayImage(1, 1));
  store.insert("b", GrayImage(1, 1));
  CHECK(store.find("a"));
  store.insert("c", GrayImage(1, 1));
  CHECK(store.size() == 2);
  CHECK(store.find("a"));
  CHECK_FALSE(store.find("b"));
  CHECK(store.find("c"));
  CHECK(code_of([] { ImageStore(0); }) == Errc::invalid_argument);
}

TEST_CASE("concurrent segmentations agree with serial ones") {
  Service svc;
  const std::string a = upload_ok(svc, fixture::bright_square().image);
  const std::string b = upload_ok(svc, fixture::rectangle(true, 10.0, 1).image);
  auto body = [&](const std::string& id, int delta) {
    json j = json::parse(svc.segment(segment_request(id, 49.5, 49.5, delta).dump()).body);
    j.erase("timings_ms");
    return j.dump();
  };
  std::vector<std::string> serial;
  for (int i = 0; i < 8; ++i) serial.push_back(body(i % 2 ? a : b, i % 4));
  std::vector<std::string> parallel(8);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&, i] { parallel[i] = body(i % 2 ? a : b, i % 4); });
  for (auto& t : threads) t.join();
  CHECK(parallel == serial);
}

TEST_CASE("listen address parsing") {
  const ServeOptions o = parse_listen("0.0.0.0:9000");
  CHECK(o.host == "0.0.0.0");
  CHECK(o.port == 9000);
  CHECK(code_of([] { parse_listen("localhost"); }) == Errc::invalid_argument);
  CHECK(code_of([] { parse_listen("localhost:http"); }) == Errc::invalid_argument);
  CHECK(code_of([] { parse_listen("localhost:70000"); }) == Errc::invalid_argument);
}

TEST_CASE("HTTP round trip") {
  Service svc(ServiceConfig{8, 1 << 20});
  httplib::Server server;
  install_routes(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  const std::string pgm = as_string(encode_pgm(fixture::bright_square().image));
  const auto up = client.Post("/images", pgm, "application/octet-stream");
  REQUIRE(up);
  CHECK(up->status == 200);
  const std::string id = json::parse(up->body).at("id").get<std::string>();

  const auto seg = client.Post("/segment", segment_request(id, 49.5, 49.5, 0).dump(), "application/json");
  REQUIRE(seg);
  CHECK(seg->status == 200);
  CHECK(json::parse(seg->body).at("boundary").size() == 24);

  const auto px = client.Get("/images/" + id + "/pixels");
  REQUIRE(px);
  CHECK(px->status == 200);
  CHECK(px->body.size() == 100 * 100);
  CHECK(px->get_header_value("X-Image-Width") == "100");

  const auto missing = client.Get("/images/abc/pixels");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  const auto huge = client.Post("/images", std::string((1 << 20) + 1, 'x'), "application/octet-stream");
  REQUIRE(huge);
  CHECK(huge->status == 413);

  const auto bad = client.Post("/segment", "{", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  server.stop();
  worker.join();
}
