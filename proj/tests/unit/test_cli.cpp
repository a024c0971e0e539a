#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "commands.hpp"
#include "squarecut/imaging.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "squarecut");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = squarecut::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("squarecut_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("synth, segment, eval") {
  TempDir dir;
  const auto synth = run({"synth", "--rect", "30,40,40,20", "--erase", "62,40,8,8", "--fg", "200", "--bg", "50",
                          "--canvas", "100,100", "--seed-rng", "7", "--noise", "5", "--out-image", dir / "img.pgm",
                          "--out-truth", dir / "truth.pgm"});
  REQUIRE(synth.code == 0);
  const json synth_record = json::parse(synth.out);
  CHECK(synth_record.at("schema_version") == 1);
  CHECK(synth_record.at("truth_voxels") == 800);

  SUBCASE("synth is deterministic") {
    const auto again = run({"synth", "--rect", "30,40,40,20", "--erase", "62,40,8,8", "--canvas", "100,100",
                            "--seed-rng", "7", "--noise", "5", "--out-image", dir / "img2.pgm", "--out-truth",
                            dir / "truth2.pgm"});
    REQUIRE(again.code == 0);
    CHECK(slurp(dir / "img.pgm") == slurp(dir / "img2.pgm"));
    CHECK(slurp(dir / "truth.pgm") == slurp(dir / "truth2.pgm"));
  }

  SUBCASE("segment writes mask, contour and a record") {
    const auto seg = run({"segment", "--in", dir / "img.pgm", "--seed", "50,50", "--rays", "30", "--nodes", "30",
                          "--delta", "4", "--radius", "30", "--aspect", "2", "--out-mask", dir / "m.pgm",
                          "--out-contour", dir / "c.csv", "--truth", dir / "truth.pgm"});
    REQUIRE(seg.code == 0);
    const json record = json::parse(seg.out);
    CHECK(record.at("schema_version") == 1);
    CHECK(record.at("command") == "segment");
    CHECK(record.at("boundary").size() == 30);
    CHECK(record.at("params").at("delta") == 4);
    CHECK(record.at("overlap").at("dsc").get<double>() > 0.9);
    const squarecut::BinaryMask mask = squarecut::load_mask(dir / "m.pgm");
    CHECK(mask.count() == record.at("mask_voxels").get<std::size_t>());
    const std::string csv = slurp(dir / "c.csv");
    CHECK(csv.rfind("x,y\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 31);

    const auto eval = run({"eval", "--a", dir / "m.pgm", "--r", dir / "m.pgm", "--csv", dir / "table.csv"});
    REQUIRE(eval.code == 0);
    CHECK(json::parse(eval.out).at("dsc") == 1.0);
    run({"eval", "--a", dir / "m.pgm", "--r", dir / "truth.pgm", "--csv", dir / "table.csv", "--label", "2"});
    const std::string table = slurp(dir / "table.csv");
    CHECK(table.rfind("No.,Volume manual (mm3),Volume automatic (mm3),Voxels manual,Voxels automatic,DSC (%)\n1,",
                      0) == 0);
    CHECK(table.find("\n2,800.000,") != std::string::npos);
  }

  SUBCASE("iterative re-seeding") {
    const auto seg =
        run({"segment", "--in", dir / "img.pgm", "--seed", "44,47", "--radius", "30", "--aspect", "2", "--iterate",
             "5"});
    REQUIRE(seg.code == 0);
    CHECK(json::parse(seg.out).at("iterations").get<int>() >= 1);
  }

  SUBCASE("sweep") {
    const auto sweep = run({"sweep", "--in", dir / "img.pgm", "--seed", "49.5,49.5", "--radius", "30", "--aspect",
                            "2", "--nodes", "40", "--deltas", "0,1,2,3,4,5,6", "--out-dir", dir / "sweep", "--truth",
                            dir / "truth.pgm"});
    REQUIRE(sweep.code == 0);
    const json runs = json::parse(sweep.out).at("runs");
    REQUIRE(runs.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(fs::exists(dir / ("sweep/mask_delta" + std::to_string(i) + ".pgm")));
      if (i > 0) CHECK(runs[i].at("cut_cost").get<double>() <= runs[i - 1].at("cut_cost").get<double>());
    }
    CHECK(slurp(dir / "sweep/sweep.csv").rfind("delta,cut_cost,mask_voxels,dsc\n0,", 0) == 0);
  }

  SUBCASE("exit codes") {
    const auto no_seed = run({"segment", "--in", dir / "img.pgm"});
    CHECK(no_seed.code == 2);
    CHECK(no_seed.err.find("--seed") != std::string::npos);
    CHECK(no_seed.err.find("Usage") != std::string::npos);

    const auto outside = run({"segment", "--in", dir / "img.pgm", "--seed", "500,10"});
    CHECK(outside.code == 4);
    CHECK(outside.err.find("seed_out_of_image") != std::string::npos);

    CHECK(run({"segment", "--in", dir / "missing.pgm", "--seed", "5,5"}).code == 3);
    CHECK(run({"segment", "--in", dir / "truth.pgm", "--seed", "5,5", "--template", dir / "none.txt"}).code == 3);
    CHECK(run({"segment", "--in", dir / "img.pgm", "--seed", "5"}).code == 2);
    CHECK(run({"segment", "--in", dir / "img.pgm", "--seed", "5,5", "--rays", "2"}).code == 2);
    CHECK(run({"segment", "--in", dir / "img.pgm", "--seed", "5,5", "--patch", "4"}).code == 2);
    CHECK(run({"segment", "--in", dir / "img.pgm", "--seed", "5,5", "--sampling", "cubic"}).code == 2);
    CHECK(run({"synth", "--rect", "90,90,40,20", "--out-image", dir / "x.pgm", "--out-truth", dir / "y.pgm"}).code ==
          2);
    CHECK(run({"eval", "--a", dir / "img.pgm"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"serve", "--listen", "nowhere"}).code == 2);
    CHECK(run({"--help"}).code == 0);
  }
}

TEST_CASE("template files") {
  TempDir dir;
  run({"synth", "--rect", "30,40,40,20", "--out-image", dir / "img.pgm", "--out-truth", dir / "truth.pgm"});
  std::ofstream(dir / "rect.txt") << "# 2:1 rectangle, clockwise with y down\n-2 -1\n2 -1\n2 1\n-2 1\n";
  const auto seg = run({"segment", "--in", dir / "img.pgm", "--seed", "49.5,49.5", "--radius", "30", "--template",
                        dir / "rect.txt", "--nodes", "100", "--delta", "1", "--truth", dir / "truth.pgm"});
  REQUIRE(seg.code == 0);
  CHECK(json::parse(seg.out).at("overlap").at("dsc").get<double>() > 0.95);

  std::ofstream(dir / "ccw.txt") << "-2 -1\n-2 1\n2 1\n2 -1\n";
  CHECK(run({"segment", "--in", dir / "img.pgm", "--seed", "49.5,49.5", "--template", dir / "ccw.txt"}).code == 3);
}

TEST_CASE("bench") {
  const auto bench = run({"bench", "--size", "128", "--rays", "60", "--nodes", "60", "--repeat", "2"});
  REQUIRE(bench.code == 0);
  const json record = json::parse(bench.out);
  CHECK(record.at("grid_nodes") == 3600);
  CHECK(record.at("runs_ms").size() == 2);
  CHECK(record.at("dsc").get<double>() > 0.9);
}
