#include "commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "squarecut/contour.hpp"
#include "squarecut/error.hpp"
#include "squarecut/metrics.hpp"
#include "squarecut/pipeline.hpp"
#include "squarecut/service.hpp"

namespace squarecut::cli {

namespace {

using json = nlohmann::json;
constexpr int kSchemaVersion = 1;

struct UsageError {
  std::string message;
};

std::vector<double> parse_numbers(const std::string& text, std::size_t count, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw UsageError{std::string(flag) + ": '" + item + "' is not a number"};
    }
    values.push_back(v);
  }
  if (values.size() != count) {
    throw UsageError{std::string(flag) + " expects " + std::to_string(count) + " comma-separated values"};
  }
  return values;
}

std::vector<int> parse_ints(const std::string& text, std::size_t count, const char* flag) {
  std::vector<int> out;
  for (double v : parse_numbers(text, count, flag)) {
    if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError{std::string(flag) + " expects integers"};
    out.push_back(static_cast<int>(v));
  }
  return out;
}

PixelRect parse_rect(const std::string& text, const char* flag) {
  const auto v = parse_ints(text, 4, flag);
  return {v[0], v[1], v[2], v[3]};
}

json point_json(Point2 p) { return {{"x", p.x}, {"y", p.y}}; }

json overlap_json(const OverlapReport& r) {
  return {{"dsc", r.dsc},
          {"volume_a_mm3", r.volume_a},
          {"volume_r_mm3", r.volume_r},
          {"voxels_a", r.voxels_a},
          {"voxels_r", r.voxels_r},
          {"voxels_intersection", r.voxels_intersection}};
}

json timings_json(const SegTimings& t) {
  return {{"graph", t.graph_ms}, {"solve", t.solve_ms}, {"rasterize", t.rasterize_ms}, {"total", t.total_ms()}};
}

// Flags shared by segment and sweep.
struct SegFlags {
  std::string input;
  std::string seed;
  int rays = 30;
  int nodes = 30;
  int delta = 4;
  double radius = 20.0;
  int patch = 5;
  int smooth = 1;
  std::string sampling = "nearest";
  std::string cost_model = "transition";
  std::string template_path;
  double aspect = 1.0;
  double angle_offset = 0.0;
  std::string truth;

  void attach(CLI::App* cmd) {
    cmd->add_option("--in", input, "Input image (PGM or PNG)")->required();
    cmd->add_option("--seed", seed, "Seed point x,y in pixels")->required();
    cmd->add_option("--rays", rays, "Number of rays R")->capture_default_str();
    cmd->add_option("--nodes", nodes, "Nodes per ray Z")->capture_default_str();
    cmd->add_option("--delta", delta, "Smoothness constraint between adjacent rays")->capture_default_str();
    cmd->add_option("--radius", radius, "Template radius in pixels")->capture_default_str();
    cmd->add_option("--patch", patch, "Seed patch size d (odd)")->capture_default_str();
    cmd->add_option("--smooth", smooth, "Contour smoothing iterations")->capture_default_str();
    cmd->add_option("--sampling", sampling, "nearest or bilinear")
        ->check(CLI::IsMember({"nearest", "bilinear"}))
        ->capture_default_str();
    cmd->add_option("--cost", cost_model, "transition or intensity")
        ->check(CLI::IsMember({"transition", "intensity"}))
        ->capture_default_str();
    cmd->add_option("--template", template_path, "Template polygon file (x y per line, clockwise)");
    cmd->add_option("--aspect", aspect, "Aspect ratio of the built-in rectangle template")->capture_default_str();
    cmd->add_option("--angle-offset", angle_offset, "Angle of the first ray in radians")->capture_default_str();
    cmd->add_option("--truth", truth, "Reference mask; adds an overlap report");
  }

  Point2 seed_point() const {
    const auto v = parse_numbers(seed, 2, "--seed");
    return {v[0], v[1]};
  }

  // Everything except the template, which needs file I/O.
  SegParams params() const {
    SegParams p;
    p.rays = rays;
    p.nodes = nodes;
    p.delta = delta;
    p.radius_scale = radius;
    p.patch = patch;
    p.smoothing_iterations = smooth;
    p.sampling = sampling == "bilinear" ? Sampling::bilinear : Sampling::nearest;
    p.cost_model = cost_model == "intensity" ? CostModel::intensity : CostModel::transition;
    p.angle_offset = angle_offset;
    if (!(aspect > 0.0) || !std::isfinite(aspect)) throw UsageError{"--aspect must be positive"};
    p.shape = aspect == 1.0 ? square_template() : rectangle_template(aspect);
    try {
      p.validate();
    } catch (const Error& e) {
      throw UsageError{e.what()};
    }
    return p;
  }

  json params_json(const SegParams& p) const {
    return {{"rays", p.rays},
            {"nodes", p.nodes},
            {"delta", p.delta},
            {"effective_delta", p.effective_delta()},
            {"radius", p.radius_scale},
            {"patch", p.patch},
            {"smooth_iters", p.smoothing_iterations},
            {"sampling", sampling},
            {"cost", cost_model},
            {"template", template_path.empty() ? (aspect == 1.0 ? "square" : "rectangle") : template_path},
            {"aspect", aspect},
            {"angle_offset", p.angle_offset}};
  }
};

json result_json(const SegResult& r) {
  json contour = json::array();
  for (const Point2& p : r.contour.points) contour.push_back(point_json(p));
  return {{"seed", point_json(r.seed)},
          {"iterations", r.iterations},
          {"mean_intensity", r.mean_intensity},
          {"boundary", r.boundary},
          {"cut_cost", r.cut_cost},
          {"flow_value", r.flow_value},
          {"contour", std::move(contour)},
          {"mask_voxels", r.mask.count()},
          {"mask_volume_mm3", static_cast<double>(r.mask.count()) * r.mask.spacing().voxel_volume()},
          {"timings_ms", timings_json(r.timings)}};
}

void print_record(std::ostream& out, json record) {
  record["schema_version"] = kSchemaVersion;
  out << record.dump(2) << "\n";
}

}  // namespace

BenchFixture bench_fixture(int size, int rays, int nodes, std::uint64_t rng_seed) {
  SynthSpec spec;
  spec.canvas_w = size;
  spec.canvas_h = size;
  const int w = size * 2 / 5;
  const int h = size / 5;
  spec.rect = {(size - w) / 2, (size - h) / 2, w, h};
  spec.noise_sigma = 10.0;
  spec.rng_seed = rng_seed;
  SynthResult synth = synth_rectangle(spec);

  BenchFixture fx;
  fx.image = std::move(synth.image);
  fx.truth = std::move(synth.truth);
  fx.seed = {spec.rect.x0 + (w - 1) / 2.0, spec.rect.y0 + (h - 1) / 2.0};
  fx.params.rays = rays;
  fx.params.nodes = nodes;
  fx.params.delta = 4;
  fx.params.radius_scale = 0.3 * size;
  fx.params.shape = rectangle_template(2.0);
  return fx;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seed-based graph-cut segmentation with a polygon template", "squarecut"};
  app.require_subcommand(1);
  std::function<int()> action;

  // segment
  SegFlags seg;
  std::string out_mask, out_contour;
  int iterate = 1;
  auto* segment_cmd = app.add_subcommand("segment", "Segment one object from a seed point");
  seg.attach(segment_cmd);
  segment_cmd->add_option("--out-mask", out_mask, "Write the mask as PGM");
  segment_cmd->add_option("--out-contour", out_contour, "Write the smoothed contour as CSV");
  segment_cmd->add_option("--iterate", iterate, "Re-seed at the mask centroid up to N rounds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // synth
  std::string rect, canvas = "100,100", spacing = "1,1,1", out_image, out_truth;
  std::vector<std::string> erase;
  int fg = 200, bg = 50;
  double noise = 0.0;
  std::uint64_t seed_rng = 0;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a rectangle fixture and its ground truth");
  synth_cmd->add_option("--rect", rect, "Rectangle x0,y0,w,h")->required();
  synth_cmd->add_option("--erase", erase, "Erased region x0,y0,w,h (repeatable)");
  synth_cmd->add_option("--fg", fg, "Foreground intensity")->check(CLI::Range(0, 65535))->capture_default_str();
  synth_cmd->add_option("--bg", bg, "Background intensity")->check(CLI::Range(0, 65535))->capture_default_str();
  synth_cmd->add_option("--canvas", canvas, "Canvas width,height")->capture_default_str();
  synth_cmd->add_option("--noise", noise, "Gaussian noise sigma")->check(CLI::NonNegativeNumber)->capture_default_str();
  synth_cmd->add_option("--seed-rng", seed_rng, "Noise generator seed")->capture_default_str();
  synth_cmd->add_option("--spacing", spacing, "Pixel spacing sx,sy,thickness in mm")->capture_default_str();
  synth_cmd->add_option("--out-image", out_image, "Image PGM")->required();
  synth_cmd->add_option("--out-truth", out_truth, "Ground-truth mask PGM")->required();

  // eval
  std::string eval_a, eval_r, eval_csv, eval_label = "1";
  auto* eval_cmd = app.add_subcommand("eval", "Dice overlap and volumes of two masks");
  eval_cmd->add_option("--a", eval_a, "Automatic mask")->required();
  eval_cmd->add_option("--r", eval_r, "Reference mask")->required();
  eval_cmd->add_option("--csv", eval_csv, "Append a table row to this CSV file");
  eval_cmd->add_option("--label", eval_label, "Row label for --csv")->capture_default_str();

  // sweep
  SegFlags sweep;
  std::string deltas = "0,1,2,3,4,5,6", out_dir;
  auto* sweep_cmd = app.add_subcommand("sweep", "Segment once per delta value");
  sweep.attach(sweep_cmd);
  sweep_cmd->add_option("--deltas", deltas, "Comma-separated delta values")->capture_default_str();
  sweep_cmd->add_option("--out-dir", out_dir, "Directory for masks and sweep.csv")->required();

  // bench
  int bench_size = 512, bench_rays = 300, bench_nodes = 300, bench_repeat = 1;
  std::uint64_t bench_rng = 0;
  auto* bench_cmd = app.add_subcommand("bench", "Time a full segmentation on a synthetic image");
  bench_cmd->add_option("--size", bench_size, "Canvas size")->check(CLI::Range(16, 8192))->capture_default_str();
  bench_cmd->add_option("--rays", bench_rays, "Number of rays")->check(CLI::Range(3, 100000))->capture_default_str();
  bench_cmd->add_option("--nodes", bench_nodes, "Nodes per ray")->check(CLI::Range(2, 100000))->capture_default_str();
  bench_cmd->add_option("--repeat", bench_repeat, "Timed runs")->check(CLI::Range(1, 1000))->capture_default_str();
  bench_cmd->add_option("--seed-rng", bench_rng, "Noise generator seed")->capture_default_str();

  // serve
  std::string listen = "127.0.0.1:8071", static_dir;
  std::size_t max_images = 32, max_upload = std::size_t{16} << 20;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP/JSON service");
  serve_cmd->add_option("--listen", listen, "host:port")->capture_default_str();
  serve_cmd->add_option("--static-dir", static_dir, "Serve static files from this directory");
  serve_cmd->add_option("--max-images", max_images, "Image store capacity")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  serve_cmd->add_option("--max-upload", max_upload, "Upload size limit in bytes")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  segment_cmd->callback([&] {
    action = [&]() -> int {
      const Point2 seed_point = seg.seed_point();
      SegParams params = seg.params();
      if (!seg.template_path.empty()) params.shape = load_template(seg.template_path);
      const GrayImage img = decode_image(read_file(seg.input));
      std::optional<BinaryMask> truth;
      if (!seg.truth.empty()) truth = load_mask(seg.truth);

      const SegResult r = iterate > 1 ? segment_iterative(img, seed_point, params, iterate)
                                      : segment(img, seed_point, params);
      if (!out_mask.empty()) save_pgm(out_mask, r.mask);
      if (!out_contour.empty()) save_contour_csv(out_contour, r.contour);

      json record = result_json(r);
      record["command"] = "segment";
      record["input"] = seg.input;
      record["params"] = seg.params_json(params);
      record["outputs"] = {{"mask", out_mask}, {"contour", out_contour}};
      if (truth) record["overlap"] = overlap_json(dsc(r.mask, *truth));
      print_record(out, std::move(record));
      return kOk;
    };
  });

  synth_cmd->callback([&] {
    action = [&]() -> int {
      SynthSpec spec;
      const auto size = parse_ints(canvas, 2, "--canvas");
      spec.canvas_w = size[0];
      spec.canvas_h = size[1];
      spec.rect = parse_rect(rect, "--rect");
      for (const auto& e : erase) spec.erased.push_back(parse_rect(e, "--erase"));
      spec.fg = static_cast<std::uint16_t>(fg);
      spec.bg = static_cast<std::uint16_t>(bg);
      spec.noise_sigma = noise;
      spec.rng_seed = seed_rng;
      const auto sp = parse_numbers(spacing, 3, "--spacing");
      if (!(sp[0] > 0 && sp[1] > 0 && sp[2] > 0)) throw UsageError{"--spacing values must be positive"};
      spec.spacing = {sp[0], sp[1], sp[2]};
      SynthResult s;
      try {
        s = synth_rectangle(spec);
      } catch (const Error& e) {
        throw UsageError{e.what()};
      }
      save_pgm(out_image, s.image);
      save_pgm(out_truth, s.truth);
      print_record(out, {{"command", "synth"},
                         {"image", out_image},
                         {"truth", out_truth},
                         {"width", spec.canvas_w},
                         {"height", spec.canvas_h},
                         {"truth_voxels", s.truth.count()},
                         {"seed_rng", seed_rng},
                         {"noise_sigma", noise}});
      return kOk;
    };
  });

  eval_cmd->callback([&] {
    action = [&]() -> int {
      const BinaryMask a = load_mask(eval_a);
      const BinaryMask r = load_mask(eval_r);
      const OverlapReport report = dsc(a, r);
      if (!eval_csv.empty()) {
        const bool fresh = !std::filesystem::exists(eval_csv) || std::filesystem::file_size(eval_csv) == 0;
        std::ofstream csv(eval_csv, std::ios::app);
        if (!csv) throw Error(Errc::io_error, "cannot open " + eval_csv);
        if (fresh) csv << overlap_csv_header() << "\n";
        csv << overlap_csv_row(eval_label, report) << "\n";
        if (!csv) throw Error(Errc::io_error, "write failed: " + eval_csv);
      }
      json record = overlap_json(report);
      record["command"] = "eval";
      record["a"] = eval_a;
      record["r"] = eval_r;
      print_record(out, std::move(record));
      return kOk;
    };
  });

  sweep_cmd->callback([&] {
    action = [&]() -> int {
      const Point2 seed_point = sweep.seed_point();
      SegParams params = sweep.params();
      std::vector<int> delta_list;
      {
        std::stringstream ss(deltas);
        std::string item;
        std::size_t n = 0;
        while (std::getline(ss, item, ',')) ++n;
        if (n == 0) throw UsageError{"--deltas is empty"};
        delta_list = parse_ints(deltas, n, "--deltas");
        for (int d : delta_list) {
          if (d < 0) throw UsageError{"--deltas values must be non-negative"};
        }
      }
      if (!sweep.template_path.empty()) params.shape = load_template(sweep.template_path);
      const GrayImage img = decode_image(read_file(sweep.input));
      std::optional<BinaryMask> truth;
      if (!sweep.truth.empty()) truth = load_mask(sweep.truth);

      std::error_code ec;
      std::filesystem::create_directories(out_dir, ec);
      if (ec) throw Error(Errc::io_error, "cannot create " + out_dir + ": " + ec.message());

      const auto results = delta_sweep(img, seed_point, params, delta_list);
      std::ofstream csv(std::filesystem::path(out_dir) / "sweep.csv");
      if (!csv) throw Error(Errc::io_error, "cannot create sweep.csv in " + out_dir);
      csv << "delta,cut_cost,mask_voxels" << (truth ? ",dsc" : "") << "\n";
      json runs = json::array();
      for (const SegResult& r : results) {
        const std::string mask_path =
            (std::filesystem::path(out_dir) / ("mask_delta" + std::to_string(r.params.delta) + ".pgm")).string();
        save_pgm(mask_path, r.mask);
        json run = {{"delta", r.params.delta},
                    {"cut_cost", r.cut_cost},
                    {"mask_voxels", r.mask.count()},
                    {"boundary", r.boundary},
                    {"mask", mask_path},
                    {"timings_ms", timings_json(r.timings)}};
        char row[128];
        std::snprintf(row, sizeof row, "%d,%.17g,%zu", r.params.delta, r.cut_cost, r.mask.count());
        csv << row;
        if (truth) {
          const double d = dsc(r.mask, *truth).dsc;
          run["dsc"] = d;
          std::snprintf(row, sizeof row, ",%.6f", d);
          csv << row;
        }
        csv << "\n";
        runs.push_back(std::move(run));
      }
      if (!csv) throw Error(Errc::io_error, "write failed: sweep.csv");
      print_record(out, {{"command", "sweep"},
                         {"input", sweep.input},
                         {"seed", point_json(seed_point)},
                         {"params", sweep.params_json(params)},
                         {"runs", std::move(runs)}});
      return kOk;
    };
  });

  bench_cmd->callback([&] {
    action = [&]() -> int {
      const BenchFixture fx = bench_fixture(bench_size, bench_rays, bench_nodes, bench_rng);
      json runs = json::array();
      double best = 0.0;
      double dsc_value = 0.0;
      for (int i = 0; i < bench_repeat; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const SegResult r = segment(fx.image, fx.seed, fx.params);
        const double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        best = i == 0 ? wall : std::min(best, wall);
        dsc_value = dsc(r.mask, fx.truth).dsc;
        json run = timings_json(r.timings);
        run["wall"] = wall;
        runs.push_back(std::move(run));
      }
      print_record(out, {{"command", "bench"},
                         {"size", bench_size},
                         {"rays", bench_rays},
                         {"nodes", bench_nodes},
                         {"grid_nodes", static_cast<long long>(bench_rays) * bench_nodes},
                         {"dsc", dsc_value},
                         {"best_wall_ms", best},
                         {"runs_ms", std::move(runs)}});
      return kOk;
    };
  });

  serve_cmd->callback([&] {
    action = [&]() -> int {
      ServeOptions options;
      try {
        options = parse_listen(listen);
      } catch (const Error& e) {
        throw UsageError{e.what()};
      }
      options.static_dir = static_dir;
      Service service(ServiceConfig{max_images, max_upload});
      err << "listening on http://" << options.host << ":" << options.port << "\n";
      if (!run_server(service, options)) {
        throw Error(Errc::io_error, "cannot listen on " + listen);
      }
      return kOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.back()->help());
    return kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.message << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    switch (e.code()) {
      case Errc::io_error:
      case Errc::format_error:
      case Errc::invalid_template:
        return kIoError;
      default:
        return kSegmentationError;
    }
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error [io_error]: " << e.what() << "\n";
    return kIoError;
  }
}

}  // namespace squarecut::cli
