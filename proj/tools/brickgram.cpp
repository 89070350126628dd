// brickgram — extract bricklaying parameters from labeled wall point clouds
// and regenerate walls in the same style through a seven-rule shape grammar.
//
// Pipeline stages hand off through files so each one stays independently
// inspectable:   cloud -> rects -> params -> wall -> svg

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "brickgram/brick_extract.hpp"
#include "brickgram/error.hpp"
#include "brickgram/point_cloud.hpp"
#include "brickgram/render.hpp"
#include "brickgram/stats.hpp"
#include "brickgram/wall_generate.hpp"

namespace fs = std::filesystem;
using namespace brickgram;

namespace {

// Documented exit codes (README table).
constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitParse = 2;
constexpr int kExitNoData = 3;
constexpr int kExitArgs = 4;
constexpr int kExitGeometry = 5;
constexpr int kExitViolations = 6;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::parse_error:
    case Errc::empty_input:
    case Errc::io_error:
      return kExitParse;
    case Errc::no_bricks_found:
    case Errc::insufficient_data:
      return kExitNoData;
    case Errc::argument_error:
      return kExitArgs;
    case Errc::degenerate_geometry:
    case Errc::degenerate_cluster:
    case Errc::spec_too_small:
      return kExitGeometry;
  }
  return kExitInternal;
}

CloudFormat format_for_path(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".ply") return CloudFormat::AsciiPly;
  if (ext == ".csv") return CloudFormat::Csv;
  fail(Errc::argument_error, "cloud files must end in .ply or .csv: " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot write " + path.string());
  out << text;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BRICKGRAM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      fail(Errc::argument_error, "BRICKGRAM_SEED is not a valid integer");
    }
  }
  return 0;
}

struct ExtractOptions {
  std::string cloud_path;
  std::string out_path = "rects.json";
  double eps = 0.0;  // 0 = auto (3x median point spacing)
  int min_pts = 5;
  double trim = 0.02;
  double voxel = 0.0;  // 0 = off
  std::vector<double> crop;
  std::vector<double> edge_dilate;  // one value, or u,v
};

std::vector<BrickRect> run_extraction(const ExtractOptions& opt, ExtractionExclusions& exclusions,
                                      std::size_t& point_count, double& eps_used) {
  std::istringstream stream(read_file(opt.cloud_path));
  std::vector<LabeledPoint> points = parse_point_cloud(stream, format_for_path(opt.cloud_path));
  if (opt.voxel > 0.0) points = downsample(points, opt.voxel);
  point_count = points.size();

  const WallPlane plane = fit_wall_plane(points);
  std::vector<ProjectedPoint> projected = project(points, plane);

  if (!opt.crop.empty()) {
    if (opt.crop.size() != 4) fail(Errc::argument_error, "--crop needs u0,v0,u1,v1");
    const Bounds2 crop{std::min(opt.crop[0], opt.crop[2]), std::min(opt.crop[1], opt.crop[3]),
                       std::max(opt.crop[0], opt.crop[2]), std::max(opt.crop[1], opt.crop[3])};
    std::erase_if(projected, [&](const ProjectedPoint& p) { return !crop.contains(p.p); });
  }

  std::vector<Point2> brick_points;
  for (const ProjectedPoint& p : projected)
    if (p.label == PointLabel::Brick) brick_points.push_back(p.p);
  if (brick_points.empty()) fail(Errc::no_bricks_found, "cloud has no brick-labeled points");

  eps_used = opt.eps > 0.0 ? opt.eps : default_eps(brick_points);
  const ClusterResult clustered = cluster_bricks(brick_points, eps_used, opt.min_pts);
  exclusions.noise_points = clustered.noise_points;

  double dil_u = 0.0, dil_v = 0.0;
  if (!opt.edge_dilate.empty()) {
    if (opt.edge_dilate.size() > 2) fail(Errc::argument_error, "--edge-dilate takes du[,dv]");
    dil_u = opt.edge_dilate[0];
    dil_v = opt.edge_dilate.size() == 2 ? opt.edge_dilate[1] : opt.edge_dilate[0];
  }

  std::vector<BrickRect> rects;
  for (const auto& cluster : clustered.clusters) {
    std::vector<Point2> pts;
    pts.reserve(cluster.size());
    for (std::size_t idx : cluster) pts.push_back(brick_points[idx]);
    try {
      BrickRect rect = fit_rectangle(pts, opt.trim);
      rect.width += 2.0 * dil_u;
      rect.height += 2.0 * dil_v;
      if (rect.width <= 0.0 || rect.height <= 0.0) {
        ++exclusions.degenerate_clusters;
        continue;
      }
      rects.push_back(rect);
    } catch (const Error& e) {
      if (e.code() != Errc::degenerate_cluster) throw;
      ++exclusions.degenerate_clusters;
    }
  }
  if (rects.empty()) fail(Errc::no_bricks_found, "no usable rectangles after fitting");

  rects = group_rows(std::move(rects));
  for (std::size_t i = 0; i < rects.size(); ++i) rects[i].id = static_cast<int>(i);
  return rects;
}

int cmd_extract(const ExtractOptions& opt) {
  ExtractionExclusions exclusions;
  std::size_t point_count = 0;
  double eps_used = 0.0;
  std::vector<BrickRect> rects = run_extraction(opt, exclusions, point_count, eps_used);
  write_file(opt.out_path, rects_to_string(rects, exclusions));

  int rows = 0;
  for (const BrickRect& r : rects) rows = std::max(rows, r.row + 1);
  std::cout << "extract ok points=" << point_count << " rects=" << rects.size()
            << " rows=" << rows << " eps=" << eps_used
            << " noise_points=" << exclusions.noise_points
            << " degenerate=" << exclusions.degenerate_clusters << " out=" << opt.out_path
            << "\n";
  return kExitOk;
}

WallParameters params_from_rects(std::vector<BrickRect> rects, GapMeasurements& gaps,
                                 std::size_t& artifact_rects) {
  // Clusters bridged across a thin bed joint come out roughly double height;
  // drop them like the gap rules drop erosion artifacts.
  std::vector<double> heights_all;
  heights_all.reserve(rects.size());
  for (const BrickRect& r : rects) heights_all.push_back(r.height);
  std::nth_element(heights_all.begin(), heights_all.begin() + heights_all.size() / 2,
                   heights_all.end());
  const double median_height = heights_all[heights_all.size() / 2];
  const std::size_t before = rects.size();
  std::erase_if(rects, [&](const BrickRect& r) { return r.height > 1.5 * median_height; });
  artifact_rects = before - rects.size();

  gaps = compute_gaps(rects);

  // Row-interior bricks feed the width statistics; bricks touching the row
  // ends may be scaled or cut by the survey boundary and would distort the
  // unit distribution. Heights are unaffected by the horizontal boundary.
  std::vector<std::vector<const BrickRect*>> rows;
  for (const BrickRect& r : rects) {
    if (static_cast<std::size_t>(r.row) >= rows.size()) rows.resize(r.row + 1);
    rows[r.row].push_back(&r);
  }
  std::vector<double> widths, heights;
  for (auto& row : rows) {
    std::sort(row.begin(), row.end(),
              [](const BrickRect* a, const BrickRect* b) { return a->center.u < b->center.u; });
    for (std::size_t i = 0; i < row.size(); ++i) {
      heights.push_back(row[i]->height);
      if (i > 0 && i + 1 < row.size()) widths.push_back(row[i]->width);
    }
  }
  if (widths.empty())
    fail(Errc::insufficient_data, "no row-interior bricks to measure widths from");

  WallParameters params;
  params.brick_width = fit_distribution("brick_width", widths);
  params.brick_height = fit_distribution("brick_height", heights);
  params.h_gap = fit_distribution("h_gap", gaps.h_gaps);
  params.v_gap = fit_distribution("v_gap", gaps.v_gaps);
  params.level_jitter = fit_distribution("level_jitter", gaps.level_jitter);
  params.row_offset = fit_distribution("row_offset", gaps.row_offsets);
  check_parameters(params);
  return params;
}

int cmd_stats(const std::string& rects_path, const std::string& out_path) {
  const std::vector<BrickRect> rects = rects_from_string(read_file(rects_path));
  GapMeasurements gaps;
  std::size_t artifacts = 0;
  const WallParameters params = params_from_rects(rects, gaps, artifacts);
  write_file(out_path, save_parameters(params));
  std::cout << "stats ok rects=" << rects.size() << " artifact_rects=" << artifacts
            << " h_gaps=" << gaps.h_gaps.size() << " v_gaps=" << gaps.v_gaps.size()
            << " excluded_h=" << gaps.h_gap_excluded << " excluded_v=" << gaps.v_gap_excluded
            << " out=" << out_path << "\n";
  return kExitOk;
}

struct GenerateOptions {
  std::string params_path;
  std::string out_path = "wall.json";
  double width = 3000.0;
  double height = 1000.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string mode = "empirical";
  std::string direction = "right";
  std::string seeds_range;  // "a..b" batch
};

fs::path seed_path(const fs::path& base, std::uint64_t seed) {
  fs::path p = base;
  const std::string stem = p.stem().string();
  const std::string ext = p.extension().string();
  p.replace_filename(stem + ".seed" + std::to_string(seed) + ext);
  return p;
}

int cmd_generate(const GenerateOptions& opt) {
  std::istringstream in(read_file(opt.params_path));
  const WallParameters params = load_parameters(in);

  WallSpec spec;
  spec.width = opt.width;
  spec.height = opt.height;
  spec.mode = sampling_mode_from_string(opt.mode);
  spec.direction = direction_from_string(opt.direction);
  spec.seed = opt.seed_given ? opt.seed : default_seed();

  if (opt.seeds_range.empty()) {
    const Wall wall = generate(spec, params);
    write_file(opt.out_path, wall_to_string(wall));
    int rows = 0;
    for (const LabeledBrick& b : wall.bricks) rows = std::max(rows, b.rect.row + 1);
    std::cout << "generate ok seed=" << spec.seed << " bricks=" << wall.bricks.size()
              << " rows=" << rows << " steps=" << wall.derivation.size()
              << " out=" << opt.out_path << "\n";
    return kExitOk;
  }

  const auto dots = opt.seeds_range.find("..");
  if (dots == std::string::npos) fail(Errc::argument_error, "--seeds expects a..b");
  std::uint64_t first = 0, last = 0;
  try {
    first = std::stoull(opt.seeds_range.substr(0, dots));
    last = std::stoull(opt.seeds_range.substr(dots + 2));
  } catch (const std::exception&) {
    fail(Errc::argument_error, "--seeds expects a..b with integer bounds");
  }
  if (last < first) fail(Errc::argument_error, "--seeds range is empty");

  // Each seed is an independent derivation; results land in seed order.
  std::vector<std::future<std::string>> results;
  for (std::uint64_t s = first; s <= last; ++s) {
    WallSpec batch_spec = spec;
    batch_spec.seed = s;
    results.push_back(std::async(std::launch::async, [batch_spec, &params] {
      return wall_to_string(generate(batch_spec, params));
    }));
  }
  for (std::uint64_t s = first; s <= last; ++s)
    write_file(seed_path(opt.out_path, s), results[s - first].get());
  std::cout << "generate ok seeds=" << opt.seeds_range << " walls=" << (last - first + 1)
            << " out=" << seed_path(opt.out_path, first).string() << ".." << "\n";
  return kExitOk;
}

int cmd_render(const std::string& wall_path, const std::string& out_path,
               const RenderStyle& style) {
  std::istringstream in(read_file(wall_path));
  const Wall wall = read_wall(in);
  write_file(out_path, to_svg(wall, style));
  std::cout << "render ok bricks=" << wall.bricks.size() << " rects=" << wall.bricks.size() + 1
            << " out=" << out_path << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& wall_path, const std::string& params_path) {
  std::istringstream in(read_file(wall_path));
  const Wall wall = read_wall(in);
  ValidationReport report;
  if (!params_path.empty()) {
    std::istringstream pin(read_file(params_path));
    report = validate(wall, load_parameters(pin));
  } else {
    report = validate(wall);
  }
  std::cout << "validate " << (report.valid() ? "ok" : "violations") << " bricks="
            << wall.bricks.size() << " overlap=" << report.overlap_violations
            << " bounds=" << report.bounds_violations
            << " gap_range=" << report.gap_range_violations
            << " jitter_range=" << report.jitter_range_violations << "\n";
  for (const std::string& d : report.details) std::cout << "  " << d << "\n";
  return report.valid() ? kExitOk : kExitViolations;
}

int cmd_synth(const std::string& wall_path, const std::string& out_path, double pitch,
              double noise, std::uint64_t seed) {
  std::istringstream in(read_file(wall_path));
  const Wall wall = read_wall(in);
  const std::vector<LabeledPoint> cloud = synthesize_cloud(wall, pitch, noise, seed);
  std::ostringstream out;
  write_point_cloud(out, cloud, format_for_path(out_path));
  write_file(out_path, out.str());
  std::cout << "synth ok points=" << cloud.size() << " pitch=" << pitch << " noise=" << noise
            << " out=" << out_path << "\n";
  return kExitOk;
}

struct PipelineOptions {
  ExtractOptions extract;
  std::string outdir = "pipeline_out";
  GenerateOptions gen;
  bool size_given = false;
};

int cmd_pipeline(PipelineOptions opt) {
  const fs::path dir(opt.outdir);

  opt.extract.out_path = (dir / "rects.json").string();
  ExtractionExclusions exclusions;
  std::size_t point_count = 0;
  double eps_used = 0.0;
  std::vector<BrickRect> rects = run_extraction(opt.extract, exclusions, point_count, eps_used);
  write_file(opt.extract.out_path, rects_to_string(rects, exclusions));

  GapMeasurements gaps;
  std::size_t artifacts = 0;
  const WallParameters params = params_from_rects(rects, gaps, artifacts);
  write_file(dir / "params.json", save_parameters(params));

  WallSpec spec;
  if (opt.size_given) {
    spec.width = opt.gen.width;
    spec.height = opt.gen.height;
  } else {
    // Default to the footprint of the extracted wall patch.
    double u_lo = rects[0].left(), u_hi = rects[0].right();
    double v_lo = rects[0].bottom(), v_hi = rects[0].top();
    for (const BrickRect& r : rects) {
      u_lo = std::min(u_lo, r.left());
      u_hi = std::max(u_hi, r.right());
      v_lo = std::min(v_lo, r.bottom());
      v_hi = std::max(v_hi, r.top());
    }
    spec.width = u_hi - u_lo;
    spec.height = (v_hi - v_lo) + params.brick_height.mean;
  }
  spec.seed = opt.gen.seed_given ? opt.gen.seed : default_seed();
  spec.mode = sampling_mode_from_string(opt.gen.mode);
  spec.direction = direction_from_string(opt.gen.direction);

  const Wall wall = generate(spec, params);
  write_file(dir / "wall.json", wall_to_string(wall));
  write_file(dir / "wall.svg", to_svg(wall, RenderStyle{}));

  const ValidationReport report = validate(wall, params);
  std::ostringstream rep;
  rep << "bricks=" << wall.bricks.size() << " overlap=" << report.overlap_violations
      << " bounds=" << report.bounds_violations << " gap_range=" << report.gap_range_violations
      << " jitter_range=" << report.jitter_range_violations << "\n";
  for (const std::string& d : report.details) rep << d << "\n";
  try {
    rep << "\nsource vs regenerated:\n" << compare_stats(params, wall).to_text();
  } catch (const Error&) {
    // small walls: comparison needs at least 30 full bricks
  }
  write_file(dir / "report.txt", rep.str());

  std::cout << "pipeline ok rects=" << rects.size() << " bricks=" << wall.bricks.size()
            << " valid=" << (report.valid() ? 1 : 0) << " outdir=" << opt.outdir << "\n";
  return report.valid() ? kExitOk : kExitViolations;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic bricklaying: survey-to-grammar extraction and regeneration"};
  app.require_subcommand(1);

  ExtractOptions ex;
  CLI::App* extract = app.add_subcommand("extract", "cloud file -> brick rectangles (JSON)");
  extract->add_option("cloud", ex.cloud_path, "input .ply or .csv")->required();
  extract->add_option("-o,--out", ex.out_path, "output rects file");
  extract->add_option("--eps", ex.eps, "clustering radius in mm (default: auto)");
  extract->add_option("--min-pts", ex.min_pts, "minimum cluster size");
  extract->add_option("--trim", ex.trim, "quantile trim fraction in [0,0.1]");
  extract->add_option("--voxel", ex.voxel, "downsample voxel size in mm (0 = off)");
  extract->add_option("--crop", ex.crop, "keep only u0,v0,u1,v1 (wall coords)")->delimiter(',');
  extract->add_option("--edge-dilate", ex.edge_dilate,
                      "expand fitted rects by du[,dv] mm per side (sampling-bias correction)")
      ->delimiter(',');

  std::string stats_in, stats_out = "params.json";
  CLI::App* stats = app.add_subcommand("stats", "rects file -> parameter distributions (JSON)");
  stats->add_option("rects", stats_in, "input rects file")->required();
  stats->add_option("-o,--out", stats_out, "output params file");

  GenerateOptions gen;
  CLI::App* generate_cmd = app.add_subcommand("generate", "params file -> wall (JSON)");
  generate_cmd->add_option("params", gen.params_path, "input params file")->required();
  generate_cmd->add_option("-o,--out", gen.out_path, "output wall file");
  generate_cmd->add_option("--width", gen.width, "wall width in mm");
  generate_cmd->add_option("--height", gen.height, "wall height in mm");
  CLI::Option* seed_opt =
      generate_cmd->add_option("--seed", gen.seed, "generation seed (default: $BRICKGRAM_SEED)");
  generate_cmd->add_option("--mode", gen.mode, "sampling mode: gaussian|empirical");
  generate_cmd->add_option("--direction", gen.direction, "laying direction: right|left");
  generate_cmd->add_option("--seeds", gen.seeds_range, "batch: generate seeds a..b concurrently");

  std::string render_in, render_out = "wall.svg";
  RenderStyle style;
  CLI::App* render = app.add_subcommand("render", "wall file -> SVG");
  render->add_option("wall", render_in, "input wall file")->required();
  render->add_option("-o,--out", render_out, "output SVG file");
  render->add_option("--scale", style.scale, "pixels per mm");
  render->add_option("--brick-fill", style.brick_fill, "brick fill color");
  render->add_option("--mortar-fill", style.mortar_fill, "mortar fill color");
  render->add_option("--stroke", style.stroke_width, "stroke width in mm");

  std::string validate_in, validate_params;
  CLI::App* validate_cmd = app.add_subcommand("validate", "check wall invariants");
  validate_cmd->add_option("wall", validate_in, "input wall file")->required();
  validate_cmd->add_option("--params", validate_params, "params file for range checks");

  std::string synth_in, synth_out = "cloud.csv";
  double pitch = 5.0, noise = 0.0;
  std::uint64_t synth_seed = 0;
  bool synth_seed_given = false;
  CLI::App* synth = app.add_subcommand("synth", "wall file -> labeled point cloud");
  synth->add_option("wall", synth_in, "input wall file")->required();
  synth->add_option("-o,--out", synth_out, "output .csv or .ply");
  synth->add_option("--pitch", pitch, "grid pitch in mm");
  synth->add_option("--noise", noise, "gaussian noise std in mm");
  CLI::Option* synth_seed_opt = synth->add_option("--seed", synth_seed, "noise seed");

  PipelineOptions pipe;
  CLI::App* pipeline = app.add_subcommand("pipeline", "cloud -> all artifacts in one run");
  pipeline->add_option("cloud", pipe.extract.cloud_path, "input .ply or .csv")->required();
  pipeline->add_option("--outdir", pipe.outdir, "artifact directory");
  pipeline->add_option("--eps", pipe.extract.eps, "clustering radius in mm");
  pipeline->add_option("--min-pts", pipe.extract.min_pts, "minimum cluster size");
  pipeline->add_option("--trim", pipe.extract.trim, "quantile trim fraction");
  pipeline->add_option("--voxel", pipe.extract.voxel, "downsample voxel size in mm");
  pipeline->add_option("--crop", pipe.extract.crop, "keep only u0,v0,u1,v1")->delimiter(',');
  pipeline->add_option("--edge-dilate", pipe.extract.edge_dilate, "rect dilation du[,dv] mm")
      ->delimiter(',');
  CLI::Option* pipe_w = pipeline->add_option("--width", pipe.gen.width, "regenerated wall width");
  CLI::Option* pipe_h =
      pipeline->add_option("--height", pipe.gen.height, "regenerated wall height");
  CLI::Option* pipe_seed = pipeline->add_option("--seed", pipe.gen.seed, "generation seed");
  pipeline->add_option("--mode", pipe.gen.mode, "sampling mode: gaussian|empirical");
  pipeline->add_option("--direction", pipe.gen.direction, "laying direction: right|left");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  gen.seed_given = seed_opt->count() > 0;
  synth_seed_given = synth_seed_opt->count() > 0;
  pipe.gen.seed_given = pipe_seed->count() > 0;
  pipe.size_given = pipe_w->count() > 0 || pipe_h->count() > 0;

  try {
    if (extract->parsed()) return cmd_extract(ex);
    if (stats->parsed()) return cmd_stats(stats_in, stats_out);
    if (generate_cmd->parsed()) return cmd_generate(gen);
    if (render->parsed()) return cmd_render(render_in, render_out, style);
    if (validate_cmd->parsed()) return cmd_validate(validate_in, validate_params);
    if (synth->parsed())
      return cmd_synth(synth_in, synth_out, pitch, noise,
                       synth_seed_given ? synth_seed : default_seed());
    if (pipeline->parsed()) return cmd_pipeline(pipe);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
