#include "brickgram/render.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "brickgram/brick_extract.hpp"
#include "brickgram/error.hpp"

namespace brickgram {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string to_svg(const Wall& wall, const RenderStyle& style) {
  if (!(style.scale > 0.0)) fail(Errc::argument_error, "scale must be > 0");
  if (style.stroke_width < 0.0) fail(Errc::argument_error, "stroke width must be >= 0");

  const double W = wall.spec.width * style.scale;
  const double H = wall.spec.height * style.scale;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W) << "\" height=\""
      << num(H) << "\" viewBox=\"0 0 " << num(W) << ' ' << num(H) << "\">\n";
  svg << "  <rect x=\"0\" y=\"0\" width=\"" << num(W) << "\" height=\"" << num(H)
      << "\" fill=\"" << style.mortar_fill << "\"/>\n";

  const std::string stroke_attrs =
      style.stroke_width > 0.0
          ? " stroke=\"#000000\" stroke-width=\"" + num(style.stroke_width * style.scale) + "\""
          : "";
  for (const LabeledBrick& b : wall.bricks) {
    const BrickRect& r = b.rect;
    svg << "  <rect x=\"" << num(r.left() * style.scale) << "\" y=\""
        << num((wall.spec.height - r.top()) * style.scale) << "\" width=\""
        << num(r.width * style.scale) << "\" height=\"" << num(r.height * style.scale)
        << "\" fill=\"" << style.brick_fill << "\"" << stroke_attrs << "/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

ComparisonReport compare_stats(const WallParameters& source, const Wall& wall) {
  std::vector<BrickRect> full_rects;  // scaled edge bricks stay out entirely
  for (const LabeledBrick& b : wall.bricks)
    if (!b.scaled) full_rects.push_back(b.rect);
  if (full_rects.size() < 30)
    fail(Errc::insufficient_data, "need at least 30 non-scaled bricks to compare");

  GapMeasurements gaps = compute_gaps(full_rects);

  std::vector<double> widths, heights;
  for (const BrickRect& r : full_rects) {
    widths.push_back(r.width);
    heights.push_back(r.height);
  }

  ComparisonReport report;
  report.bricks_used = full_rects.size();

  auto add = [&](const ParamDistribution& src, const std::vector<double>& gen_samples) {
    ParamComparison c;
    c.name = src.name.empty() ? "?" : src.name;
    c.mean_src = src.mean;
    c.std_src = src.std;
    c.n_gen = gen_samples.size();
    if (!gen_samples.empty()) {
      const ParamDistribution gen = fit_distribution(c.name, gen_samples);
      c.mean_gen = gen.mean;
      c.std_gen = gen.std;
    }
    // Mean error relative to the parameter magnitude; near-zero means (level
    // jitter) fall back to the sample spread as the scale.
    const double spread = std::max(src.max - src.min, 1e-12);
    const double mean_scale = std::abs(src.mean) > src.std ? std::abs(src.mean) : spread;
    c.rel_mean_err = std::abs(c.mean_gen - c.mean_src) / mean_scale;
    c.rel_std_err =
        src.std > 0.0 ? std::abs(c.std_gen - c.std_src) / src.std : std::abs(c.std_gen);
    report.params.push_back(c);
  };

  add(source.brick_width, widths);
  add(source.brick_height, heights);
  add(source.h_gap, gaps.h_gaps);
  add(source.v_gap, gaps.v_gaps);
  add(source.level_jitter, gaps.level_jitter);
  add(source.row_offset, gaps.row_offsets);
  return report;
}

std::string ComparisonReport::to_text() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-14s %10s %10s %10s %10s %9s %9s %6s\n", "parameter",
                "mean_src", "mean_gen", "std_src", "std_gen", "d_mean", "d_std", "n");
  out << line;
  for (const ParamComparison& c : params) {
    std::snprintf(line, sizeof(line), "%-14s %10.3f %10.3f %10.3f %10.3f %8.2f%% %8.2f%% %6zu\n",
                  c.name.c_str(), c.mean_src, c.mean_gen, c.std_src, c.std_gen,
                  100.0 * c.rel_mean_err, 100.0 * c.rel_std_err, c.n_gen);
    out << line;
  }
  return out.str();
}

}  // namespace brickgram
