#pragma once

#include <string>
#include <vector>

#include "brickgram/stats.hpp"
#include "brickgram/wall_generate.hpp"

namespace brickgram {

struct RenderStyle {
  std::string brick_fill = "#9e5839";
  std::string mortar_fill = "#d9cfc0";
  double stroke_width = 0.0;  // mm
  double scale = 1.0;         // px per mm
};

/// One mortar-coloured background rect plus one rect per brick in id order.
/// The y axis flips at emission time only (SVG y grows downward); output is
/// byte-stable for identical inputs.
std::string to_svg(const Wall& wall, const RenderStyle& style);

struct ParamComparison {
  std::string name;
  double mean_src = 0.0;
  double mean_gen = 0.0;
  double std_src = 0.0;
  double std_gen = 0.0;
  double rel_mean_err = 0.0;  // |gen-src| / max(|mean_src|, sample spread)
  double rel_std_err = 0.0;   // |gen-src| / std_src (inf-safe)
  std::size_t n_gen = 0;
};

struct ComparisonReport {
  std::vector<ParamComparison> params;
  std::size_t bricks_used = 0;

  std::string to_text() const;
};

/// Re-extracts the six distributions from the generated geometry (reusing
/// compute_gaps on the wall's rects) and sets them against the source
/// parameters. Scaled bricks and skipped edges stay out of the width and
/// gap statistics.
ComparisonReport compare_stats(const WallParameters& source, const Wall& wall);

}  // namespace brickgram
