#pragma once

#include <span>
#include <string>
#include <vector>

#include "brickgram/geometry.hpp"

namespace brickgram {

/// Distances measured between fitted brick rectangles, in mm.
struct GapMeasurements {
  std::vector<double> h_gaps;        // within-row head joints
  std::vector<double> v_gaps;        // bed joints between u-overlapping bricks
  std::vector<double> level_jitter;  // signed: bottom edge vs row baseline
  std::vector<double> row_offsets;   // signed: first head joint shift between rows
  int h_gap_excluded = 0;            // dropped as extraction artifacts
  int v_gap_excluded = 0;
};

/// Density-connected components: points are linked when closer than eps,
/// components below min_pts are discarded as noise. Clusters come back as
/// index lists, ordered by (min v, then min u); indices ascend within each
/// cluster so point order matches the input.
struct ClusterResult {
  std::vector<std::vector<std::size_t>> clusters;
  std::size_t noise_points = 0;
};
ClusterResult cluster_bricks(const std::vector<Point2>& points, double eps, int min_pts);

/// Default clustering radius: 3x the cloud's median nearest-neighbour spacing.
double default_eps(const std::vector<Point2>& points);

/// Quantile-trimmed axis-aligned bounding box. Per axis the lowest and
/// highest floor(trim * n) coordinates are dropped before taking the box.
BrickRect fit_rectangle(std::span<const Point2> cluster, double trim_fraction);

/// Sorts rects bottom-up into rows: a new row starts when the jump between
/// consecutive center heights exceeds half the median brick height. Returns
/// the rects reordered row-major (row, then center u) with row set.
std::vector<BrickRect> group_rows(std::vector<BrickRect> rects);

/// Edge distances between row-grouped rects. Gap candidates that are
/// negative or beyond 3x the candidate median are excluded and counted.
GapMeasurements compute_gaps(const std::vector<BrickRect>& rects);

/// What the extraction stage dropped on the way to rectangles.
struct ExtractionExclusions {
  std::size_t noise_points = 0;
  std::size_t degenerate_clusters = 0;
};

inline constexpr int kRectsFormatVersion = 1;

std::string rects_to_string(const std::vector<BrickRect>& rects,
                            const ExtractionExclusions& exclusions);
std::vector<BrickRect> rects_from_string(const std::string& text);

}  // namespace brickgram
