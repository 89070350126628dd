#pragma once

#include <iosfwd>
#include <vector>

#include "brickgram/geometry.hpp"

namespace brickgram {

enum class PointLabel { Mortar = 0, Brick = 1 };

/// One survey point in mm, carrying its semantic class.
struct LabeledPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  PointLabel label = PointLabel::Mortar;

  Vec3 pos() const { return {x, y, z}; }
};

enum class CloudFormat { AsciiPly, Csv };

/// Orthonormal frame of the fitted wall plane. v_axis points "up" (its
/// global-vertical component is non-negative); origin is the centroid.
struct WallPlane {
  Vec3 origin;
  Vec3 u_axis;
  Vec3 v_axis;
  Vec3 normal;
};

struct ProjectedPoint {
  Point2 p;
  PointLabel label = PointLabel::Mortar;
};

/// Parse an ASCII PLY or CSV cloud. Errors carry the offending line number.
std::vector<LabeledPoint> parse_point_cloud(std::istream& in, CloudFormat format);

/// Serialize back out (inverse of parse, used by the synth command).
void write_point_cloud(std::ostream& out, const std::vector<LabeledPoint>& points,
                       CloudFormat format);

/// Voxel-grid thinning: keeps, per occupied cell, the point closest to the
/// centroid of the cell's points (ties broken by lowest input index).
/// Output preserves the input order of the kept points.
std::vector<LabeledPoint> downsample(const std::vector<LabeledPoint>& points, double voxel);

/// Least-squares plane through the cloud: principal axes of the centered
/// covariance, normal = axis of least variance.
WallPlane fit_wall_plane(const std::vector<LabeledPoint>& points);

/// Drop each point onto the plane frame; out-of-plane distance is discarded.
std::vector<ProjectedPoint> project(const std::vector<LabeledPoint>& points,
                                    const WallPlane& plane);

/// Median nearest-neighbour distance, estimated on a fixed-seed subsample of
/// at most `subsample` points (neighbours searched in the full set). Feeds
/// the default clustering radius.
double median_nn_spacing(const std::vector<Point2>& points, std::size_t subsample = 1000);

}  // namespace brickgram
