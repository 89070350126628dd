#include "brickgram/brick_extract.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "brickgram/error.hpp"
#include "brickgram/point_cloud.hpp"

namespace brickgram {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

ClusterResult cluster_bricks(const std::vector<Point2>& points, double eps, int min_pts) {
  if (!(eps > 0.0)) fail(Errc::argument_error, "eps must be > 0");
  if (min_pts < 1) fail(Errc::argument_error, "min_pts must be >= 1");
  if (points.empty()) fail(Errc::no_bricks_found, "no brick points to cluster");

  // Bucket points into an eps-sized grid; only the 3x3 neighbourhood can
  // contain links, which keeps the pass linear for survey-sized clouds.
  auto key = [](std::int64_t i, std::int64_t j) {
    return (static_cast<std::uint64_t>(i) << 32) ^
           (static_cast<std::uint64_t>(j) & 0xffffffffULL);
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  grid.reserve(points.size());
  std::vector<std::pair<std::int64_t, std::int64_t>> cell_of(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::int64_t ci = static_cast<std::int64_t>(std::floor(points[i].u / eps));
    const std::int64_t cj = static_cast<std::int64_t>(std::floor(points[i].v / eps));
    cell_of[i] = {ci, cj};
    grid[key(ci, cj)].push_back(i);
  }

  UnionFind uf(points.size());
  const double eps2 = eps * eps;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [ci, cj] = cell_of[i];
    for (std::int64_t di = -1; di <= 1; ++di) {
      for (std::int64_t dj = -1; dj <= 1; ++dj) {
        auto it = grid.find(key(ci + di, cj + dj));
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          if (j <= i) continue;
          const double du = points[i].u - points[j].u;
          const double dv = points[i].v - points[j].v;
          if (du * du + dv * dv <= eps2) uf.unite(i, j);
        }
      }
    }
  }

  std::unordered_map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < points.size(); ++i) components[uf.find(i)].push_back(i);

  ClusterResult result;
  for (auto& [root, members] : components) {
    if (members.size() < static_cast<std::size_t>(min_pts)) {
      result.noise_points += members.size();
      continue;
    }
    result.clusters.push_back(std::move(members));
  }
  if (result.clusters.empty()) fail(Errc::no_bricks_found, "no cluster reached min_pts");

  // Row-major cluster order: ascending min v, then min u.
  auto extent_min = [&](const std::vector<std::size_t>& c) {
    double mu = std::numeric_limits<double>::infinity();
    double mv = std::numeric_limits<double>::infinity();
    for (std::size_t i : c) {
      mu = std::min(mu, points[i].u);
      mv = std::min(mv, points[i].v);
    }
    return std::pair<double, double>{mv, mu};
  };
  std::sort(result.clusters.begin(), result.clusters.end(),
            [&](const auto& a, const auto& b) { return extent_min(a) < extent_min(b); });
  return result;
}

double default_eps(const std::vector<Point2>& points) {
  return 3.0 * median_nn_spacing(points);
}

BrickRect fit_rectangle(std::span<const Point2> cluster, double trim_fraction) {
  if (trim_fraction < 0.0 || trim_fraction > 0.1)
    fail(Errc::argument_error, "trim_fraction must lie in [0, 0.1]");
  if (cluster.size() < 4)
    fail(Errc::degenerate_cluster, "cluster has fewer than 4 points");

  const std::size_t n = cluster.size();
  const std::size_t k = static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(n)));
  if (2 * k >= n) fail(Errc::degenerate_cluster, "trim removes every point");

  std::vector<double> us(n), vs(n);
  for (std::size_t i = 0; i < n; ++i) {
    us[i] = cluster[i].u;
    vs[i] = cluster[i].v;
  }
  std::sort(us.begin(), us.end());
  std::sort(vs.begin(), vs.end());

  const double left = us[k];
  const double right = us[n - 1 - k];
  const double bottom = vs[k];
  const double top = vs[n - 1 - k];
  if (!(right > left) || !(top > bottom))
    fail(Errc::degenerate_cluster, "trimmed box has zero width or height");

  BrickRect rect;
  rect.center = {0.5 * (left + right), 0.5 * (bottom + top)};
  rect.width = right - left;
  rect.height = top - bottom;
  return rect;
}

std::vector<BrickRect> group_rows(std::vector<BrickRect> rects) {
  if (rects.empty()) fail(Errc::argument_error, "group_rows needs at least one rect");

  std::vector<double> heights;
  heights.reserve(rects.size());
  for (const BrickRect& r : rects) heights.push_back(r.height);
  const double threshold = 0.5 * median_of(heights);

  // Full-tuple comparator keeps the assignment permutation-invariant.
  std::sort(rects.begin(), rects.end(), [](const BrickRect& a, const BrickRect& b) {
    return std::tie(a.center.v, a.center.u, a.width, a.height) <
           std::tie(b.center.v, b.center.u, b.width, b.height);
  });

  int row = 0;
  rects[0].row = 0;
  for (std::size_t i = 1; i < rects.size(); ++i) {
    if (rects[i].center.v - rects[i - 1].center.v > threshold) ++row;
    rects[i].row = row;
  }

  std::stable_sort(rects.begin(), rects.end(), [](const BrickRect& a, const BrickRect& b) {
    return std::tie(a.row, a.center.u, a.center.v) < std::tie(b.row, b.center.u, b.center.v);
  });
  return rects;
}

GapMeasurements compute_gaps(const std::vector<BrickRect>& rects) {
  std::vector<std::vector<const BrickRect*>> rows;
  for (const BrickRect& r : rects) {
    if (r.row < 0) fail(Errc::argument_error, "compute_gaps needs row-grouped rects");
    if (static_cast<std::size_t>(r.row) >= rows.size()) rows.resize(r.row + 1);
    rows[r.row].push_back(&r);
  }
  for (auto& row : rows)
    std::sort(row.begin(), row.end(),
              [](const BrickRect* a, const BrickRect* b) { return a->center.u < b->center.u; });

  const bool any_pair = std::any_of(rows.begin(), rows.end(),
                                    [](const auto& r) { return r.size() >= 2; });
  if (!any_pair && rows.size() < 2)
    fail(Errc::insufficient_data, "no adjacent bricks to measure");

  GapMeasurements gm;

  // Head joints, with the 3x-median artifact filter (missing bricks would
  // otherwise enter the distribution as huge gaps).
  std::vector<double> h_candidates;
  for (const auto& row : rows)
    for (std::size_t i = 1; i < row.size(); ++i)
      h_candidates.push_back(row[i]->left() - row[i - 1]->right());
  const double h_cut = 3.0 * median_of(h_candidates);
  for (double g : h_candidates) {
    if (g < 0.0 || g > h_cut)
      ++gm.h_gap_excluded;
    else
      gm.h_gaps.push_back(g);
  }

  // Bed joints between u-overlapping bricks of adjacent rows.
  std::vector<double> v_candidates;
  for (std::size_t r = 0; r + 1 < rows.size(); ++r)
    for (const BrickRect* lower : rows[r])
      for (const BrickRect* upper : rows[r + 1])
        if (u_overlap(*lower, *upper) > 0.0)
          v_candidates.push_back(upper->bottom() - lower->top());
  const double v_cut = 3.0 * median_of(v_candidates);
  for (double g : v_candidates) {
    if (g < 0.0 || g > v_cut)
      ++gm.v_gap_excluded;
    else
      gm.v_gaps.push_back(g);
  }

  // Level jitter against the per-row baseline (median of bottoms).
  for (const auto& row : rows) {
    std::vector<double> bottoms;
    bottoms.reserve(row.size());
    for (const BrickRect* r : row) bottoms.push_back(r->bottom());
    const double baseline = median_of(bottoms);
    for (const BrickRect* r : row) gm.level_jitter.push_back(r->bottom() - baseline);
  }

  // Stagger between rows, read at the first head joint of each row.
  auto first_head_joint = [](const std::vector<const BrickRect*>& row) -> double {
    return 0.5 * (row[0]->right() + row[1]->left());
  };
  for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
    if (rows[r].size() < 2 || rows[r + 1].size() < 2) continue;
    gm.row_offsets.push_back(first_head_joint(rows[r + 1]) - first_head_joint(rows[r]));
  }

  return gm;
}

std::string rects_to_string(const std::vector<BrickRect>& rects,
                            const ExtractionExclusions& exclusions) {
  nlohmann::json doc;
  doc["format_version"] = kRectsFormatVersion;
  doc["units"] = "mm";
  nlohmann::json list = nlohmann::json::array();
  for (const BrickRect& r : rects) {
    list.push_back({{"id", r.id},
                    {"cu", r.center.u},
                    {"cv", r.center.v},
                    {"width", r.width},
                    {"height", r.height},
                    {"row", r.row}});
  }
  doc["rects"] = list;
  doc["exclusions"] = {{"noise_points", exclusions.noise_points},
                       {"degenerate_clusters", exclusions.degenerate_clusters}};
  return doc.dump(2) + "\n";
}

std::vector<BrickRect> rects_from_string(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::parse_error, std::string("rects file: ") + e.what());
  }
  auto require = [](const nlohmann::json& obj, const char* field) -> const nlohmann::json& {
    auto it = obj.find(field);
    if (it == obj.end())
      fail(Errc::parse_error, std::string("rects file: missing field '") + field + "'");
    return *it;
  };
  if (require(doc, "format_version").get<int>() != kRectsFormatVersion)
    fail(Errc::parse_error, "rects file: unsupported format_version");

  std::vector<BrickRect> rects;
  for (const nlohmann::json& r : require(doc, "rects")) {
    BrickRect rect;
    rect.id = require(r, "id").get<int>();
    rect.center = {require(r, "cu").get<double>(), require(r, "cv").get<double>()};
    rect.width = require(r, "width").get<double>();
    rect.height = require(r, "height").get<double>();
    rect.row = require(r, "row").get<int>();
    if (!(rect.width > 0.0) || !(rect.height > 0.0))
      fail(Errc::parse_error, "rects file: rect with non-positive size");
    rects.push_back(rect);
  }
  return rects;
}

}  // namespace brickgram
