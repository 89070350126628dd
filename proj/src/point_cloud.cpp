#include "brickgram/point_cloud.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "brickgram/error.hpp"
#include "brickgram/rng.hpp"

namespace brickgram {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  fail(Errc::parse_error, "line " + std::to_string(line) + ": " + msg);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, std::size_t line) {
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) parse_fail(line, "expected a number, got '" + tok + "'");
  if (!std::isfinite(value)) parse_fail(line, "non-finite coordinate '" + tok + "'");
  return value;
}

PointLabel parse_label(const std::string& tok, std::size_t line) {
  std::string t = lower(trim(tok));
  if (t == "brick" || t == "1") return PointLabel::Brick;
  if (t == "mortar" || t == "0") return PointLabel::Mortar;
  parse_fail(line, "unknown label value '" + tok + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool looks_numeric(const std::string& tok) {
  std::string t = trim(tok);
  if (t.empty()) return false;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  return ec == std::errc{} && ptr == t.data() + t.size();
}

std::vector<LabeledPoint> parse_csv(std::istream& in) {
  std::vector<LabeledPoint> points;
  std::string line;
  std::size_t line_no = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    std::vector<std::string> cols = split_csv(t);
    if (first_data_line) {
      first_data_line = false;
      // Header row is optional; skip it when the first column is not numeric.
      if (!looks_numeric(cols[0])) continue;
    }
    if (cols.size() < 4) parse_fail(line_no, "expected 4 columns x,y,z,label");
    LabeledPoint p;
    p.x = parse_number(trim(cols[0]), line_no);
    p.y = parse_number(trim(cols[1]), line_no);
    p.z = parse_number(trim(cols[2]), line_no);
    p.label = parse_label(cols[3], line_no);
    points.push_back(p);
  }
  if (points.empty()) fail(Errc::empty_input, "point cloud has no points");
  return points;
}

struct PlyProperty {
  std::string name;
  bool is_list = false;
};

std::vector<LabeledPoint> parse_ascii_ply(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  auto next_line = [&](std::string& out) {
    if (!std::getline(in, out)) return false;
    ++line_no;
    out = trim(out);
    return true;
  };

  if (!next_line(line) || line != "ply") parse_fail(line_no ? line_no : 1, "missing 'ply' magic");

  long long vertex_count = -1;
  std::vector<PlyProperty> vertex_props;
  bool in_vertex_element = false;
  bool format_seen = false;

  while (true) {
    if (!next_line(line)) parse_fail(line_no, "unexpected end of header");
    if (line.empty() || line.rfind("comment", 0) == 0 || line.rfind("obj_info", 0) == 0) continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") parse_fail(line_no, "only ascii format is supported");
      format_seen = true;
    } else if (kw == "element") {
      std::string name;
      long long count = 0;
      ls >> name >> count;
      if (name == "vertex") {
        if (vertex_count >= 0) parse_fail(line_no, "duplicate vertex element");
        vertex_count = count;
        in_vertex_element = true;
      } else {
        if (vertex_count < 0)
          parse_fail(line_no, "element '" + name + "' precedes the vertex element");
        in_vertex_element = false;
      }
    } else if (kw == "property") {
      if (!in_vertex_element) continue;  // properties of trailing elements: ignored
      std::string type;
      ls >> type;
      PlyProperty prop;
      if (type == "list") {
        std::string t1, t2;
        ls >> t1 >> t2 >> prop.name;
        prop.is_list = true;
      } else {
        ls >> prop.name;
      }
      if (prop.name.empty()) parse_fail(line_no, "property without a name");
      vertex_props.push_back(prop);
    } else if (kw == "end_header") {
      break;
    } else {
      parse_fail(line_no, "unknown header keyword '" + kw + "'");
    }
  }
  if (!format_seen) parse_fail(line_no, "missing format line");
  if (vertex_count < 0) parse_fail(line_no, "missing vertex element");

  int ix = -1, iy = -1, iz = -1, ilabel = -1;
  for (std::size_t i = 0; i < vertex_props.size(); ++i) {
    if (vertex_props[i].is_list) continue;
    const std::string& n = vertex_props[i].name;
    if (n == "x") ix = static_cast<int>(i);
    if (n == "y") iy = static_cast<int>(i);
    if (n == "z") iz = static_cast<int>(i);
    if (n == "label") ilabel = static_cast<int>(i);
  }
  if (ix < 0 || iy < 0 || iz < 0) parse_fail(line_no, "vertex element lacks x/y/z properties");
  if (ilabel < 0) parse_fail(line_no, "vertex element lacks a label property");

  std::vector<LabeledPoint> points;
  points.reserve(static_cast<std::size_t>(std::min(vertex_count, 1LL << 20)));
  for (long long v = 0; v < vertex_count; ++v) {
    if (!next_line(line)) parse_fail(line_no, "fewer vertex records than declared");
    if (line.empty()) {
      --v;
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (toks.size() < vertex_props.size())
      parse_fail(line_no, "vertex record has too few values");
    LabeledPoint p;
    p.x = parse_number(toks[static_cast<std::size_t>(ix)], line_no);
    p.y = parse_number(toks[static_cast<std::size_t>(iy)], line_no);
    p.z = parse_number(toks[static_cast<std::size_t>(iz)], line_no);
    p.label = parse_label(toks[static_cast<std::size_t>(ilabel)], line_no);
    points.push_back(p);
  }
  if (points.empty()) fail(Errc::empty_input, "point cloud has no points");
  return points;
}

char label_digit(PointLabel l) { return l == PointLabel::Brick ? '1' : '0'; }

std::string format_coord(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct VoxelKey {
  std::int64_t i, j, k;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& key) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int64_t c : {key.i, key.j, key.k}) {
      h ^= static_cast<std::uint64_t>(c);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::vector<LabeledPoint> parse_point_cloud(std::istream& in, CloudFormat format) {
  switch (format) {
    case CloudFormat::AsciiPly:
      return parse_ascii_ply(in);
    case CloudFormat::Csv:
      return parse_csv(in);
  }
  fail(Errc::argument_error, "unknown cloud format");
}

void write_point_cloud(std::ostream& out, const std::vector<LabeledPoint>& points,
                       CloudFormat format) {
  if (format == CloudFormat::Csv) {
    out << "x,y,z,label\n";
    for (const LabeledPoint& p : points) {
      out << format_coord(p.x) << ',' << format_coord(p.y) << ',' << format_coord(p.z) << ','
          << label_digit(p.label) << '\n';
    }
    return;
  }
  out << "ply\nformat ascii 1.0\ncomment units mm\n"
      << "element vertex " << points.size() << '\n'
      << "property float x\nproperty float y\nproperty float z\nproperty int label\n"
      << "end_header\n";
  for (const LabeledPoint& p : points) {
    out << format_coord(p.x) << ' ' << format_coord(p.y) << ' ' << format_coord(p.z) << ' '
        << label_digit(p.label) << '\n';
  }
}

std::vector<LabeledPoint> downsample(const std::vector<LabeledPoint>& points, double voxel) {
  if (!(voxel > 0.0)) fail(Errc::argument_error, "voxel size must be > 0");

  struct CellAccum {
    double sx = 0.0, sy = 0.0, sz = 0.0;
    std::vector<std::size_t> members;
  };
  std::unordered_map<VoxelKey, CellAccum, VoxelKeyHash> cells;
  cells.reserve(points.size());

  auto key_of = [voxel](const LabeledPoint& p) {
    return VoxelKey{static_cast<std::int64_t>(std::floor(p.x / voxel)),
                    static_cast<std::int64_t>(std::floor(p.y / voxel)),
                    static_cast<std::int64_t>(std::floor(p.z / voxel))};
  };

  for (std::size_t i = 0; i < points.size(); ++i) {
    CellAccum& cell = cells[key_of(points[i])];
    cell.sx += points[i].x;
    cell.sy += points[i].y;
    cell.sz += points[i].z;
    cell.members.push_back(i);
  }

  std::vector<bool> keep(points.size(), false);
  for (const auto& [key, cell] : cells) {
    const double n = static_cast<double>(cell.members.size());
    const Vec3 centroid{cell.sx / n, cell.sy / n, cell.sz / n};
    std::size_t best = cell.members.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t idx : cell.members) {
      double d = (points[idx].pos() - centroid).norm();
      if (d < best_d) {  // ties keep the lowest input index (members ascend)
        best_d = d;
        best = idx;
      }
    }
    keep[best] = true;
  }

  std::vector<LabeledPoint> out;
  out.reserve(cells.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    if (keep[i]) out.push_back(points[i]);
  return out;
}

namespace {

// Jacobi eigen decomposition of a symmetric 3x3 matrix. Deterministic and
// self-contained; plenty for a covariance this small.
void jacobi_eigen3(double a[3][3], double eigval[3], double eigvec[3][3]) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) eigvec[i][j] = (i == j) ? 1.0 : 0.0;

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
    if (off < 1e-30) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        double apq = a[p][q];
        double app = a[p][p];
        double aqq = a[q][q];
        a[p][p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        a[q][q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        a[p][q] = a[q][p] = 0.0;
        int r = 3 - p - q;
        double arp = a[r][p];
        double arq = a[r][q];
        a[r][p] = a[p][r] = c * arp - s * arq;
        a[r][q] = a[q][r] = s * arp + c * arq;
        for (int i = 0; i < 3; ++i) {
          double vip = eigvec[i][p];
          double viq = eigvec[i][q];
          eigvec[i][p] = c * vip - s * viq;
          eigvec[i][q] = s * vip + c * viq;
        }
      }
    }
  }
  for (int i = 0; i < 3; ++i) eigval[i] = a[i][i];
}

}  // namespace

WallPlane fit_wall_plane(const std::vector<LabeledPoint>& points) {
  if (points.size() < 3)
    fail(Errc::degenerate_geometry, "plane fit needs at least 3 points");

  const double n = static_cast<double>(points.size());
  Vec3 centroid;
  for (const LabeledPoint& p : points) centroid = centroid + p.pos();
  centroid = centroid * (1.0 / n);

  double cov[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (const LabeledPoint& p : points) {
    Vec3 d = p.pos() - centroid;
    const double c[3] = {d.x, d.y, d.z};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cov[i][j] += c[i] * c[j];
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) cov[i][j] /= n;

  double eigval[3];
  double eigvec[3][3];
  jacobi_eigen3(cov, eigval, eigvec);

  int order[3] = {0, 1, 2};
  std::sort(order, order + 3, [&](int a, int b) { return eigval[a] > eigval[b]; });
  const double lam_max = eigval[order[0]];
  const double lam_mid = eigval[order[1]];
  if (!(lam_max > 0.0) || lam_mid <= lam_max * 1e-10)
    fail(Errc::degenerate_geometry, "points are collinear or coincident");

  Vec3 normal{eigvec[0][order[2]], eigvec[1][order[2]], eigvec[2][order[2]]};
  // Deterministic sign: largest-magnitude component positive.
  double best = normal.x;
  if (std::abs(normal.y) > std::abs(best)) best = normal.y;
  if (std::abs(normal.z) > std::abs(best)) best = normal.z;
  if (best < 0.0) normal = normal * -1.0;
  normal = normal.normalized();

  // v = global up projected into the plane; fall back along +y, +x when the
  // plane is (near-)horizontal. A candidate nearly parallel to the normal
  // would leave only its noise component in the plane, so demand a healthy
  // out-of-normal fraction before accepting it.
  const Vec3 candidates[3] = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
  Vec3 v_axis;
  for (const Vec3& up : candidates) {
    Vec3 proj = up - normal * up.dot(normal);
    if (proj.norm() > 0.1) {
      v_axis = proj.normalized();
      break;
    }
  }
  // Re-orient upward when the axis has real vertical extent; below the
  // threshold it is horizontal to within noise and either sign is "up".
  if (v_axis.dot({0, 0, 1}) < -1e-3) v_axis = v_axis * -1.0;
  Vec3 u_axis = v_axis.cross(normal);  // so that u x v = normal

  return WallPlane{centroid, u_axis, v_axis, normal};
}

std::vector<ProjectedPoint> project(const std::vector<LabeledPoint>& points,
                                    const WallPlane& plane) {
  std::vector<ProjectedPoint> out;
  out.reserve(points.size());
  for (const LabeledPoint& p : points) {
    Vec3 d = p.pos() - plane.origin;
    out.push_back({{d.dot(plane.u_axis), d.dot(plane.v_axis)}, p.label});
  }
  return out;
}

double median_nn_spacing(const std::vector<Point2>& points, std::size_t subsample) {
  if (points.size() < 2) fail(Errc::argument_error, "need at least 2 points for spacing");

  // Coarse grid over the full set, cell size from the bounding box so that a
  // ring search terminates quickly.
  double u_min = points[0].u, u_max = points[0].u;
  double v_min = points[0].v, v_max = points[0].v;
  for (const Point2& p : points) {
    u_min = std::min(u_min, p.u);
    u_max = std::max(u_max, p.u);
    v_min = std::min(v_min, p.v);
    v_max = std::max(v_max, p.v);
  }
  const double extent = std::max({u_max - u_min, v_max - v_min, 1e-9});
  const double cell = std::max(extent / std::sqrt(static_cast<double>(points.size())), 1e-9);

  auto cell_of = [&](const Point2& p) {
    return std::pair<std::int64_t, std::int64_t>{
        static_cast<std::int64_t>(std::floor((p.u - u_min) / cell)),
        static_cast<std::int64_t>(std::floor((p.v - v_min) / cell))};
  };

  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  grid.reserve(points.size());
  auto key = [](std::int64_t i, std::int64_t j) {
    return (static_cast<std::uint64_t>(i) << 32) ^ (static_cast<std::uint64_t>(j) & 0xffffffffULL);
  };
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto [ci, cj] = cell_of(points[i]);
    grid[key(ci, cj)].push_back(i);
  }

  // Fixed-seed subsample so the default radius is reproducible.
  Rng rng(0x5eed5eedULL);
  std::vector<std::size_t> sample_idx;
  if (points.size() <= subsample) {
    sample_idx.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) sample_idx[i] = i;
  } else {
    sample_idx.reserve(subsample);
    for (std::size_t k = 0; k < subsample; ++k)
      sample_idx.push_back(static_cast<std::size_t>(
          std::floor(rng.uniform01() * static_cast<double>(points.size()))));
  }

  std::vector<double> nn;
  nn.reserve(sample_idx.size());
  const std::int64_t max_ring =
      static_cast<std::int64_t>(extent / cell) + 2;
  for (std::size_t idx : sample_idx) {
    auto [ci, cj] = cell_of(points[idx]);
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
      for (std::int64_t di = -ring; di <= ring; ++di) {
        for (std::int64_t dj = -ring; dj <= ring; ++dj) {
          if (std::max(std::abs(di), std::abs(dj)) != ring) continue;
          auto it = grid.find(key(ci + di, cj + dj));
          if (it == grid.end()) continue;
          for (std::size_t other : it->second) {
            if (other == idx) continue;
            best = std::min(best, distance(points[idx], points[other]));
          }
        }
      }
      // Any point in ring k lies at distance >= (k-1)*cell, so once the best
      // found is within ring*cell no farther ring can improve on it.
      if (std::isfinite(best) && best <= static_cast<double>(ring) * cell) break;
    }
    if (std::isfinite(best)) nn.push_back(best);
  }
  if (nn.empty()) fail(Errc::argument_error, "could not estimate point spacing");
  std::sort(nn.begin(), nn.end());
  const std::size_t m = nn.size();
  return (m % 2 == 1) ? nn[m / 2] : 0.5 * (nn[m / 2 - 1] + nn[m / 2]);
}

}  // namespace brickgram
