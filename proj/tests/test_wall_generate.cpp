#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "brickgram/brick_extract.hpp"
#include "brickgram/error.hpp"
#include "brickgram/point_cloud.hpp"
#include "brickgram/wall_generate.hpp"

using namespace brickgram;

namespace {

WallParameters degenerate_params(double w = 210, double h = 45, double g = 10, double v = 12,
                                 double offset = 110, double jitter = 0) {
  WallParameters p;
  p.brick_width = fit_distribution("brick_width", {w});
  p.brick_height = fit_distribution("brick_height", {h});
  p.h_gap = fit_distribution("h_gap", {g});
  p.v_gap = fit_distribution("v_gap", {v});
  p.level_jitter = fit_distribution("level_jitter", {jitter});
  p.row_offset = fit_distribution("row_offset", {offset});
  return p;
}

// Small spreads, clipped so that every brick fits its course and no bed
// joint gets thinner than a 5 mm sampling pitch (keeps the synthesis
// round-trip free of cluster merges).
WallParameters varied_params(std::uint64_t seed = 9000) {
  Rng rng(seed);
  auto draw_clipped = [&](double mean, double sigma, double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(std::clamp(rng.normal(mean, sigma), lo, hi));
    return out;
  };
  WallParameters p;
  p.brick_width = fit_distribution("brick_width", draw_clipped(210, 8, 186, 234, 120));
  p.brick_height = fit_distribution("brick_height", draw_clipped(45, 3, 42, 48, 120));
  p.h_gap = fit_distribution("h_gap", draw_clipped(10, 2, 6, 14, 120));
  p.v_gap = fit_distribution("v_gap", draw_clipped(14, 2, 12, 20, 120));
  p.level_jitter = fit_distribution("level_jitter", draw_clipped(0, 1.5, -1.5, 1.5, 120));
  std::vector<double> offsets;
  for (int i = 0; i < 60; ++i) {
    offsets.push_back(std::clamp(rng.normal(110, 15), 60.0, 160.0));
    offsets.push_back(std::clamp(rng.normal(-110, 15), -160.0, -60.0));
  }
  p.row_offset = fit_distribution("row_offset", offsets);
  return p;
}

WallSpec spec_of(double w, double h, std::uint64_t seed,
                 SamplingMode mode = SamplingMode::EmpiricalIndex,
                 Direction dir = Direction::Rightward) {
  WallSpec s;
  s.width = w;
  s.height = h;
  s.seed = seed;
  s.mode = mode;
  s.direction = dir;
  return s;
}

int max_row(const Wall& wall) {
  int rows = 0;
  for (const LabeledBrick& b : wall.bricks) rows = std::max(rows, b.rect.row + 1);
  return rows;
}

}  // namespace

TEST_CASE("zero-variance wall lays two exact rows") {
  const Wall wall = generate(spec_of(1000, 120, 7), degenerate_params());
  CHECK(max_row(wall) == 2);
  for (const LabeledBrick& b : wall.bricks) {
    if (b.rect.row == 0) CHECK(b.rect.bottom() == doctest::Approx(0.0));
    if (b.rect.row == 1) CHECK(b.rect.bottom() == doctest::Approx(57.0));
  }
}

TEST_CASE("same spec and seed give byte-identical serialized output") {
  const WallParameters params = varied_params();
  const WallSpec spec = spec_of(3000, 1000, 42);
  const std::string a = wall_to_string(generate(spec, params));
  const std::string b = wall_to_string(generate(spec, params));
  CHECK(a == b);

  const std::string c = wall_to_string(generate(spec_of(3000, 1000, 43), params));
  CHECK(a != c);
}

TEST_CASE("brick count tracks the analytic packing estimate") {
  const WallParameters params = varied_params();
  const Wall wall = generate(spec_of(5000, 2000, 11), params);
  const double unit_area = (params.brick_width.mean + params.h_gap.mean) *
                           (params.brick_height.mean + params.v_gap.mean);
  const double expected = 5000.0 * 2000.0 / unit_area;
  CHECK(wall.bricks.size() > 0.85 * expected);
  CHECK(wall.bricks.size() < 1.15 * expected);
}

TEST_CASE("generated walls validate clean, hand-broken walls do not") {
  const WallParameters params = varied_params();
  Wall wall = generate(spec_of(2000, 600, 3), params);
  CHECK(validate(wall, params).valid());

  Wall dup = wall;
  dup.bricks.push_back(dup.bricks.front());  // two identical bricks
  const auto dup_report = validate(dup);
  CHECK(dup_report.overlap_violations == 1);

  Wall off = wall;
  off.bricks.front().rect.center.u = off.spec.width;  // straddles u_max
  const auto off_report = validate(off);
  CHECK(off_report.bounds_violations == 1);
}

TEST_CASE("wall json round-trips") {
  const WallParameters params = varied_params();
  const Wall wall = generate(spec_of(1500, 500, 21), params);
  std::istringstream in(wall_to_string(wall));
  const Wall back = read_wall(in);
  CHECK(back.spec == wall.spec);
  CHECK(back.params_digest == wall.params_digest);
  REQUIRE(back.bricks.size() == wall.bricks.size());
  for (std::size_t i = 0; i < wall.bricks.size(); ++i) CHECK(back.bricks[i] == wall.bricks[i]);
  REQUIRE(back.derivation.size() == wall.derivation.size());
  for (std::size_t i = 0; i < wall.derivation.size(); ++i)
    CHECK(back.derivation[i] == wall.derivation[i]);
}

TEST_CASE("replaying the derivation reconstructs the brick list exactly") {
  const WallParameters params = varied_params();
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const Wall wall = generate(spec_of(2500, 900, seed), params);
    const auto bricks = replay(wall.spec, params, wall.derivation);
    REQUIRE(bricks.size() == wall.bricks.size());
    for (std::size_t i = 0; i < bricks.size(); ++i) CHECK(bricks[i] == wall.bricks[i]);
  }
}

TEST_CASE("every placed brick is referenced by exactly one derivation step") {
  const Wall wall = generate(spec_of(2500, 900, 5), varied_params());
  std::vector<int> refs(wall.bricks.size(), 0);
  int step_no = 0;
  for (const DerivationStep& s : wall.derivation) {
    CHECK(s.step == step_no++);
    if (s.brick >= 0) refs[s.brick] += 1;
  }
  for (int r : refs) CHECK(r == 1);
}

TEST_CASE("direction labels alternate along the laying order") {
  const Wall wall = generate(spec_of(2500, 900, 5), varied_params());
  std::vector<std::vector<const LabeledBrick*>> rows(max_row(wall));
  for (const LabeledBrick& b : wall.bricks) rows[b.rect.row].push_back(&b);
  for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
    for (int i = 0; i < static_cast<int>(rows[r].size()); ++i) {
      const DirectionLabel expect =
          ((r + i) % 2 == 1) ? DirectionLabel::Left : DirectionLabel::Right;
      CHECK(rows[r][i]->direction == expect);
    }
  }
}

TEST_CASE("compute_gaps recovers the generating joints exactly") {
  // 20x10-ish wall from known distributions; the oracle is the generator's
  // own ledger. Both sides are analytic, so multisets match to 1e-9.
  const WallParameters params = varied_params(555);
  const Wall wall = generate(spec_of(4500, 580, 99), params);
  REQUIRE(wall.bricks.size() > 100);

  std::vector<BrickRect> rects;
  for (const LabeledBrick& b : wall.bricks) rects.push_back(b.rect);
  const auto grouped = group_rows(rects);
  GapMeasurements extracted = compute_gaps(grouped);
  CHECK(extracted.h_gap_excluded == 0);
  CHECK(extracted.v_gap_excluded == 0);

  const JointLedger ledger = wall_joint_ledger(wall);
  auto match = [](std::vector<double> a, std::vector<double> b) {
    REQUIRE(a.size() == b.size());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  };
  match(extracted.h_gaps, ledger.h_gaps);
  match(extracted.v_gaps, ledger.v_gaps);
  match(extracted.level_jitter, ledger.level_jitter);
  match(extracted.row_offsets, ledger.row_offsets);

  // Head joints equal the sampled g values recorded in the derivation.
  std::vector<double> sampled_g;
  for (const DerivationStep& s : wall.derivation)
    if (s.brick >= 0 && s.sampled.count("g")) sampled_g.push_back(s.sampled.at("g"));
  match(ledger.h_gaps, sampled_g);
}

TEST_CASE("per-row width accounting closes to the envelope") {
  const Wall wall = generate(spec_of(3200, 800, 17), varied_params());
  for (const RowAccounting& acc : wall_row_accounting(wall)) {
    const double covered =
        acc.brick_width_sum + acc.joint_width_sum + acc.leading_offset + acc.trailing_skip;
    CHECK(covered == doctest::Approx(wall.spec.width).epsilon(1e-6));
  }
}

TEST_CASE("brick count is monotone in wall size at zero variance") {
  const WallParameters params = degenerate_params();
  std::size_t prev = 0;
  for (double w : {900.0, 1200.0, 1500.0, 2100.0}) {
    const Wall wall = generate(spec_of(w, 300, 1), params);
    CHECK(wall.bricks.size() >= prev);
    prev = wall.bricks.size();
  }
  prev = 0;
  for (double h : {60.0, 120.0, 240.0, 480.0}) {
    const Wall wall = generate(spec_of(1500, h, 1), params);
    CHECK(wall.bricks.size() >= prev);
    prev = wall.bricks.size();
  }
}

TEST_CASE("too-small specs are rejected") {
  CHECK_THROWS_AS(generate(spec_of(300, 300, 1), degenerate_params()), Error);
  CHECK_THROWS_AS(generate(spec_of(1000, 30, 1), degenerate_params()), Error);
}

TEST_CASE("leftward generation mirrors rightward geometry") {
  const WallParameters params = varied_params();
  const WallSpec right = spec_of(2500, 700, 31, SamplingMode::EmpiricalIndex,
                                 Direction::Rightward);
  WallSpec left = right;
  left.direction = Direction::Leftward;
  const Wall rw = generate(right, params);
  const Wall lw = generate(left, params);
  REQUIRE(rw.bricks.size() == lw.bricks.size());
  for (std::size_t i = 0; i < rw.bricks.size(); ++i) {
    const BrickRect& a = rw.bricks[i].rect;
    const BrickRect& b = lw.bricks[i].rect;
    CHECK(b.center.u == doctest::Approx(right.width - a.center.u).epsilon(1e-12));
    CHECK(b.center.v == doctest::Approx(a.center.v).epsilon(1e-12));
    CHECK(b.width == doctest::Approx(a.width));
  }
  for (const DerivationStep& s : lw.derivation) {
    CHECK(s.rule != RuleId::PlaceRight);
    CHECK(s.rule != RuleId::EdgeScaleRight);
  }
}

TEST_CASE("wall json rejects malformed documents") {
  const Wall wall = generate(spec_of(1200, 400, 4), varied_params());
  const std::string good = wall_to_string(wall);

  std::string bad_rule = good;
  const auto pos = bad_rule.find("place_right");
  REQUIRE(pos != std::string::npos);
  bad_rule.replace(pos, 11, "place_updown");  // same length not required
  std::istringstream in1(bad_rule);
  CHECK_THROWS_AS(read_wall(in1), Error);

  std::istringstream in2("{\"format_version\": 99}");
  CHECK_THROWS_AS(read_wall(in2), Error);

  std::istringstream in3("not json at all");
  CHECK_THROWS_AS(read_wall(in3), Error);
}

TEST_CASE("validate flags sampled values outside the parameter range") {
  const WallParameters params = varied_params();
  Wall wall = generate(spec_of(2000, 600, 6), params);
  REQUIRE(validate(wall, params).valid());
  for (DerivationStep& s : wall.derivation) {
    if (s.sampled.count("g")) {
      s.sampled["g"] = params.h_gap.max + 5.0;  // tampered trace
      break;
    }
  }
  const auto report = validate(wall, params);
  CHECK(report.gap_range_violations == 1);
}

TEST_CASE("synthesize validates its arguments") {
  const Wall wall = generate(spec_of(1200, 400, 4), varied_params());
  CHECK_THROWS_AS(synthesize_cloud(wall, 0.0, 0.5, 1), Error);
  CHECK_THROWS_AS(synthesize_cloud(wall, 5.0, -0.1, 1), Error);
}

TEST_CASE("synthesize labels exactly the grid points strictly inside bricks") {
  // Single brick [0,210]x[0,45] in a 300x100 wall at pitch 5, no noise.
  WallParameters params = degenerate_params(210, 45, 10, 12, 0, 0);
  Wall wall;
  wall.spec = spec_of(300, 100, 0);
  BrickRect r;
  r.id = 0;
  r.center = {105, 22.5};
  r.width = 210;
  r.height = 45;
  r.row = 0;
  wall.bricks.push_back(label_assign(r));
  wall.params_digest = parameters_digest(params);

  const auto cloud = synthesize_cloud(wall, 5.0, 0.0, 1);
  std::size_t brick_points = 0;
  for (const LabeledPoint& p : cloud) {
    const bool inside = p.x > 0.0 && p.x < 210.0 && p.y > 0.0 && p.y < 45.0;
    CHECK((p.label == PointLabel::Brick) == inside);
    if (p.label == PointLabel::Brick) ++brick_points;
  }
  CHECK(brick_points == 41 * 8);  // u in {5..205}, v in {5..40}
  CHECK(cloud.size() == 61 * 21);
}

TEST_CASE("noise-free synthesis recovers rects to within the sampling pitch") {
  const Wall wall = generate(spec_of(1500, 400, 77), varied_params());
  const double pitch = 5.0;
  const auto cloud = synthesize_cloud(wall, pitch, 0.0, 1);

  std::vector<Point2> brick_points;
  for (const LabeledPoint& p : cloud)
    if (p.label == PointLabel::Brick) brick_points.push_back({p.x, p.y});

  const auto clustered = cluster_bricks(brick_points, 7.5, 4);
  REQUIRE(clustered.clusters.size() == wall.bricks.size());

  std::vector<BrickRect> rects;
  for (const auto& cluster : clustered.clusters) {
    std::vector<Point2> pts;
    for (std::size_t idx : cluster) pts.push_back(brick_points[idx]);
    rects.push_back(fit_rectangle(pts, 0.0));
  }
  rects = group_rows(std::move(rects));

  std::vector<BrickRect> truth;
  for (const LabeledBrick& b : wall.bricks) truth.push_back(b.rect);
  truth = group_rows(std::move(truth));

  for (std::size_t i = 0; i < truth.size(); ++i) {
    CHECK(rects[i].row == truth[i].row);
    CHECK(std::abs(rects[i].left() - truth[i].left()) <= pitch);
    CHECK(std::abs(rects[i].right() - truth[i].right()) <= pitch);
    CHECK(std::abs(rects[i].top() - truth[i].top()) <= pitch);
    CHECK(std::abs(rects[i].bottom() - truth[i].bottom()) <= pitch);
  }
}

TEST_CASE("an upright, yawed, translated survey extracts the same bricks") {
  // The synthetic cloud lies flat in z=0; a real survey wall stands upright
  // at an arbitrary heading. Frame recovery is gravity-anchored (v = global
  // up projected into the plane), so standing the wall up, yawing it, and
  // translating it must not change what the pipeline recovers.
  const Wall wall = generate(spec_of(1500, 400, 77), varied_params());
  auto cloud = synthesize_cloud(wall, 5.0, 0.3, 9);

  const double yaw = 0.7;
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  for (LabeledPoint& p : cloud) {
    const Vec3 upright{p.x, p.z, p.y};  // wall plane becomes vertical
    p.x = cy * upright.x - sy * upright.y + 4200.0;
    p.y = sy * upright.x + cy * upright.y - 900.0;
    p.z = upright.z + 333.0;
  }

  const WallPlane plane = fit_wall_plane(cloud);
  const auto projected = project(cloud, plane);
  std::vector<Point2> brick_points;
  for (const auto& p : projected)
    if (p.label == PointLabel::Brick) brick_points.push_back(p.p);

  const auto clustered = cluster_bricks(brick_points, 7.0, 8);
  REQUIRE(clustered.clusters.size() == wall.bricks.size());

  // Width multisets survive the transform. The yawed grid samples each
  // brick at a rotated phase, so a bounding-box edge can sit up to
  // p*(|cos| + |sin|)/2 inside the true edge, plus noise spill: ~9 mm over
  // both edges at p = 5.
  std::vector<double> got_w;
  for (const auto& cl : clustered.clusters) {
    std::vector<Point2> pts;
    for (std::size_t idx : cl) pts.push_back(brick_points[idx]);
    got_w.push_back(fit_rectangle(pts, 0.0).width);
  }
  std::vector<double> want_w;
  for (const LabeledBrick& brk : wall.bricks) want_w.push_back(brk.rect.width);
  std::sort(got_w.begin(), got_w.end());
  std::sort(want_w.begin(), want_w.end());
  for (std::size_t i = 0; i < got_w.size(); ++i) CHECK(std::abs(got_w[i] - want_w[i]) < 10.0);
}

TEST_CASE("synthesis is deterministic given the seed") {
  const Wall wall = generate(spec_of(1000, 300, 3), varied_params());
  const auto a = synthesize_cloud(wall, 5.0, 0.5, 123);
  const auto b = synthesize_cloud(wall, 5.0, 0.5, 123);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].label == b[i].label);
  }
}
