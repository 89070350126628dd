#include "brickgram/wall_generate.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "brickgram/error.hpp"

namespace brickgram {

using nlohmann::json;

namespace {

constexpr double kGeomTol = 1e-9;  // mm; absorbs center/extent round-trips

Bounds2 wall_bounds(const WallSpec& spec) { return {0.0, 0.0, spec.width, spec.height}; }

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Rows of a wall in u-sorted order, keyed by the stored row index.
std::vector<std::vector<const LabeledBrick*>> rows_of(const Wall& wall) {
  std::vector<std::vector<const LabeledBrick*>> rows;
  for (const LabeledBrick& b : wall.bricks) {
    if (static_cast<std::size_t>(b.rect.row) >= rows.size()) rows.resize(b.rect.row + 1);
    rows[b.rect.row].push_back(&b);
  }
  for (auto& row : rows)
    std::sort(row.begin(), row.end(), [](const LabeledBrick* a, const LabeledBrick* b) {
      return a->rect.center.u < b->rect.center.u;
    });
  return rows;
}

bool parity_reflects(const GenState& s, int brick_id) {
  const LabeledBrick& b = s.placed[brick_id];
  const int position = static_cast<int>(s.rows[b.rect.row].size()) - 1;
  return ((b.rect.row + position) % 2) == 1;
}

}  // namespace

Wall generate(const WallSpec& spec, const WallParameters& params) {
  check_parameters(params);
  if (spec.width < 2.0 * params.brick_width.min || spec.height < params.brick_height.min)
    fail(Errc::spec_too_small, "wall envelope cannot hold the minimum bricks");

  GenState st = make_gen_state(wall_bounds(spec), params, spec.mode, spec.direction, spec.seed);
  RngSampler sampler(st.params, st.mode, st.rng);

  Wall wall;
  wall.spec = spec;
  wall.params_digest = parameters_digest(params);

  auto record = [&](RuleId rule, RuleOutcome& out) {
    DerivationStep step;
    step.step = static_cast<int>(wall.derivation.size());
    step.rule = rule;
    step.sampled = std::move(out.sampled);
    step.brick = out.brick;
    if (out.brick >= 0) st.placed[out.brick].derivation_step = step.step;
    wall.derivation.push_back(std::move(step));

    // Glide-reflected alternation: every other brick along the laying order
    // gets the second label rule, offset by one on odd rows.
    if (out.brick >= 0 && parity_reflects(st, out.brick)) {
      st.placed[out.brick] = label_reflect(st.placed[out.brick]);
      DerivationStep reflect;
      reflect.step = static_cast<int>(wall.derivation.size());
      reflect.rule = RuleId::LabelReflect;
      wall.derivation.push_back(reflect);
    }
  };

  RuleOutcome first = first_brick_rule(st, sampler);
  if (first.kind != RuleOutcome::Kind::Applied)
    fail(Errc::spec_too_small, "first brick does not fit the envelope");
  record(RuleId::LabelAssign, first);

  bool halted = false;
  while (!halted) {
    const std::optional<RuleId> rule = choose_rule(st);
    if (!rule) break;
    switch (*rule) {
      case RuleId::PlaceRight:
      case RuleId::PlaceLeft: {
        RuleOutcome out = place_brick_rule(st, sampler);
        if (out.kind == RuleOutcome::Kind::GuardFailed) {
          st.place_blocked = true;  // row is effectively full; try the edge rule
          break;
        }
        record(*rule, out);
        break;
      }
      case RuleId::EdgeScaleRight:
      case RuleId::EdgeScaleLeft: {
        RuleOutcome out = edge_scale_rule(st, sampler);
        record(*rule, out);  // a skipped edge is recorded with brick = -1
        st.place_blocked = false;
        break;
      }
      case RuleId::RowSwitch: {
        RuleOutcome out = row_switch_rule(st, sampler);
        if (out.kind == RuleOutcome::Kind::GuardFailed) {
          halted = true;  // top of wall: rows that do not fully fit are not placed
          break;
        }
        record(RuleId::RowSwitch, out);
        break;
      }
      default:
        halted = true;
        break;
    }
  }

  wall.bricks = std::move(st.placed);

  ValidationReport report = validate(wall);
  if (!report.valid())
    throw std::logic_error("generated wall violates its invariants: " +
                           (report.details.empty() ? std::string("?") : report.details.front()));
  return wall;
}

std::vector<LabeledBrick> replay(const WallSpec& spec, const WallParameters& params,
                                 const Derivation& derivation) {
  GenState st = make_gen_state(wall_bounds(spec), params, spec.mode, spec.direction, spec.seed);

  for (const DerivationStep& step : derivation) {
    ReplaySampler sampler(step.sampled);
    RuleOutcome out;
    switch (step.rule) {
      case RuleId::LabelAssign:
        out = first_brick_rule(st, sampler);
        break;
      case RuleId::LabelReflect:
        if (st.active < 0) fail(Errc::parse_error, "reflect step before any brick");
        st.placed[st.active] = label_reflect(st.placed[st.active]);
        continue;
      case RuleId::PlaceRight:
      case RuleId::PlaceLeft:
        out = place_brick_rule(st, sampler);
        break;
      case RuleId::EdgeScaleRight:
      case RuleId::EdgeScaleLeft:
        out = edge_scale_rule(st, sampler);
        break;
      case RuleId::RowSwitch:
        out = row_switch_rule(st, sampler);
        break;
    }
    if (out.kind == RuleOutcome::Kind::GuardFailed)
      fail(Errc::parse_error, "derivation step " + std::to_string(step.step) +
                                  " does not replay against this spec");
    if (out.brick != step.brick)
      fail(Errc::parse_error, "derivation step " + std::to_string(step.step) +
                                  " places a different brick than recorded");
    if (out.brick >= 0) st.placed[out.brick].derivation_step = step.step;
  }
  return std::move(st.placed);
}

namespace {

void check_ranges(const Wall& wall, const WallParameters& params, ValidationReport& report) {
  auto in_range = [](double x, const ParamDistribution& d) {
    return x >= d.min - kGeomTol && x <= d.max + kGeomTol;
  };
  for (const DerivationStep& step : wall.derivation) {
    for (const auto& [key, value] : step.sampled) {
      const ParamDistribution* dist = nullptr;
      bool jitter = false;
      if (key == "g") dist = &params.h_gap;
      if (key == "v") dist = &params.v_gap;
      if (key == "o") dist = &params.row_offset;
      if (key == "h") dist = &params.brick_height;
      if (key == "w") dist = &params.brick_width;
      if (key == "j") {
        dist = &params.level_jitter;
        jitter = true;
      }
      if (!dist || !in_range(value, *dist)) {
        if (!dist) continue;
        (jitter ? report.jitter_range_violations : report.gap_range_violations) += 1;
        report.details.push_back("step " + std::to_string(step.step) + ": sampled " + key +
                                 "=" + std::to_string(value) + " outside [" +
                                 std::to_string(dist->min) + ", " + std::to_string(dist->max) +
                                 "]");
      }
    }
  }
}

}  // namespace

ValidationReport validate(const Wall& wall) {
  ValidationReport report;
  const Bounds2 bounds = wall_bounds(wall.spec);

  for (const LabeledBrick& b : wall.bricks) {
    if (b.rect.left() < bounds.u_min - kGeomTol || b.rect.right() > bounds.u_max + kGeomTol ||
        b.rect.bottom() < bounds.v_min - kGeomTol || b.rect.top() > bounds.v_max + kGeomTol) {
      ++report.bounds_violations;
      report.details.push_back("brick " + std::to_string(b.rect.id) + " leaves the envelope");
    }
  }

  // Sweep by bottom edge; only v-overlapping candidates are compared.
  std::vector<const LabeledBrick*> by_bottom;
  by_bottom.reserve(wall.bricks.size());
  for (const LabeledBrick& b : wall.bricks) by_bottom.push_back(&b);
  std::sort(by_bottom.begin(), by_bottom.end(), [](const LabeledBrick* a, const LabeledBrick* b) {
    return a->rect.bottom() < b->rect.bottom();
  });
  for (std::size_t i = 0; i < by_bottom.size(); ++i) {
    const BrickRect& a = by_bottom[i]->rect;
    for (std::size_t j = i + 1; j < by_bottom.size(); ++j) {
      const BrickRect& b = by_bottom[j]->rect;
      if (b.bottom() >= a.top() - kGeomTol) break;
      const double du = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
      const double dv = std::min(a.top(), b.top()) - std::max(a.bottom(), b.bottom());
      if (du > kGeomTol && dv > kGeomTol) {
        ++report.overlap_violations;
        report.details.push_back("bricks " + std::to_string(a.id) + " and " +
                                 std::to_string(b.id) + " overlap");
      }
    }
  }
  return report;
}

ValidationReport validate(const Wall& wall, const WallParameters& params) {
  ValidationReport report = validate(wall);
  check_ranges(wall, params, report);
  return report;
}

std::vector<LabeledPoint> synthesize_cloud(const Wall& wall, double pitch, double noise_std,
                                           std::uint64_t seed) {
  if (!(pitch > 0.0)) fail(Errc::argument_error, "pitch must be > 0");
  if (noise_std < 0.0) fail(Errc::argument_error, "noise_std must be >= 0");

  const long long nu = static_cast<long long>(std::floor(wall.spec.width / pitch));
  const long long nv = static_cast<long long>(std::floor(wall.spec.height / pitch));

  // Rasterize brick interiors onto the grid; strict insideness at the
  // boundary, verified against the actual comparison to sidestep floor()
  // edge wobble.
  std::vector<std::uint8_t> inside(static_cast<std::size_t>((nu + 1) * (nv + 1)), 0);
  auto mark = [&](long long iu, long long iv) {
    inside[static_cast<std::size_t>(iv * (nu + 1) + iu)] = 1;
  };
  for (const LabeledBrick& b : wall.bricks) {
    const BrickRect& r = b.rect;
    long long iu_lo = static_cast<long long>(std::ceil(r.left() / pitch));
    while (static_cast<double>(iu_lo) * pitch <= r.left()) ++iu_lo;
    long long iu_hi = static_cast<long long>(std::floor(r.right() / pitch));
    while (static_cast<double>(iu_hi) * pitch >= r.right()) --iu_hi;
    long long iv_lo = static_cast<long long>(std::ceil(r.bottom() / pitch));
    while (static_cast<double>(iv_lo) * pitch <= r.bottom()) ++iv_lo;
    long long iv_hi = static_cast<long long>(std::floor(r.top() / pitch));
    while (static_cast<double>(iv_hi) * pitch >= r.top()) --iv_hi;
    iu_lo = std::max(iu_lo, 0LL);
    iv_lo = std::max(iv_lo, 0LL);
    iu_hi = std::min(iu_hi, nu);
    iv_hi = std::min(iv_hi, nv);
    for (long long iv = iv_lo; iv <= iv_hi; ++iv)
      for (long long iu = iu_lo; iu <= iu_hi; ++iu) mark(iu, iv);
  }

  Rng rng(seed);
  std::vector<LabeledPoint> points;
  points.reserve(static_cast<std::size_t>((nu + 1) * (nv + 1)));
  for (long long iv = 0; iv <= nv; ++iv) {
    for (long long iu = 0; iu <= nu; ++iu) {
      LabeledPoint p;
      p.x = static_cast<double>(iu) * pitch;
      p.y = static_cast<double>(iv) * pitch;
      p.z = 0.0;
      if (noise_std > 0.0) {
        p.x += rng.normal(0.0, noise_std);
        p.y += rng.normal(0.0, noise_std);
        p.z += rng.normal(0.0, noise_std);
      }
      p.label = inside[static_cast<std::size_t>(iv * (nu + 1) + iu)] ? PointLabel::Brick
                                                                     : PointLabel::Mortar;
      points.push_back(p);
    }
  }
  return points;
}

JointLedger wall_joint_ledger(const Wall& wall) {
  JointLedger ledger;
  const auto rows = rows_of(wall);

  for (const auto& row : rows)
    for (std::size_t i = 1; i < row.size(); ++i)
      ledger.h_gaps.push_back(row[i]->rect.left() - row[i - 1]->rect.right());

  for (std::size_t r = 0; r + 1 < rows.size(); ++r)
    for (const LabeledBrick* lower : rows[r])
      for (const LabeledBrick* upper : rows[r + 1])
        if (u_overlap(lower->rect, upper->rect) > 0.0)
          ledger.v_gaps.push_back(upper->rect.bottom() - lower->rect.top());

  for (const auto& row : rows) {
    std::vector<double> bottoms;
    for (const LabeledBrick* b : row) bottoms.push_back(b->rect.bottom());
    const double baseline = median_of(bottoms);
    for (const LabeledBrick* b : row) ledger.level_jitter.push_back(b->rect.bottom() - baseline);
  }

  auto first_joint = [](const std::vector<const LabeledBrick*>& row) {
    return 0.5 * (row[0]->rect.right() + row[1]->rect.left());
  };
  for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
    if (rows[r].size() < 2 || rows[r + 1].size() < 2) continue;
    ledger.row_offsets.push_back(first_joint(rows[r + 1]) - first_joint(rows[r]));
  }
  return ledger;
}

std::vector<RowAccounting> wall_row_accounting(const Wall& wall) {
  std::vector<RowAccounting> out;
  for (const auto& row : rows_of(wall)) {
    RowAccounting acc;
    for (std::size_t i = 0; i < row.size(); ++i) {
      acc.brick_width_sum += row[i]->rect.width;
      if (i > 0) acc.joint_width_sum += row[i]->rect.left() - row[i - 1]->rect.right();
    }
    acc.leading_offset = row.front()->rect.left() - 0.0;
    acc.trailing_skip = wall.spec.width - row.back()->rect.right();
    out.push_back(acc);
  }
  return out;
}

namespace {

json wall_to_json(const Wall& wall) {
  json doc;
  doc["format_version"] = kWallFormatVersion;
  doc["units"] = "mm";
  doc["spec"] = {{"width", wall.spec.width},
                 {"height", wall.spec.height},
                 {"seed", wall.spec.seed},
                 {"mode", to_string(wall.spec.mode)},
                 {"direction", to_string(wall.spec.direction)}};
  doc["params_digest"] = wall.params_digest;

  json bricks = json::array();
  for (const LabeledBrick& b : wall.bricks) {
    bricks.push_back({{"id", b.rect.id},
                      {"cu", b.rect.center.u},
                      {"cv", b.rect.center.v},
                      {"width", b.rect.width},
                      {"height", b.rect.height},
                      {"row", b.rect.row},
                      {"direction", b.direction == DirectionLabel::Right ? "right" : "left"},
                      {"scaled", b.scaled}});
  }
  doc["bricks"] = bricks;

  json derivation = json::array();
  for (const DerivationStep& s : wall.derivation) {
    json step = {{"step", s.step}, {"rule", to_string(s.rule)}, {"sampled", s.sampled}};
    if (s.brick >= 0)
      step["brick"] = s.brick;
    else
      step["brick"] = nullptr;
    derivation.push_back(step);
  }
  doc["derivation"] = derivation;
  return doc;
}

const json& require(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end())
    fail(Errc::parse_error, std::string("wall file: missing field '") + field + "'");
  return *it;
}

}  // namespace

std::string wall_to_string(const Wall& wall) { return wall_to_json(wall).dump(2) + "\n"; }

void write_wall(std::ostream& out, const Wall& wall) { out << wall_to_string(wall); }

Wall read_wall(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(Errc::parse_error, std::string("wall file: ") + e.what());
  }
  if (require(doc, "format_version").get<int>() != kWallFormatVersion)
    fail(Errc::parse_error, "wall file: unsupported format_version");

  Wall wall;
  const json& spec = require(doc, "spec");
  wall.spec.width = require(spec, "width").get<double>();
  wall.spec.height = require(spec, "height").get<double>();
  wall.spec.seed = require(spec, "seed").get<std::uint64_t>();
  wall.spec.mode = sampling_mode_from_string(require(spec, "mode").get<std::string>());
  wall.spec.direction = direction_from_string(require(spec, "direction").get<std::string>());
  wall.params_digest = require(doc, "params_digest").get<std::string>();

  for (const json& b : require(doc, "bricks")) {
    LabeledBrick brick;
    brick.rect.id = require(b, "id").get<int>();
    brick.rect.center = {require(b, "cu").get<double>(), require(b, "cv").get<double>()};
    brick.rect.width = require(b, "width").get<double>();
    brick.rect.height = require(b, "height").get<double>();
    brick.rect.row = require(b, "row").get<int>();
    const std::string dir = require(b, "direction").get<std::string>();
    if (dir != "right" && dir != "left")
      fail(Errc::parse_error, "wall file: bad brick direction '" + dir + "'");
    brick = dir == "left" ? label_reflect(label_assign(brick.rect)) : label_assign(brick.rect);
    brick.scaled = require(b, "scaled").get<bool>();
    if (!(brick.rect.width > 0.0) || !(brick.rect.height > 0.0))
      fail(Errc::parse_error, "wall file: brick with non-positive size");
    wall.bricks.push_back(brick);
  }

  for (const json& s : require(doc, "derivation")) {
    DerivationStep step;
    step.step = require(s, "step").get<int>();
    step.rule = rule_from_string(require(s, "rule").get<std::string>());
    for (const auto& [key, value] : require(s, "sampled").items())
      step.sampled[key] = value.get<double>();
    const json& brick = require(s, "brick");
    step.brick = brick.is_null() ? -1 : brick.get<int>();
    if (step.brick >= 0 && static_cast<std::size_t>(step.brick) < wall.bricks.size())
      wall.bricks[step.brick].derivation_step = step.step;
    wall.derivation.push_back(step);
  }
  return wall;
}

}  // namespace brickgram
