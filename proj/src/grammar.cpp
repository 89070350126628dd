#include "brickgram/grammar.hpp"

#include <algorithm>
#include <cmath>

#include "brickgram/error.hpp"

namespace brickgram {

Point2 tag_position(const LabeledBrick& brick, Side side) {
  const BrickRect& r = brick.rect;
  switch (side) {
    case Side::LeftEdge: return {r.left(), r.center.v};
    case Side::RightEdge: return {r.right(), r.center.v};
    case Side::TopEdge: return {r.center.u, r.top()};
    default: return {r.center.u, r.bottom()};
  }
}

LabeledBrick label_assign(const BrickRect& rect) {
  LabeledBrick b;
  b.rect = rect;
  b.direction = DirectionLabel::Right;
  b.tags = SideTags{};  // canonical: ref_left on the left edge, and so on
  return b;
}

LabeledBrick label_reflect(LabeledBrick brick) {
  brick.direction =
      brick.direction == DirectionLabel::Right ? DirectionLabel::Left : DirectionLabel::Right;
  std::swap(brick.tags.left_edge, brick.tags.right_edge);
  return brick;
}

std::string to_string(RuleId rule) {
  switch (rule) {
    case RuleId::LabelAssign: return "label_assign";
    case RuleId::LabelReflect: return "label_reflect";
    case RuleId::PlaceRight: return "place_right";
    case RuleId::PlaceLeft: return "place_left";
    case RuleId::EdgeScaleRight: return "edge_scale_right";
    case RuleId::EdgeScaleLeft: return "edge_scale_left";
    default: return "row_switch";
  }
}

RuleId rule_from_string(const std::string& name) {
  if (name == "label_assign") return RuleId::LabelAssign;
  if (name == "label_reflect") return RuleId::LabelReflect;
  if (name == "place_right") return RuleId::PlaceRight;
  if (name == "place_left") return RuleId::PlaceLeft;
  if (name == "edge_scale_right") return RuleId::EdgeScaleRight;
  if (name == "edge_scale_left") return RuleId::EdgeScaleLeft;
  if (name == "row_switch") return RuleId::RowSwitch;
  fail(Errc::parse_error, "unknown rule name '" + name + "'");
}

std::string to_string(Direction d) { return d == Direction::Rightward ? "right" : "left"; }

Direction direction_from_string(const std::string& name) {
  if (name == "right") return Direction::Rightward;
  if (name == "left") return Direction::Leftward;
  fail(Errc::argument_error, "unknown direction '" + name + "'");
}

const char* param_key(ParamKind kind) {
  switch (kind) {
    case ParamKind::HGap: return "g";
    case ParamKind::Width: return "w";
    case ParamKind::Height: return "h";
    case ParamKind::Jitter: return "j";
    case ParamKind::VGap: return "v";
    default: return "o";
  }
}

double RngSampler::draw(ParamKind kind) {
  const ParamDistribution* d = nullptr;
  switch (kind) {
    case ParamKind::HGap: d = &params_->h_gap; break;
    case ParamKind::Width: d = &params_->brick_width; break;
    case ParamKind::Height: d = &params_->brick_height; break;
    case ParamKind::Jitter: d = &params_->level_jitter; break;
    case ParamKind::VGap: d = &params_->v_gap; break;
    case ParamKind::RowOffset: d = &params_->row_offset; break;
  }
  return sample(*d, mode_, *rng_);
}

double ReplaySampler::draw(ParamKind kind) {
  auto it = values_->find(param_key(kind));
  if (it == values_->end())
    fail(Errc::parse_error, std::string("derivation step lacks sampled value '") +
                                param_key(kind) + "'");
  return it->second;
}

namespace {

double median_of_samples(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double positive_jitter_bound(const GenState& s) {
  return std::max(0.0, s.params.level_jitter.max);
}

// Raises a candidate bottom edge above every earlier brick whose u-interval
// overlaps the new one. Keeps interiors disjoint even when sampled heights
// exceed the row pitch.
double clamp_bottom(const GenState& s, double left, double right, double bottom) {
  bottom = std::max(bottom, s.wall_bounds.v_min);
  for (int r = s.row_index - 1; r >= 0; --r) {
    if (s.row_max_top[r] <= bottom) continue;
    for (int idx : s.rows[r]) {
      const BrickRect& rect = s.placed[idx].rect;
      if (rect.left() < right && left < rect.right()) bottom = std::max(bottom, rect.top());
    }
  }
  return bottom;
}

BrickRect make_rect(int id, int row, double left, double bottom, double width, double height) {
  BrickRect rect;
  rect.id = id;
  rect.row = row;
  rect.width = width;
  rect.height = height;
  rect.center = {left + width / 2.0, bottom + height / 2.0};
  return rect;
}

// Shared placement bookkeeping: canonical labels, row membership, active id.
// The driver applies the parity reflection afterwards as its own rule step.
int commit_brick(GenState& s, const BrickRect& rect, bool scaled) {
  LabeledBrick brick = label_assign(rect);
  brick.scaled = scaled;

  const int id = static_cast<int>(s.placed.size());
  brick.rect.id = id;
  s.placed.push_back(brick);
  if (static_cast<std::size_t>(s.row_index) >= s.rows.size()) {
    s.rows.resize(s.row_index + 1);
    s.row_max_top.resize(s.row_index + 1, s.wall_bounds.v_min);
  }
  s.rows[s.row_index].push_back(id);
  s.row_max_top[s.row_index] = std::max(s.row_max_top[s.row_index], brick.rect.top());
  s.active = id;
  ++s.row_position;
  return id;
}

bool rightward(const GenState& s) { return s.direction == Direction::Rightward; }

// Horizontal space still open in the current row, measured from the active
// brick toward the working edge.
double remaining_space(const GenState& s) {
  return rightward(s) ? s.wall_bounds.u_max - s.placed[s.active].rect.right()
                      : s.placed[s.active].rect.left() - s.wall_bounds.u_min;
}

// Top guard for opening a row: every brick the new row can produce must fit
// under v_max, accounting for the tallest sample, the jitter bound, and
// bricks of the closed row that the overlap clamp could push against.
bool next_row_fits(const GenState& s, double new_baseline) {
  const double prev_top =
      s.rows.empty() ? s.wall_bounds.v_min : s.row_max_top[s.row_index];
  const double highest_bottom = std::max(new_baseline + positive_jitter_bound(s), prev_top);
  return highest_bottom + s.params.brick_height.max <= s.wall_bounds.v_max;
}

}  // namespace

GenState make_gen_state(const Bounds2& bounds, const WallParameters& params, SamplingMode mode,
                        Direction direction, std::uint64_t seed) {
  check_parameters(params);
  GenState s;
  s.wall_bounds = bounds;
  s.params = params;
  s.mode = mode;
  s.direction = direction;
  s.median_height = median_of_samples(params.brick_height.samples);
  s.row_baseline = bounds.v_min;
  s.rng = Rng(seed);
  return s;
}

RuleOutcome first_brick_rule(GenState& s, Sampler& sampler) {
  RuleOutcome out;
  const double o = sampler.draw(ParamKind::RowOffset);
  const double w = sampler.draw(ParamKind::Width);
  const double h = sampler.draw(ParamKind::Height);
  const double j = sampler.draw(ParamKind::Jitter);
  out.sampled = {{"o", o}, {"w", w}, {"h", h}, {"j", j}};

  const double offset = std::max(0.0, o);
  const double left = rightward(s) ? s.wall_bounds.u_min + offset
                                   : s.wall_bounds.u_max - offset - w;
  if (left < s.wall_bounds.u_min || left + w > s.wall_bounds.u_max ||
      !next_row_fits(s, s.row_baseline)) {
    out.kind = RuleOutcome::Kind::GuardFailed;
    return out;
  }
  const double bottom = clamp_bottom(s, left, left + w, s.row_baseline + j);
  out.brick = commit_brick(s, make_rect(0, 0, left, bottom, w, h), false);
  s.row_open = true;
  return out;
}

RuleOutcome place_brick_rule(GenState& s, Sampler& sampler) {
  RuleOutcome out;
  const double g = sampler.draw(ParamKind::HGap);
  const double w = sampler.draw(ParamKind::Width);
  const double h = sampler.draw(ParamKind::Height);
  const double j = sampler.draw(ParamKind::Jitter);
  out.sampled = {{"g", g}, {"w", w}, {"h", h}, {"j", j}};

  const BrickRect& active = s.placed[s.active].rect;
  const double left = rightward(s) ? active.right() + g : active.left() - g - w;
  if (left < s.wall_bounds.u_min || left + w > s.wall_bounds.u_max) {
    out.kind = RuleOutcome::Kind::GuardFailed;
    return out;
  }
  const double bottom = clamp_bottom(s, left, left + w, s.row_baseline + j);
  out.brick = commit_brick(s, make_rect(0, s.row_index, left, bottom, w, h), false);
  return out;
}

RuleOutcome edge_scale_rule(GenState& s, Sampler& sampler) {
  RuleOutcome out;
  const double g = sampler.draw(ParamKind::HGap);
  out.sampled = {{"g", g}};

  const double scaled_width = remaining_space(s) - g;
  if (scaled_width < 0.25 * s.params.brick_width.min) {
    out.kind = RuleOutcome::Kind::SkippedEdge;
    s.row_open = false;
    return out;
  }

  const double h = sampler.draw(ParamKind::Height);
  const double j = sampler.draw(ParamKind::Jitter);
  out.sampled["h"] = h;
  out.sampled["j"] = j;

  const BrickRect& active = s.placed[s.active].rect;
  const double left = rightward(s) ? active.right() + g : s.wall_bounds.u_min;
  const double bottom = clamp_bottom(s, left, left + scaled_width, s.row_baseline + j);
  out.brick = commit_brick(s, make_rect(0, s.row_index, left, bottom, scaled_width, h), true);
  s.row_open = false;
  return out;
}

RuleOutcome row_switch_rule(GenState& s, Sampler& sampler) {
  RuleOutcome out;
  const double v = sampler.draw(ParamKind::VGap);
  const double o = sampler.draw(ParamKind::RowOffset);
  const double w = sampler.draw(ParamKind::Width);
  const double h = sampler.draw(ParamKind::Height);
  const double j = sampler.draw(ParamKind::Jitter);
  out.sampled = {{"v", v}, {"o", o}, {"w", w}, {"h", h}, {"j", j}};

  const double new_baseline = s.row_baseline + s.median_height + v;
  const double offset = std::max(0.0, o);
  const double left = rightward(s) ? s.wall_bounds.u_min + offset
                                   : s.wall_bounds.u_max - offset - w;
  if (!next_row_fits(s, new_baseline) || left < s.wall_bounds.u_min ||
      left + w > s.wall_bounds.u_max) {
    out.kind = RuleOutcome::Kind::GuardFailed;
    return out;
  }

  ++s.row_index;
  s.row_baseline = new_baseline;
  s.row_position = 0;
  s.place_blocked = false;
  const double bottom = clamp_bottom(s, left, left + w, new_baseline + j);
  out.brick = commit_brick(s, make_rect(0, s.row_index, left, bottom, w, h), false);
  s.row_open = true;
  return out;
}

std::optional<RuleId> choose_rule(const GenState& s) {
  if (s.placed.empty()) return RuleId::LabelAssign;

  const bool right = rightward(s);
  if (s.row_open) {
    const double remaining = remaining_space(s);
    if (!s.place_blocked && remaining >= s.params.h_gap.max + s.params.brick_width.min)
      return right ? RuleId::PlaceRight : RuleId::PlaceLeft;
    return right ? RuleId::EdgeScaleRight : RuleId::EdgeScaleLeft;
  }

  // Row closed: open the next one only if its guard can possibly pass.
  const double best_baseline = s.row_baseline + s.median_height + s.params.v_gap.min;
  if (next_row_fits(s, best_baseline)) return RuleId::RowSwitch;
  return std::nullopt;
}

}  // namespace brickgram
