#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "brickgram/geometry.hpp"
#include "brickgram/rng.hpp"
#include "brickgram/stats.hpp"

namespace brickgram {

// A brick face is twofold-symmetric; the direction label plus the side tags
// break that symmetry so left and right become distinguishable information.
enum class DirectionLabel { Left, Right };

enum class Side { LeftEdge, RightEdge, TopEdge, BottomEdge };

enum class TagName { ref_left, ref_right, ref_top, ref_bottom };

struct SideTags {
  TagName left_edge = TagName::ref_left;
  TagName right_edge = TagName::ref_right;
  TagName top_edge = TagName::ref_top;
  TagName bottom_edge = TagName::ref_bottom;

  TagName at(Side s) const {
    switch (s) {
      case Side::LeftEdge: return left_edge;
      case Side::RightEdge: return right_edge;
      case Side::TopEdge: return top_edge;
      default: return bottom_edge;
    }
  }
  bool operator==(const SideTags&) const = default;
};

struct LabeledBrick {
  BrickRect rect;
  DirectionLabel direction = DirectionLabel::Right;
  SideTags tags;
  int derivation_step = -1;
  bool scaled = false;

  bool operator==(const LabeledBrick&) const = default;
};

/// Midpoint of the tagged edge, where the tag sits on the shape.
Point2 tag_position(const LabeledBrick& brick, Side side);

/// First label rule: gives the brick a direction (canonical tag placement).
LabeledBrick label_assign(const BrickRect& rect);

/// Second label rule: reflects the labelling across the vertical axis
/// through the centre. Geometry is unchanged; the rule is an involution.
LabeledBrick label_reflect(LabeledBrick brick);

/// The full rule catalog: two label rules, five placement rules.
enum class RuleId {
  LabelAssign,
  LabelReflect,
  PlaceRight,
  PlaceLeft,
  EdgeScaleRight,
  EdgeScaleLeft,
  RowSwitch,
};

std::string to_string(RuleId rule);
RuleId rule_from_string(const std::string& name);

enum class Direction { Rightward, Leftward };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& name);

/// Which distribution a rule draws from; keys follow the derivation record
/// names: g (head gap), w (width), h (height), j (level jitter),
/// v (bed gap), o (row offset).
enum class ParamKind { HGap, Width, Height, Jitter, VGap, RowOffset };

const char* param_key(ParamKind kind);

/// Source of sampled lengths: the rng-driven modes during generation, a
/// recorded value map during replay.
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual double draw(ParamKind kind) = 0;
};

class RngSampler : public Sampler {
 public:
  RngSampler(const WallParameters& params, SamplingMode mode, Rng& rng)
      : params_(&params), mode_(mode), rng_(&rng) {}
  double draw(ParamKind kind) override;

 private:
  const WallParameters* params_;
  SamplingMode mode_;
  Rng* rng_;
};

class ReplaySampler : public Sampler {
 public:
  explicit ReplaySampler(const std::map<std::string, double>& values) : values_(&values) {}
  double draw(ParamKind kind) override;

 private:
  const std::map<std::string, double>* values_;
};

/// Explicit wall-generation state the rules rewrite.
struct GenState {
  Bounds2 wall_bounds;
  std::vector<LabeledBrick> placed;
  int active = -1;  // index of the current brick in `placed`
  double row_baseline = 0.0;
  int row_index = 0;
  int row_position = 0;       // bricks already placed in the current row
  bool row_open = false;      // row accepts further placements
  bool place_blocked = false; // the last horizontal placement failed its guard
  std::vector<std::vector<int>> rows;
  std::vector<double> row_max_top;
  WallParameters params;
  SamplingMode mode = SamplingMode::EmpiricalIndex;
  Direction direction = Direction::Rightward;
  double median_height = 0.0;  // median of brick_height samples; row pitch driver
  Rng rng{0};

  const LabeledBrick& active_brick() const { return placed[active]; }
};

GenState make_gen_state(const Bounds2& bounds, const WallParameters& params, SamplingMode mode,
                        Direction direction, std::uint64_t seed);

struct RuleOutcome {
  enum class Kind { Applied, GuardFailed, SkippedEdge };
  Kind kind = Kind::Applied;
  std::map<std::string, double> sampled;
  int brick = -1;  // placed brick index, -1 if none
};

/// Axiom step: places the first brick of row 0 with canonical labels.
RuleOutcome first_brick_rule(GenState& state, Sampler& sampler);

/// Horizontal translation next to the active brick (direction-mirrored).
RuleOutcome place_brick_rule(GenState& state, Sampler& sampler);

/// Translate + scale against the wall edge; records a skip when the
/// leftover space is below a quarter of the minimum brick width.
RuleOutcome edge_scale_rule(GenState& state, Sampler& sampler);

/// Combined horizontal + vertical translation opening the next row.
RuleOutcome row_switch_rule(GenState& state, Sampler& sampler);

/// Deterministic control policy; nullopt signals a normal halt.
std::optional<RuleId> choose_rule(const GenState& state);

}  // namespace brickgram
