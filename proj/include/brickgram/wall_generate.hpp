#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "brickgram/grammar.hpp"
#include "brickgram/point_cloud.hpp"
#include "brickgram/stats.hpp"

namespace brickgram {

/// Target envelope and reproducibility knobs for one generated wall.
/// The wall coordinate origin is the bottom-left corner of the envelope.
struct WallSpec {
  double width = 0.0;   // mm
  double height = 0.0;  // mm
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::EmpiricalIndex;
  Direction direction = Direction::Rightward;

  bool operator==(const WallSpec&) const = default;
};

/// One recorded rule application. `brick` is -1 for steps that place
/// nothing: label reflections and skipped edges.
struct DerivationStep {
  int step = 0;
  RuleId rule = RuleId::LabelAssign;
  std::map<std::string, double> sampled;
  int brick = -1;

  bool operator==(const DerivationStep&) const = default;
};

using Derivation = std::vector<DerivationStep>;

struct Wall {
  WallSpec spec;
  std::string params_digest;
  std::vector<LabeledBrick> bricks;
  Derivation derivation;
};

inline constexpr int kWallFormatVersion = 1;

/// Run the grammar until it halts. Pure function of (spec, params): the
/// same inputs give a bit-identical wall.
Wall generate(const WallSpec& spec, const WallParameters& params);

/// Re-apply the recorded rules with the recorded sampled values, bypassing
/// the rng. Reconstructs the identical brick list.
std::vector<LabeledBrick> replay(const WallSpec& spec, const WallParameters& params,
                                 const Derivation& derivation);

struct ValidationReport {
  int overlap_violations = 0;
  int bounds_violations = 0;
  int gap_range_violations = 0;     // checked only when params are supplied
  int jitter_range_violations = 0;  // likewise
  std::vector<std::string> details;

  int total() const {
    return overlap_violations + bounds_violations + gap_range_violations +
           jitter_range_violations;
  }
  bool valid() const { return total() == 0; }
};

/// Geometry checks (overlap, bounds) always run; sampled-value range checks
/// additionally run when the generating parameters are available.
ValidationReport validate(const Wall& wall);
ValidationReport validate(const Wall& wall, const WallParameters& params);

/// Regular grid over the wall plane (z = 0) at the given pitch; points
/// strictly inside a brick are labeled Brick, the rest Mortar, then
/// independent Gaussian noise of noise_std lands on every coordinate.
std::vector<LabeledPoint> synthesize_cloud(const Wall& wall, double pitch, double noise_std,
                                           std::uint64_t seed);

/// Joint values as the generator knows them (rows and scale flags are
/// exact, no clustering involved). The round-trip oracle for extraction.
struct JointLedger {
  std::vector<double> h_gaps;
  std::vector<double> v_gaps;
  std::vector<double> level_jitter;
  std::vector<double> row_offsets;
};
JointLedger wall_joint_ledger(const Wall& wall);

/// Per-row width accounting: bricks + joints + leading offset + trailing
/// skip sum to the envelope width. Used by conservation tests.
struct RowAccounting {
  double brick_width_sum = 0.0;
  double joint_width_sum = 0.0;
  double leading_offset = 0.0;
  double trailing_skip = 0.0;
};
std::vector<RowAccounting> wall_row_accounting(const Wall& wall);

std::string wall_to_string(const Wall& wall);
void write_wall(std::ostream& out, const Wall& wall);
Wall read_wall(std::istream& in);

}  // namespace brickgram
