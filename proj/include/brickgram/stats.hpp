#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "brickgram/rng.hpp"

namespace brickgram {

/// How generation turns a fitted distribution into concrete lengths.
/// GaussianTruncated redraws a normal until it lands in [min, max];
/// EmpiricalIndex picks directly from the extracted sample list by a
/// uniform index.
enum class SamplingMode { GaussianTruncated, EmpiricalIndex };

std::string to_string(SamplingMode mode);
SamplingMode sampling_mode_from_string(const std::string& name);

/// One bricklaying parameter: the raw extracted samples plus their moments.
struct ParamDistribution {
  std::string name;
  std::vector<double> samples;  // mm, input order preserved
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // unbiased (n-1); 0 when n == 1

  bool operator==(const ParamDistribution&) const = default;
};

/// The six distributions that drive wall generation.
struct WallParameters {
  ParamDistribution brick_width;
  ParamDistribution brick_height;
  ParamDistribution h_gap;
  ParamDistribution v_gap;
  ParamDistribution level_jitter;
  ParamDistribution row_offset;

  bool operator==(const WallParameters&) const = default;
};

inline constexpr int kParamsFormatVersion = 1;

ParamDistribution fit_distribution(const std::string& name, const std::vector<double>& samples);

/// Draw one value; advances rng deterministically.
double sample(const ParamDistribution& dist, SamplingMode mode, Rng& rng);

/// Enforce the cross-parameter invariants (positive dimensions, gaps >= 0).
void check_parameters(const WallParameters& params);

std::string save_parameters(const WallParameters& params);
void save_parameters(const WallParameters& params, std::ostream& out);
WallParameters load_parameters(std::istream& in);

/// FNV-1a over the canonical serialized form; embedded in wall files so
/// outputs are self-describing about their generator inputs.
std::string parameters_digest(const WallParameters& params);

}  // namespace brickgram
