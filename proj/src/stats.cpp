#include "brickgram/stats.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "brickgram/error.hpp"

namespace brickgram {

using nlohmann::json;

std::string to_string(SamplingMode mode) {
  return mode == SamplingMode::GaussianTruncated ? "gaussian" : "empirical";
}

SamplingMode sampling_mode_from_string(const std::string& name) {
  if (name == "gaussian") return SamplingMode::GaussianTruncated;
  if (name == "empirical") return SamplingMode::EmpiricalIndex;
  fail(Errc::argument_error, "unknown sampling mode '" + name + "'");
}

ParamDistribution fit_distribution(const std::string& name, const std::vector<double>& samples) {
  if (samples.empty()) fail(Errc::insufficient_data, "no samples for parameter '" + name + "'");
  for (double s : samples)
    if (!std::isfinite(s))
      fail(Errc::argument_error, "non-finite sample in parameter '" + name + "'");

  ParamDistribution d;
  d.name = name;
  d.samples = samples;
  d.min = *std::min_element(samples.begin(), samples.end());
  d.max = *std::max_element(samples.begin(), samples.end());

  double sum = 0.0;
  for (double s : samples) sum += s;
  const double n = static_cast<double>(samples.size());
  d.mean = sum / n;

  if (samples.size() > 1) {
    double ss = 0.0;
    for (double s : samples) ss += (s - d.mean) * (s - d.mean);
    d.std = std::sqrt(ss / (n - 1.0));
  }
  return d;
}

double sample(const ParamDistribution& dist, SamplingMode mode, Rng& rng) {
  if (dist.samples.empty()) fail(Errc::argument_error, "distribution has no samples");

  if (mode == SamplingMode::EmpiricalIndex) {
    const double x = rng.uniform01();
    const std::size_t n = dist.samples.size();
    const std::size_t idx = static_cast<std::size_t>(std::floor(x * static_cast<double>(n)));
    return dist.samples[std::min(idx, n - 1)];
  }

  if (dist.std == 0.0) return dist.mean;
  double draw = 0.0;
  for (int attempt = 0; attempt < 100; ++attempt) {
    draw = rng.normal(dist.mean, dist.std);
    if (draw >= dist.min && draw <= dist.max) return draw;
  }
  return std::clamp(draw, dist.min, dist.max);
}

void check_parameters(const WallParameters& params) {
  auto check_common = [](const ParamDistribution& d) {
    if (d.samples.empty()) fail(Errc::insufficient_data, "parameter '" + d.name + "' is empty");
    if (!(d.min <= d.mean && d.mean <= d.max) || d.std < 0.0)
      fail(Errc::argument_error, "parameter '" + d.name + "' has inconsistent statistics");
  };
  for (const ParamDistribution* d : {&params.brick_width, &params.brick_height, &params.h_gap,
                                     &params.v_gap, &params.level_jitter, &params.row_offset})
    check_common(*d);
  if (!(params.brick_width.min > 0.0))
    fail(Errc::argument_error, "brick_width.min must be > 0");
  if (!(params.brick_height.min > 0.0))
    fail(Errc::argument_error, "brick_height.min must be > 0");
  if (params.h_gap.min < 0.0) fail(Errc::argument_error, "h_gap.min must be >= 0");
  if (params.v_gap.min < 0.0) fail(Errc::argument_error, "v_gap.min must be >= 0");
}

namespace {

constexpr const char* kParamOrder[6] = {"brick_width", "brick_height", "h_gap",
                                        "v_gap",       "level_jitter", "row_offset"};

const ParamDistribution& param_by_name(const WallParameters& p, const std::string& name) {
  if (name == "brick_width") return p.brick_width;
  if (name == "brick_height") return p.brick_height;
  if (name == "h_gap") return p.h_gap;
  if (name == "v_gap") return p.v_gap;
  if (name == "level_jitter") return p.level_jitter;
  return p.row_offset;
}

ParamDistribution& param_by_name(WallParameters& p, const std::string& name) {
  return const_cast<ParamDistribution&>(param_by_name(const_cast<const WallParameters&>(p), name));
}

json dist_to_json(const ParamDistribution& d) {
  return json{{"name", d.name}, {"samples", d.samples}, {"min", d.min},
              {"max", d.max},   {"mean", d.mean},       {"std", d.std}};
}

}  // namespace

std::string save_parameters(const WallParameters& params) {
  json doc;
  doc["format_version"] = kParamsFormatVersion;
  doc["units"] = "mm";
  doc["rng"] = Rng::kAlgorithmName;
  json list = json::array();
  for (const char* name : kParamOrder) list.push_back(dist_to_json(param_by_name(params, name)));
  doc["parameters"] = list;
  return doc.dump(2) + "\n";
}

void save_parameters(const WallParameters& params, std::ostream& out) {
  out << save_parameters(params);
}

WallParameters load_parameters(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(Errc::parse_error, std::string("parameter file: ") + e.what());
  }

  auto require = [&](const json& obj, const char* field) -> const json& {
    auto it = obj.find(field);
    if (it == obj.end())
      fail(Errc::parse_error, std::string("parameter file: missing field '") + field + "'");
    return *it;
  };

  if (require(doc, "format_version").get<int>() != kParamsFormatVersion)
    fail(Errc::parse_error, "parameter file: unsupported format_version");
  if (require(doc, "units").get<std::string>() != "mm")
    fail(Errc::parse_error, "parameter file: units must be mm");
  (void)require(doc, "rng");

  const json& list = require(doc, "parameters");
  if (!list.is_array()) fail(Errc::parse_error, "parameter file: 'parameters' must be an array");

  WallParameters params;
  for (const char* name : kParamOrder) {
    const json* found = nullptr;
    for (const json& entry : list) {
      auto it = entry.find("name");
      if (it != entry.end() && it->get<std::string>() == name) {
        found = &entry;
        break;
      }
    }
    if (!found) fail(Errc::parse_error, std::string("parameter file: missing field '") + name + "'");

    ParamDistribution d;
    d.name = name;
    for (const json& s : require(*found, "samples")) d.samples.push_back(s.get<double>());
    d.min = require(*found, "min").get<double>();
    d.max = require(*found, "max").get<double>();
    d.mean = require(*found, "mean").get<double>();
    d.std = require(*found, "std").get<double>();
    if (d.samples.empty())
      fail(Errc::parse_error, std::string("parameter file: '") + name + "' has no samples");
    param_by_name(params, name) = d;
  }
  check_parameters(params);
  return params;
}

std::string parameters_digest(const WallParameters& params) {
  const std::string canonical = save_parameters(params);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace brickgram
