#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "brickgram/error.hpp"
#include "brickgram/stats.hpp"
#include "oracles.hpp"

using namespace brickgram;

namespace {

WallParameters plausible_params() {
  WallParameters p;
  p.brick_width = fit_distribution("brick_width", {205, 210, 215, 208, 212});
  p.brick_height = fit_distribution("brick_height", {44, 45, 46, 45.5, 44.5});
  p.h_gap = fit_distribution("h_gap", {8, 10, 12, 9, 11});
  p.v_gap = fit_distribution("v_gap", {10, 12, 14, 11, 13});
  p.level_jitter = fit_distribution("level_jitter", {-2, -1, 0, 1, 2});
  p.row_offset = fit_distribution("row_offset", {-112, 108, -109, 111, 110});
  return p;
}

}  // namespace

TEST_CASE("fit_distribution statistics") {
  auto d = fit_distribution("x", {10, 10, 10});
  CHECK(d.min == 10);
  CHECK(d.max == 10);
  CHECK(d.mean == 10);
  CHECK(d.std == 0);

  auto e = fit_distribution("x", {9, 11});
  CHECK(e.mean == doctest::Approx(10.0));
  CHECK(e.std == doctest::Approx(std::sqrt(2.0)));

  auto one = fit_distribution("x", {42.0});
  CHECK(one.std == 0.0);
}

TEST_CASE("fit_distribution rejects bad input") {
  CHECK_THROWS_AS(fit_distribution("x", {}), Error);
  CHECK_THROWS_AS(fit_distribution("x", {1.0, std::nan("")}), Error);
}

TEST_CASE("law of large numbers on clipped normal draws") {
  Rng rng(314159);
  std::vector<double> samples;
  samples.reserve(10000);
  while (samples.size() < 10000) {
    const double draw = rng.normal(210.0, 8.0);
    samples.push_back(std::clamp(draw, 180.0, 240.0));
  }
  auto d = fit_distribution("w", samples);
  CHECK(std::abs(d.mean - 210.0) < 0.5);
  CHECK(std::abs(d.std - 8.0) < 0.5);
}

TEST_CASE("degenerate gaussian returns the mean without consuming entropy") {
  auto d = fit_distribution("x", {210.0, 210.0});
  Rng rng(1);
  const std::uint64_t before = Rng(1).next_u64();
  for (int i = 0; i < 5; ++i) CHECK(sample(d, SamplingMode::GaussianTruncated, rng) == 210.0);
  CHECK(rng.next_u64() == before);
}

TEST_CASE("empirical index picks by floor(x*n)") {
  // With four samples a uniform draw of 0.5 must land on index 2 (value 3).
  auto d = fit_distribution("x", {1, 2, 3, 4});
  CHECK(d.samples[static_cast<std::size_t>(std::floor(0.5 * 4.0))] == 3);

  // The same floor(x*n) contract against a twin rng, across many draws.
  std::set<double> seen;
  Rng twin(77), rng(77);
  for (int i = 0; i < 4000; ++i) {
    const double x = twin.uniform01();
    const double v = sample(d, SamplingMode::EmpiricalIndex, rng);
    CHECK(v == d.samples[static_cast<std::size_t>(std::floor(x * 4.0))]);
    seen.insert(v);
  }
  CHECK(seen.size() == 4);
}

TEST_CASE("truncated gaussian respects bounds and matches integral moments") {
  std::vector<double> raw;
  Rng gen(4242);
  for (int i = 0; i < 400; ++i) raw.push_back(gen.normal(45.0, 3.0));
  auto d = fit_distribution("h", raw);

  Rng rng(2718);
  double acc = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double v = sample(d, SamplingMode::GaussianTruncated, rng);
    CHECK(v >= d.min);
    CHECK(v <= d.max);
    acc += v;
  }
  const double empirical_mean = acc / n;
  const auto oracle = oracles::truncated_normal_moments(d.mean, d.std, d.min, d.max);
  const double stderr_mean = oracle.stddev / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(empirical_mean - oracle.mean) < 3.0 * stderr_mean);
}

TEST_CASE("identical seeds give identical sample streams") {
  auto d = fit_distribution("x", {5, 6, 7, 8, 9});
  for (SamplingMode mode : {SamplingMode::EmpiricalIndex, SamplingMode::GaussianTruncated}) {
    Rng a(987654321), b(987654321);
    for (int i = 0; i < 200; ++i) CHECK(sample(d, mode, a) == sample(d, mode, b));
  }
}

TEST_CASE("derived seeds differ per task") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(1, 5) == derive_seed(1, 5));
}

TEST_CASE("parameters save/load round-trips exactly") {
  const WallParameters p = plausible_params();
  std::istringstream in(save_parameters(p));
  const WallParameters q = load_parameters(in);
  CHECK(p == q);
  CHECK(parameters_digest(p) == parameters_digest(q));
}

TEST_CASE("randomized parameter sets survive save/load bit-exactly") {
  Rng rng(777);
  for (int trial = 0; trial < 25; ++trial) {
    auto draw = [&](const char* name, double base, double spread, bool positive) {
      const int n = 1 + static_cast<int>(rng.uniform01() * 40);
      std::vector<double> samples;
      for (int i = 0; i < n; ++i) {
        double v = base + (rng.uniform01() - 0.5) * spread;
        if (positive) v = std::max(v, 0.05);
        samples.push_back(v);
      }
      return fit_distribution(name, samples);
    };
    WallParameters p;
    p.brick_width = draw("brick_width", 150 + rng.uniform01() * 200, 60, true);
    p.brick_height = draw("brick_height", 30 + rng.uniform01() * 60, 20, true);
    p.h_gap = draw("h_gap", 5 + rng.uniform01() * 20, 8, true);
    p.v_gap = draw("v_gap", 5 + rng.uniform01() * 20, 8, true);
    p.level_jitter = draw("level_jitter", 0, 6, false);
    p.row_offset = draw("row_offset", rng.uniform01() * 200 - 100, 150, false);
    std::istringstream in(save_parameters(p));
    CHECK(load_parameters(in) == p);
  }
}

TEST_CASE("missing parameter is named in the error") {
  const WallParameters p = plausible_params();
  std::string text = save_parameters(p);
  const auto pos = text.find("v_gap");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 5, "q_gap");
  std::istringstream in(text);
  try {
    load_parameters(in);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse_error);
    CHECK(std::string(e.what()).find("v_gap") != std::string::npos);
  }
}

TEST_CASE("negative gap minimum fails validation") {
  WallParameters p = plausible_params();
  p.h_gap = fit_distribution("h_gap", {-1, 10, 12});
  std::istringstream in(save_parameters(p));
  CHECK_THROWS_AS(load_parameters(in), Error);
}

TEST_CASE("unsupported parameter file version is rejected") {
  const WallParameters p = plausible_params();
  std::string text = save_parameters(p);
  const auto pos = text.find("\"format_version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 20, "\"format_version\": 9");
  std::istringstream in(text);
  CHECK_THROWS_AS(load_parameters(in), Error);
}

TEST_CASE("digest changes when a sample changes") {
  WallParameters p = plausible_params();
  const std::string d1 = parameters_digest(p);
  p.h_gap.samples[0] += 0.001;
  CHECK(parameters_digest(p) != d1);
}
