#include <cmath>

#include "doctest.h"
#include "qawall/control.hpp"
#include "qawall/errors.hpp"

using namespace qawall;

namespace {

const PotentialField kWall{{WallState{1000.0, 100.0, 0.43}}};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

// peak |d/dt| of every parameter by central differences, 10^4 samples per stage
double sampled_rate(const ControlPath& path) {
  double peak = 0.0;
  for (const auto& s : path.stages) {
    const double h = s.duration * 1e-7;
    for (int i = 1; i < 10000; ++i) {
      const double t = s.duration * i / 10000.0;
      const auto a = s.field_at(t - h);
      const auto b = s.field_at(t + h);
      for (std::size_t w = 0; w < a.walls.size(); ++w) {
        peak = std::max(peak, std::abs(b.walls[w].height - a.walls[w].height) / (2 * h));
        peak = std::max(peak, std::abs(b.walls[w].position - a.walls[w].position) / (2 * h));
        peak = std::max(peak, std::abs(b.walls[w].sharpness - a.walls[w].sharpness) / (2 * h));
      }
    }
  }
  return peak;
}

}  // namespace

TEST_CASE("ramp profile is flat, symmetric and peaks at slope 2") {
  CHECK(ramp_profile(0.0) == 0.0);
  CHECK(ramp_profile(1.0) == 1.0);
  CHECK(ramp_profile(0.5) == doctest::Approx(0.5));
  CHECK(ramp_profile_derivative(0.0) == 0.0);
  CHECK(ramp_profile_derivative(1.0) == 0.0);
  double peak = 0.0;
  for (int i = 1; i < 2000; ++i) {
    const double s = i / 2000.0;
    CHECK(ramp_profile(1.0 - s) == doctest::Approx(1.0 - ramp_profile(s)).epsilon(1e-12));
    const double fd = (ramp_profile(s + 1e-6) - ramp_profile(s - 1e-6)) / 2e-6;
    CHECK(ramp_profile_derivative(s) == doctest::Approx(fd).epsilon(1e-6));
    peak = std::max(peak, ramp_profile_derivative(s));
  }
  CHECK(peak <= kRampPeakSlope + 1e-12);
  CHECK(ramp_profile_derivative(0.5) == doctest::Approx(kRampPeakSlope));
  // flat ends: tiny near 0
  CHECK(ramp_profile(0.02) < 1e-20);
}

TEST_CASE("smooth ramp honours kappa") {
  const auto r = smooth_ramp(0.0, 1000.0, 4.0);
  CHECK(r.duration == doctest::Approx(500.0));
  CHECK(r.value(0.0) == 0.0);
  CHECK(r.value(500.0) == 1000.0);
  CHECK(r.derivative(250.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(smooth_ramp(0.0, 1.0, 0.0), Error);
}

TEST_CASE("stage builders and kappa") {
  const auto up = vertical_stage(PotentialField{{WallState{0.0, 100.0, 0.43}}}, 0, 0.0, 1000.0, 1.0);
  CHECK(up.duration == doctest::Approx(2000.0));
  CHECK(up.max_rate() == doctest::Approx(1.0));
  const auto hz = horizontal_stage(kWall, 0, 0.43, 0.47, 1.0, 2);
  CHECK(hz.duration == doctest::Approx(0.08));
  CHECK(code_of([] { horizontal_stage(kWall, 0, 0.43, 0.57, 1.0, 2); }) == ErrorCode::CrossingInside);
  CHECK_NOTHROW(horizontal_stage(kWall, 0, 0.43, 0.57, 1.0, 0));

  const CrossingStage ok{0.5, 0.01, 0.04, 1};
  const auto x = crossing_stage(kWall, 0, ok, 1.0);
  CHECK(x.start_field().walls[0].position == doctest::Approx(0.49));
  CHECK(x.end_field().walls[0].position == doctest::Approx(0.51));
  CHECK(code_of([] { crossing_stage(kWall, 0, {0.5, 0.01, 0.039, 1}, 1.0); }) == ErrorCode::SpeedInfeasible);
  CHECK(code_of([&] { transition_stage(StageKind::Reposition, kWall, x.end_field(), 1.0, 1e-3); }) ==
        ErrorCode::SpeedInfeasible);
  CHECK(code_of([] { vertical_stage(kWall, 1, 0.0, 1.0, 1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("concatenation checks continuity and keeps |d/dt| <= kappa") {
  const PotentialField start{{WallState{0.0, 100.0, 0.43}}};
  const auto up = vertical_stage(start, 0, 0.0, 1000.0, 1.0);
  const auto hz = horizontal_stage(up.end_field(), 0, 0.43, 0.47, 0.5, 2);
  const auto down = vertical_stage(hz.end_field(), 0, 1000.0, 0.0, 1.0);
  const auto path = concat({up, wait_stage(up.end_field(), 0.0), hz, down});
  CHECK(path.stages.size() == 3);
  CHECK(path.kappa == doctest::Approx(1.0));
  CHECK(path.total_time() == doctest::Approx(4000.16));
  CHECK(sampled_rate(path) <= path.kappa * (1 + 1e-4));
  CHECK(path.field_at(0.0).walls[0].height == 0.0);
  CHECK(path.end_field().walls[0].height == 0.0);
  CHECK(path.field_at(2000.0).walls[0].height == doctest::Approx(1000.0));
  CHECK(code_of([&] { concat({up, down, hz}); }) == ErrorCode::Discontinuity);
}

TEST_CASE("reversal mirrors the field and inverts rank maps") {
  auto x = crossing_stage(kWall, 0, {0.5, 0.02, 0.2, 1}, 1.0);
  x.rank_map = {2, 3, 1};
  const auto path = concat({x});
  const auto back = path.reversed();
  for (double t : {0.0, 0.03, 0.1, 0.17, 0.2}) {
    CHECK(back.field_at(t).walls[0].position ==
          doctest::Approx(path.field_at(0.2 - t).walls[0].position).epsilon(1e-12));
  }
  CHECK(back.stages[0].rank_map == std::vector<int>{3, 1, 2});
}

TEST_CASE("json round trip") {
  const PotentialField start{{WallState{0.0, 100.0, 0.43}, WallState{5.0, 50.0, 0.7}}};
  auto up = vertical_stage_all(start, 300.0, 2.0);
  up.rank_map = {1, 2};
  up.tracked_energy = 40.0;
  const auto path = concat({up, wait_stage(up.end_field(), 3.0, 0.01)});
  const auto doc = to_json(path);
  CHECK(doc.at("stages").size() == 2);
  CHECK(doc.at("kappa").get<double>() == doctest::Approx(2.0));
  const auto back = control_path_from_json(doc);
  CHECK(to_json(back) == doc);
  CHECK(back.stages[1].fixed_dt == 0.01);
  CHECK(back.stages[0].kind == StageKind::Vertical);
  CHECK(code_of([] { control_path_from_json(nlohmann::json::parse("{\"stages\":[{}]}")); }) ==
        ErrorCode::InvalidArgument);
  CHECK(stage_kind_from_string(to_string(StageKind::Reposition)) == StageKind::Reposition);
}
