#pragma once

#include <string>
#include <vector>

#include "qawall/field.hpp"
#include "json.hpp"

namespace qawall {

/// theta(s) = f(s)/(f(s)+f(1-s)) with f(s) = exp(-1/s); C^infinity, flat at 0 and 1.
double ramp_profile(double s) noexcept;
double ramp_profile_derivative(double s) noexcept;

/// Peak of theta' (reached at s = 1/2).
inline constexpr double kRampPeakSlope = 2.0;

struct SmoothRamp {
  double v0 = 0.0;
  double v1 = 0.0;
  double duration = 0.0;

  double value(double t) const noexcept;
  double derivative(double t) const noexcept;
};

/// Ramp from v0 to v1 whose speed never exceeds kappa; duration 2|v1-v0|/kappa.
SmoothRamp smooth_ramp(double v0, double v1, double kappa);

enum class StageKind { Vertical, Horizontal, Crossing, Wait, Reposition };

std::string to_string(StageKind kind);
StageKind stage_kind_from_string(const std::string& name);

/// Start and end values of the three parameters of one wall during a stage.
/// Every parameter follows v0 + (v1 - v0) * theta(t / duration).
struct WallRamp {
  WallState from;
  WallState to;

  WallState at(double theta) const noexcept;
};

struct Stage {
  StageKind kind = StageKind::Wait;
  std::string label;
  double duration = 0.0;
  std::vector<WallRamp> walls;

  // Largest relevant eigenvalue; sets the step size min(dt_target, 0.05/E).
  double tracked_energy = 0.0;
  // Nonzero: propagate with exactly this step (wait stages tuned in steps).
  double fixed_dt = 0.0;
  // rank_map[k-1]: rank reached at the end by the mode of rank k at the start.
  std::vector<int> rank_map;

  PotentialField field_at(double t) const;
  PotentialField start_field() const;
  PotentialField end_field() const;

  /// Peak |d/dt| over all parameters (exact for the theta profile).
  double max_rate() const noexcept;
  bool empty() const noexcept { return duration == 0.0; }

  /// Same stage run backwards in time; the step grid is mirrored.
  Stage reversed() const;
};

struct ControlPath {
  std::vector<Stage> stages;
  double kappa = 0.0;

  int wall_count() const noexcept;
  double total_time() const noexcept;
  PotentialField field_at(double t) const;
  PotentialField start_field() const;
  PotentialField end_field() const;

  ControlPath reversed() const;
};

/// Tolerance for parameter continuity at stage junctions.
inline constexpr double kJunctionTolerance = 1e-12;

/// Single-wall stages. `at` gives every wall's current state; only wall
/// `wall` moves.
Stage vertical_stage(const PotentialField& at, int wall, double height_from, double height_to,
                     double kappa);
/// Every wall ramps its height from its current value to `height_to`.
Stage vertical_stage_all(const PotentialField& at, double height_to, double kappa);
/// Throws CrossingInside if a crossing of the `tracked` lowest curves lies
/// strictly between a_from and a_to.
Stage horizontal_stage(const PotentialField& at, int wall, double a_from, double a_to, double kappa,
                       int tracked);

struct CrossingStage {
  double position = 0.5;  // a_*
  double delta = 0.0;     // half-width
  double tau = 0.0;       // duration
  int direction = 1;      // +1: a increases
};

/// Throws SpeedInfeasible unless tau >= 4*delta/kappa.
Stage crossing_stage(const PotentialField& at, int wall, const CrossingStage& c, double kappa);

/// Generic stage: every wall moves from `from` to `to` in time `duration`.
/// duration <= 0 selects the shortest duration compatible with kappa.
/// Throws SpeedInfeasible if the requested duration is too short.
Stage transition_stage(StageKind kind, const PotentialField& from, const PotentialField& to,
                       double kappa, double duration = 0.0);

Stage wait_stage(const PotentialField& at, double duration, double fixed_dt = 0.0);

/// Joins stages; empty stages are dropped. kappa is the largest stage rate.
ControlPath concat(const std::vector<Stage>& stages);
ControlPath concat(const std::vector<ControlPath>& paths);

nlohmann::json to_json(const ControlPath& path);
ControlPath control_path_from_json(const nlohmann::json& doc);

}  // namespace qawall
