#include "qawall/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qawall/errors.hpp"
#include "qawall/spectral.hpp"

namespace qawall {

double ramp_profile(double s) noexcept {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double g = 1.0 / s - 1.0 / (1.0 - s);
  if (g > 700.0) return 0.0;
  if (g < -700.0) return 1.0;
  return 1.0 / (1.0 + std::exp(g));
}

double ramp_profile_derivative(double s) noexcept {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double th = ramp_profile(s);
  return th * (1.0 - th) * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s)));
}

double SmoothRamp::value(double t) const noexcept {
  if (duration <= 0.0) return t <= 0.0 ? v0 : v1;
  return v0 + (v1 - v0) * ramp_profile(t / duration);
}

double SmoothRamp::derivative(double t) const noexcept {
  if (duration <= 0.0) return 0.0;
  return (v1 - v0) * ramp_profile_derivative(t / duration) / duration;
}

SmoothRamp smooth_ramp(double v0, double v1, double kappa) {
  require(kappa > 0.0, ErrorCode::InvalidArgument, "kappa must be positive");
  return {v0, v1, kRampPeakSlope * std::abs(v1 - v0) / kappa};
}

std::string to_string(StageKind kind) {
  switch (kind) {
    case StageKind::Vertical: return "vertical";
    case StageKind::Horizontal: return "horizontal";
    case StageKind::Crossing: return "crossing";
    case StageKind::Wait: return "wait";
    case StageKind::Reposition: return "reposition";
  }
  return "wait";
}

StageKind stage_kind_from_string(const std::string& name) {
  for (auto k : {StageKind::Vertical, StageKind::Horizontal, StageKind::Crossing, StageKind::Wait,
                 StageKind::Reposition})
    if (to_string(k) == name) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown stage kind '" + name + "'");
}

WallState WallRamp::at(double theta) const noexcept {
  auto mix = [theta](double a, double b) { return a == b ? a : a + (b - a) * theta; };
  return {mix(from.height, to.height), mix(from.sharpness, to.sharpness),
          mix(from.position, to.position)};
}

PotentialField Stage::field_at(double t) const {
  const double theta = duration > 0.0 ? ramp_profile(t / duration) : (t <= 0.0 ? 0.0 : 1.0);
  PotentialField f;
  f.walls.reserve(walls.size());
  for (const auto& w : walls) f.walls.push_back(w.at(theta));
  return f;
}

PotentialField Stage::start_field() const {
  PotentialField f;
  for (const auto& w : walls) f.walls.push_back(w.from);
  return f;
}

PotentialField Stage::end_field() const {
  PotentialField f;
  for (const auto& w : walls) f.walls.push_back(w.to);
  return f;
}

double Stage::max_rate() const noexcept {
  if (duration <= 0.0) return 0.0;
  double m = 0.0;
  for (const auto& w : walls) {
    m = std::max(m, std::abs(w.to.height - w.from.height));
    m = std::max(m, std::abs(w.to.sharpness - w.from.sharpness));
    m = std::max(m, std::abs(w.to.position - w.from.position));
  }
  return kRampPeakSlope * m / duration;
}

Stage Stage::reversed() const {
  Stage r = *this;
  for (auto& w : r.walls) std::swap(w.from, w.to);
  if (!rank_map.empty()) {
    r.rank_map.assign(rank_map.size(), 0);
    for (std::size_t k = 0; k < rank_map.size(); ++k) {
      const int target = rank_map[k];
      if (target >= 1 && target <= static_cast<int>(rank_map.size())) r.rank_map[target - 1] = static_cast<int>(k) + 1;
    }
  }
  return r;
}

int ControlPath::wall_count() const noexcept {
  return stages.empty() ? 0 : static_cast<int>(stages.front().walls.size());
}

double ControlPath::total_time() const noexcept {
  double t = 0.0;
  for (const auto& s : stages) t += s.duration;
  return t;
}

PotentialField ControlPath::field_at(double t) const {
  require(!stages.empty(), ErrorCode::InvalidArgument, "control path has no stages");
  double start = 0.0;
  for (const auto& s : stages) {
    if (t <= start + s.duration) return s.field_at(t - start);
    start += s.duration;
  }
  return stages.back().end_field();
}

PotentialField ControlPath::start_field() const {
  require(!stages.empty(), ErrorCode::InvalidArgument, "control path has no stages");
  return stages.front().start_field();
}

PotentialField ControlPath::end_field() const {
  require(!stages.empty(), ErrorCode::InvalidArgument, "control path has no stages");
  return stages.back().end_field();
}

ControlPath ControlPath::reversed() const {
  ControlPath r;
  r.kappa = kappa;
  for (auto it = stages.rbegin(); it != stages.rend(); ++it) r.stages.push_back(it->reversed());
  return r;
}

// ---------------------------------------------------------------------------

namespace {

void check_wall_index(const PotentialField& at, int wall) {
  require(wall >= 0 && wall < static_cast<int>(at.walls.size()), ErrorCode::InvalidArgument,
          "wall index out of range");
}

double largest_change(const PotentialField& from, const PotentialField& to) {
  double m = 0.0;
  for (std::size_t j = 0; j < from.walls.size(); ++j) {
    m = std::max(m, std::abs(to.walls[j].height - from.walls[j].height));
    m = std::max(m, std::abs(to.walls[j].sharpness - from.walls[j].sharpness));
    m = std::max(m, std::abs(to.walls[j].position - from.walls[j].position));
  }
  return m;
}

}  // namespace

Stage transition_stage(StageKind kind, const PotentialField& from, const PotentialField& to,
                       double kappa, double duration) {
  require(kappa > 0.0, ErrorCode::InvalidArgument, "kappa must be positive");
  require(from.walls.size() == to.walls.size() && !from.walls.empty(), ErrorCode::InvalidArgument,
          "stage endpoints must have the same non-zero wall count");
  from.validate();
  to.validate();
  const double change = largest_change(from, to);
  const double shortest = kRampPeakSlope * change / kappa;
  Stage s;
  s.kind = kind;
  s.label = to_string(kind);
  if (duration <= 0.0) {
    s.duration = shortest;
  } else {
    if (duration < shortest * (1.0 - 1e-12)) {
      std::ostringstream msg;
      msg << "duration " << duration << " is below the floor " << shortest << " set by kappa = " << kappa;
      throw Error(ErrorCode::SpeedInfeasible, msg.str());
    }
    s.duration = change == 0.0 ? 0.0 : duration;
  }
  for (std::size_t j = 0; j < from.walls.size(); ++j) s.walls.push_back({from.walls[j], to.walls[j]});
  return s;
}

Stage vertical_stage(const PotentialField& at, int wall, double height_from, double height_to,
                     double kappa) {
  check_wall_index(at, wall);
  require(height_from >= 0.0 && height_to >= 0.0, ErrorCode::InvalidArgument,
          "wall heights must be non-negative");
  PotentialField from = at, to = at;
  from.walls[wall].height = height_from;
  to.walls[wall].height = height_to;
  return transition_stage(StageKind::Vertical, from, to, kappa);
}

Stage vertical_stage_all(const PotentialField& at, double height_to, double kappa) {
  require(height_to >= 0.0, ErrorCode::InvalidArgument, "wall heights must be non-negative");
  PotentialField to = at;
  for (auto& w : to.walls) w.height = height_to;
  return transition_stage(StageKind::Vertical, at, to, kappa);
}

Stage horizontal_stage(const PotentialField& at, int wall, double a_from, double a_to, double kappa,
                       int tracked) {
  check_wall_index(at, wall);
  if (tracked > 0 && a_from != a_to) {
    const auto set = tracked_crossings(a_from, a_to, tracked);
    if (!set.crossings.empty()) {
      const auto& c = set.crossings.front();
      std::ostringstream msg;
      msg << "crossing of " << to_string(c.left) << " and " << to_string(c.right) << " at "
          << c.position << " lies inside [" << std::min(a_from, a_to) << ", "
          << std::max(a_from, a_to) << "]";
      throw Error(ErrorCode::CrossingInside, msg.str());
    }
  }
  PotentialField from = at, to = at;
  from.walls[wall].position = a_from;
  to.walls[wall].position = a_to;
  return transition_stage(StageKind::Horizontal, from, to, kappa);
}

Stage crossing_stage(const PotentialField& at, int wall, const CrossingStage& c, double kappa) {
  check_wall_index(at, wall);
  require(c.delta >= 0.0, ErrorCode::InvalidArgument, "crossing half-width must be non-negative");
  require(c.direction == 1 || c.direction == -1, ErrorCode::InvalidArgument,
          "crossing direction must be +1 or -1");
  PotentialField from = at, to = at;
  from.walls[wall].position = c.position - c.direction * c.delta;
  to.walls[wall].position = c.position + c.direction * c.delta;
  if (c.delta == 0.0) return transition_stage(StageKind::Crossing, from, to, kappa);
  const double floor = 2.0 * kRampPeakSlope * c.delta / kappa;
  if (!(c.tau >= floor * (1.0 - 1e-12))) {
    std::ostringstream msg;
    msg << "crossing time " << c.tau << " is below 4*delta/kappa = " << floor;
    throw Error(ErrorCode::SpeedInfeasible, msg.str());
  }
  return transition_stage(StageKind::Crossing, from, to, kappa, c.tau);
}

Stage wait_stage(const PotentialField& at, double duration, double fixed_dt) {
  require(duration >= 0.0, ErrorCode::InvalidArgument, "wait duration must be non-negative");
  require(fixed_dt >= 0.0, ErrorCode::InvalidArgument, "fixed step must be non-negative");
  at.validate();
  Stage s;
  s.kind = StageKind::Wait;
  s.label = "wait";
  s.duration = duration;
  s.fixed_dt = fixed_dt;
  for (const auto& w : at.walls) s.walls.push_back({w, w});
  return s;
}

ControlPath concat(const std::vector<Stage>& stages) {
  require(!stages.empty(), ErrorCode::InvalidArgument, "nothing to concatenate");
  ControlPath path;
  const Stage* previous = nullptr;
  for (const auto& s : stages) {
    if (previous) {
      require(s.walls.size() == previous->walls.size(), ErrorCode::Discontinuity,
              "wall count changes between stages '" + previous->label + "' and '" + s.label + "'");
      const auto a = previous->end_field();
      const auto b = s.start_field();
      const double jump = largest_change(a, b);
      if (jump > kJunctionTolerance) {
        std::ostringstream msg;
        msg << "parameter jump " << jump << " between stages '" << previous->label << "' and '"
            << s.label << "'";
        throw Error(ErrorCode::Discontinuity, msg.str());
      }
    }
    previous = &s;
    if (!s.empty()) {
      path.stages.push_back(s);
      path.kappa = std::max(path.kappa, s.max_rate());
    }
  }
  if (path.stages.empty()) path.stages.push_back(stages.front());
  return path;
}

ControlPath concat(const std::vector<ControlPath>& paths) {
  std::vector<Stage> all;
  double kappa = 0.0;
  for (const auto& p : paths) {
    all.insert(all.end(), p.stages.begin(), p.stages.end());
    kappa = std::max(kappa, p.kappa);
  }
  auto out = concat(all);
  out.kappa = std::max(out.kappa, kappa);
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json ramp_json(double v0, double v1, double duration) {
  if (v0 == v1) return {{"type", "constant"}, {"value", v0}};
  return {{"type", "smooth"}, {"from", v0}, {"to", v1}, {"duration", duration}};
}

void read_ramp(const nlohmann::json& r, double& v0, double& v1) {
  const auto type = r.at("type").get<std::string>();
  if (type == "constant") {
    v0 = v1 = r.at("value").get<double>();
  } else if (type == "smooth") {
    v0 = r.at("from").get<double>();
    v1 = r.at("to").get<double>();
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown ramp type '" + type + "'");
  }
}

}  // namespace

nlohmann::json to_json(const ControlPath& path) {
  nlohmann::json doc;
  doc["T"] = path.total_time();
  doc["kappa"] = path.kappa;
  doc["walls"] = path.wall_count();
  doc["stages"] = nlohmann::json::array();
  for (const auto& s : path.stages) {
    nlohmann::json st;
    st["kind"] = to_string(s.kind);
    st["label"] = s.label;
    st["duration"] = s.duration;
    st["tracked_energy"] = s.tracked_energy;
    if (s.fixed_dt > 0.0) st["fixed_dt"] = s.fixed_dt;
    if (!s.rank_map.empty()) st["rank_map"] = s.rank_map;
    st["walls"] = nlohmann::json::array();
    for (const auto& w : s.walls) {
      st["walls"].push_back({{"height", ramp_json(w.from.height, w.to.height, s.duration)},
                             {"sharpness", ramp_json(w.from.sharpness, w.to.sharpness, s.duration)},
                             {"position", ramp_json(w.from.position, w.to.position, s.duration)}});
    }
    doc["stages"].push_back(st);
  }
  return doc;
}

ControlPath control_path_from_json(const nlohmann::json& doc) {
  try {
    ControlPath path;
    path.kappa = doc.at("kappa").get<double>();
    for (const auto& st : doc.at("stages")) {
      Stage s;
      s.kind = stage_kind_from_string(st.at("kind").get<std::string>());
      s.label = st.value("label", to_string(s.kind));
      s.duration = st.at("duration").get<double>();
      s.tracked_energy = st.value("tracked_energy", 0.0);
      s.fixed_dt = st.value("fixed_dt", 0.0);
      if (st.contains("rank_map")) s.rank_map = st.at("rank_map").get<std::vector<int>>();
      for (const auto& w : st.at("walls")) {
        WallRamp r;
        read_ramp(w.at("height"), r.from.height, r.to.height);
        read_ramp(w.at("sharpness"), r.from.sharpness, r.to.sharpness);
        read_ramp(w.at("position"), r.from.position, r.to.position);
        s.walls.push_back(r);
      }
      path.stages.push_back(std::move(s));
    }
    require(!path.stages.empty(), ErrorCode::InvalidArgument, "control path has no stages");
    return path;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed control path: ") + e.what());
  }
}

}  // namespace qawall
