// One line per criterion; exit status is non-zero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qawall/control.hpp"
#include "qawall/errors.hpp"
#include "qawall/propagate.hpp"
#include "qawall/protocols.hpp"
#include "qawall/spectral.hpp"

using namespace qawall;

namespace {

// pinned tolerances
constexpr double kA1NormDrift = 1e-8;
constexpr double kA1Seconds = 60.0;
constexpr double kA2RatioLo = 1.25;
constexpr double kA2RatioHi = 5.0;
constexpr double kA2Relative = 0.02;
constexpr double kA2Seconds = 30.0;
constexpr double kA3Fidelity = 0.99;
constexpr double kA3Doubling = 0.005;
constexpr double kA3Seconds = 300.0;
constexpr double kA4Fidelity = 0.99;
constexpr double kA5Fidelity = 0.9;
constexpr double kA5Seconds = 600.0;
constexpr double kA6Error = 0.15;
constexpr double kA6Seconds = 1800.0;
constexpr double kA7Entry = 0.15;
constexpr double kA8Lo = 0.45;
constexpr double kA8Hi = 0.55;
constexpr double kA8CurveLo = 0.1;
constexpr double kA8CurveHi = 0.9;
constexpr double kA9Error = 0.2;
constexpr double kA9Seconds = 3600.0;
constexpr double kA10StdErrors = 3.0;
constexpr double kA11Seconds = 5.0;

// grid for eta = 200 (h <= 1/1600)
constexpr int kFineGrid = 2047;

int failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(const char* id, bool pass, const std::string& detail) {
  std::printf("%s %s %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void guarded(const char* id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("threw: ") + e.what());
  }
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double overlap(const WaveFunction& a, const WaveFunction& b) { return std::abs(inner(a, b)) / (a.norm() * b.norm()); }

// A1 ------------------------------------------------------------------------
void unitarity() {
  const SpatialGrid grid(kFineGrid);
  const PotentialField a{{WallState{4e4, 200.0, 0.45}}};
  const PotentialField b{{WallState{4e4, 200.0, 0.55}}};
  Stage s = transition_stage(StageKind::Horizontal, a, b, 1.0, 1.0);
  s.fixed_dt = 1e-5;  // 10^5 steps
  const auto path = concat({s});
  const auto psi0 = WaveFunction::sine_mode(grid, 1);
  Timer t;
  const auto psi = propagate(psi0, path, 1e-5);
  const double secs = t.seconds();
  const double drift = std::abs(psi.norm() - psi0.norm());
  report("A1", drift <= kA1NormDrift && secs < kA1Seconds,
         fmt("unitarity: steps=%lld n=%d drift=%.3e (tol %.0e) runtime=%.1fs (limit %.0fs)",
             stage_stepping(s, 1e-5).steps, grid.size(), drift, kA1NormDrift, secs, kA1Seconds));
}

// A2 ------------------------------------------------------------------------
void spectral_convergence() {
  Timer t;
  const double a = 0.4;
  const SpatialGrid grid(32767);  // resolves eta = 3200
  const std::vector<double> etas{200.0, 800.0, 3200.0};
  std::vector<std::vector<double>> err(etas.size());
  for (std::size_t j = 0; j < etas.size(); ++j) {
    const PotentialField f{{WallState{etas[j], etas[j], a}}};
    check_resolution(f, grid);
    const auto lam = eigenvalues_in_range(assemble(f, grid), 1, 5);
    for (int k = 1; k <= 5; ++k) err[j].push_back(std::abs(lam[k - 1] - ideal_value(ideal_label_at_rank(k, a), a)));
  }
  bool ok = true;
  std::string detail;
  for (int k = 0; k < 5; ++k) {
    const double r1 = err[0][k] / err[1][k];
    const double r2 = err[1][k] / err[2][k];
    const double rel = err[2][k] / ideal_value(ideal_label_at_rank(k + 1, a), a);
    ok = ok && r1 >= kA2RatioLo && r1 <= kA2RatioHi && r2 >= kA2RatioLo && r2 <= kA2RatioHi && rel <= kA2Relative;
    detail += fmt(" k%d:ratios=%.2f,%.2f rel=%.2e", k + 1, r1, r2, rel);
  }
  const double secs = t.seconds();
  report("A2", ok && secs < kA2Seconds,
         "spectral convergence:" + detail + fmt(" (ratios in [%.2f,%.0f], rel <= %.2f) runtime=%.1fs", kA2RatioLo,
                                                kA2RatioHi, kA2Relative, secs));
}

// A3 ------------------------------------------------------------------------
// fidelity of each sine mode with the rank-k eigenvector after the ramp
std::vector<double> vertical_fidelities(double duration) {
  const SpatialGrid grid(kFineGrid);
  const double a = 0.43;
  const PotentialField low{{WallState{0.0, 200.0, a}}};
  const PotentialField high{{WallState{4e4, 200.0, a}}};
  Stage s = transition_stage(StageKind::Vertical, low, high, 1e9, duration);
  s.tracked_energy = ideal_spectrum(a, 2).entries.back().value;
  const auto path = concat({s});
  const auto modes = lowest_eigenpairs(assemble(high, grid), 2);
  std::vector<WaveFunction> states{WaveFunction::sine_mode(grid, 1), WaveFunction::sine_mode(grid, 2)};
  PropagationOptions opt;
  const auto out = propagate(states, path, opt);
  return {overlap(out[0], modes.mode(1)), overlap(out[1], modes.mode(2))};
}

void vertical_adiabatic() {
  Timer t;
  double duration = 1.0;
  auto fid = vertical_fidelities(duration);
  while (std::min(fid[0], fid[1]) < kA3Fidelity && duration < 1024.0) {
    duration *= 2.0;
    fid = vertical_fidelities(duration);
  }
  const auto slower = vertical_fidelities(2.0 * duration);
  const bool ok = std::min(fid[0], fid[1]) >= kA3Fidelity && slower[0] >= fid[0] - kA3Doubling &&
                  slower[1] >= fid[1] - kA3Doubling;
  const double secs = t.seconds();
  report("A3", ok && secs < kA3Seconds,
         fmt("vertical adiabatic: tuned T=%g fidelity k1=%.5f k2=%.5f (>= %.2f); 2T: %.5f %.5f (drop <= %.3f) "
             "runtime=%.1fs",
             duration, fid[0], fid[1], kA3Fidelity, slower[0], slower[1], kA3Doubling, secs));
}

// A4 ------------------------------------------------------------------------
void horizontal_adiabatic() {
  const SpatialGrid grid(kFineGrid);
  const PotentialField from{{WallState{4e4, 200.0, 0.43}}};
  const auto start = lowest_eigenpairs(assemble(from, grid), 2);
  const auto end = lowest_eigenpairs(assemble(PotentialField{{WallState{4e4, 200.0, 0.47}}}, grid), 2);
  double duration = 0.0;
  std::vector<double> fid;
  for (int doublings = 0; doublings <= 10; ++doublings) {
    Stage s = horizontal_stage(from, 0, 0.43, 0.47, 1.0, 2);
    if (duration == 0.0) duration = s.duration;
    s.duration = duration;
    s.tracked_energy = ideal_spectrum(0.43, 2).entries.back().value;
    const auto out = propagate({start.mode(1), start.mode(2)}, concat({s}), PropagationOptions{});
    fid = {overlap(out[0], end.mode(1)), overlap(out[1], end.mode(2))};
    if (std::min(fid[0], fid[1]) >= kA4Fidelity) break;
    duration *= 2.0;
  }
  report("A4", std::min(fid[0], fid[1]) >= kA4Fidelity,
         fmt("horizontal adiabatic: a 0.43->0.47 T=%g fidelity k1=%.5f k2=%.5f (>= %.2f)", duration, fid[0], fid[1],
             kA4Fidelity));
}

// A5 ------------------------------------------------------------------------
void crossing_dichotomy() {
  Timer t;
  const SpatialGrid grid(kFineGrid);
  const double delta = 0.01, kappa = 1.0;
  const PotentialField at{{WallState{4e4, 200.0, 0.5 - delta}}};
  const auto before = lowest_eigenpairs(assemble(at, grid), 2);
  const auto after = lowest_eigenpairs(assemble(PotentialField{{WallState{4e4, 200.0, 0.5 + delta}}}, grid), 2);
  // rank 1 at 0.49 is the fundamental of the right interval
  const auto start = before.mode(1);
  double right_mass = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    if (grid.x(i) > 0.5) right_mass += std::norm(start[i]) * grid.spacing();
  const double floor = 4.0 * delta / kappa;
  auto run = [&](double tau) {
    Stage s = crossing_stage(at, 0, {0.5, delta, tau, 1}, kappa);
    s.tracked_energy = ideal_spectrum(0.5 - delta, 2).entries.back().value;
    return propagate(start, concat({s}), 1e-2);
  };
  const auto fast = run(floor);
  const auto slow = run(100.0 * floor);
  const double fast_fid = overlap(fast, after.mode(2));
  const double slow_fid = overlap(slow, after.mode(1));
  const double gap = eigenvalues_in_range(assemble(PotentialField{{WallState{4e4, 200.0, 0.5}}}, grid), 1, 2)[1] -
                     eigenvalues_in_range(assemble(PotentialField{{WallState{4e4, 200.0, 0.5}}}, grid), 1, 2)[0];
  const double secs = t.seconds();
  report("A5", fast_fid >= kA5Fidelity && slow_fid >= kA5Fidelity && secs < kA5Seconds,
         fmt("crossing dichotomy: right mass=%.4f tau_fast=%g fidelity(rank 2)=%.5f; tau_slow=%g fidelity(rank 1)=%.5f "
             "(>= %.1f each); gap at 1/2=%.3e runtime=%.1fs",
             right_mass, floor, fast_fid, 100.0 * floor, slow_fid, kA5Fidelity, gap, secs));
}

// A6 ------------------------------------------------------------------------
void theorem1() {
  Timer t;
  ProtocolOptions opt;
  opt.eta_star = 100.0;
  opt.I_star = 1000.0;
  const auto r = build_theorem1_path(0.43, 0.57, 2, kA6Error, 1.0, opt);
  const SpatialGrid grid(opt.n);
  const auto out = propagate({WaveFunction::sine_mode(grid, 1), WaveFunction::sine_mode(grid, 2)}, r.path,
                             PropagationOptions{opt.dt_target});
  double worst = 0.0;
  std::string detail;
  for (int k = 1; k <= 2; ++k) {
    const double e = phase_aligned_distance(out[k - 1], WaveFunction::sine_mode(grid, static_cast<int>(r.plan.sigma(k))));
    worst = std::max(worst, e);
    detail += fmt(" k%d->%lld err=%.4f", k, r.plan.sigma(k), e);
  }
  const bool sigma_ok = r.plan.sigma.image == std::vector<long long>{2, 1};
  const bool ends_ok = r.path.start_field().walls[0].height == 0.0 && r.path.end_field().walls[0].height == 0.0;
  const double secs = t.seconds();
  report("A6", worst <= kA6Error && sigma_ok && ends_ok && secs < kA6Seconds,
         "single-wall swap:" + detail +
             fmt(" (<= %.2f) sigma=(%lld %lld) I(0)=%g I(T)=%g T=%.1f runtime=%.1fs", kA6Error, r.plan.sigma(1),
                 r.plan.sigma(2), r.path.start_field().walls[0].height, r.path.end_field().walls[0].height,
                 r.path.total_time(), secs));
}

// A7 ------------------------------------------------------------------------
void arbitrary_permutation() {
  Timer t;
  ProtocolOptions opt;
  opt.eta_star = 100.0;
  opt.I_star = 1000.0;
  const std::vector<long long> sigma{2, 3, 1};
  const auto r = build_arbitrary_permutation_path(sigma, 3, kA7Entry, 1.0, opt);
  const SpatialGrid grid(opt.n);
  std::vector<WaveFunction> states;
  for (int k = 1; k <= 3; ++k) states.push_back(WaveFunction::sine_mode(grid, k));
  const auto out = propagate(states, r.path, PropagationOptions{opt.dt_target});
  double worst = 0.0;
  std::string rows;
  for (int j = 1; j <= 3; ++j) {
    rows += " [";
    for (int k = 1; k <= 3; ++k) {
      const double v = std::abs(inner(WaveFunction::sine_mode(grid, j), out[k - 1]));
      worst = std::max(worst, std::abs(v - (sigma[k - 1] == j ? 1.0 : 0.0)));
      rows += fmt(k < 3 ? "%.3f " : "%.3f", v);
    }
    rows += "]";
  }
  report("A7", worst <= kA7Entry && r.M == 3 && r.path.wall_count() == 2,
         fmt("permutation (1 2 3): M=%d walls=%d max entry deviation=%.4f (<= %.2f) overlaps", r.M,
             r.path.wall_count(), worst, kA7Entry) +
             rows + fmt(" runtime=%.1fs", t.seconds()));
}

// A8 ------------------------------------------------------------------------
void amplitude_splitting() {
  Timer t;
  SuperpositionOptions opt;
  const double r = 1.0 / std::sqrt(2.0);
  const auto res = build_superposition_path({{r, r}, {1.0, 1.0}}, 0.2, 1.0, opt);
  const SpatialGrid grid(opt.base.n);
  const auto psi = propagate(WaveFunction::sine_mode(grid, 1), res.path, opt.base.dt_target);
  const double c1 = std::norm(inner(WaveFunction::sine_mode(grid, 1), psi));
  const double c2 = std::norm(inner(WaveFunction::sine_mode(grid, 2), psi));
  double lo = INFINITY, hi = -INFINITY;
  const auto& curve = res.crossings.front().response;
  for (const auto& p : curve) {
    lo = std::min(lo, p.amplitude);
    hi = std::max(hi, p.amplitude);
  }
  report("A8", c1 >= kA8Lo && c1 <= kA8Hi && lo < kA8CurveLo && hi > kA8CurveHi,
         fmt("amplitude splitting: |c1|^2=%.4f |c2|^2=%.4f (in [%.2f,%.2f]) tau=%.4g response %zu points "
             "spanning [%.3f, %.3f] (< %.1f, > %.1f) runtime=%.1fs",
             c1, c2, kA8Lo, kA8Hi, res.crossings.front().tau, curve.size(), lo, hi, kA8CurveLo, kA8CurveHi,
             t.seconds()));
}

// A9 ------------------------------------------------------------------------
void theorem3() {
  Timer t;
  SuperpositionOptions opt;
  const SpatialGrid grid(opt.base.n);
  const auto u_i = WaveFunction::sine_mode(grid, 1);
  const auto u_f = (complex(1.0) * WaveFunction::sine_mode(grid, 1) + WaveFunction::sine_mode(grid, 2)).normalized();
  const auto res = build_theorem3_path(u_i, u_f, kA9Error, 1.0, opt);
  const auto out = propagate(u_i, res.path, opt.base.dt_target);
  const double err = (out - u_f).norm();
  const double secs = t.seconds();
  report("A9", err <= kA9Error && secs < kA9Seconds,
         fmt("state transfer to a two-mode target: L2 error=%.4f (<= %.2f) walls=%d wait=%.2f T=%.1f runtime=%.1fs", err,
             kA9Error, res.walls, res.forward_part.wait_time, res.path.total_time(), secs));
}

// A10 -----------------------------------------------------------------------
void growth() {
  const GrowthModel model{0.7, 0.3};
  const auto traj = growth_trajectory(model, 100, 10000, 20240601);
  double mean = 0.0;
  for (double x : traj.increments) mean += x;
  const double n = static_cast<double>(traj.increments.size());
  mean /= n;
  double var = 0.0;
  for (double x : traj.increments) var += (x - mean) * (x - mean);
  const double se = std::sqrt(var / (n - 1) / n);
  const double r = 0.7 * std::log(7.0 / 3.0) + 0.3 * std::log(3.0 / 7.0);
  const bool stochastic_ok = std::abs(mean - r) <= kA10StdErrors * se;

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> pos(0.1, 0.9);
  std::uniform_int_distribution<long long> start(1, 200);
  int pairs = 0, steps = 0, violations = 0;
  while (pairs < 50) {
    const double ai = pos(rng), af = pos(rng);
    try {
      check_noncrossing(ai, 64);
      check_noncrossing(af, 64);
    } catch (const Error&) {
      continue;
    }
    ++pairs;
    std::vector<long long> orbit;
    try {
      orbit = growth_exact(ai, af, start(rng), 30).orbit;
    } catch (const ClosureExceeded& e) {
      orbit = e.partial_orbit();
    }
    for (std::size_t i = 0; i + 1 < orbit.size(); ++i) {
      const long long k = orbit[i], kb = orbit[i + 1];
      const int xi = side_indicator(k, ai);
      ++steps;
      if (k + xi * side_partial_sum(k, ai) != kb + xi * side_partial_sum(kb, af)) ++violations;
    }
  }
  report("A10", stochastic_ok && violations == 0,
         fmt("growth: mean log-increment=%.4f r=%.4f se=%.4f |diff|/se=%.2f (<= %.0f) restarts=%d; exact orbits: "
             "%d pairs %d steps %d identity violations",
             mean, r, se, std::abs(mean - r) / se, kA10StdErrors, traj.restarts, pairs, steps, violations));
}

// A11 -----------------------------------------------------------------------
void permutation_oracles() {
  Timer t;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(0.05, 0.95);
  std::uniform_int_distribution<int> size(1, 10);
  int cases = 0, mismatches = 0;
  while (cases < 100) {
    const double ai = pos(rng), af = pos(rng);
    const int N = size(rng);
    try {
      check_noncrossing(ai, 64);
      check_noncrossing(af, 64);
      const auto x = permutation_by_crossings(ai, af, N);
      const auto y = quasi_adiabatic_permutation(ai, af, N);
      if (x.image != y.image) ++mismatches;
    } catch (const ClosureExceeded&) {
      continue;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateSplit) continue;
      throw;
    }
    ++cases;
  }
  const double secs = t.seconds();
  report("A11", mismatches == 0 && secs < kA11Seconds,
         fmt("permutation oracles: %d cases %d mismatches runtime=%.2fs (limit %.0fs)", cases, mismatches, secs,
             kA11Seconds));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, void (*)()>> all{
      {"A1", unitarity},         {"A2", spectral_convergence}, {"A3", vertical_adiabatic},
      {"A4", horizontal_adiabatic}, {"A5", crossing_dichotomy},   {"A6", theorem1},
      {"A7", arbitrary_permutation}, {"A8", amplitude_splitting}, {"A9", theorem3},
      {"A10", growth},           {"A11", permutation_oracles}};
  for (const auto& [id, fn] : all) {
    bool selected = argc == 1;
    for (int i = 1; i < argc; ++i) selected = selected || std::string(argv[i]) == id;
    if (selected) guarded(id, fn);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
