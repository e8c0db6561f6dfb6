#include "qawall/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "qawall/errors.hpp"
#include "qawall/propagate.hpp"

namespace qawall {

namespace {

constexpr double kPi = std::numbers::pi;

double free_energy(int m) { return m * m * kPi * kPi; }

double ideal_top(double a, int m) { return ideal_spectrum(a, m).entries.back().value; }

int mapped_rank(const Stage& s, int r) {
  if (r >= 1 && r <= static_cast<int>(s.rank_map.size())) return s.rank_map[r - 1];
  return r;
}

std::vector<int> identity_map(int m) {
  std::vector<int> v(m);
  std::iota(v.begin(), v.end(), 1);
  return v;
}

}  // namespace

std::vector<StageReport> tune_stages(ControlPath& path, int n, const std::vector<int>& ranks,
                                     double tolerance, const ProtocolOptions& options) {
  const SpatialGrid grid(n);
  std::vector<StageReport> reports;
  std::vector<int> current = ranks;
  for (auto& stage : path.stages) {
    std::vector<int> next;
    for (int r : current) next.push_back(mapped_rank(stage, r));
    const int m_start = *std::max_element(current.begin(), current.end());
    const int m_end = *std::max_element(next.begin(), next.end());

    StageReport rep{stage.label, stage.kind, stage.duration, 0.0, 0};
    const bool stretchable = stage.kind == StageKind::Vertical || stage.kind == StageKind::Horizontal;
    if (stage.duration > 0.0) {
      const auto start = lowest_eigenpairs(assemble(stage.start_field(), grid), m_start);
      const auto end = lowest_eigenpairs(assemble(stage.end_field(), grid), m_end);
      for (;;) {
        std::vector<WaveFunction> states;
        for (int r : current) states.push_back(start.mode(r));
        states = propagate_stage(std::move(states), stage, options.dt_target);
        double err = 0.0;
        for (std::size_t k = 0; k < states.size(); ++k)
          err = std::max(err, phase_aligned_distance(states[k], end.mode(next[k])));
        rep.error = err;
        rep.duration = stage.duration;
        if (err <= tolerance || !stretchable || rep.doublings >= options.max_doublings) break;
        stage.duration *= 2.0;
        ++rep.doublings;
      }
    }
    reports.push_back(rep);
    current = next;
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Single-wall permutation

Theorem1Result build_theorem1_path(double a_i, double a_f, int N, double epsilon, double kappa,
                                   const ProtocolOptions& options) {
  require(N >= 1, ErrorCode::InvalidArgument, "N must be positive");
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument, "epsilon must lie in (0,1)");
  require(kappa > 0.0, ErrorCode::InvalidArgument, "kappa must be positive");
  require(options.I_star > 0.0 && options.eta_star > 0.0, ErrorCode::InvalidArgument,
          "wall height and sharpness must be positive");
  const SpatialGrid grid(options.n);

  Theorem1Result out;
  auto& plan = out.plan;
  plan.a_i = a_i;
  plan.a_f = a_f;
  plan.N = N;
  plan.epsilon = epsilon;
  plan.kappa = kappa;
  plan.eta_star = options.eta_star;
  plan.I_star = options.I_star;
  plan.sigma = quasi_adiabatic_permutation(a_i, a_f, N);
  const auto set = tracked_crossings(a_i, a_f, N);
  plan.M = set.closure;
  const int M = plan.M;

  // group crossings sharing a position (e.g. 1/2 = 2/4)
  for (const auto& c : set.crossings) {
    if (plan.crossings.empty() || plan.crossings.back().position != c.position)
      plan.crossings.push_back({c.position, 0.0, 0.0, {}});
    plan.crossings.back().pairs.emplace_back(c.left, c.right);
  }
  const int J = plan.J();
  plan.epsilon_stage = epsilon / (4.0 * J + 3.0);
  const int dir = a_f >= a_i ? 1 : -1;

  if (J > 0) {
    double room = std::min(std::abs(plan.crossings.front().position - a_i),
                           std::abs(a_f - plan.crossings.back().position));
    for (int j = 1; j < J; ++j)
      room = std::min(room, 0.5 * std::abs(plan.crossings[j].position - plan.crossings[j - 1].position));
    plan.delta_star = 0.99 * room;
  }
  const double tau = options.tau > 0.0 ? options.tau : 2.0 * plan.delta_star / kappa;
  for (auto& c : plan.crossings) {
    c.delta = std::min(plan.delta_star / 2.0, kappa * tau / 4.0);
    c.tau = tau;
  }

  PotentialField field{{WallState{0.0, options.eta_star, a_i}}};
  field.validate();
  check_resolution(field, grid);
  const double top = std::max(free_energy(M), ideal_top(a_i, M));

  std::vector<Stage> stages;
  Stage up = vertical_stage(field, 0, 0.0, options.I_star, kappa);
  up.label = "vertical up";
  up.tracked_energy = top;
  stages.push_back(up);
  field.walls[0].height = options.I_star;

  double a = a_i;
  int index = 0;
  for (const auto& c : plan.crossings) {
    ++index;
    const double before = c.position - dir * c.delta;
    Stage h = horizontal_stage(field, 0, a, before, kappa, 0);
    h.label = "horizontal " + std::to_string(index);
    h.tracked_energy = std::max(ideal_top(a, M), ideal_top(before, M));
    stages.push_back(h);
    field.walls[0].position = before;

    Stage x = crossing_stage(field, 0, {c.position, c.delta, c.tau, dir}, kappa);
    x.label = "crossing " + std::to_string(index);
    const double after = c.position + dir * c.delta;
    x.tracked_energy = std::max(ideal_top(before, M), ideal_top(after, M));
    x.rank_map = identity_map(M);
    for (const auto& [l, r] : c.pairs) {
      const auto rl = ideal_rank(l, before);
      const auto rr = ideal_rank(r, before);
      if (rl <= M && rr <= M) {
        x.rank_map[rl - 1] = static_cast<int>(rr);
        x.rank_map[rr - 1] = static_cast<int>(rl);
      }
    }
    stages.push_back(x);
    field.walls[0].position = after;
    a = after;
  }
  Stage h = horizontal_stage(field, 0, a, a_f, kappa, 0);
  h.label = "horizontal " + std::to_string(index + 1);
  h.tracked_energy = std::max(ideal_top(a, M), ideal_top(a_f, M));
  stages.push_back(h);
  field.walls[0].position = a_f;

  Stage down = vertical_stage(field, 0, options.I_star, 0.0, kappa);
  down.label = "vertical down";
  down.tracked_energy = std::max(free_energy(M), ideal_top(a_f, M));
  stages.push_back(down);

  out.path = concat(stages);
  out.path.kappa = kappa;

  if (options.tune) {
    plan.stages = tune_stages(out.path, options.n, identity_map(N), plan.epsilon_stage, options);
  } else {
    for (const auto& s : out.path.stages) plan.stages.push_back({s.label, s.kind, s.duration, 0.0, 0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Arbitrary permutation with several walls

std::vector<int> interval_rank_assignment(const std::vector<long long>& sigma, int N) {
  require(N >= 1 && static_cast<int>(sigma.size()) >= N, ErrorCode::InvalidArgument,
          "permutation must define sigma(1..N)");
  std::set<long long> used;
  long long M = N;
  for (int k = 0; k < N; ++k) {
    require(sigma[k] >= 1, ErrorCode::InvalidArgument, "permutation values must be positive");
    require(used.insert(sigma[k]).second, ErrorCode::InvalidArgument, "permutation is not injective");
    M = std::max(M, sigma[k]);
  }
  require(M <= 64, ErrorCode::InvalidArgument, "permutation reaches beyond rank 64");
  std::vector<int> ranks;
  for (int k = 0; k < N; ++k) ranks.push_back(static_cast<int>(sigma[k]));
  for (long long r = 1; static_cast<long long>(ranks.size()) < M; ++r)
    if (!used.count(r)) ranks.push_back(static_cast<int>(r));
  return ranks;
}

namespace {

PotentialField interval_walls(const std::vector<double>& lengths, double height, double eta) {
  PotentialField f;
  double a = 0.0;
  for (std::size_t j = 0; j + 1 < lengths.size(); ++j) {
    a += lengths[j];
    f.walls.push_back({height, eta, a});
  }
  return f;
}

std::vector<double> geometric_lengths(int m, double spread) {
  std::vector<double> l(m, 1.0);
  if (m > 1) {
    const double q = std::pow(spread, 1.0 / (m - 1));
    for (int j = 1; j < m; ++j) l[j] = l[j - 1] / q;
  }
  const double total = std::accumulate(l.begin(), l.end(), 0.0);
  for (double& x : l) x /= total;
  return l;
}

std::vector<double> lerp(const std::vector<double>& a, const std::vector<double>& b, double s) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + (b[i] - a[i]) * s;
  return out;
}

double top_interval_energy(const std::vector<double>& lengths) {
  const double lmin = *std::min_element(lengths.begin(), lengths.end());
  return kPi * kPi / (lmin * lmin);
}

std::vector<int> length_ranks(const std::vector<double>& lengths) {
  std::vector<int> order(lengths.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return lengths[x] > lengths[y]; });
  std::vector<int> rank(lengths.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r) + 1;
  return rank;
}

}  // namespace

ArbitraryPermutationResult build_arbitrary_permutation_path(const std::vector<long long>& sigma,
                                                            int N, double epsilon, double kappa,
                                                            const ProtocolOptions& options) {
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument, "epsilon must lie in (0,1)");
  require(kappa > 0.0, ErrorCode::InvalidArgument, "kappa must be positive");
  const auto ranks = interval_rank_assignment(sigma, N);
  const int M = static_cast<int>(ranks.size());

  ArbitraryPermutationResult out;
  out.M = M;
  out.J = M - 1;
  out.final_ranks = ranks;
  if (M == 1) {
    // one interval and no wall to move: the free evolution already fixes mode 1
    PotentialField f{{WallState{0.0, options.eta_star, 0.5}}};
    out.initial_lengths = out.final_lengths = {1.0};
    out.path = concat(std::vector<Stage>{wait_stage(f, 0.0)});
    out.path.kappa = kappa;
    return out;
  }

  const double spreads[] = {1.6, 1.55, 1.65, 1.5, 1.7, 1.45, 1.75, 1.4, 1.8, 1.35};
  bool found = false;
  std::vector<double> crossings;
  for (double spread : spreads) {
    const auto l = geometric_lengths(M, spread);
    std::vector<double> lf(M);
    for (int j = 0; j < M; ++j) lf[j] = l[ranks[j] - 1];
    std::vector<double> cs;
    for (int i = 0; i < M; ++i) {
      for (int j = i + 1; j < M; ++j) {
        const double d0 = l[i] - l[j];
        const double d1 = lf[i] - lf[j];
        if ((d0 > 0) != (d1 > 0)) cs.push_back(d0 / (d0 - d1));
      }
    }
    std::sort(cs.begin(), cs.end());
    bool separated = true;
    for (std::size_t k = 1; k < cs.size(); ++k) separated = separated && cs[k] - cs[k - 1] > 1e-3;
    if (!separated) continue;
    out.initial_lengths = l;
    out.final_lengths = lf;
    crossings = cs;
    found = true;
    break;
  }
  if (!found)
    throw Error(ErrorCode::InfeasibleLengths,
                "no geometric length spread separates the length crossings");
  out.crossing_times = crossings;

  const auto& l0 = out.initial_lengths;
  const auto& l1 = out.final_lengths;
  const double eta = options.eta_star;
  const SpatialGrid grid(options.n);
  auto lengths_at = [&](double s) { return lerp(l0, l1, s); };
  auto field_at = [&](double s, double height) { return interval_walls(lengths_at(s), height, eta); };
  {
    const auto f = field_at(0.0, 0.0);
    f.validate();
    check_resolution(f, grid);
  }

  double gap = crossings.empty() ? 1.0 : std::min(crossings.front(), 1.0 - crossings.back());
  for (std::size_t k = 1; k < crossings.size(); ++k) gap = std::min(gap, crossings[k] - crossings[k - 1]);
  const double ds = 0.45 * gap;

  std::vector<Stage> stages;
  Stage up = vertical_stage_all(field_at(0.0, 0.0), options.I_star, kappa);
  up.label = "vertical up";
  up.tracked_energy = std::max(free_energy(M), top_interval_energy(l0));
  stages.push_back(up);

  double s = 0.0;
  int index = 0;
  for (double sc : crossings) {
    ++index;
    Stage h = transition_stage(StageKind::Horizontal, field_at(s, options.I_star),
                               field_at(sc - ds, options.I_star), kappa);
    h.label = "horizontal " + std::to_string(index);
    h.tracked_energy = std::max(top_interval_energy(lengths_at(s)), top_interval_energy(lengths_at(sc - ds)));
    stages.push_back(h);

    Stage x = transition_stage(StageKind::Crossing, field_at(sc - ds, options.I_star),
                               field_at(sc + ds, options.I_star), kappa);
    x.label = "crossing " + std::to_string(index);
    x.tracked_energy = std::max(top_interval_energy(lengths_at(sc - ds)),
                                top_interval_energy(lengths_at(sc + ds)));
    const auto before = length_ranks(lengths_at(sc - ds));
    const auto after = length_ranks(lengths_at(sc + ds));
    x.rank_map = identity_map(M);
    for (int j = 0; j < M; ++j) x.rank_map[before[j] - 1] = after[j];
    stages.push_back(x);
    s = sc + ds;
  }
  Stage h = transition_stage(StageKind::Horizontal, field_at(s, options.I_star),
                             field_at(1.0, options.I_star), kappa);
  h.label = "horizontal " + std::to_string(index + 1);
  h.tracked_energy = std::max(top_interval_energy(lengths_at(s)), top_interval_energy(l1));
  stages.push_back(h);

  Stage down = vertical_stage_all(field_at(1.0, options.I_star), 0.0, kappa);
  down.label = "vertical down";
  down.tracked_energy = std::max(free_energy(M), top_interval_energy(l1));
  stages.push_back(down);

  out.path = concat(stages);
  out.path.kappa = kappa;
  const double tol = epsilon / (4.0 * static_cast<double>(crossings.size()) + 3.0);
  if (options.tune) {
    out.stages = tune_stages(out.path, options.n, identity_map(N), tol, options);
  } else {
    for (const auto& st : out.path.stages) out.stages.push_back({st.label, st.kind, st.duration, 0.0, 0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Phase tuning

double mode_phase_rate(double lambda, double dt) noexcept {
  if (dt > 0.0) return 2.0 * std::atan(0.5 * lambda * dt);
  return lambda;
}

namespace {

double wrap(double x) {
  x = std::remainder(x, 2.0 * kPi);
  return x;
}

}  // namespace

double tune_phases(const std::vector<complex>& current, const std::vector<double>& eigenvalues,
                   const std::vector<complex>& targets, const PhaseTuningOptions& options) {
  require(current.size() == eigenvalues.size() && current.size() == targets.size(),
          ErrorCode::InvalidArgument, "phase tuning inputs differ in length");
  require(options.max_wait >= 0.0 && options.phase_tol > 0.0, ErrorCode::InvalidArgument,
          "phase tuning needs max_wait >= 0 and phase_tol > 0");
  std::vector<double> start, goal, rate;
  for (std::size_t k = 0; k < current.size(); ++k) {
    if (std::abs(current[k]) < 1e-12 || std::abs(targets[k]) < 1e-12) continue;
    start.push_back(std::arg(current[k]));
    goal.push_back(std::arg(targets[k]));
    rate.push_back(mode_phase_rate(eigenvalues[k], options.dt));
  }
  if (start.empty()) return 0.0;

  // unit of the scan: one step, or a fraction of the fastest period
  double lambda_max = 0.0;
  for (double lam : eigenvalues) lambda_max = std::max(lambda_max, std::abs(lam));
  // the fastest phase must not jump over a window of width 2 * phase_tol
  const double unit = options.dt > 0.0 ? options.dt
                                       : std::min(2.0 * kPi / 20.0, options.phase_tol) / std::max(lambda_max, 1e-300);
  const double per_unit = options.dt > 0.0 ? 1.0 : unit;  // phase = rate * m * per_unit

  auto miss = [&](double m) {
    double worst = 0.0;
    for (std::size_t k = 0; k < start.size(); ++k)
      worst = std::max(worst, std::abs(wrap(start[k] - rate[k] * m * per_unit - goal[k])));
    return worst;
  };

  if (start.size() == 1) {
    // single rotator: exact solution, rounded to the scan unit when stepping
    double d = std::fmod(start[0] - goal[0], 2.0 * kPi);
    if (d < 0) d += 2.0 * kPi;
    if (options.dt <= 0.0) {
      const double t = d / rate[0];
      if (t <= options.max_wait) return t;
    } else {
      const double m = std::round(d / rate[0]);
      if (miss(m) <= options.phase_tol && m * unit <= options.max_wait) return m * unit;
    }
  }

  const auto limit = static_cast<long long>(std::floor(options.max_wait / unit));
  for (long long m = 0; m <= limit; ++m) {
    bool ok = true;
    for (std::size_t k = 0; k < start.size() && ok; ++k)
      ok = std::abs(wrap(start[k] - rate[k] * static_cast<double>(m) * per_unit - goal[k])) <= options.phase_tol;
    if (ok) return static_cast<double>(m) * unit;
  }

  // explain the failure: a slow drift between two modes means the orbit
  // stays near a closed curve on the torus
  const double per_time = options.dt > 0.0 ? 1.0 / options.dt : 1.0;
  for (std::size_t i = 0; i < rate.size(); ++i) {
    for (std::size_t j = i + 1; j < rate.size(); ++j) {
      for (int p = 1; p <= 12; ++p) {
        for (int q = 1; q <= 12; ++q) {
          const double drift = std::abs(q * rate[i] - p * rate[j]) * per_time;
          if (drift * options.max_wait < 2.0 * kPi) {
            std::ostringstream msg;
            msg << "modes " << i + 1 << " and " << j + 1 << " are close to the ratio " << p << "/" << q
                << " (drift " << drift << ")";
            throw Error(ErrorCode::RationalResonance, msg.str());
          }
        }
      }
    }
  }
  std::ostringstream msg;
  msg << "no wait below " << options.max_wait << " brings every phase within " << options.phase_tol;
  throw Error(ErrorCode::WaitExceeded, msg.str());
}

double tune_phases(const WaveFunction& state, const DiscreteHamiltonian& hamiltonian,
                   const std::vector<complex>& targets, const PhaseTuningOptions& options) {
  const auto basis = lowest_eigenpairs(hamiltonian, static_cast<int>(targets.size()));
  return tune_phases(mode_overlaps(state, basis), basis.eigenvalues, targets, options);
}

// ---------------------------------------------------------------------------
// Superposition path

void SuperpositionTarget::validate() const {
  require(!c.empty() && c.size() == alpha.size(), ErrorCode::InvalidArgument,
          "superposition target needs matching non-empty coefficient lists");
  double mass = 0.0;
  for (double x : c) mass += x * x;
  require(std::abs(mass - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
          "superposition coefficients must have unit square sum");
  for (const auto& a : alpha)
    require(std::abs(std::abs(a) - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
            "superposition phases must have unit modulus");
}

SuperpositionTarget SuperpositionTarget::trimmed() const {
  SuperpositionTarget t = *this;
  while (t.c.size() > 1 && std::abs(t.c.back()) < 1e-12) {
    t.c.pop_back();
    t.alpha.pop_back();
  }
  return t;
}

std::vector<complex> sine_coefficients(const WaveFunction& u, int count) {
  std::vector<complex> out;
  for (int k = 1; k <= count; ++k) out.push_back(inner(WaveFunction::sine_mode(u.grid(), k), u));
  return out;
}

SuperpositionTarget superposition_target_from_state(const WaveFunction& u, double tail, int cap) {
  const double norm2 = u.norm() * u.norm();
  require(norm2 > 1e-28, ErrorCode::ZeroNorm, "target state has zero norm");
  const auto coef = sine_coefficients(u, cap);
  double mass = 0.0;
  int N = cap;
  for (int k = 0; k < cap; ++k) {
    mass += std::norm(coef[k]);
    if (1.0 - mass / norm2 <= tail) {
      N = k + 1;
      break;
    }
  }
  SuperpositionTarget t;
  double kept = 0.0;
  for (int k = 0; k < N; ++k) kept += std::norm(coef[k]);
  for (int k = 0; k < N; ++k) {
    const double mag = std::abs(coef[k]) / std::sqrt(kept);
    t.c.push_back(mag);
    t.alpha.push_back(std::abs(coef[k]) > 0.0 ? coef[k] / std::abs(coef[k]) : complex(1.0));
  }
  // exact unit sum after rounding
  double s = 0.0;
  for (double x : t.c) s += x * x;
  for (double& x : t.c) x /= std::sqrt(s);
  return t.trimmed();
}

namespace {

struct SuperpositionGeometry {
  int N = 1;
  std::vector<double> l0;  // initial lengths, decreasing
  double l1_final = 0.0;   // final length of the first interval
  std::vector<double> crossings;  // s where interval 1 meets interval k+1

  std::vector<double> lengths(double s) const {
    std::vector<double> l(N);
    l[0] = l0[0] + (l1_final - l0[0]) * s;
    const double g = (1.0 - l[0]) / (1.0 - l0[0]);
    for (int k = 1; k < N; ++k) l[k] = l0[k] * g;
    return l;
  }
};

SuperpositionGeometry superposition_geometry(int N, double spread) {
  SuperpositionGeometry g;
  g.N = N;
  g.l0 = geometric_lengths(N, spread);
  if (N == 1) return g;
  const double q = std::pow(spread, 1.0 / (N - 1));
  const double ratio = g.l0[N - 1] / ((1.0 - g.l0[0]) * q);
  g.l1_final = ratio / (1.0 + ratio);
  const double d = g.l1_final - g.l0[0];
  for (int k = 1; k < N; ++k)
    g.crossings.push_back((1.0 - g.l0[0]) * (g.l0[k] - g.l0[0]) / (d * (1.0 - g.l0[0] + g.l0[k])));
  return g;
}

}  // namespace

PotentialField superposition_start_field(int N, const SuperpositionOptions& options) {
  require(N >= 1, ErrorCode::InvalidArgument, "N must be positive");
  if (N == 1) return PotentialField{{WallState{0.0, options.base.eta_star, 0.5}}};
  return interval_walls(superposition_geometry(N, options.spread).l0, 0.0, options.base.eta_star);
}

SuperpositionResult build_superposition_path(const SuperpositionTarget& raw_target, double epsilon,
                                             double kappa, const SuperpositionOptions& options,
                                             const WaveFunction* initial) {
  raw_target.validate();
  require(epsilon > 0.0 && epsilon < 1.0, ErrorCode::InvalidArgument, "epsilon must lie in (0,1)");
  require(kappa > 0.0, ErrorCode::InvalidArgument, "kappa must be positive");
  const auto target = raw_target.trimmed();
  const int N = target.size();
  require(N <= 8, ErrorCode::InvalidArgument, "superposition supports at most 8 modes");
  const auto& base = options.base;
  const SpatialGrid grid(base.n);
  const double phase_tol = options.phase_tol > 0.0 ? options.phase_tol : epsilon / 4.0;

  WaveFunction psi = initial ? *initial : WaveFunction::sine_mode(grid, 1);
  require(psi.grid() == grid, ErrorCode::InvalidArgument, "initial state grid does not match options");

  SuperpositionResult out;
  out.N = N;
  std::vector<Stage> stages;
  auto advance = [&](const Stage& s) {
    psi = propagate_stage({psi}, s, base.dt_target).front();
    stages.push_back(s);
  };

  std::vector<complex> wanted(N);
  for (int k = 0; k < N; ++k) wanted[k] = target.c[k] * target.alpha[k];

  if (N == 1) {
    const PotentialField free = superposition_start_field(1, options);
    check_resolution(free, grid);
    const DiscreteHamiltonian h = assemble(free, grid);
    const double lambda = lowest_eigenpairs(h, 1).eigenvalues[0];
    const double dt = std::min(base.dt_target, 0.05 / lambda);
    const double t = tune_phases(psi, h, wanted, {options.max_wait, phase_tol, dt});
    Stage w = wait_stage(free, t, dt);
    w.label = "phase wait";
    w.tracked_energy = lambda;
    advance(w);
    out.initial_lengths = {1.0};
    out.wait_time = t;
    out.extinction_phases = {0.0};
    out.predicted = {inner(WaveFunction::sine_mode(grid, 1), psi)};
    out.path = concat(stages);
    out.path.kappa = kappa;
    return out;
  }

  const auto geo = superposition_geometry(N, options.spread);
  out.initial_lengths = geo.l0;
  const double eta = base.eta_star;
  const double height = base.I_star;
  auto field_at = [&](double s, double I) { return interval_walls(geo.lengths(s), I, eta); };
  auto energy_at = [&](double s) { return top_interval_energy(geo.lengths(s)); };

  {
    const auto f0 = field_at(0.0, 0.0);
    const auto f1 = field_at(1.0, 0.0);
    f0.validate();
    f1.validate();
    check_resolution(f0, grid);
  }

  // crossing window in s so that the first wall moves by +-delta
  const double speed_s = std::abs(geo.l1_final - geo.l0[0]);
  double room = std::min(geo.crossings.front(), 1.0 - geo.crossings.back());
  for (std::size_t k = 1; k < geo.crossings.size(); ++k)
    room = std::min(room, geo.crossings[k] - geo.crossings[k - 1]);
  const double ds = std::min(options.delta / speed_s, 0.45 * room);

  Stage up = vertical_stage_all(field_at(0.0, 0.0), height, kappa);
  up.label = "vertical up";
  up.tracked_energy = std::max(free_energy(N), energy_at(0.0));
  advance(up);

  double s = 0.0;
  double remaining = 1.0;  // target mass still travelling with interval 1
  for (int k = 1; k < N; ++k) {
    const double sc = geo.crossings[k - 1];
    Stage h = transition_stage(StageKind::Horizontal, field_at(s, height), field_at(sc - ds, height), kappa);
    h.label = "horizontal " + std::to_string(k);
    h.tracked_energy = std::max(energy_at(s), energy_at(sc - ds));
    advance(h);

    const auto before = lowest_eigenpairs(assemble(field_at(sc - ds, height), grid), k + 1);
    const double travelling = std::abs(mode_overlaps(psi, before)[k - 1]);
    const auto after = lowest_eigenpairs(assemble(field_at(sc + ds, height), grid), k + 1);

    CrossingTuning tuning;
    tuning.index = k;
    tuning.target = remaining > 0.0 ? std::min(1.0, std::abs(target.c[k - 1]) / remaining) : 0.0;

    Stage x = transition_stage(StageKind::Crossing, field_at(sc - ds, height), field_at(sc + ds, height), kappa);
    x.label = "crossing " + std::to_string(k);
    x.tracked_energy = std::max(energy_at(sc - ds), energy_at(sc + ds));
    x.rank_map = identity_map(N);
    const double tau_floor = x.duration;

    std::map<double, std::pair<double, WaveFunction>> probes;
    auto probe = [&](double tau) -> double {
      auto it = probes.find(tau);
      if (it != probes.end()) return it->second.first;
      Stage trial = x;
      trial.duration = tau;
      const auto result = propagate_stage({psi}, trial, base.dt_target).front();
      const double amp = std::abs(mode_overlaps(result, after)[k - 1]) / std::max(travelling, 1e-300);
      probes.emplace(tau, std::make_pair(amp, result));
      tuning.response.push_back({tau, amp});
      return amp;
    };

    // sweep from the speed limit until the slow side is reached
    std::vector<double> sweep;
    for (double tau = tau_floor; tau <= options.tau_cap; tau *= 2.0) {
      sweep.push_back(tau);
      if (probe(tau) >= std::max(0.9, tuning.target + options.amplitude_tol)) break;
    }
    double best = sweep.front();
    for (double tau : sweep)
      if (std::abs(probe(tau) - tuning.target) < std::abs(probe(best) - tuning.target)) best = tau;

    if (std::abs(probe(best) - tuning.target) > options.amplitude_tol) {
      double lo = -1.0, hi = -1.0;
      for (std::size_t i = 0; i + 1 < sweep.size(); ++i) {
        const double f0 = probe(sweep[i]) - tuning.target;
        const double f1 = probe(sweep[i + 1]) - tuning.target;
        if ((f0 <= 0.0 && f1 >= 0.0) || (f0 >= 0.0 && f1 <= 0.0)) {
          lo = sweep[i];
          hi = sweep[i + 1];
          break;
        }
      }
      if (lo < 0.0) {
        std::ostringstream msg;
        msg << "crossing " << k << ": response " << probe(sweep.front()) << " .. "
            << probe(sweep.back()) << " over tau " << sweep.front() << " .. " << sweep.back()
            << " does not bracket " << tuning.target;
        throw Error(ErrorCode::BisectionFailure, msg.str());
      }
      const bool rising = probe(hi) >= probe(lo);
      for (int it = 0; it < options.bisection_iterations; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double f = probe(mid);
        if (std::abs(f - tuning.target) < std::abs(probe(best) - tuning.target)) best = mid;
        if (std::abs(f - tuning.target) <= options.amplitude_tol) break;
        if ((f < tuning.target) == rising) lo = mid;
        else hi = mid;
      }
    }
    tuning.tau = best;
    tuning.amplitude = probe(best);
    x.duration = best;
    psi = probes.at(best).second;
    stages.push_back(x);
    out.crossings.push_back(tuning);

    remaining = std::sqrt(std::max(0.0, remaining * remaining - target.c[k - 1] * target.c[k - 1]));
    s = sc + ds;
  }
  Stage h = transition_stage(StageKind::Horizontal, field_at(s, height), field_at(1.0, height), kappa);
  h.label = "horizontal " + std::to_string(N);
  h.tracked_energy = std::max(energy_at(s), energy_at(1.0));
  advance(h);

  // phases picked up while the walls are removed
  const auto final_field = field_at(1.0, height);
  const auto end_basis = lowest_eigenpairs(assemble(final_field, grid), N);
  Stage down = vertical_stage_all(final_field, 0.0, kappa);
  down.label = "vertical down";
  down.tracked_energy = std::max(free_energy(N), energy_at(1.0));
  std::vector<WaveFunction> modes;
  for (int k = 1; k <= N; ++k) modes.push_back(end_basis.mode(k));
  modes = propagate_stage(std::move(modes), down, base.dt_target);
  std::vector<complex> carry(N);
  for (int k = 0; k < N; ++k) {
    carry[k] = inner(WaveFunction::sine_mode(grid, k + 1), modes[k]);
    out.extinction_phases.push_back(std::arg(carry[k]));
  }

  const double dt = std::min(base.dt_target, 0.05 / energy_at(1.0));
  const auto current = mode_overlaps(psi, end_basis);
  std::vector<complex> goals(N);
  for (int k = 0; k < N; ++k) goals[k] = wanted[k] * std::polar(1.0, -out.extinction_phases[k]);
  const double t = tune_phases(current, end_basis.eigenvalues, goals, {options.max_wait, phase_tol, dt});
  Stage w = wait_stage(final_field, t, dt);
  w.label = "phase wait";
  w.tracked_energy = energy_at(1.0);
  stages.push_back(w);
  out.wait_time = t;
  const auto steps = t > 0.0 ? stage_stepping(w, base.dt_target) : StageStepping{0, dt};
  for (int k = 0; k < N; ++k) {
    const double phase = mode_phase_rate(end_basis.eigenvalues[k], steps.dt) * static_cast<double>(steps.steps);
    out.predicted.push_back(current[k] * std::polar(1.0, -phase) * carry[k]);
  }
  stages.push_back(down);

  out.path = concat(stages);
  out.path.kappa = kappa;
  return out;
}

// ---------------------------------------------------------------------------
// Transfer between arbitrary states

namespace {

ControlPath pad_walls(ControlPath path, int walls, double eta) {
  for (auto& s : path.stages) {
    while (static_cast<int>(s.walls.size()) < walls) {
      const WallState parked{0.0, eta, 0.5};
      s.walls.push_back({parked, parked});
    }
  }
  return path;
}

}  // namespace

Theorem3Result build_theorem3_path(const WaveFunction& u_i, const WaveFunction& u_f, double epsilon,
                                   double kappa, const SuperpositionOptions& options) {
  const double ni = u_i.norm();
  const double nf = u_f.norm();
  if (std::abs(ni - nf) > 1e-10 * std::max(1.0, ni)) {
    std::ostringstream msg;
    msg << "initial and final norms differ: " << ni << " vs " << nf;
    throw Error(ErrorCode::NormMismatch, msg.str());
  }
  require(ni >= 1e-14, ErrorCode::ZeroNorm, "states have zero norm");
  const SpatialGrid grid(options.base.n);
  require(u_i.grid() == grid && u_f.grid() == grid, ErrorCode::InvalidArgument,
          "state grids do not match options");
  const double tail = (epsilon / 4.0) * (epsilon / 4.0);
  SuperpositionOptions part = options;
  if (part.phase_tol <= 0.0) part.phase_tol = epsilon / 4.0;

  Theorem3Result out;
  // (a) a forward path reaching conj(u_i); run backwards it takes u_i to the ground mode
  const auto target_i = superposition_target_from_state(u_i.conjugated(), tail);
  out.reverse_part = build_superposition_path(target_i, epsilon / 2.0, kappa, part);
  const ControlPath back = out.reverse_part.path.reversed();

  // (b) forward to u_f, tuned on the state actually produced by (a)
  const auto target_f = superposition_target_from_state(u_f, tail);
  const auto start_f = superposition_start_field(target_f.size(), part);
  out.walls = std::max<int>(back.wall_count(), static_cast<int>(start_f.walls.size()));
  const double eta = options.base.eta_star;

  auto padded_back = pad_walls(back, out.walls, eta);
  PotentialField start_padded = start_f;
  while (static_cast<int>(start_padded.walls.size()) < out.walls) start_padded.walls.push_back({0.0, eta, 0.5});
  Stage move = transition_stage(StageKind::Reposition, padded_back.end_field(), start_padded, kappa);
  move.label = "reposition";
  move.tracked_energy = free_energy(1);

  std::vector<Stage> first = padded_back.stages;
  first.push_back(move);
  ControlPath to_ground = concat(first);
  WaveFunction mid = propagate(complex(1.0 / ni) * u_i, to_ground, options.base.dt_target);

  out.forward_part = build_superposition_path(target_f, epsilon / 2.0, kappa, part, &mid);
  auto forward = pad_walls(out.forward_part.path, out.walls, eta);

  out.path = concat(std::vector<ControlPath>{to_ground, forward});
  out.path.kappa = kappa;
  return out;
}

// ---------------------------------------------------------------------------
// Growth

void GrowthModel::validate() const {
  require(beta > 0.0 && beta < 1.0 && gamma > 0.0 && gamma < 1.0, ErrorCode::InvalidArgument,
          "beta and gamma must lie in (0,1)");
}

double GrowthModel::rate() const {
  validate();
  return beta * std::log(beta / gamma) + (1.0 - beta) * std::log((1.0 - beta) / (1.0 - gamma));
}

long long growth_step(const GrowthModel& model, long long k, double u) {
  model.validate();
  require(k >= 1, ErrorCode::InvalidArgument, "state must be positive");
  const double factor = u < model.beta ? model.beta / model.gamma : (1.0 - model.beta) / (1.0 - model.gamma);
  return std::max(1LL, std::llround(static_cast<double>(k) * factor));
}

GrowthTrajectory growth_trajectory(const GrowthModel& model, long long k0, int steps,
                                   std::uint64_t seed, long long restart_above) {
  model.validate();
  require(k0 >= 1 && steps >= 0, ErrorCode::InvalidArgument, "need k0 >= 1 and steps >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  GrowthTrajectory out;
  long long k = k0;
  out.k.push_back(k);
  for (int i = 0; i < steps; ++i) {
    const long long next = growth_step(model, k, uniform(rng));
    out.increments.push_back(std::log(static_cast<double>(next) / static_cast<double>(k)));
    k = next;
    if (k > restart_above) {
      k = k0;
      ++out.restarts;
    }
    out.k.push_back(k);
  }
  return out;
}

int side_indicator(long long k, double a) {
  return ideal_label_at_rank(k, a).side == Side::Left ? 1 : -1;
}

long long side_partial_sum(long long k, double a) {
  const auto label = ideal_label_at_rank(k, a);
  // lefts among ranks 1..k
  const long long lefts = label.side == Side::Left ? label.index : k - label.index;
  return 2 * lefts - k;
}

GrowthOrbit growth_exact(double a_i, double a_f, long long k0, int n_cycles, long long cap) {
  require(k0 >= 1 && n_cycles >= 0, ErrorCode::InvalidArgument, "need k0 >= 1 and n_cycles >= 0");
  check_noncrossing(a_i, 64);
  check_noncrossing(a_f, 64);
  GrowthOrbit out;
  out.orbit.push_back(k0);
  std::set<long long> seen{k0};
  long long k = k0;
  for (int c = 0; c < n_cycles; ++c) {
    const auto label = ideal_label_at_rank(k, a_i);
    const long long next = ideal_rank(label, a_f);
    if (next > cap) {
      std::ostringstream msg;
      msg << "orbit index " << next << " passes the cap " << cap << " after " << c << " cycles";
      throw ClosureExceeded(msg.str(), out.orbit);
    }
    const double lam_now = ideal_value(ideal_label_at_rank(k, a_i), a_i);
    const double lam_next = ideal_value(ideal_label_at_rank(next, a_i), a_i);
    out.log_increments.push_back(std::log(lam_next / lam_now));
    k = next;
    out.orbit.push_back(k);
    if (!seen.insert(k).second) out.looped = true;
  }
  return out;
}

}  // namespace qawall
