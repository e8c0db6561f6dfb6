#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qawall/control.hpp"
#include "qawall/spectral.hpp"
#include "qawall/wavefunction.hpp"

namespace qawall {

struct ProtocolOptions {
  int n = 1023;
  double eta_star = 200.0;
  double I_star = 4e4;
  double dt_target = 1e-2;
  bool tune = true;        // measure stage errors and slow down failing stages
  int max_doublings = 4;
  double tau = 0.0;        // crossing time; 0 selects 2*delta_star/kappa
};

struct StageReport {
  std::string label;
  StageKind kind = StageKind::Wait;
  double duration = 0.0;
  double error = 0.0;  // largest phase-aligned L2 error over tracked modes
  int doublings = 0;
};

struct CrossingPlan {
  double position = 0.0;
  double delta = 0.0;
  double tau = 0.0;
  std::vector<std::pair<ModeLabel, ModeLabel>> pairs;  // (Left p, Right q) meeting here
};

struct PermutationPlan {
  double a_i = 0.0;
  double a_f = 0.0;
  int N = 0;
  int M = 0;
  std::vector<CrossingPlan> crossings;
  Permutation sigma;
  double epsilon = 0.0;
  double kappa = 0.0;
  double epsilon_stage = 0.0;  // eps' = eps / (4J + 3)
  double delta_star = 0.0;
  double eta_star = 0.0;
  double I_star = 0.0;
  std::vector<StageReport> stages;

  int J() const noexcept { return static_cast<int>(crossings.size()); }
};

struct Theorem1Result {
  ControlPath path;
  PermutationPlan plan;
};

/// Vertical ramp up, horizontal and short crossing stages, vertical ramp down.
Theorem1Result build_theorem1_path(double a_i, double a_f, int N, double epsilon, double kappa,
                                   const ProtocolOptions& options = {});

/// Interval lengths whose order the walls swap; rank 1 is the longest.
struct ArbitraryPermutationResult {
  ControlPath path;
  int M = 0;
  int J = 0;
  std::vector<double> initial_lengths;
  std::vector<double> final_lengths;
  std::vector<int> final_ranks;  // rank of interval j's length at the end
  std::vector<double> crossing_times;  // s-values where two lengths meet
  std::vector<StageReport> stages;
};

/// sigma[k-1] = sigma(k) for k = 1..N.
ArbitraryPermutationResult build_arbitrary_permutation_path(const std::vector<long long>& sigma,
                                                            int N, double epsilon, double kappa,
                                                            const ProtocolOptions& options = {});

/// Final ranks of the intervals: sigma on 1..N, then the unused ranks in
/// ascending order.
std::vector<int> interval_rank_assignment(const std::vector<long long>& sigma, int N);

/// Measures every stage by carrying the instantaneous eigenvectors of the
/// tracked ranks through it; doubles horizontal and vertical stages whose
/// error exceeds `tolerance`.
std::vector<StageReport> tune_stages(ControlPath& path, int n, const std::vector<int>& ranks,
                                     double tolerance, const ProtocolOptions& options);

// ---------------------------------------------------------------------------
// Amplitude distribution and phases

struct SuperpositionTarget {
  std::vector<double> c;       // sum c_k^2 = 1
  std::vector<complex> alpha;  // |alpha_k| = 1

  void validate() const;
  int size() const noexcept { return static_cast<int>(c.size()); }
  /// Drops trailing zero coefficients (|c_k| < 1e-12).
  SuperpositionTarget trimmed() const;
};

struct SuperpositionOptions {
  ProtocolOptions base{1023, 100.0, 300.0, 1e-2, true, 4, 0.0};
  double spread = 1.47;        // longest / shortest initial interval
  double delta = 0.05;         // crossing half-width in length units
  double max_wait = 5000.0;
  double phase_tol = 0.0;      // 0 selects epsilon / 4
  int bisection_iterations = 12;
  double amplitude_tol = 0.02;
  double tau_cap = 4000.0;
};

struct ResponsePoint {
  double tau = 0.0;
  double amplitude = 0.0;
};

struct CrossingTuning {
  int index = 0;           // crossing k moves the travelling amplitude from rank k
  double target = 0.0;     // requested |c_k| / remaining
  double tau = 0.0;
  double amplitude = 0.0;  // achieved ratio
  std::vector<ResponsePoint> response;  // sweep then bisection probes
};

struct SuperpositionResult {
  ControlPath path;
  int N = 0;
  std::vector<double> initial_lengths;
  std::vector<CrossingTuning> crossings;
  double wait_time = 0.0;
  std::vector<double> extinction_phases;
  std::vector<complex> predicted;  // expected coefficients on the sine modes
};

/// Drives `initial` (default sqrt(2) sin(pi x)) towards sum c_k alpha_k sqrt(2) sin(k pi x).
SuperpositionResult build_superposition_path(const SuperpositionTarget& target, double epsilon,
                                             double kappa, const SuperpositionOptions& options = {},
                                             const WaveFunction* initial = nullptr);

/// Wall field at the start of the superposition path for N modes.
PotentialField superposition_start_field(int N, const SuperpositionOptions& options);

struct PhaseTuningOptions {
  double max_wait = 5000.0;
  double phase_tol = 0.1;
  double dt = 0.0;  // > 0: wait in whole Crank-Nicolson steps of this size
};

/// Phase advanced per unit of waiting by an eigenmode: lambda, or the
/// Cayley phase 2 atan(lambda dt / 2) per step when dt > 0.
double mode_phase_rate(double lambda, double dt) noexcept;

/// Smallest wait t such that arg(current_k e^{-i w_k t}) is within
/// phase_tol of arg(target_k) for every mode with non-zero weight.
double tune_phases(const std::vector<complex>& current, const std::vector<double>& eigenvalues,
                   const std::vector<complex>& targets, const PhaseTuningOptions& options);
double tune_phases(const WaveFunction& state, const DiscreteHamiltonian& hamiltonian,
                   const std::vector<complex>& targets, const PhaseTuningOptions& options);

/// Sine-mode coefficients of a state.
std::vector<complex> sine_coefficients(const WaveFunction& u, int count);

/// Target from the lowest modes of u; N is the smallest count whose tail
/// mass is at most tail (relative to |u|^2).
SuperpositionTarget superposition_target_from_state(const WaveFunction& u, double tail, int cap = 8);

struct Theorem3Result {
  ControlPath path;
  SuperpositionResult reverse_part;  // built for conj(u_i), then run backwards
  SuperpositionResult forward_part;
  int walls = 0;
};

Theorem3Result build_theorem3_path(const WaveFunction& u_i, const WaveFunction& u_f, double epsilon,
                                   double kappa, const SuperpositionOptions& options = {});

// ---------------------------------------------------------------------------
// Growth of the mode index under repeated cycles

struct GrowthModel {
  double beta = 0.5;
  double gamma = 0.5;

  void validate() const;
  /// beta ln(beta/gamma) + (1-beta) ln((1-beta)/(1-gamma))
  double rate() const;
};

/// One cycle from k using the uniform variate u in [0,1): k*beta/gamma if
/// u < beta, else k*(1-beta)/(1-gamma); rounded, at least 1.
long long growth_step(const GrowthModel& model, long long k, double u);

struct GrowthTrajectory {
  std::vector<long long> k;       // visited states
  std::vector<double> increments; // ln(k_next / k) per step
  int restarts = 0;
};

/// Stochastic run; once k exceeds restart_above it is reset to k0.
GrowthTrajectory growth_trajectory(const GrowthModel& model, long long k0, int steps,
                                   std::uint64_t seed, long long restart_above = 1000000000000000LL);

/// +1 if the mode of rank k at a is on the left, -1 otherwise.
int side_indicator(long long k, double a);
/// Sum of side_indicator(1..k), via the closed-form label count.
long long side_partial_sum(long long k, double a);

struct GrowthOrbit {
  std::vector<long long> orbit;        // k_0, k_1, ...
  std::vector<double> log_increments;  // ln(lambda_{k_{n+1}} / lambda_{k_n}) at a_i
  bool looped = false;
};

/// Exact orbit of sigma_{a_i}^{a_f}. Throws ClosureExceeded (with the
/// partial orbit) once an index passes cap.
GrowthOrbit growth_exact(double a_i, double a_f, long long k0, int n_cycles,
                         long long cap = 1000000000LL);

}  // namespace qawall
