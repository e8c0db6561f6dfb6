#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "qawall/control.hpp"
#include "qawall/spectral.hpp"
#include "qawall/wavefunction.hpp"

namespace qawall {

/// Crank-Nicolson (Cayley) stepper. Keeps the diagonal of H between steps
/// and rewrites only the entries under the walls.
class CrankNicolson {
 public:
  explicit CrankNicolson(const SpatialGrid& grid);

  /// Advances every state by dt with H built from `field_mid`; the
  /// factorization is shared by all states.
  void step(std::span<WaveFunction> states, const PotentialField& field_mid, double dt);

 private:
  void load_field(const PotentialField& field);

  SpatialGrid grid_;
  double kinetic_diag_;
  double offdiag_;
  std::vector<double> diag_;
  std::vector<int> touched_;
  std::vector<double> g_re_, g_im_, w_re_, w_im_;
  std::vector<complex> rhs_;
};

WaveFunction step(const WaveFunction& psi, const PotentialField& field_mid, double dt);

/// Step size used on a stage: its fixed step if set, otherwise
/// min(dt_target, 0.05/tracked_energy), shrunk to divide the duration.
struct StageStepping {
  long long steps = 0;
  double dt = 0.0;
};
StageStepping stage_stepping(const Stage& stage, double dt_target);

/// Optional CSV dump: t, norm, E(t), |<phi_k(t), psi>| for k = 1..modes,
/// written every `every` steps using the instantaneous eigenpairs.
class TrajectoryRecorder {
 public:
  TrajectoryRecorder(std::ostream& out, int every, int modes);
  void record(double t, const WaveFunction& psi, const PotentialField& field);
  int every() const noexcept { return every_; }

 private:
  std::ostream& out_;
  int every_;
  int modes_;
};

struct PropagationOptions {
  double dt_target = 1e-2;
  TrajectoryRecorder* trajectory = nullptr;  // records the first state
};

std::vector<WaveFunction> propagate_stage(std::vector<WaveFunction> states, const Stage& stage,
                                          double dt_target);
std::vector<WaveFunction> propagate(std::vector<WaveFunction> states, const ControlPath& path,
                                    const PropagationOptions& options);
WaveFunction propagate(const WaveFunction& psi0, const ControlPath& path, double dt_target);

/// Runs the path backwards: conj, reversed path, conj. Inverts propagate.
WaveFunction propagate_backward(const WaveFunction& psi_end, const ControlPath& path,
                                double dt_target);

double fidelity(const WaveFunction& psi, const WaveFunction& phi);

/// <phi_k, psi> for every eigenvector in the basis.
std::vector<complex> mode_overlaps(const WaveFunction& psi, const SpectralDecomposition& basis);

/// <psi, H psi> / <psi, psi>
double expected_energy(const WaveFunction& psi, const DiscreteHamiltonian& hamiltonian);

}  // namespace qawall
