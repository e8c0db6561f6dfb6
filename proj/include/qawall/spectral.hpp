#pragma once

#include <span>
#include <string>
#include <vector>

#include "qawall/field.hpp"
#include "qawall/wavefunction.hpp"

namespace qawall {

/// Symmetric tridiagonal finite-difference operator -d^2/dx^2 + V with
/// Dirichlet conditions imposed by truncation.
struct DiscreteHamiltonian {
  SpatialGrid grid;
  std::vector<double> diag;  // 2/h^2 + V_i
  double offdiag;            // -1/h^2

  explicit DiscreteHamiltonian(const SpatialGrid& g);

  /// out = H * in
  void apply(std::span<const double> in, std::span<double> out) const;
  void apply(std::span<const complex> in, std::span<complex> out) const;
};

DiscreteHamiltonian assemble(const PotentialField& field, const SpatialGrid& grid);
DiscreteHamiltonian free_hamiltonian(const SpatialGrid& grid);

struct SpectralDecomposition {
  SpatialGrid grid;
  std::vector<double> eigenvalues;                // ascending
  std::vector<std::vector<double>> eigenvectors;  // h-weighted orthonormal

  int size() const noexcept { return static_cast<int>(eigenvalues.size()); }
  WaveFunction mode(int rank) const;  // rank is 1-based
};

/// The m lowest eigenpairs by Sturm-sequence bisection and inverse
/// iteration. Each eigenvector is signed so that its first component above
/// 1e-3 of its max modulus is positive.
SpectralDecomposition lowest_eigenpairs(const DiscreteHamiltonian& hamiltonian, int m);

/// Number of eigenvalues strictly below x (Sturm count).
int count_below(const DiscreteHamiltonian& hamiltonian, double x);

/// Eigenvalues with 1-based ranks in [first, last] by bisection only.
std::vector<double> eigenvalues_in_range(const DiscreteHamiltonian& hamiltonian, int first,
                                         int last);

// ---------------------------------------------------------------------------
// Split-interval (infinitely high wall) spectrum.

enum class Side { Left, Right };

struct ModeLabel {
  Side side = Side::Left;
  int index = 1;

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
  friend auto operator<=>(const ModeLabel&, const ModeLabel&) = default;
};

std::string to_string(const ModeLabel& label);

inline constexpr double kCrossingTolerance = 1e-6;

/// p^2 pi^2 / a^2 (left) or q^2 pi^2 / (1-a)^2 (right).
double ideal_value(const ModeLabel& label, double a);

struct IdealEntry {
  double value;
  ModeLabel label;
};

struct IdealSpectrum {
  double a;
  std::vector<IdealEntry> entries;  // strictly ascending
};

/// Lowest `count` eigenvalues of the split-interval Laplacian, labelled.
/// Throws DegenerateSplit if a sits within kCrossingTolerance of a crossing
/// among the returned entries.
IdealSpectrum ideal_spectrum(double a, int count);

/// 1-based rank of `label` in the ideal ordering at a. Closed-form count;
/// ties are broken as if a were perturbed towards the interior of neither
/// side, so callers must keep a off crossings.
long long ideal_rank(const ModeLabel& label, double a);

/// Label of the 1-based rank k at a (closed-form search, works for large k).
ModeLabel ideal_label_at_rank(long long k, double a);

/// Samples the ideal eigenfunction sqrt(2/a) sin(p pi x / a) on [0,a], or
/// its right-hand analogue, and renormalizes on the grid.
WaveFunction ideal_eigenfunction(const ModeLabel& label, double a, const SpatialGrid& grid);

struct Crossing {
  double position;  // p/(p+q)
  ModeLabel left;   // (Left, p)
  ModeLabel right;  // (Right, q)
};

struct CrossingSet {
  std::vector<Crossing> crossings;  // in traversal order from `from` to `to`
  int closure = 0;                  // M: ranks reached by every curve involved
};

/// Crossings met by the curves of the `tracked` lowest modes at `from` while
/// the split point moves to `to` (either direction).
CrossingSet tracked_crossings(double from, double to, int tracked);

/// Ascending crossings in (a_lo, a_hi) for the tracked lowest modes at a_lo.
std::vector<Crossing> crossing_points(double a_lo, double a_hi, int tracked);

struct Permutation {
  std::vector<long long> image;  // image[k-1] = sigma(k)
  int closure = 0;               // M

  long long operator()(long long k) const { return image.at(k - 1); }
};

/// sigma_{a_i}^{a_f}(k) for k <= tracked by comparing label ranks at the
/// two endpoints.
Permutation quasi_adiabatic_permutation(double a_i, double a_f, int tracked);

/// The same permutation assembled by composing one adjacent transposition
/// per crossing met along the way; independent of the ordering at a_f.
Permutation permutation_by_crossings(double a_i, double a_f, int tracked);

/// Throws DegenerateSplit unless a is at least kCrossingTolerance away from
/// every crossing p/(p+q) among labels with ranks up to `depth`.
void check_noncrossing(double a, int depth);

}  // namespace qawall
