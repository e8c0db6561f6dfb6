#pragma once

#include <span>
#include <vector>

namespace qawall {

/// Uniform grid of interior points on (0,1). Dirichlet endpoints are not
/// stored: x_i = (i+1)*h for storage index i = 0..n-1.
class SpatialGrid {
 public:
  explicit SpatialGrid(int n);

  int size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double x(int i) const noexcept { return (i + 1) * h_; }

  // Storage indices whose points lie in the closed interval [lo, hi].
  int first_index_at_or_above(double lo) const noexcept;
  int last_index_at_or_below(double hi) const noexcept;

  friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

 private:
  int n_;
  double h_;
};

/// C^2 bump (35/32)(1-s^2)^3 on [-1,1], unit mass.
double rho(double s) noexcept;

/// Rescaled bump eta*rho(eta*x); unit mass for every eta > 0.
double rho_eta(double x, double eta);

/// One potential wall I*rho^eta(x-a).
struct WallState {
  double height = 0.0;     // I
  double sharpness = 1.0;  // eta
  double position = 0.5;   // a

  double half_width() const noexcept { return 1.0 / sharpness; }
  void validate() const;

  friend bool operator==(const WallState&, const WallState&) = default;
};

struct PotentialField {
  std::vector<WallState> walls;

  void validate() const;
  double max_sharpness() const noexcept;
};

/// Throws UnderResolved unless h <= 1/(8*max eta).
void check_resolution(const PotentialField& field, const SpatialGrid& grid);

std::vector<double> potential_on_grid(const PotentialField& field, const SpatialGrid& grid);

/// Adds the field into `out` (size n) touching only points inside wall
/// supports. Used by the propagator hot loop; performs no validation.
void accumulate_potential(const PotentialField& field, const SpatialGrid& grid,
                          std::span<double> out) noexcept;

}  // namespace qawall
