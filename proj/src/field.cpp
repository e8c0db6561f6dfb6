#include "qawall/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qawall/errors.hpp"

namespace qawall {

SpatialGrid::SpatialGrid(int n) : n_(n), h_(1.0 / (n + 1)) {
  require(n >= 16, ErrorCode::InvalidArgument, "grid needs at least 16 interior points");
}

int SpatialGrid::first_index_at_or_above(double lo) const noexcept {
  const int i = static_cast<int>(std::ceil(lo / h_ - 1e-9)) - 1;
  return std::clamp(i, 0, n_);
}

int SpatialGrid::last_index_at_or_below(double hi) const noexcept {
  const int i = static_cast<int>(std::floor(hi / h_ + 1e-9)) - 1;
  return std::clamp(i, -1, n_ - 1);
}

double rho(double s) noexcept {
  if (std::abs(s) > 1.0) return 0.0;
  const double u = 1.0 - s * s;
  return (35.0 / 32.0) * u * u * u;
}

double rho_eta(double x, double eta) {
  require(eta > 0.0, ErrorCode::InvalidArgument, "sharpness must be positive");
  return eta * rho(eta * x);
}

void WallState::validate() const {
  std::ostringstream msg;
  if (!(height >= 0.0)) msg << "wall height " << height << " is negative";
  else if (!(sharpness > 0.0)) msg << "wall sharpness " << sharpness << " is not positive";
  else if (!(position - half_width() > 0.0 && position + half_width() < 1.0))
    msg << "wall support [" << position - half_width() << ", " << position + half_width()
        << "] leaves (0,1)";
  else return;
  throw Error(ErrorCode::InvalidArgument, msg.str());
}

void PotentialField::validate() const {
  require(!walls.empty(), ErrorCode::InvalidArgument, "potential field has no walls");
  for (const auto& w : walls) w.validate();
}

double PotentialField::max_sharpness() const noexcept {
  double m = 0.0;
  for (const auto& w : walls) m = std::max(m, w.sharpness);
  return m;
}

void check_resolution(const PotentialField& field, const SpatialGrid& grid) {
  const double eta = field.max_sharpness();
  if (grid.spacing() > 1.0 / (8.0 * eta) * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "spacing " << grid.spacing() << " exceeds 1/(8*eta) = " << 1.0 / (8.0 * eta)
        << " for eta = " << eta;
    throw Error(ErrorCode::UnderResolved, msg.str());
  }
}

void accumulate_potential(const PotentialField& field, const SpatialGrid& grid,
                          std::span<double> out) noexcept {
  for (const auto& w : field.walls) {
    if (w.height == 0.0) continue;
    const double eta = w.sharpness;
    const double scale = w.height * eta;
    const int lo = grid.first_index_at_or_above(w.position - 1.0 / eta);
    const int hi = grid.last_index_at_or_below(w.position + 1.0 / eta);
    for (int i = lo; i <= hi; ++i) out[i] += scale * rho(eta * (grid.x(i) - w.position));
  }
}

std::vector<double> potential_on_grid(const PotentialField& field, const SpatialGrid& grid) {
  field.validate();
  check_resolution(field, grid);
  std::vector<double> v(grid.size(), 0.0);
  accumulate_potential(field, grid, v);
  return v;
}

}  // namespace qawall
