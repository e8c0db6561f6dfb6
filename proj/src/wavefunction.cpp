#include "qawall/wavefunction.hpp"

#include <cmath>
#include <numbers>

#include "qawall/errors.hpp"

namespace qawall {

WaveFunction::WaveFunction(const SpatialGrid& grid, std::vector<complex> values)
    : grid_(grid), values_(std::move(values)) {
  require(static_cast<int>(values_.size()) == grid_.size(), ErrorCode::InvalidArgument,
          "wave function length does not match grid");
  for (const auto& v : values_)
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorCode::InvalidArgument,
            "wave function has non-finite entries");
}

WaveFunction WaveFunction::from_real(const SpatialGrid& grid, std::span<const double> values) {
  require(static_cast<int>(values.size()) == grid.size(), ErrorCode::InvalidArgument,
          "wave function length does not match grid");
  WaveFunction psi(grid);
  for (int i = 0; i < grid.size(); ++i) psi[i] = values[i];
  return psi;
}

WaveFunction WaveFunction::sample(const SpatialGrid& grid,
                                  const std::function<complex(double)>& f) {
  WaveFunction psi(grid);
  for (int i = 0; i < grid.size(); ++i) psi[i] = f(grid.x(i));
  return psi;
}

WaveFunction WaveFunction::sine_mode(const SpatialGrid& grid, int k) {
  require(k >= 1, ErrorCode::InvalidArgument, "mode index must be positive");
  // The sampled sine is an exact eigenvector of the free discrete Laplacian
  // and has h-weighted norm exactly 1.
  return sample(grid, [k](double x) { return complex(std::sqrt(2.0) * std::sin(k * std::numbers::pi * x)); });
}

double WaveFunction::norm() const noexcept {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(grid_.spacing() * s);
}

WaveFunction WaveFunction::normalized() const {
  const double n = norm();
  require(n >= 1e-14, ErrorCode::ZeroNorm, "cannot normalize a zero wave function");
  WaveFunction out(*this);
  out *= 1.0 / n;
  return out;
}

WaveFunction WaveFunction::conjugated() const {
  WaveFunction out(*this);
  for (auto& v : out.values_) v = std::conj(v);
  return out;
}

WaveFunction& WaveFunction::operator+=(const WaveFunction& other) {
  require(grid_ == other.grid_, ErrorCode::InvalidArgument, "grid mismatch");
  for (int i = 0; i < size(); ++i) values_[i] += other.values_[i];
  return *this;
}

WaveFunction& WaveFunction::operator-=(const WaveFunction& other) {
  require(grid_ == other.grid_, ErrorCode::InvalidArgument, "grid mismatch");
  for (int i = 0; i < size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

WaveFunction& WaveFunction::operator*=(complex c) noexcept {
  for (auto& v : values_) v *= c;
  return *this;
}

WaveFunction operator+(WaveFunction a, const WaveFunction& b) { return a += b; }
WaveFunction operator-(WaveFunction a, const WaveFunction& b) { return a -= b; }
WaveFunction operator*(complex c, WaveFunction a) { return a *= c; }

complex inner(const WaveFunction& a, const WaveFunction& b) {
  require(a.grid() == b.grid(), ErrorCode::InvalidArgument, "grid mismatch");
  complex s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return a.grid().spacing() * s;
}

complex inner(std::span<const double> a, const WaveFunction& b, double h) {
  complex s = 0.0;
  for (int i = 0; i < b.size(); ++i) s += a[i] * b[i];
  return h * s;
}

double phase_aligned_distance(const WaveFunction& a, const WaveFunction& b) {
  const double na = a.norm();
  const double nb = b.norm();
  const double d2 = na * na + nb * nb - 2.0 * std::abs(inner(a, b));
  return std::sqrt(std::max(d2, 0.0));
}

}  // namespace qawall
