#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "qawall/field.hpp"

namespace qawall {

using complex = std::complex<double>;

/// Complex grid function with the h-weighted discrete L2 geometry.
class WaveFunction {
 public:
  explicit WaveFunction(const SpatialGrid& grid) : grid_(grid), values_(grid.size()) {}
  WaveFunction(const SpatialGrid& grid, std::vector<complex> values);

  static WaveFunction from_real(const SpatialGrid& grid, std::span<const double> values);
  static WaveFunction sample(const SpatialGrid& grid, const std::function<complex(double)>& f);

  /// sqrt(2)*sin(k*pi*x): the unit-norm Dirichlet mode k on (0,1).
  static WaveFunction sine_mode(const SpatialGrid& grid, int k);

  const SpatialGrid& grid() const noexcept { return grid_; }
  int size() const noexcept { return grid_.size(); }
  std::span<complex> values() noexcept { return values_; }
  std::span<const complex> values() const noexcept { return values_; }
  complex& operator[](int i) noexcept { return values_[i]; }
  const complex& operator[](int i) const noexcept { return values_[i]; }

  double norm() const noexcept;
  WaveFunction normalized() const;
  WaveFunction conjugated() const;

  WaveFunction& operator+=(const WaveFunction& other);
  WaveFunction& operator-=(const WaveFunction& other);
  WaveFunction& operator*=(complex c) noexcept;

 private:
  SpatialGrid grid_;
  std::vector<complex> values_;
};

WaveFunction operator+(WaveFunction a, const WaveFunction& b);
WaveFunction operator-(WaveFunction a, const WaveFunction& b);
WaveFunction operator*(complex c, WaveFunction a);

/// h * sum conj(a_i) b_i
complex inner(const WaveFunction& a, const WaveFunction& b);
complex inner(std::span<const double> a, const WaveFunction& b, double h);

/// L2 distance after removing the best global phase: min_|alpha|=1 ||a - alpha b||.
double phase_aligned_distance(const WaveFunction& a, const WaveFunction& b);

}  // namespace qawall
