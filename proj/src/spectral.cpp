#include "qawall/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "qawall/errors.hpp"

namespace qawall {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

DiscreteHamiltonian::DiscreteHamiltonian(const SpatialGrid& g)
    : grid(g),
      diag(g.size(), 2.0 / (g.spacing() * g.spacing())),
      offdiag(-1.0 / (g.spacing() * g.spacing())) {}

void DiscreteHamiltonian::apply(std::span<const double> in, std::span<double> out) const {
  const int n = grid.size();
  for (int i = 0; i < n; ++i) {
    double s = diag[i] * in[i];
    if (i > 0) s += offdiag * in[i - 1];
    if (i + 1 < n) s += offdiag * in[i + 1];
    out[i] = s;
  }
}

void DiscreteHamiltonian::apply(std::span<const complex> in, std::span<complex> out) const {
  const int n = grid.size();
  for (int i = 0; i < n; ++i) {
    complex s = diag[i] * in[i];
    if (i > 0) s += offdiag * in[i - 1];
    if (i + 1 < n) s += offdiag * in[i + 1];
    out[i] = s;
  }
}

DiscreteHamiltonian free_hamiltonian(const SpatialGrid& grid) { return DiscreteHamiltonian(grid); }

DiscreteHamiltonian assemble(const PotentialField& field, const SpatialGrid& grid) {
  const auto v = potential_on_grid(field, grid);
  DiscreteHamiltonian h(grid);
  for (int i = 0; i < grid.size(); ++i) h.diag[i] += v[i];
  return h;
}

WaveFunction SpectralDecomposition::mode(int rank) const {
  require(rank >= 1 && rank <= size(), ErrorCode::InvalidArgument, "mode rank out of range");
  return WaveFunction::from_real(grid, eigenvectors[rank - 1]);
}

// ---------------------------------------------------------------------------
// Sturm bisection + inverse iteration

namespace {

double pivot_floor(const DiscreteHamiltonian& h) {
  return std::numeric_limits<double>::min() * std::max(1.0, h.offdiag * h.offdiag);
}

int sturm_count(const DiscreteHamiltonian& h, double x, double pivmin) {
  const double e2 = h.offdiag * h.offdiag;
  int count = 0;
  double q = h.diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0) ++count;
  for (std::size_t i = 1; i < h.diag.size(); ++i) {
    q = (h.diag[i] - x) - e2 / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

// Solves (T - shift) x = b in place with partial pivoting (tridiagonal LU).
// Zero pivots are replaced by `tiny` so the nearly singular shifted system
// can still be used for inverse iteration.
class ShiftedSolver {
 public:
  ShiftedSolver(const DiscreteHamiltonian& h, double shift, double tiny)
      : n_(static_cast<int>(h.diag.size())), d_(n_), du_(n_, 0.0), du2_(n_, 0.0), dl_(n_, 0.0),
        swap_(n_, false) {
    for (int i = 0; i < n_; ++i) d_[i] = h.diag[i] - shift;
    for (int i = 0; i + 1 < n_; ++i) {
      du_[i] = h.offdiag;
      dl_[i] = h.offdiag;
    }
    for (int i = 0; i + 1 < n_; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (std::abs(d_[i]) < tiny) d_[i] = tiny;
        const double f = dl_[i] / d_[i];
        dl_[i] = f;
        d_[i + 1] -= f * du_[i];
      } else {
        const double f = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = f;
        const double t = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = t - f * du_[i];
        if (i + 2 < n_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -f * du2_[i];
        }
        swap_[i] = true;
      }
    }
    if (std::abs(d_[n_ - 1]) < tiny) d_[n_ - 1] = tiny;
  }

  void solve(std::vector<double>& b) const {
    for (int i = 0; i + 1 < n_; ++i) {
      if (swap_[i]) {
        const double t = b[i];
        b[i] = b[i + 1];
        b[i + 1] = t - dl_[i] * b[i];
      } else {
        b[i + 1] -= dl_[i] * b[i];
      }
    }
    b[n_ - 1] /= d_[n_ - 1];
    if (n_ > 1) b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
    for (int i = n_ - 3; i >= 0; --i) b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
  }

 private:
  int n_;
  std::vector<double> d_, du_, du2_, dl_;
  std::vector<bool> swap_;
};

double weighted_dot(const std::vector<double>& a, const std::vector<double>& b, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return h * s;
}

void fix_sign(std::vector<double>& v) {
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  for (double x : v) {
    if (std::abs(x) > 1e-3 * vmax) {
      if (x < 0) for (double& y : v) y = -y;
      return;
    }
  }
}

double bisect_rank(const DiscreteHamiltonian& h, int k, double lo, double hi, double pivmin) {
  // invariant: count(lo) < k <= count(hi)
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
    if (sturm_count(h, mid, pivmin) >= k) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

int count_below(const DiscreteHamiltonian& hamiltonian, double x) {
  return sturm_count(hamiltonian, x, pivot_floor(hamiltonian));
}

std::vector<double> eigenvalues_in_range(const DiscreteHamiltonian& h, int first, int last) {
  const int n = h.grid.size();
  require(first >= 1 && first <= last && last <= n, ErrorCode::InvalidArgument,
          "eigenvalue rank range is invalid");
  const double pivmin = pivot_floor(h);
  const double radius = 2.0 * std::abs(h.offdiag);
  double lo = *std::min_element(h.diag.begin(), h.diag.end()) - radius;
  double gersh_hi = *std::max_element(h.diag.begin(), h.diag.end()) + radius;
  lo -= 1e-12 * std::max(1.0, std::abs(lo));
  gersh_hi += 1e-12 * std::max(1.0, std::abs(gersh_hi));

  // Cheap upper bracket for the `last` eigenvalue: grow from below.
  double hi = lo + 1.0;
  double step = 1.0;
  while (sturm_count(h, hi, pivmin) < last && hi < gersh_hi) {
    step *= 2.0;
    hi = std::min(lo + step, gersh_hi);
  }

  std::vector<double> values;
  values.reserve(last - first + 1);
  double floor_lo = lo;
  for (int k = first; k <= last; ++k) {
    const double lam = bisect_rank(h, k, floor_lo, hi, pivmin);
    values.push_back(lam);
    // the next eigenvalue is >= this one; keep count(floor) < k+1
    double next_lo = lam - 4.0 * kEps * std::max(1.0, std::abs(lam));
    if (sturm_count(h, next_lo, pivmin) < k + 1) floor_lo = std::max(floor_lo, next_lo);
  }
  return values;
}

SpectralDecomposition lowest_eigenpairs(const DiscreteHamiltonian& h, int m) {
  const int n = h.grid.size();
  require(m >= 1 && m <= n / 4, ErrorCode::InvalidArgument,
          "requested eigenpair count must satisfy 1 <= m <= n/4");
  const double hstep = h.grid.spacing();
  const double pivmin = pivot_floor(h);

  SpectralDecomposition out{h.grid, eigenvalues_in_range(h, 1, m), {}};
  out.eigenvectors.reserve(m);

  double norm_t = 0.0;
  for (int i = 0; i < n; ++i) norm_t = std::max(norm_t, std::abs(h.diag[i]) + 2.0 * std::abs(h.offdiag));
  const double tiny = std::max(kEps * norm_t, pivmin);

  std::vector<double> residual(n);
  for (int k = 0; k < m; ++k) {
    const double lam = out.eigenvalues[k];
    const ShiftedSolver solver(h, lam, tiny);

    std::vector<double> v(n);
    // deterministic start vector with components in every mode
    for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(0.7 * (i + 1) * (k + 3)) ;

    bool converged = false;
    double res_norm = 0.0;
    for (int it = 0; it < 8 && !converged; ++it) {
      solver.solve(v);
      for (int j = 0; j < k; ++j) {
        const double c = weighted_dot(out.eigenvectors[j], v, hstep);
        for (int i = 0; i < n; ++i) v[i] -= c * out.eigenvectors[j][i];
      }
      const double nv = std::sqrt(weighted_dot(v, v, hstep));
      if (!(nv > 0.0) || !std::isfinite(nv))
        throw Error(ErrorCode::ConvergenceFailure, "inverse iteration produced a null vector");
      for (double& x : v) x /= nv;
      h.apply(v, residual);
      for (int i = 0; i < n; ++i) residual[i] -= lam * v[i];
      res_norm = std::sqrt(weighted_dot(residual, residual, hstep));
      converged = it >= 1 && res_norm <= 1e-8 * std::max(std::abs(lam), 1.0);
    }
    if (!converged) {
      std::ostringstream msg;
      msg << "eigenpair " << k + 1 << " residual " << res_norm << " above target";
      throw Error(ErrorCode::ConvergenceFailure, msg.str());
    }
    fix_sign(v);
    out.eigenvectors.push_back(std::move(v));
  }

  const double gap_floor = 1e-9 * std::abs(out.eigenvalues.back());
  for (int k = 1; k < m; ++k) {
    if (!(out.eigenvalues[k] - out.eigenvalues[k - 1] > gap_floor)) {
      std::ostringstream msg;
      msg << "eigenvalues " << k << " and " << k + 1 << " are not separated ("
          << out.eigenvalues[k] - out.eigenvalues[k - 1] << ")";
      throw Error(ErrorCode::ConvergenceFailure, msg.str());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Split-interval spectrum

std::string to_string(const ModeLabel& label) {
  return (label.side == Side::Left ? "L" : "R") + std::to_string(label.index);
}

double ideal_value(const ModeLabel& label, double a) {
  const double len = label.side == Side::Left ? a : 1.0 - a;
  const double p = label.index;
  return p * p * kPi * kPi / (len * len);
}

namespace {

void check_position(double a) {
  require(a > 0.0 && a < 1.0, ErrorCode::InvalidArgument, "split position must lie in (0,1)");
}

// Number of positive integers strictly below x.
long long count_strictly_below(double x) {
  if (x <= 1.0) return 0;
  return static_cast<long long>(std::ceil(x)) - 1;
}

std::vector<IdealEntry> merged_entries(double a, int count) {
  std::vector<IdealEntry> e;
  e.reserve(2 * count);
  for (int p = 1; p <= count; ++p) e.push_back({ideal_value({Side::Left, p}, a), {Side::Left, p}});
  for (int q = 1; q <= count; ++q) e.push_back({ideal_value({Side::Right, q}, a), {Side::Right, q}});
  std::sort(e.begin(), e.end(), [](const IdealEntry& x, const IdealEntry& y) {
    if (x.value != y.value) return x.value < y.value;
    return x.label < y.label;
  });
  e.resize(count);
  return e;
}

}  // namespace

void check_noncrossing(double a, int depth) {
  check_position(a);
  const auto entries = merged_entries(a, depth + 1);
  int p_max = 0, q_max = 0;
  for (const auto& e : entries) {
    if (e.label.side == Side::Left) p_max = std::max(p_max, e.label.index);
    else q_max = std::max(q_max, e.label.index);
  }
  for (int p = 1; p <= p_max + 1; ++p) {
    for (int q = 1; q <= q_max + 1; ++q) {
      const double star = static_cast<double>(p) / (p + q);
      if (std::abs(a - star) < kCrossingTolerance) {
        std::ostringstream msg;
        msg << "split position " << a << " is within " << kCrossingTolerance
            << " of the crossing " << p << "/" << p + q << " (L" << p << ", R" << q << ")";
        throw Error(ErrorCode::DegenerateSplit, msg.str());
      }
    }
  }
}

IdealSpectrum ideal_spectrum(double a, int count) {
  require(count >= 1, ErrorCode::InvalidArgument, "ideal spectrum needs count >= 1");
  check_noncrossing(a, count);
  return {a, merged_entries(a, count)};
}

long long ideal_rank(const ModeLabel& label, double a) {
  check_position(a);
  const double k = label.index;
  if (label.side == Side::Left) return label.index + count_strictly_below(k * (1.0 - a) / a);
  return label.index + count_strictly_below(k * a / (1.0 - a));
}

ModeLabel ideal_label_at_rank(long long k, double a) {
  check_position(a);
  require(k >= 1, ErrorCode::InvalidArgument, "rank must be positive");
  // rank(L p) ~ p/a and rank(R q) ~ q/(1-a); search a small window.
  const auto p0 = static_cast<long long>(std::floor(k * a));
  const auto q0 = static_cast<long long>(std::floor(k * (1.0 - a)));
  for (long long p = std::max(1LL, p0 - 2); p <= p0 + 2; ++p) {
    const ModeLabel l{Side::Left, static_cast<int>(p)};
    if (ideal_rank(l, a) == k) return l;
  }
  for (long long q = std::max(1LL, q0 - 2); q <= q0 + 2; ++q) {
    const ModeLabel r{Side::Right, static_cast<int>(q)};
    if (ideal_rank(r, a) == k) return r;
  }
  std::ostringstream msg;
  msg << "no label of rank " << k << " at a = " << a << " (position too close to a crossing)";
  throw Error(ErrorCode::DegenerateSplit, msg.str());
}

WaveFunction ideal_eigenfunction(const ModeLabel& label, double a, const SpatialGrid& grid) {
  check_position(a);
  require(label.index >= 1, ErrorCode::InvalidArgument, "mode index must be positive");
  const double p = label.index;
  WaveFunction psi(grid);
  for (int i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    if (label.side == Side::Left) {
      if (x < a) psi[i] = std::sqrt(2.0 / a) * std::sin(p * kPi * x / a);
    } else if (x > a) {
      psi[i] = std::sqrt(2.0 / (1.0 - a)) * std::sin(p * kPi * (1.0 - x) / (1.0 - a));
    }
  }
  return psi.normalized();
}

CrossingSet tracked_crossings(double from, double to, int tracked) {
  require(tracked >= 1, ErrorCode::InvalidArgument, "tracked count must be positive");
  const auto start = ideal_spectrum(from, tracked);
  check_position(to);
  const double lo = std::min(from, to);
  const double hi = std::max(from, to);

  std::set<std::pair<int, int>> pairs;
  std::set<ModeLabel> involved;
  for (const auto& e : start.entries) {
    involved.insert(e.label);
    const double k = e.label.index;
    if (e.label.side == Side::Left) {
      // p/(p+q) in (lo,hi)  <=>  p(1-hi)/hi < q < p(1-lo)/lo
      const double qmin = k * (1.0 - hi) / hi;
      const double qmax = k * (1.0 - lo) / lo;
      for (long long q = static_cast<long long>(std::floor(qmin)) + 1; q < qmax; ++q) {
        if (q < 1) continue;
        pairs.insert({e.label.index, static_cast<int>(q)});
      }
    } else {
      const double pmin = k * lo / (1.0 - lo);
      const double pmax = k * hi / (1.0 - hi);
      for (long long p = static_cast<long long>(std::floor(pmin)) + 1; p < pmax; ++p) {
        if (p < 1) continue;
        pairs.insert({static_cast<int>(p), e.label.index});
      }
    }
  }

  CrossingSet out;
  for (const auto& [p, q] : pairs) {
    const double star = static_cast<double>(p) / (p + q);
    if (!(star > lo && star < hi)) continue;
    out.crossings.push_back({star, {Side::Left, p}, {Side::Right, q}});
    involved.insert({Side::Left, p});
    involved.insert({Side::Right, q});
  }
  const bool ascending = to >= from;
  std::sort(out.crossings.begin(), out.crossings.end(), [ascending](const Crossing& x, const Crossing& y) {
    if (x.position != y.position) return ascending ? x.position < y.position : x.position > y.position;
    return x.left.index < y.left.index;
  });

  // Left ranks decrease with a and right ranks increase, so each label
  // reaches its highest rank at one end of the range.
  long long closure = tracked;
  for (const auto& l : involved) {
    const double at = l.side == Side::Left ? lo : hi;
    closure = std::max(closure, ideal_rank(l, at));
  }
  if (closure > 64) {
    std::ostringstream msg;
    msg << "tracked-mode closure " << closure << " exceeds the cap of 64";
    throw ClosureExceeded(msg.str());
  }
  out.closure = static_cast<int>(closure);
  return out;
}

std::vector<Crossing> crossing_points(double a_lo, double a_hi, int tracked) {
  require(a_lo < a_hi, ErrorCode::InvalidArgument, "crossing range must satisfy a_lo < a_hi");
  check_noncrossing(a_hi, tracked);
  return tracked_crossings(a_lo, a_hi, tracked).crossings;
}

Permutation quasi_adiabatic_permutation(double a_i, double a_f, int tracked) {
  const auto set = tracked_crossings(a_i, a_f, tracked);
  check_noncrossing(a_f, set.closure);
  const auto start = ideal_spectrum(a_i, tracked);
  Permutation sigma;
  sigma.closure = set.closure;
  for (const auto& e : start.entries) sigma.image.push_back(ideal_rank(e.label, a_f));
  return sigma;
}

Permutation permutation_by_crossings(double a_i, double a_f, int tracked) {
  const auto set = tracked_crossings(a_i, a_f, tracked);
  check_noncrossing(a_f, set.closure);
  const auto start = ideal_spectrum(a_i, tracked);
  const bool rightwards = a_f > a_i;
  Permutation sigma;
  sigma.closure = set.closure;
  for (int k = 0; k < tracked; ++k) {
    const ModeLabel label = start.entries[k].label;
    long long rank = k + 1;
    for (const auto& c : set.crossings) {
      // Moving right, the right-hand mode overtakes the left-hand one.
      if (c.right == label) rank += rightwards ? 1 : -1;
      else if (c.left == label) rank += rightwards ? -1 : 1;
    }
    sigma.image.push_back(rank);
  }
  return sigma;
}

}  // namespace qawall
