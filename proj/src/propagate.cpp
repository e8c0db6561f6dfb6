#include "qawall/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

#include "qawall/errors.hpp"

namespace qawall {

CrankNicolson::CrankNicolson(const SpatialGrid& grid)
    : grid_(grid),
      kinetic_diag_(2.0 / (grid.spacing() * grid.spacing())),
      offdiag_(-1.0 / (grid.spacing() * grid.spacing())),
      diag_(grid.size(), kinetic_diag_),
      g_re_(grid.size()),
      g_im_(grid.size()),
      w_re_(grid.size()),
      w_im_(grid.size()),
      rhs_(grid.size()) {}

void CrankNicolson::load_field(const PotentialField& field) {
  for (int i : touched_) diag_[i] = kinetic_diag_;
  touched_.clear();
  for (const auto& w : field.walls) {
    if (w.height == 0.0) continue;
    const int lo = grid_.first_index_at_or_above(w.position - 1.0 / w.sharpness);
    const int hi = grid_.last_index_at_or_below(w.position + 1.0 / w.sharpness);
    for (int i = lo; i <= hi; ++i) touched_.push_back(i);
  }
  accumulate_potential(field, grid_, diag_);
}

void CrankNicolson::step(std::span<WaveFunction> states, const PotentialField& field_mid, double dt) {
  require(dt > 0.0, ErrorCode::InvalidArgument, "time step must be positive");
  for (const auto& s : states)
    require(s.grid() == grid_, ErrorCode::InvalidArgument, "state grid does not match stepper");
  load_field(field_mid);

  const int n = grid_.size();
  const double beta = 0.5 * dt;
  const double e = offdiag_;
  const double be = beta * e;  // off-diagonal of A is i*be
  const double be2 = be * be;

  // A = 1 + i beta H = tridiag(i be, 1 + i beta d, i be). Thomas elimination:
  // w_i = a_i + be^2 / w_{i-1}; store 1/w_i and g_i = i be / w_i.
  double wr = 1.0, wi = beta * diag_[0];
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      // be^2 / w_{i-1} = be^2 * conj(w)/|w|^2 using stored inverse
      wr = 1.0 + be2 * w_re_[i - 1];
      wi = beta * diag_[i] + be2 * w_im_[i - 1];
    }
    const double m = wr * wr + wi * wi;
    if (!(m > 0.0) || !std::isfinite(m))
      throw Error(ErrorCode::LinearSolveFailure, "tridiagonal elimination broke down");
    w_re_[i] = wr / m;  // 1/w
    w_im_[i] = -wi / m;
    // g = i be * (1/w)
    g_re_[i] = -be * w_im_[i];
    g_im_[i] = be * w_re_[i];
  }

  for (auto& state : states) {
    auto psi = state.values();
    // rhs = (1 - i beta H) psi
    for (int i = 0; i < n; ++i) {
      double hr = diag_[i] * psi[i].real();
      double hi = diag_[i] * psi[i].imag();
      if (i > 0) {
        hr += e * psi[i - 1].real();
        hi += e * psi[i - 1].imag();
      }
      if (i + 1 < n) {
        hr += e * psi[i + 1].real();
        hi += e * psi[i + 1].imag();
      }
      rhs_[i] = complex(psi[i].real() + beta * hi, psi[i].imag() - beta * hr);
    }
    // forward: y_i = (r_i - i be y_{i-1}) / w_i
    double yr = 0.0, yi = 0.0;
    for (int i = 0; i < n; ++i) {
      const double rr = rhs_[i].real() + be * yi;
      const double ri = rhs_[i].imag() - be * yr;
      yr = rr * w_re_[i] - ri * w_im_[i];
      yi = rr * w_im_[i] + ri * w_re_[i];
      rhs_[i] = complex(yr, yi);
    }
    // back: x_i = y_i - g_i x_{i+1}
    double xr = rhs_[n - 1].real(), xi = rhs_[n - 1].imag();
    psi[n - 1] = complex(xr, xi);
    for (int i = n - 2; i >= 0; --i) {
      const double nr = rhs_[i].real() - (g_re_[i] * xr - g_im_[i] * xi);
      const double ni = rhs_[i].imag() - (g_re_[i] * xi + g_im_[i] * xr);
      xr = nr;
      xi = ni;
      psi[i] = complex(xr, xi);
    }
  }
}

WaveFunction step(const WaveFunction& psi, const PotentialField& field_mid, double dt) {
  field_mid.validate();
  check_resolution(field_mid, psi.grid());
  CrankNicolson cn(psi.grid());
  std::vector<WaveFunction> states{psi};
  cn.step(states, field_mid, dt);
  return states.front();
}

StageStepping stage_stepping(const Stage& stage, double dt_target) {
  require(dt_target > 0.0, ErrorCode::InvalidArgument, "dt_target must be positive");
  if (stage.duration <= 0.0) return {0, 0.0};
  if (stage.fixed_dt > 0.0) {
    const auto steps = std::max(1LL, std::llround(stage.duration / stage.fixed_dt));
    return {steps, stage.duration / static_cast<double>(steps)};
  }
  double dt = dt_target;
  if (stage.tracked_energy > 0.0) dt = std::min(dt, 0.05 / stage.tracked_energy);
  const auto steps = std::max(1LL, static_cast<long long>(std::ceil(stage.duration / dt - 1e-9)));
  return {steps, stage.duration / static_cast<double>(steps)};
}

TrajectoryRecorder::TrajectoryRecorder(std::ostream& out, int every, int modes)
    : out_(out), every_(every), modes_(modes) {
  require(every >= 1 && modes >= 0, ErrorCode::InvalidArgument, "invalid trajectory settings");
  out_ << "t,norm,energy";
  for (int k = 1; k <= modes_; ++k) out_ << ",overlap_" << k;
  out_ << '\n';
}

void TrajectoryRecorder::record(double t, const WaveFunction& psi, const PotentialField& field) {
  const auto h = assemble(field, psi.grid());
  out_ << std::setprecision(12) << t << ',' << psi.norm() << ',' << expected_energy(psi, h);
  if (modes_ > 0) {
    try {
      const auto basis = lowest_eigenpairs(h, modes_);
      for (const auto& c : mode_overlaps(psi, basis)) out_ << ',' << std::abs(c);
    } catch (const Error&) {
      for (int k = 0; k < modes_; ++k) out_ << ",nan";
    }
  }
  out_ << '\n';
}

namespace {

void check_stage(const Stage& stage, const SpatialGrid& grid) {
  const auto a = stage.start_field();
  const auto b = stage.end_field();
  a.validate();
  b.validate();
  check_resolution(a, grid);
  check_resolution(b, grid);
}

void run_stage(std::vector<WaveFunction>& states, const Stage& stage, double dt_target,
               CrankNicolson& cn, TrajectoryRecorder* trajectory, double t0, long long& counter) {
  const auto plan = stage_stepping(stage, dt_target);
  for (long long k = 0; k < plan.steps; ++k) {
    const double mid = (static_cast<double>(k) + 0.5) * plan.dt;
    cn.step(states, stage.field_at(mid), plan.dt);
    ++counter;
    if (trajectory && counter % trajectory->every() == 0) {
      const double t = (static_cast<double>(k) + 1.0) * plan.dt;
      trajectory->record(t0 + t, states.front(), stage.field_at(t));
    }
  }
}

}  // namespace

std::vector<WaveFunction> propagate_stage(std::vector<WaveFunction> states, const Stage& stage,
                                          double dt_target) {
  if (states.empty() || stage.duration <= 0.0) return states;
  check_stage(stage, states.front().grid());
  CrankNicolson cn(states.front().grid());
  long long counter = 0;
  run_stage(states, stage, dt_target, cn, nullptr, 0.0, counter);
  return states;
}

std::vector<WaveFunction> propagate(std::vector<WaveFunction> states, const ControlPath& path,
                                    const PropagationOptions& options) {
  if (states.empty()) return states;
  const auto& grid = states.front().grid();
  for (const auto& s : path.stages) check_stage(s, grid);
  CrankNicolson cn(grid);
  double t = 0.0;
  long long counter = 0;
  if (options.trajectory && !path.stages.empty())
    options.trajectory->record(0.0, states.front(), path.start_field());
  for (const auto& s : path.stages) {
    run_stage(states, s, options.dt_target, cn, options.trajectory, t, counter);
    t += s.duration;
  }
  if (options.trajectory && !path.stages.empty() && counter % options.trajectory->every() != 0)
    options.trajectory->record(t, states.front(), path.end_field());
  return states;
}

WaveFunction propagate(const WaveFunction& psi0, const ControlPath& path, double dt_target) {
  PropagationOptions options;
  options.dt_target = dt_target;
  return propagate(std::vector<WaveFunction>{psi0}, path, options).front();
}

WaveFunction propagate_backward(const WaveFunction& psi_end, const ControlPath& path,
                                double dt_target) {
  return propagate(psi_end.conjugated(), path.reversed(), dt_target).conjugated();
}

double fidelity(const WaveFunction& psi, const WaveFunction& phi) {
  const double a = psi.norm();
  const double b = phi.norm();
  require(a >= 1e-14 && b >= 1e-14, ErrorCode::ZeroNorm, "fidelity of a zero wave function");
  return std::min(1.0, std::abs(inner(psi, phi)) / (a * b));
}

std::vector<complex> mode_overlaps(const WaveFunction& psi, const SpectralDecomposition& basis) {
  require(psi.grid() == basis.grid, ErrorCode::InvalidArgument, "grid mismatch");
  std::vector<complex> out;
  out.reserve(basis.size());
  for (const auto& v : basis.eigenvectors) out.push_back(inner(v, psi, psi.grid().spacing()));
  return out;
}

double expected_energy(const WaveFunction& psi, const DiscreteHamiltonian& hamiltonian) {
  std::vector<complex> hpsi(psi.size());
  hamiltonian.apply(psi.values(), hpsi);
  complex s = 0.0;
  for (int i = 0; i < psi.size(); ++i) s += std::conj(psi[i]) * hpsi[i];
  const double nn = psi.norm();
  require(nn >= 1e-14, ErrorCode::ZeroNorm, "energy of a zero wave function");
  return psi.grid().spacing() * s.real() / (nn * nn);
}

}  // namespace qawall
