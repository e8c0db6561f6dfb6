#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qawall/cli.hpp"
#include "qawall/control.hpp"
#include "qawall/errors.hpp"
#include "qawall/propagate.hpp"
#include "qawall/protocols.hpp"
#include "qawall/spectral.hpp"

namespace py = pybind11;
using namespace qawall;

namespace {

using CArray = py::array_t<complex, py::array::c_style | py::array::forcecast>;

WaveFunction to_wave(const SpatialGrid& grid, const CArray& values) {
  if (values.ndim() != 1 || values.shape(0) != grid.size())
    throw Error(ErrorCode::InvalidArgument, "wave function length does not match the grid");
  return WaveFunction(grid, std::vector<complex>(values.data(), values.data() + values.shape(0)));
}

CArray to_array(const WaveFunction& u) {
  CArray out(u.size());
  std::copy(u.values().begin(), u.values().end(), out.mutable_data());
  return out;
}

PotentialField field_from(const std::vector<std::tuple<double, double, double>>& walls) {
  PotentialField f;
  for (const auto& [I, eta, a] : walls) f.walls.push_back({I, eta, a});
  return f;
}

ControlPath path_from(const std::string& doc) { return control_path_from_json(nlohmann::json::parse(doc)); }

}  // namespace

PYBIND11_MODULE(_qawall, m) {
  m.doc() = "Moving-wall quantum control: spectra, propagation and protocols";
  py::register_exception<Error>(m, "QawallError", PyExc_RuntimeError);

  m.def("grid_points", [](int n) {
    const SpatialGrid g(n);
    py::array_t<double> x(n);
    for (int i = 0; i < n; ++i) x.mutable_data()[i] = g.x(i);
    return x;
  });
  m.def("sine_mode", [](int n, int k) { return to_array(WaveFunction::sine_mode(SpatialGrid(n), k)); });
  m.def("potential", [](int n, const std::vector<std::tuple<double, double, double>>& walls) {
    const auto v = potential_on_grid(field_from(walls), SpatialGrid(n));
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
  }, py::arg("n"), py::arg("walls"));

  m.def("eigenpairs", [](int n, const std::vector<std::tuple<double, double, double>>& walls, int m_) {
    const SpatialGrid g(n);
    const auto f = field_from(walls);
    check_resolution(f, g);
    const auto sd = lowest_eigenpairs(assemble(f, g), m_);
    py::array_t<double> vecs({m_, n});
    for (int k = 0; k < m_; ++k) std::copy(sd.eigenvectors[k].begin(), sd.eigenvectors[k].end(), vecs.mutable_data(k, 0));
    return py::make_tuple(sd.eigenvalues, vecs);
  }, py::arg("n"), py::arg("walls"), py::arg("count"));

  m.def("ideal_value", [](const std::string& side, int index, double a) {
    return ideal_value({side == "L" ? Side::Left : Side::Right, index}, a);
  });
  m.def("ideal_rank", [](const std::string& side, int index, double a) {
    return ideal_rank({side == "L" ? Side::Left : Side::Right, index}, a);
  });
  m.def("ideal_label", [](long long k, double a) { return to_string(ideal_label_at_rank(k, a)); });
  m.def("crossing_points", [](double lo, double hi, int tracked) {
    std::vector<std::tuple<double, std::string, std::string>> out;
    for (const auto& c : crossing_points(lo, hi, tracked)) out.emplace_back(c.position, to_string(c.left), to_string(c.right));
    return out;
  });
  m.def("permutation", [](double a_i, double a_f, int tracked) { return quasi_adiabatic_permutation(a_i, a_f, tracked).image; });
  m.def("permutation_by_crossings", [](double a_i, double a_f, int tracked) {
    return permutation_by_crossings(a_i, a_f, tracked).image;
  });

  m.def("step", [](const CArray& psi, const std::vector<std::tuple<double, double, double>>& walls, double dt) {
    const SpatialGrid g(static_cast<int>(psi.shape(0)));
    return to_array(step(to_wave(g, psi), field_from(walls), dt));
  }, py::arg("psi"), py::arg("walls"), py::arg("dt"));
  m.def("propagate", [](const CArray& psi, const std::string& path, double dt_target) {
    const SpatialGrid g(static_cast<int>(psi.shape(0)));
    return to_array(propagate(to_wave(g, psi), path_from(path), dt_target));
  }, py::arg("psi"), py::arg("path_json"), py::arg("dt_target") = 1e-2);
  m.def("propagate_backward", [](const CArray& psi, const std::string& path, double dt_target) {
    const SpatialGrid g(static_cast<int>(psi.shape(0)));
    return to_array(propagate_backward(to_wave(g, psi), path_from(path), dt_target));
  }, py::arg("psi"), py::arg("path_json"), py::arg("dt_target") = 1e-2);

  m.def("ramp_profile", &ramp_profile);
  m.def("theorem1_path", [](double a_i, double a_f, int N, double epsilon, double kappa, int n, double eta,
                            double I, bool tune) {
    ProtocolOptions o;
    o.n = n;
    o.eta_star = eta;
    o.I_star = I;
    o.tune = tune;
    const auto r = build_theorem1_path(a_i, a_f, N, epsilon, kappa, o);
    return py::make_tuple(to_json(r.path).dump(), r.plan.sigma.image, r.plan.M);
  }, py::arg("a_i"), py::arg("a_f"), py::arg("N"), py::arg("epsilon"), py::arg("kappa"), py::arg("n") = 1023,
     py::arg("eta_star") = 100.0, py::arg("I_star") = 1000.0, py::arg("tune") = true);

  m.def("growth_rate", [](double beta, double gamma) { return GrowthModel{beta, gamma}.rate(); });
  m.def("growth_trajectory", [](double beta, double gamma, long long k0, int steps, std::uint64_t seed) {
    const auto t = growth_trajectory({beta, gamma}, k0, steps, seed);
    return py::make_tuple(t.k, t.increments, t.restarts);
  });
  m.def("growth_orbit", [](double a_i, double a_f, long long k0, int cycles) {
    return growth_exact(a_i, a_f, k0, cycles).orbit;
  });

  m.def("default_config", [](const std::string& c) { return cli::default_config(c).dump(); });
  m.def("run_command", [](const std::string& command, const std::string& overrides) {
    return cli::run_command(command, cli::resolve_config(command, nlohmann::json::parse(overrides))).dump();
  });
}
