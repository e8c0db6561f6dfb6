#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qawall/errors.hpp"
#include "qawall/spectral.hpp"

using namespace qawall;
using std::numbers::pi;

namespace {

Eigen::MatrixXd dense(const DiscreteHamiltonian& h) {
  const int n = h.grid.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = h.diag[i];
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = h.offdiag;
  }
  return m;
}

// brute-force ideal spectrum: all labels up to `depth` on each side, sorted
std::vector<std::pair<double, ModeLabel>> brute_ideal(double a, int depth) {
  std::vector<std::pair<double, ModeLabel>> v;
  for (int p = 1; p <= depth; ++p) {
    v.push_back({std::pow(p * pi / a, 2), {Side::Left, p}});
    v.push_back({std::pow(p * pi / (1 - a), 2), {Side::Right, p}});
  }
  std::sort(v.begin(), v.end(), [](auto& x, auto& y) { return x.first < y.first; });
  return v;
}

// sigma by sorting label values at both ends
std::vector<long long> brute_permutation(double a_i, double a_f, int N) {
  const auto start = brute_ideal(a_i, 200);
  const auto end = brute_ideal(a_f, 200);
  std::vector<long long> out;
  for (int k = 0; k < N; ++k) {
    const auto label = start[k].second;
    for (std::size_t j = 0; j < end.size(); ++j)
      if (end[j].second == label) out.push_back(static_cast<long long>(j) + 1);
  }
  return out;
}

}  // namespace

TEST_CASE("free Laplacian eigenvalues match the closed form") {
  const SpatialGrid g(127);
  const auto sd = lowest_eigenpairs(free_hamiltonian(g), 8);
  const double h = g.spacing();
  for (int k = 1; k <= 8; ++k) {
    const double exact = 4.0 / (h * h) * std::pow(std::sin(k * pi * h / 2), 2);
    CHECK(sd.eigenvalues[k - 1] == doctest::Approx(exact).epsilon(1e-12));
    // paper: Dirichlet eigenvalues (k pi)^2 in the continuum limit
    // relative error about (k pi h)^2 / 12
    CHECK(sd.eigenvalues[k - 1] == doctest::Approx(k * k * pi * pi).epsilon(std::pow(k * pi * h, 2) / 10));
  }
}

TEST_CASE("eigenpairs agree with a dense solver") {
  const SpatialGrid g(255);
  const PotentialField f{{WallState{3000.0, 25.0, 0.43}, WallState{500.0, 20.0, 0.8}}};
  const auto h = assemble(f, g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(h));
  const int m = 10;
  const auto sd = lowest_eigenpairs(h, m);
  REQUIRE(sd.size() == m);
  for (int k = 0; k < m; ++k) {
    CHECK(sd.eigenvalues[k] == doctest::Approx(es.eigenvalues()[k]).epsilon(1e-10));
    Eigen::VectorXd v = es.eigenvectors().col(k) / std::sqrt(g.spacing());
    double dot = 0.0;
    for (int i = 0; i < g.size(); ++i) dot += v[i] * sd.eigenvectors[k][i] * g.spacing();
    CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-8));
    // sign rule: first significant component positive
    double peak = 0.0;
    for (double x : sd.eigenvectors[k]) peak = std::max(peak, std::abs(x));
    const auto first = std::find_if(sd.eigenvectors[k].begin(), sd.eigenvectors[k].end(),
                                    [&](double x) { return std::abs(x) > 1e-3 * peak; });
    CHECK(*first > 0.0);
  }
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < j; ++k) {
      double dot = 0.0;
      for (int i = 0; i < g.size(); ++i) dot += sd.eigenvectors[j][i] * sd.eigenvectors[k][i];
      CHECK(std::abs(dot * g.spacing()) < 1e-10);
    }
  const auto mid = eigenvalues_in_range(h, 4, 7);
  for (int k = 4; k <= 7; ++k) CHECK(mid[k - 4] == doctest::Approx(es.eigenvalues()[k - 1]).epsilon(1e-12));
  const double x = 0.5 * (es.eigenvalues()[5] + es.eigenvalues()[6]);
  CHECK(count_below(h, x) == 6);
  CHECK(count_below(h, -1.0) == 0);
}

TEST_CASE("eigenpair preconditions") {
  const SpatialGrid g(63);
  CHECK_THROWS_AS(lowest_eigenpairs(free_hamiltonian(g), 16), Error);
  CHECK_THROWS_AS(eigenvalues_in_range(free_hamiltonian(g), 3, 2), Error);
  CHECK_NOTHROW(lowest_eigenpairs(free_hamiltonian(g), 15));
}

TEST_CASE("ideal spectrum matches brute-force sorting") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pos(0.05, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = pos(rng);
    const auto brute = brute_ideal(a, 100);
    const auto sp = ideal_spectrum(a, 20);
    for (int k = 0; k < 20; ++k) {
      CHECK(sp.entries[k].label == brute[k].second);
      CHECK(sp.entries[k].value == doctest::Approx(brute[k].first).epsilon(1e-14));
      CHECK(ideal_rank(brute[k].second, a) == k + 1);
      CHECK(ideal_label_at_rank(k + 1, a) == brute[k].second);
    }
  }
  CHECK(ideal_value({Side::Left, 2}, 0.4) == doctest::Approx(std::pow(2 * pi / 0.4, 2)));
  CHECK(to_string(ModeLabel{Side::Right, 3}) == "R3");
}

TEST_CASE("crossings sit at p/(p+q)") {
  const auto c = crossing_points(0.43, 0.57, 2);
  REQUIRE(c.size() == 1);
  CHECK(c[0].position == doctest::Approx(0.5));
  CHECK(c[0].left == ModeLabel{Side::Left, 1});
  CHECK(c[0].right == ModeLabel{Side::Right, 1});
  for (const auto& x : crossing_points(0.21, 0.79, 4)) {
    CHECK(ideal_value(x.left, x.position) == doctest::Approx(ideal_value(x.right, x.position)));
    CHECK(x.position == doctest::Approx(double(x.left.index) / (x.left.index + x.right.index)));
  }
  const auto down = tracked_crossings(0.79, 0.21, 3);
  for (std::size_t i = 1; i < down.crossings.size(); ++i)
    CHECK(down.crossings[i].position <= down.crossings[i - 1].position);
  CHECK_THROWS_AS(check_noncrossing(0.5, 4), Error);
  CHECK_THROWS_AS(check_noncrossing(1.0 / 3.0, 4), Error);
  CHECK_NOTHROW(check_noncrossing(0.43, 4));
}

TEST_CASE("permutation routes agree with the sorted-label oracle") {
  const auto s = quasi_adiabatic_permutation(0.43, 0.57, 2);
  CHECK(s.image == std::vector<long long>{2, 1});
  CHECK(s.closure == 2);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.3, 0.7);
  std::uniform_int_distribution<int> size(1, 10);
  int done = 0;
  while (done < 100) {
    const double a = pos(rng), b = pos(rng);
    const int N = size(rng);
    try {
      check_noncrossing(a, 64);
      check_noncrossing(b, 64);
    } catch (const Error&) {
      continue;
    }
    const auto x = quasi_adiabatic_permutation(a, b, N);
    const auto y = permutation_by_crossings(a, b, N);
    CHECK(x.image == y.image);
    CHECK(x.image == brute_permutation(a, b, N));
    ++done;
  }
}

TEST_CASE("discrete spectrum approaches the split limit as the wall sharpens") {
  // I = eta; errors shrink as eta grows
  const SpatialGrid g(4095);
  double prev = INFINITY;
  for (double eta : {50.0, 200.0, 400.0}) {
    const PotentialField f{{WallState{eta, eta, 0.4}}};
    const auto lam = eigenvalues_in_range(assemble(f, g), 1, 1);
    const double err = std::abs(lam[0] - ideal_value(ideal_label_at_rank(1, 0.4), 0.4));
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("ideal eigenfunctions are unit, localized and orthogonal") {
  const SpatialGrid g(511);
  const auto l1 = ideal_eigenfunction({Side::Left, 1}, 0.43, g);
  const auto r1 = ideal_eigenfunction({Side::Right, 1}, 0.43, g);
  CHECK(l1.norm() == doctest::Approx(1.0));
  CHECK(std::abs(inner(l1, r1)) < 1e-14);
  for (int i = 0; i < g.size(); ++i) {
    if (g.x(i) > 0.43) CHECK(l1[i] == complex(0.0));
    if (g.x(i) < 0.43) CHECK(r1[i] == complex(0.0));
  }
}
