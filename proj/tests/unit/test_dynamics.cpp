#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "kuramoto/certificates.hpp"
#include "kuramoto/dynamics.hpp"
#include "kuramoto/instances.hpp"

using namespace kuramoto;

namespace {

const double kPi = std::numbers::pi;

TimeSignal constant_column(Vector v) { return TimeSignal::constant(Matrix::column(v)); }

Matrix pair_coupling(double a12, double a21) { return Matrix{{0, a12}, {a21, 0}}; }

std::vector<Vector> ap_initial_conditions(std::size_t runs) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(-kPi / 6, kPi / 6);
  std::vector<Vector> out;
  for (std::size_t k = 0; k < runs; ++k) {
    Vector th(5);
    for (double& x : th) x = u(gen);
    out.push_back(th);
  }
  return out;
}

}  // namespace

TEST_CASE("kuramoto_rhs") {
  const Matrix w = Matrix::column(Vector{1, 1});
  const Matrix a = pair_coupling(1, 1);
  CHECK(kuramoto_rhs(Vector{0, 0}, w, a) == Vector{1, 1});
  const auto d = kuramoto_rhs(Vector{0, kPi / 2}, w, a);
  CHECK(d[0] == doctest::Approx(2.0));
  CHECK(d[1] == doctest::Approx(0.0));
  CHECK_THROWS_AS(kuramoto_rhs(Vector{0, 0, 0}, w, a), std::invalid_argument);
}

TEST_CASE("simulate: two-node lock and uncoupled drift") {
  const auto omega = constant_column(Vector{1.2, 1.0});
  const auto coupling = TimeSignal::constant(pair_coupling(1, 1));
  const auto traj = simulate(Vector{0, 0}, omega, coupling, {.t_end = 50.0, .dt = 1e-3, .stride = 100});
  CHECK(traj.times.back() == doctest::Approx(50.0));
  const auto pd = phase_differences(traj.phases.back());
  CHECK(std::abs(pd.at(1, 0) + std::asin(0.1)) < 1e-6);

  const auto free = simulate(Vector{0.3, -0.1}, constant_column(Vector{2, 1}), TimeSignal::constant(Matrix(2, 2, 0.0)),
                             {.t_end = 3.0, .dt = 1e-2});
  CHECK(free.phases.back()[0] == doctest::Approx(6.3).epsilon(1e-12));
  CHECK(free.phases.back()[1] == doctest::Approx(2.9).epsilon(1e-12));

  const auto exit_traj = simulate(Vector{0, 0}, constant_column(Vector{2, 1}), TimeSignal::constant(Matrix(2, 2, 0.0)),
                                  {.t_end = 1.0, .dt = 1e-3});
  const auto exit = invariance_monitor(exit_traj, kPi / 6);
  REQUIRE(exit.has_value());
  CHECK(*exit > kPi / 6);
  CHECK(*exit <= kPi / 6 + 1e-3 + 1e-12);

  CHECK_THROWS_AS(simulate(Vector{0, 0}, omega, coupling, {.t_end = 1.0, .dt = 0.0}), std::invalid_argument);
}

TEST_CASE("simulate: shift equivariance and step halving") {
  const auto ap = ap_instance();
  const Vector th0{0.1, -0.2, 0.3, 0.0, -0.4};
  Vector shifted = th0;
  for (double& x : shifted) x += 0.7;
  const SimulationOptions opt{.t_end = 8.0, .dt = 1e-3, .stride = 1000};
  const auto a = simulate(th0, ap.omega(), ap.coupling(), opt);
  const auto b = simulate(shifted, ap.omega(), ap.coupling(), opt);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < 5; ++i) CHECK(b.phases[k][i] - a.phases[k][i] == doctest::Approx(0.7).epsilon(1e-9));

  // RK4 global error is O(dt^4): halving the step shrinks the gap ~16x.
  const auto coarse = simulate(th0, ap.omega(), ap.coupling(), {.t_end = 8.0, .dt = 0.04});
  const auto mid = simulate(th0, ap.omega(), ap.coupling(), {.t_end = 8.0, .dt = 0.02});
  const auto fine = simulate(th0, ap.omega(), ap.coupling(), {.t_end = 8.0, .dt = 0.01});
  double e1 = 0, e2 = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    e1 = std::max(e1, std::abs(coarse.phases.back()[i] - fine.phases.back()[i]));
    e2 = std::max(e2, std::abs(mid.phases.back()[i] - fine.phases.back()[i]));
  }
  CHECK(e2 < e1 / 8.0);
}

TEST_CASE("phase differences and region membership") {
  const auto pd = phase_differences(Vector{0.3, 0.1, 0.1});
  CHECK(pd.values()[0] == doctest::Approx(-0.2));
  CHECK(pd.values()[1] == doctest::Approx(-0.2));
  CHECK(pd.values()[2] == doctest::Approx(0.0));
  CHECK(pd_distance(pd, phase_differences(Vector{1.3, 1.1, 1.1})) < 1e-15);
  CHECK(phase_differences(Vector(4, 0.0)).max_abs() == 0.0);
  const auto lifted = lift_phases(pd);
  CHECK(lifted[0] == 0.0);
  CHECK(lifted[1] == doctest::Approx(-0.2));
  CHECK(lifted[2] == doctest::Approx(-0.2));

  CHECK(region_membership(PDVector(3, Vector(3, 0.0)), 0.0));
  CHECK_FALSE(region_membership(PDVector(2, Vector{0.5 + 1e-9}), 0.5));
  CHECK(region_membership(PDVector(2, Vector{0.5}), 0.5));
  CHECK_THROWS_AS(region_membership(PDVector(2, Vector{0.0}), 2.0), std::invalid_argument);
}

TEST_CASE("AP runs stay in the region and converge to each other") {
  const auto ap = ap_instance();
  std::vector<PhaseTrajectory> runs;
  for (const auto& th0 : ap_initial_conditions(10)) {
    runs.push_back(simulate(th0, ap.omega(), ap.coupling(), {.t_end = 40.0, .dt = 1e-3, .stride = 10}));
    CHECK_FALSE(invariance_monitor(runs.back(), kPi / 3).has_value());
  }
  for (std::size_t k = 1; k < runs.size(); ++k) {
    const auto div = pd_divergence(runs[0], runs[k]);
    CHECK(div.final_value < 1e-3);
  }
  const auto same = pd_divergence(runs[0], runs[0]);
  CHECK(same.max_after(0.0) == 0.0);
}

TEST_CASE("Hajnal diameter and the xi contraction estimate") {
  CHECK(hajnal_diameter(Vector{1, 2, 3}) == 2.0);
  CHECK(hajnal_diameter(Vector(4, 0.3)) == 0.0);

  const auto ap = ap_instance();
  const auto ics = ap_initial_conditions(2);
  const SimulationOptions opt{.t_end = 12.0, .dt = 1e-3, .stride = 50};
  const auto a = simulate(ics[0], ap.omega(), ap.coupling(), opt);
  const auto b = simulate(ics[1], ap.omega(), ap.coupling(), opt);
  const auto coupling = ap.coupling();
  auto diameter = [&](std::size_t k) {
    Vector d(5);
    for (std::size_t i = 0; i < 5; ++i) d[i] = a.phases[k][i] - b.phases[k][i];
    return hajnal_diameter(d);
  };
  const double v0 = diameter(0);
  for (std::size_t k = 1; k < a.size(); ++k) {
    const double t = a.times[k];
    const double bound = std::exp(t * xi_window_average(coupling, kPi / 3, 0.0, t)) * v0;
    CHECK(diameter(k) <= bound + 1e-6);
  }
}
