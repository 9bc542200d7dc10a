#include <doctest.h>

#include <cmath>

#include "quenchroll/rolls.hpp"

using namespace quenchroll;

TEST_CASE("amplitude law eps = delta sqrt(4/3 (1 - Omega^2))") {
  for (double d : {0.01, 0.03, 0.05}) {
    const PeriodicProfile r = solve_rolls(d, 0.0, 0.0);
    CHECK(r.eps / d == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(0.05));
    CHECK(r.residual < 1e-10);
  }
  const PeriodicProfile r = solve_rolls(0.05, 0.2, 0.0);
  CHECK(r.eps == doctest::Approx(0.05 * std::sqrt(4.0 / 3.0 * 0.96)).epsilon(0.05));
}

TEST_CASE("zero delta gives the zero profile") {
  const PeriodicProfile r = solve_rolls(0.0, 0.0, 1.0);
  CHECK(r.eps == 0.0);
  for (const auto& c : r.modes) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("independent finite-difference residual of the profile") {
  // cross-check the spectral solve against a high-order FD discretization
  const PeriodicProfile r = solve_rolls(0.05, 0.2, 0.3);
  const int n = 512;
  const double h = kTwoPi / n;
  std::vector<double> u(n);
  for (int j = 0; j < n; ++j) u[j] = r.eval(h * j);
  auto at = [&](int j) { return u[((j % n) + n) % n]; };
  const double om2 = r.omega * r.omega;
  double sup = 0.0;
  for (int j = 0; j < n; ++j) {
    const double d2 =
        (-1.0 / 560 * (at(j - 4) + at(j + 4)) + 8.0 / 315 * (at(j - 3) + at(j + 3)) -
         1.0 / 5 * (at(j - 2) + at(j + 2)) + 8.0 / 5 * (at(j - 1) + at(j + 1)) -
         205.0 / 72 * at(j)) /
        (h * h);
    const double d4 =
        (7.0 / 240 * (at(j - 4) + at(j + 4)) - 2.0 / 5 * (at(j - 3) + at(j + 3)) +
         169.0 / 60 * (at(j - 2) + at(j + 2)) - 122.0 / 15 * (at(j - 1) + at(j + 1)) +
         91.0 / 8 * at(j)) /
        (h * h * h * h);
    const double lin = -(at(j) + 2.0 * om2 * d2 + om2 * om2 * d4);
    const double res = lin + r.delta * r.delta * at(j) - at(j) * at(j) * at(j);
    sup = std::max(sup, std::fabs(res));
  }
  CHECK(sup < 1e-7);  // FD truncation only; the profile itself is spectral
}

TEST_CASE("phase condition and gamma equivariance") {
  const double gamma = 0.7;
  const PeriodicProfile r0 = solve_rolls(0.04, 0.1, 0.0);
  const PeriodicProfile rg = solve_rolls(0.04, 0.1, gamma);
  CHECK(std::arg(rg.mode(1)) == doctest::Approx(gamma).epsilon(1e-9));
  double worst = 0.0;
  for (int m = -r0.mode_count; m <= r0.mode_count; ++m) {
    const cplx expect = r0.mode(m) * std::exp(cplx(0.0, m * gamma));
    worst = std::max(worst, std::abs(rg.mode(m) - expect));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("odd harmonics dominate; even modes vanish") {
  const PeriodicProfile r = solve_rolls(0.1, 0.0, 0.0);
  CHECK(std::abs(r.mode(2)) / std::abs(r.mode(1)) < 0.1);
  CHECK(std::abs(r.mode(2)) < 1e-12);
  CHECK(std::abs(r.mode(0)) < 1e-12);
  CHECK(std::abs(r.mode(3)) > 0.0);
  CHECK(std::abs(r.mode(3)) / std::abs(r.mode(1)) < 0.01);
}

TEST_CASE("real-valuedness: c_{-m} = conj(c_m)") {
  const PeriodicProfile r = solve_rolls(0.05, -0.15, 1.2);
  for (int m = 1; m <= r.mode_count; ++m)
    CHECK(std::abs(r.mode(-m) - std::conj(r.mode(m))) < 1e-14);
}

TEST_CASE("delta_of inverts the amplitude map") {
  CHECK(delta_of(0.0, 0.0, 0.0) == 0.0);
  for (double d : {0.01, 0.03, 0.05}) {
    const PeriodicProfile r = solve_rolls(d, 0.0, 0.0);
    CHECK(delta_of(r.eps, 0.0, 0.0) == doctest::Approx(d).epsilon(1e-6));
  }
  CHECK(delta_of(0.0346, 0.0, 0.0) == doctest::Approx(0.03).epsilon(0.05));
  CHECK_THROWS_AS(delta_of(0.5, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("hamiltonian: zero profile, conservation, left-right difference") {
  const double d = 0.05;
  PeriodicProfile zero = solve_rolls(0.0, 0.0, 0.0);
  const double q = 1.0 - d * d;
  CHECK(hamiltonian_of_rolls(zero, d * d).mean == doctest::Approx(0.25 * q * q).epsilon(1e-14));
  CHECK(hamiltonian_of_rolls(zero, -d * d).mean ==
        doctest::Approx(hamiltonian_right_zero(d)).epsilon(1e-14));

  const PeriodicProfile r = solve_rolls(d, 0.0, 0.0);
  const HamiltonianValue H = hamiltonian_of_rolls(r);
  CHECK(H.max_deviation < 1e-8 * (1.0 + std::fabs(H.mean)));

  const double diff = H.mean - hamiltonian_right_zero(d);
  CHECK(std::fabs(diff + d * d) < 3e-4);
}

TEST_CASE("solver rejects out-of-range parameters") {
  CHECK_THROWS_AS(solve_rolls(0.5, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_rolls(0.05, 0.4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_rolls(0.05, 0.0, 0.0, 4), std::invalid_argument);
}
