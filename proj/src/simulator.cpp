#include "quenchroll/simulator.hpp"

#include <cmath>
#include <random>

#include "quenchroll/fft.hpp"

namespace quenchroll {

SimState SimState::make(const GridSpec& g, double delta, double omega, double dt,
                        std::vector<double> u0) {
  if (dt <= 0.0 || dt > 0.5) throw std::invalid_argument("sim: dt must lie in (0, 0.5]");
  SimState s;
  s.grid = g;
  s.u = std::move(u0);
  if (static_cast<int>(s.u.size()) != g.point_count)
    throw std::invalid_argument("sim: initial data size mismatch");
  s.dt = dt;
  s.omega = omega;
  s.delta = delta;
  s.mu.resize(g.point_count);
  s.lin_denom.resize(g.point_count);
  for (int p = 0; p < g.point_count; ++p) {
    s.mu[p] = (g.x(p) <= 0.0) ? 1.0 : -1.0;
    const double xi = g.xi(g.bin(p));
    const double q = 1.0 - omega * omega * xi * xi;
    s.lin_denom[p] = 1.0 + dt * q * q;
  }
  return s;
}

void step(SimState& s) {
  const GridSpec& g = s.grid;
  const int n = g.point_count;
  const double d2 = s.delta * s.delta;
  std::vector<cplx> w(n);
  for (int p = 0; p < n; ++p) {
    const double u = s.u[p];
    w[p] = cplx(u + s.dt * (d2 * s.mu[p] * u - u * u * u), 0.0);
  }
  std::vector<cplx> hat = forward_transform(g, w);
  for (int p = 0; p < n; ++p) hat[p] /= s.lin_denom[p];
  std::vector<cplx> back = inverse_transform(g, hat);
  double sup = 0.0, max_im = 0.0;
  for (int p = 0; p < n; ++p) {
    s.u[p] = back[p].real();
    sup = std::max(sup, std::fabs(s.u[p]));
    max_im = std::max(max_im, std::fabs(back[p].imag()));
  }
  s.t += s.dt;
  if (!(sup <= 2.0) || !std::isfinite(sup))
    throw IntegrationError("sim: blow-up guard tripped at t = " + std::to_string(s.t), s.t);
  if (max_im > 1e-10)
    throw IntegrationError("sim: field lost reality at t = " + std::to_string(s.t), s.t);
}

DriftResult steady_drift(const GridSpec& g, double delta, double omega,
                         const std::vector<double>& U, double T, double dt) {
  SimState s = SimState::make(g, delta, omega, dt, U);
  const int steps = static_cast<int>(std::ceil(T / dt));
  for (int i = 0; i < steps; ++i) step(s);
  DriftResult r;
  r.steps = steps;
  const double guard = 0.95 * g.half_length;
  double acc = 0.0;
  for (int p = 0; p < g.point_count; ++p) {
    if (std::fabs(g.x(p)) > guard) continue;
    const double d = s.u[p] - U[p];
    r.inf = std::max(r.inf, std::fabs(d));
    acc += d * d;
  }
  r.l2 = std::sqrt(acc * g.dx);
  return r;
}

InvadeResult invade(const GridSpec& g, double delta, double T, double dt, unsigned long seed,
                    double noise_amp, int snap_every,
                    const std::function<void(const SimState&)>& on_snapshot) {
  const double eps_scale = delta * std::sqrt(4.0 / 3.0);
  if (noise_amp <= 0.0) noise_amp = 0.2 * eps_scale;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-noise_amp, noise_amp);
  std::vector<double> u0(g.point_count, 0.0);
  for (int p = 0; p < g.point_count; ++p)
    if (g.x(p) < 0.0) u0[p] = unif(rng);

  SimState s = SimState::make(g, delta, 1.0, dt, std::move(u0));
  const int steps = static_cast<int>(std::ceil(T / dt));
  InvadeResult r;
  for (int i = 0; i < steps; ++i) {
    step(s);
    if (snap_every > 0 && (i + 1) % snap_every == 0) {
      ++r.snapshots;
      if (on_snapshot) on_snapshot(s);
    }
  }

  // terminal diagnostics over interior windows away from seam and quench
  const int n = g.point_count;
  double acc = 0.0;
  int cnt = 0;
  for (int p = 0; p < n; ++p) {
    const double x = g.x(p);
    if (x > -0.9 * g.half_length && x < -0.1 * g.half_length) {
      acc += s.u[p] * s.u[p];
      ++cnt;
    }
    if (x > 0.2 * g.half_length && x < 0.9 * g.half_length)
      r.right_sup = std::max(r.right_sup, std::fabs(s.u[p]));
  }
  r.left_amplitude = std::sqrt(2.0 * acc / std::max(cnt, 1));

  // dominant spectral peak of the left half (Hann-windowed)
  {
    const int m = n / 2;
    std::vector<cplx> w(m);
    for (int j = 0; j < m; ++j) {
      const double hann = 0.5 - 0.5 * std::cos(kTwoPi * j / (m - 1));
      w[j] = cplx(s.u[j] * hann, 0.0);
    }
    fft::forward(w.data(), static_cast<std::size_t>(m));
    int best = 1;
    double bestv = 0.0;
    for (int k = 1; k < m / 2; ++k) {
      const double v = std::abs(w[k]);
      if (v > bestv) {
        bestv = v;
        best = k;
      }
    }
    r.dominant_freq = kTwoPi * best / (g.dx * m);
  }
  r.final_state = std::move(s);
  return r;
}

} // namespace quenchroll
