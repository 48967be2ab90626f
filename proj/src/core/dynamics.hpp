#pragma once

#include "timeseries.hpp"
#include "types.hpp"

#include <cstdint>
#include <functional>

namespace anvar {

/// Autonomous-or-not ODE right-hand side; writes d components into dxdt.
struct OdeSystem {
  Index dim = 0;
  std::function<void(double t, const double* x, double* dxdt)> rhs;
};

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
};

/// The classic three-variable convection system; chaotic at the default
/// parameters.
OdeSystem lorenz63(const LorenzParams& p = {});

/// Default initial condition used by the experiment suite.
inline Vec lorenz63_default_x0() {
  Vec x0(3);
  x0 << -8.0, 7.0, 27.0;
  return x0;
}

/// Integrates with the Bogacki-Shampine embedded 2(3) pair. Substeps adapt to
/// keep the per-step error estimate below `tolerance` and are clipped so the
/// solution lands exactly on every grid time t0 + i*dt. Returns n_steps+1
/// rows including the initial state.
TimeSeries integrate_rk23(const OdeSystem& system, const Vec& initial_state, double dt,
                          Index n_steps, double tolerance = 1e-8, double t0 = 0.0);

enum class NoiseMode { Absolute, RelativeToStd };

struct NoiseSpec {
  double sigma = 0.0;
  NoiseMode mode = NoiseMode::Absolute;
  std::uint64_t seed = 0;
};

/// I.i.d. zero-mean Gaussian perturbation of every entry. In relative mode the
/// per-component std is sigma times that component's std over the clean series.
/// sigma == 0 returns the input unchanged.
TimeSeries add_noise(const TimeSeries& series, const NoiseSpec& spec);

} // namespace anvar
