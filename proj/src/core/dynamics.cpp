#include "dynamics.hpp"

#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace anvar {

OdeSystem lorenz63(const LorenzParams& p) {
  OdeSystem sys;
  sys.dim = 3;
  sys.rhs = [p](double /*t*/, const double* x, double* dxdt) {
    dxdt[0] = p.sigma * (x[1] - x[0]);
    dxdt[1] = x[0] * (p.rho - x[2]) - x[1];
    dxdt[2] = x[0] * x[1] - p.beta * x[2];
  };
  return sys;
}

namespace {

constexpr double kMinSubstep = 1e-14;

struct Rk23Stepper {
  const OdeSystem& sys;
  Vec k1, k2, k3, k4, ytmp;
  bool have_k1 = false; // FSAL: k4 of an accepted step is k1 of the next

  explicit Rk23Stepper(const OdeSystem& s)
      : sys(s), k1(s.dim), k2(s.dim), k3(s.dim), k4(s.dim), ytmp(s.dim) {}

  void eval(double t, const Vec& y, Vec& out) {
    sys.rhs(t, y.data(), out.data());
    if (!out.allFinite())
      throw NumericError("ODE right-hand side returned a non-finite value at t=" +
                         std::to_string(t));
  }

  // One embedded step of size h from (t, y). On acceptance writes the 3rd-order
  // result into y and returns true; err receives the 2nd/3rd-order discrepancy.
  bool step(double t, Vec& y, double h, double tol, double& err) {
    if (!have_k1) {
      eval(t, y, k1);
      have_k1 = true;
    }
    ytmp = y + (0.5 * h) * k1;
    eval(t + 0.5 * h, ytmp, k2);
    ytmp = y + (0.75 * h) * k2;
    eval(t + 0.75 * h, ytmp, k3);
    Vec ynew = y + h * ((2.0 / 9.0) * k1 + (1.0 / 3.0) * k2 + (4.0 / 9.0) * k3);
    eval(t + h, ynew, k4);
    // Difference between the 3rd-order solution and the embedded 2nd-order one.
    Vec diff = h * ((2.0 / 9.0 - 7.0 / 24.0) * k1 + (1.0 / 3.0 - 1.0 / 4.0) * k2 +
                    (4.0 / 9.0 - 1.0 / 3.0) * k3 - (1.0 / 8.0) * k4);
    err = diff.cwiseAbs().maxCoeff();
    if (err <= tol) {
      y = ynew;
      k1 = k4; // FSAL
      return true;
    }
    have_k1 = true; // k1 still valid at (t, y) after a rejection
    return false;
  }
};

} // namespace

TimeSeries integrate_rk23(const OdeSystem& system, const Vec& initial_state, double dt,
                          Index n_steps, double tolerance, double t0) {
  if (system.dim < 1 || !system.rhs) throw InvalidArgumentError("ODE system has no right-hand side");
  if (initial_state.size() != system.dim)
    throw DimensionError("initial state has " + std::to_string(initial_state.size()) +
                         " components, system has " + std::to_string(system.dim));
  if (!initial_state.allFinite()) throw InvalidArgumentError("initial state must be finite");
  if (dt <= 0.0) throw InvalidArgumentError("dt must be positive");
  if (n_steps < 1) throw InvalidArgumentError("n_steps must be >= 1");
  if (tolerance <= 0.0) throw InvalidArgumentError("tolerance must be positive");

  TimeSeries out;
  out.data.resize(n_steps + 1, system.dim);
  out.dt = dt;
  out.t0 = t0;

  Vec y = initial_state;
  out.data.row(0) = y.transpose();

  Rk23Stepper stepper(system);
  double h = dt; // first trial substep
  for (Index i = 0; i < n_steps; ++i) {
    const double t_start = t0 + static_cast<double>(i) * dt;
    const double t_end = t_start + dt;
    double t = t_start;
    while (t < t_end) {
      // Clip so the accepted substep lands exactly on the grid time.
      const double remaining = t_end - t;
      double h_try = std::min(h, remaining);
      double err = 0.0;
      while (!stepper.step(t, y, h_try, tolerance, err)) {
        const double shrink =
            err > 0.0 ? std::max(0.2, 0.9 * std::cbrt(tolerance / err)) : 0.2;
        h_try *= shrink;
        if (h_try < kMinSubstep)
          throw SolverError("integrator substep underflow at t=" + std::to_string(t) +
                            " (stiff or divergent trajectory)");
      }
      t += h_try;
      // Grow the working step from the accepted one, capped at 5x.
      const double grow =
          err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::cbrt(tolerance / err))) : 5.0;
      h = h_try * grow;
      if (h < kMinSubstep)
        throw SolverError("integrator substep underflow at t=" + std::to_string(t));
    }
    out.data.row(i + 1) = y.transpose();
  }
  if (!out.data.allFinite()) throw NumericError("integration produced non-finite values");
  return out;
}

TimeSeries add_noise(const TimeSeries& series, const NoiseSpec& spec) {
  if (spec.sigma < 0.0) throw InvalidArgumentError("noise sigma must be >= 0");
  if (spec.sigma == 0.0) return series;

  Vec scale = Vec::Constant(series.dim(), spec.sigma);
  if (spec.mode == NoiseMode::RelativeToStd) {
    for (Index j = 0; j < series.dim(); ++j) {
      const auto col = series.data.col(j);
      const double mean = col.mean();
      const double var = (col.array() - mean).square().sum() /
                         static_cast<double>(std::max<Index>(series.rows(), 1));
      scale[j] = spec.sigma * std::sqrt(var);
    }
  }

  TimeSeries out = series;
  Philox rng(spec.seed, rng_stream::noise);
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.dim(); ++j) out.data(i, j) += scale[j] * rng.gaussian();
  return out;
}

} // namespace anvar
