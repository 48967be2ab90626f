#include "optim.hpp"

#include "error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace anvar {

void adam_step(AdamState& state, VecRef params, ConstVecRef grad) {
  if (state.m.size() != params.size() || state.v.size() != params.size())
    throw DimensionError("Adam state sized for " + std::to_string(state.m.size()) +
                         " parameters, got " + std::to_string(params.size()));
  if (grad.size() != params.size())
    throw DimensionError("gradient size does not match parameters");
  if (!grad.allFinite())
    throw NumericError("non-finite gradient in Adam step " + std::to_string(state.step + 1));

  ++state.step;
  const double t = static_cast<double>(state.step);
  state.m = AdamState::beta1 * state.m + (1.0 - AdamState::beta1) * grad;
  state.v.array() =
      AdamState::beta2 * state.v.array() + (1.0 - AdamState::beta2) * grad.array().square();
  const double bc1 = 1.0 - std::pow(AdamState::beta1, t);
  const double bc2 = 1.0 - std::pow(AdamState::beta2, t);
  params.array() -=
      state.lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + AdamState::eps);
}

namespace {

struct LinePoint {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0; // dphi/dalpha = g . p
};

// Minimizer of the cubic interpolant through two (alpha, f, slope) points
// (Nocedal & Wright eq. 3.59). Returns NaN when degenerate.
double cubic_minimizer(const LinePoint& a, const LinePoint& b) {
  const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
  const double disc = d1 * d1 - a.slope * b.slope;
  if (disc < 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
  return b.alpha -
         (b.alpha - a.alpha) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
}

struct SearchResult {
  bool ok = false;
  double alpha = 0.0;
  double f = 0.0;
  Vec grad;
};

// Strong Wolfe line search: bracket (N&W alg. 3.5) then zoom (alg. 3.6) with
// cubic interpolation. Every accepted step satisfies both conditions.
class WolfeSearch {
public:
  WolfeSearch(const LossAndGrad& fn, ConstVecRef x, ConstVecRef p, double f0, double slope0,
              double c1, double c2, int max_evals)
      : fn_(fn), x_(x), p_(p), f0_(f0), slope0_(slope0), c1_(c1), c2_(c2),
        max_evals_(max_evals), xtrial_(x.size()), gtrial_(x.size()) {}

  SearchResult run(double alpha0) {
    LinePoint prev{0.0, f0_, slope0_};
    double alpha = alpha0;
    for (int i = 0; i < max_evals_; ++i) {
      LinePoint cur = eval(alpha);
      if (!std::isfinite(cur.f)) {
        // Overshot into a non-finite region; retreat.
        alpha = 0.5 * (prev.alpha + alpha);
        continue;
      }
      if (cur.f > f0_ + c1_ * cur.alpha * slope0_ || (i > 0 && cur.f >= prev.f))
        return zoom(prev, cur);
      if (std::abs(cur.slope) <= -c2_ * slope0_) return accept(cur);
      if (cur.slope >= 0.0) return zoom(cur, prev);
      prev = cur;
      alpha *= 2.0;
    }
    return {};
  }

private:
  LinePoint eval(double alpha) {
    xtrial_ = x_ + alpha * p_;
    const double f = fn_(xtrial_, gtrial_);
    ++evals_;
    return {alpha, f, gtrial_.dot(p_)};
  }

  SearchResult accept(const LinePoint& pt) {
    // gtrial_ holds the gradient of the last eval, which is pt by construction.
    return {true, pt.alpha, pt.f, gtrial_};
  }

  SearchResult zoom(LinePoint lo, LinePoint hi) {
    while (evals_ < max_evals_) {
      double alpha = cubic_minimizer(lo, hi);
      const double left = std::min(lo.alpha, hi.alpha);
      const double right = std::max(lo.alpha, hi.alpha);
      const double width = right - left;
      if (!std::isfinite(alpha) || alpha <= left + 0.1 * width || alpha >= right - 0.1 * width)
        alpha = 0.5 * (lo.alpha + hi.alpha);
      if (width < 1e-16 * std::max(1.0, right)) return {};

      LinePoint cur = eval(alpha);
      if (!std::isfinite(cur.f) || cur.f > f0_ + c1_ * cur.alpha * slope0_ || cur.f >= lo.f) {
        hi = cur;
      } else {
        if (std::abs(cur.slope) <= -c2_ * slope0_) return accept(cur);
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = cur;
      }
    }
    return {};
  }

  const LossAndGrad& fn_;
  ConstVecRef x_;
  ConstVecRef p_;
  double f0_, slope0_, c1_, c2_;
  int max_evals_;
  int evals_ = 0;
  Vec xtrial_, gtrial_;
};

} // namespace

LbfgsResult lbfgs_minimize(const LossAndGrad& fn, VecRef params, LbfgsState& state,
                           long max_iters) {
  if (state.memory < 1) throw InvalidArgumentError("L-BFGS memory must be >= 1");
  const Index n = params.size();
  Vec grad(n);
  double f = fn(params, grad);
  if (!std::isfinite(f) || !grad.allFinite())
    throw NumericError("L-BFGS objective is not finite at the initial point");

  LbfgsResult result;
  result.trace.push_back({0, f, grad.norm(), 0.0, false});

  int consecutive_failures = 0;
  Vec direction(n);
  for (long iter = 1; iter <= max_iters; ++iter) {
    const double gnorm = grad.norm();
    if (gnorm < state.grad_tol) {
      result.status = LbfgsStatus::GradConverged;
      break;
    }

    // Two-loop recursion over the stored pairs.
    direction = -grad;
    const auto m = static_cast<Index>(state.history.size());
    std::vector<double> alpha_hist(m), rho(m);
    for (Index j = m - 1; j >= 0; --j) {
      const auto& [s, y] = state.history[j];
      rho[j] = 1.0 / y.dot(s);
      alpha_hist[j] = rho[j] * s.dot(direction);
      direction -= alpha_hist[j] * y;
    }
    if (m > 0) {
      const auto& [s, y] = state.history.back();
      direction *= s.dot(y) / y.squaredNorm();
    }
    for (Index j = 0; j < m; ++j) {
      const auto& [s, y] = state.history[j];
      const double beta = rho[j] * y.dot(direction);
      direction += (alpha_hist[j] - beta) * s;
    }

    double slope = grad.dot(direction);
    bool steepest = false;
    if (!(slope < 0.0)) {
      direction = -grad;
      slope = -gnorm * gnorm;
      steepest = true;
    }

    const double alpha0 = iter == 1 ? std::min(1.0, 1.0 / std::max(gnorm, 1e-30)) : 1.0;
    WolfeSearch search(fn, params, direction, f, slope, state.c1, state.c2,
                       state.max_line_search);
    SearchResult ls = search.run(alpha0);
    if (!ls.ok && !steepest) {
      // Fall back to steepest descent for this iteration.
      direction = -grad;
      slope = -gnorm * gnorm;
      WolfeSearch retry(fn, params, direction, f, slope, state.c1, state.c2,
                        state.max_line_search);
      ls = retry.run(std::min(1.0, 1.0 / std::max(gnorm, 1e-30)));
    }
    if (!ls.ok) {
      result.iterations = iter;
      if (++consecutive_failures >= 5) {
        result.status = LbfgsStatus::LineSearchFailed;
        break;
      }
      state.history.clear();
      continue;
    }
    consecutive_failures = 0;

    Vec step_vec = ls.alpha * direction;
    Vec y = ls.grad - grad;
    params += step_vec;
    if (step_vec.dot(y) > state.curvature_min) {
      state.history.emplace_back(std::move(step_vec), std::move(y));
      if (static_cast<int>(state.history.size()) > state.memory) state.history.pop_front();
    }

    const double f_prev = f;
    f = ls.f;
    grad = ls.grad;
    result.iterations = iter;
    result.trace.push_back({iter, f, grad.norm(), ls.alpha, true});

    if (std::abs(f_prev - f) < state.rel_loss_tol * std::max(1.0, std::abs(f_prev))) {
      result.status = LbfgsStatus::LossConverged;
      break;
    }
  }
  result.final_loss = f;
  return result;
}

} // namespace anvar
