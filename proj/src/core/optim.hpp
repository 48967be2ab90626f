#pragma once

#include "types.hpp"

#include <deque>
#include <functional>
#include <vector>

namespace anvar {

/// Bias-corrected Adam. Only the learning rate is exposed; the moment decays
/// and epsilon are the universal defaults.
struct AdamState {
  Vec m; // first moments
  Vec v; // second moments
  long step = 0;
  double lr = 1e-2;
  static constexpr double beta1 = 0.9;
  static constexpr double beta2 = 0.999;
  static constexpr double eps = 1e-8;

  explicit AdamState(Index n = 0, double lr = 1e-2) : m(Vec::Zero(n)), v(Vec::Zero(n)), lr(lr) {}
};

/// One Adam update in place. Throws NumericError on non-finite gradients.
void adam_step(AdamState& state, VecRef params, ConstVecRef grad);

/// Objective callback: returns f(x) and writes the gradient.
using LossAndGrad = std::function<double(ConstVecRef x, VecRef grad)>;

enum class LbfgsStatus {
  GradConverged,   // gradient norm below tolerance
  LossConverged,   // relative loss change below tolerance
  MaxIterations,
  LineSearchFailed // five consecutive line-search failures
};

struct LbfgsTraceRow {
  long iter = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  bool wolfe_ok = false; // strong Wolfe conditions held at the accepted step
};

/// Limited-memory BFGS with a strong-Wolfe cubic line search.
struct LbfgsState {
  int memory = 10;
  double c1 = 1e-4; // sufficient decrease
  double c2 = 0.9;  // curvature
  double grad_tol = 1e-10;
  double rel_loss_tol = 1e-12;
  int max_line_search = 30;
  double curvature_min = 1e-10; // s.y threshold for storing a pair

  // (s, y) history, oldest first; populated by lbfgs_minimize.
  std::deque<std::pair<Vec, Vec>> history;
};

struct LbfgsResult {
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  long iterations = 0;
  double final_loss = 0.0;
  std::vector<LbfgsTraceRow> trace;
};

/// Minimizes in place. The objective must be deterministic for the duration of
/// the call (line searches re-evaluate along a ray).
LbfgsResult lbfgs_minimize(const LossAndGrad& fn, VecRef params, LbfgsState& state,
                           long max_iters);

} // namespace anvar
