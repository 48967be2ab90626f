#pragma once

#include "features.hpp"
#include "mlp.hpp"
#include "optim.hpp"
#include "timeseries.hpp"
#include "types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace anvar {

/// Skip-connection model: a trainable readout over H_lin concatenated with a
/// learned MLP feature block. No bias column anywhere in the readout.
struct AdaptiveNvarModel {
  EmbeddingSpec spec;
  MlpParams mlp; // input dk, output m
  Mat w_out;     // d x (dk + m)

  Index feature_dim() const noexcept { return spec.linear_dim() + mlp.output_dim(); }
  Index param_count() const noexcept { return mlp.param_count() + w_out.size(); }
};

/// Seeded construction. m < 0 picks dk(dk+1)/2, matching the monomial count of
/// the fixed-feature model at the same embedding.
AdaptiveNvarModel make_adaptive(const EmbeddingSpec& spec, Index hidden, Index m,
                                double dropout_rate, std::uint64_t seed);

/// Predicted increments for a batch of embedded rows.
Mat adaptive_forward(const AdaptiveNvarModel& model, ConstMatRef h_lin, RunMode mode,
                     Philox* rng = nullptr);

struct TrainConfig {
  double adam_lr = 1e-2;
  Index adam_epochs = 2000;
  Index lbfgs_max_iters = 500;
  int lbfgs_memory = 10;
  Index fit_start = -1; // first sample index; < 0 uses the first full embedding
  std::uint64_t seed = 0; // dropout mask stream
};

struct TraceRow {
  std::string phase; // "adam" | "lbfgs"
  long iter = 0;
  double loss = 0.0;
};

struct TrainResult {
  std::vector<TraceRow> trace;
  double adam_final_loss = 0.0; // eval-mode loss at the phase transition
  double final_loss = 0.0;
  LbfgsStatus lbfgs_status = LbfgsStatus::MaxIterations;
};

/// Two-phase joint training of (mlp, w_out) on mean squared increment error:
/// Adam with per-epoch dropout masks, then L-BFGS on the deterministic
/// (dropout-free) objective. Throws NumericError naming the epoch if the loss
/// goes non-finite.
TrainResult train(AdaptiveNvarModel& model, const TimeSeries& series, const TrainConfig& config);

/// Closed-loop rollout with the MLP in eval mode; same feedback and divergence
/// guard as the fixed-feature model.
TimeSeries forecast(const AdaptiveNvarModel& model, ConstMatRef warmup_window, Index horizon,
                    double dt = 1.0, double t0 = 0.0);

namespace detail {

/// Batch loss of the joint objective and, optionally, its gradient in the
/// packed parameter layout [w_in, b1, w, b2, w_out].
double adaptive_loss_and_grad(const EmbeddingSpec& spec, Index hidden, Index m,
                              double dropout_rate, ConstMatRef h_lin, ConstMatRef targets,
                              ConstVecRef flat, RunMode mode, Philox* rng, VecRef grad_out,
                              bool want_grad);

Vec pack_params(const AdaptiveNvarModel& model);
void unpack_params(ConstVecRef flat, AdaptiveNvarModel& model);

} // namespace detail

} // namespace anvar
