#pragma once

#include "rng.hpp"
#include "types.hpp"

#include <cstdint>

namespace anvar {

/// Shallow tanh feature network: out = W (dropout(tanh(W_in x + b1))) + b2.
struct MlpParams {
  Mat w_in; // hidden x input
  Vec b1;   // hidden
  Mat w;    // output x hidden
  Vec b2;   // output
  double dropout_rate = 0.0;

  Index input_dim() const noexcept { return w_in.cols(); }
  Index hidden_dim() const noexcept { return w_in.rows(); }
  Index output_dim() const noexcept { return w.rows(); }
  Index param_count() const noexcept {
    return w_in.size() + b1.size() + w.size() + b2.size();
  }
  void validate() const;
};

/// Seeded init, uniform on +-1/sqrt(fan_in) per layer (weights and biases).
/// Draw order is fixed: w_in row-major, b1, w row-major, b2.
MlpParams make_mlp(Index input, Index hidden, Index output, double dropout_rate,
                   std::uint64_t seed);

enum class RunMode { Train, Eval };

/// Activations retained by a forward pass for the matching backward pass.
struct MlpCache {
  Mat input;      // B x input
  Mat a1;         // B x hidden, post-tanh
  Mat a1_dropped; // B x hidden, after the (scaled) dropout mask
  Mat mask;       // B x hidden with entries {0, 1/keep}; empty when no mask applied
  bool has_mask = false;
};

struct MlpGrads {
  Mat w_in;
  Vec b1;
  Mat w;
  Vec b2;
};

/// Batch forward pass, one sample per row. Train mode draws an inverted
/// dropout mask from `rng` (kept units scaled by 1/keep); eval mode applies no
/// mask and no scaling, and needs no rng. With dropout_rate == 0 the modes are
/// identical. Pass `cache` to retain activations for mlp_backward.
Mat mlp_forward(const MlpParams& params, ConstMatRef h_lin, RunMode mode,
                Philox* rng = nullptr, MlpCache* cache = nullptr);

/// Exact gradients of the batch loss given dL/d(output). The dropout mask
/// stored in the cache is treated as a fixed linear map.
MlpGrads mlp_backward(const MlpParams& params, const MlpCache& cache, ConstMatRef upstream);

namespace detail {

/// View-based kernels used by the joint training loop (parameters live in one
/// flat vector; these bind to maps without copying).
void mlp_forward_view(ConstMatRef w_in, ConstVecRef b1, ConstMatRef w, ConstVecRef b2,
                      double dropout_rate, ConstMatRef h_lin, RunMode mode, Philox* rng,
                      MlpCache* cache, Mat& out);

void mlp_backward_view(ConstMatRef w, const MlpCache& cache, ConstMatRef upstream,
                       MatRef gw_in, VecRef gb1, MatRef gw, VecRef gb2);

/// Elementwise tanh via the exp identity, vectorized by Eigen; inputs are
/// clamped at +-20 where tanh is exactly +-1 in double precision.
void tanh_inplace(Mat& z);

} // namespace detail

} // namespace anvar
