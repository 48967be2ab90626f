#include "mlp.hpp"

#include "error.hpp"

#include <cmath>
#include <string>

namespace anvar {

void MlpParams::validate() const {
  if (w_in.rows() < 1 || w_in.cols() < 1) throw DimensionError("mlp w_in is empty");
  if (b1.size() != w_in.rows()) throw DimensionError("mlp b1 does not match hidden dim");
  if (w.cols() != w_in.rows()) throw DimensionError("mlp w does not match hidden dim");
  if (b2.size() != w.rows()) throw DimensionError("mlp b2 does not match output dim");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw InvalidArgumentError("dropout rate must be in [0, 1)");
}

MlpParams make_mlp(Index input, Index hidden, Index output, double dropout_rate,
                   std::uint64_t seed) {
  if (input < 1 || hidden < 1 || output < 1)
    throw InvalidArgumentError("mlp dimensions must be >= 1");
  MlpParams p;
  p.dropout_rate = dropout_rate;
  p.w_in.resize(hidden, input);
  p.b1.resize(hidden);
  p.w.resize(output, hidden);
  p.b2.resize(output);
  Philox rng(seed, rng_stream::init);
  const double bound_in = 1.0 / std::sqrt(static_cast<double>(input));
  const double bound_h = 1.0 / std::sqrt(static_cast<double>(hidden));
  rng.fill_uniform(p.w_in.data(), p.w_in.size(), -bound_in, bound_in);
  rng.fill_uniform(p.b1.data(), p.b1.size(), -bound_in, bound_in);
  rng.fill_uniform(p.w.data(), p.w.size(), -bound_h, bound_h);
  rng.fill_uniform(p.b2.data(), p.b2.size(), -bound_h, bound_h);
  p.validate();
  return p;
}

namespace detail {

void tanh_inplace(Mat& z) {
  // tanh(x) = (e^{2x} - 1) / (e^{2x} + 1); the clamp keeps exp finite and is
  // exact, since tanh(20) rounds to 1.
  auto a = z.array().min(20.0).max(-20.0);
  Eigen::ArrayXXd e = (2.0 * a).exp();
  z = ((e - 1.0) / (e + 1.0)).matrix();
}

void mlp_forward_view(ConstMatRef w_in, ConstVecRef b1, ConstMatRef w, ConstVecRef b2,
                      double dropout_rate, ConstMatRef h_lin, RunMode mode, Philox* rng,
                      MlpCache* cache, Mat& out) {
  if (h_lin.cols() != w_in.cols())
    throw DimensionError("mlp input rows have length " + std::to_string(h_lin.cols()) +
                         ", expected " + std::to_string(w_in.cols()));

  Mat a1(h_lin.rows(), w_in.rows());
  a1.noalias() = h_lin * w_in.transpose();
  a1.rowwise() += b1.transpose();
  tanh_inplace(a1);

  const bool use_mask = mode == RunMode::Train && dropout_rate > 0.0;
  Mat mask;
  if (use_mask) {
    if (rng == nullptr)
      throw InvalidArgumentError("train-mode dropout requires an rng stream");
    const double keep = 1.0 - dropout_rate;
    const double scale = 1.0 / keep;
    mask.resize(a1.rows(), a1.cols());
    for (Index i = 0; i < mask.size(); ++i)
      mask.data()[i] = rng->uniform() < keep ? scale : 0.0;
  }

  Mat a1d = use_mask ? a1.cwiseProduct(mask) : a1;
  out.resize(h_lin.rows(), w.rows());
  out.noalias() = a1d * w.transpose();
  out.rowwise() += b2.transpose();

  if (cache != nullptr) {
    cache->input = h_lin;
    cache->a1 = std::move(a1);
    cache->a1_dropped = std::move(a1d);
    cache->mask = std::move(mask);
    cache->has_mask = use_mask;
  }
}

void mlp_backward_view(ConstMatRef w, const MlpCache& cache, ConstMatRef upstream,
                       MatRef gw_in, VecRef gb1, MatRef gw, VecRef gb2) {
  if (upstream.rows() != cache.a1.rows() || upstream.cols() != w.rows())
    throw DimensionError("upstream gradient shape does not match the cached forward pass");
  if (cache.input.rows() != cache.a1.rows())
    throw DimensionError("stale mlp cache: input/activation row mismatch");

  gw.noalias() = upstream.transpose() * cache.a1_dropped;
  gb2 = upstream.colwise().sum();

  Mat dz1(cache.a1.rows(), cache.a1.cols());
  dz1.noalias() = upstream * w;
  if (cache.has_mask) dz1.array() *= cache.mask.array();
  dz1.array() *= 1.0 - cache.a1.array().square();

  gw_in.noalias() = dz1.transpose() * cache.input;
  gb1 = dz1.colwise().sum();
}

} // namespace detail

Mat mlp_forward(const MlpParams& params, ConstMatRef h_lin, RunMode mode, Philox* rng,
                MlpCache* cache) {
  params.validate();
  Mat out;
  detail::mlp_forward_view(params.w_in, params.b1, params.w, params.b2, params.dropout_rate,
                           h_lin, mode, rng, cache, out);
  return out;
}

MlpGrads mlp_backward(const MlpParams& params, const MlpCache& cache, ConstMatRef upstream) {
  params.validate();
  if (cache.input.cols() != params.input_dim() || cache.a1.cols() != params.hidden_dim())
    throw DimensionError("mlp cache does not match parameter shapes");
  MlpGrads g;
  g.w_in.resize(params.hidden_dim(), params.input_dim());
  g.b1.resize(params.hidden_dim());
  g.w.resize(params.output_dim(), params.hidden_dim());
  g.b2.resize(params.output_dim());
  detail::mlp_backward_view(params.w, cache, upstream, g.w_in, g.b1, g.w, g.b2);
  return g;
}

} // namespace anvar
