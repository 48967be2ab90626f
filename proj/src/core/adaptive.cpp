#include "adaptive.hpp"

#include "error.hpp"
#include "nvar_standard.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace anvar {

AdaptiveNvarModel make_adaptive(const EmbeddingSpec& spec, Index hidden, Index m,
                                double dropout_rate, std::uint64_t seed) {
  spec.validate();
  const Index dk = spec.linear_dim();
  if (m < 0) m = monomial_dim(dk);
  AdaptiveNvarModel model;
  model.spec = spec;
  model.mlp = make_mlp(dk, hidden, m, dropout_rate, seed);
  model.w_out.resize(spec.d, dk + m);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dk + m));
  Philox rng(seed, rng_stream::init_readout);
  rng.fill_uniform(model.w_out.data(), model.w_out.size(), -bound, bound);
  return model;
}

namespace {

struct ParamDims {
  Index dk, hidden, m, d;
  Index n_w_in() const { return hidden * dk; }
  Index n_b1() const { return hidden; }
  Index n_w() const { return m * hidden; }
  Index n_b2() const { return m; }
  Index n_w_out() const { return d * (dk + m); }
  Index total() const { return n_w_in() + n_b1() + n_w() + n_b2() + n_w_out(); }
};

struct ParamView {
  Eigen::Map<const Mat> w_in, w, w_out;
  Eigen::Map<const Vec> b1, b2;

  ParamView(const double* p, const ParamDims& dims)
      : w_in(p, dims.hidden, dims.dk),
        w(p + dims.n_w_in() + dims.n_b1(), dims.m, dims.hidden),
        w_out(p + dims.n_w_in() + dims.n_b1() + dims.n_w() + dims.n_b2(), dims.d,
              dims.dk + dims.m),
        b1(p + dims.n_w_in(), dims.hidden),
        b2(p + dims.n_w_in() + dims.n_b1() + dims.n_w(), dims.m) {}
};

struct MutableParamView {
  Eigen::Map<Mat> w_in, w, w_out;
  Eigen::Map<Vec> b1, b2;

  MutableParamView(double* p, const ParamDims& dims)
      : w_in(p, dims.hidden, dims.dk),
        w(p + dims.n_w_in() + dims.n_b1(), dims.m, dims.hidden),
        w_out(p + dims.n_w_in() + dims.n_b1() + dims.n_w() + dims.n_b2(), dims.d,
              dims.dk + dims.m),
        b1(p + dims.n_w_in(), dims.hidden),
        b2(p + dims.n_w_in() + dims.n_b1() + dims.n_w(), dims.m) {}
};

ParamDims dims_of(const AdaptiveNvarModel& model) {
  return {model.spec.linear_dim(), model.mlp.hidden_dim(), model.mlp.output_dim(),
          model.spec.d};
}

} // namespace

namespace detail {

Vec pack_params(const AdaptiveNvarModel& model) {
  const ParamDims dims = dims_of(model);
  Vec flat(dims.total());
  MutableParamView v(flat.data(), dims);
  v.w_in = model.mlp.w_in;
  v.b1 = model.mlp.b1;
  v.w = model.mlp.w;
  v.b2 = model.mlp.b2;
  v.w_out = model.w_out;
  return flat;
}

void unpack_params(ConstVecRef flat, AdaptiveNvarModel& model) {
  const ParamDims dims = dims_of(model);
  if (flat.size() != dims.total())
    throw DimensionError("packed parameter vector has wrong length");
  ParamView v(flat.data(), dims);
  model.mlp.w_in = v.w_in;
  model.mlp.b1 = v.b1;
  model.mlp.w = v.w;
  model.mlp.b2 = v.b2;
  model.w_out = v.w_out;
}

double adaptive_loss_and_grad(const EmbeddingSpec& spec, Index hidden, Index m,
                              double dropout_rate, ConstMatRef h_lin, ConstMatRef targets,
                              ConstVecRef flat, RunMode mode, Philox* rng, VecRef grad_out,
                              bool want_grad) {
  const ParamDims dims{spec.linear_dim(), hidden, m, spec.d};
  if (flat.size() != dims.total()) throw DimensionError("packed parameter vector has wrong length");
  const ParamView p(flat.data(), dims);
  const Index batch = h_lin.rows();
  if (targets.rows() != batch || targets.cols() != spec.d)
    throw DimensionError("target batch does not match the feature batch");

  MlpCache cache;
  Mat h_nn;
  detail::mlp_forward_view(p.w_in, p.b1, p.w, p.b2, dropout_rate, h_lin, mode, rng,
                           want_grad ? &cache : nullptr, h_nn);

  const auto w_out_lin = p.w_out.leftCols(dims.dk);
  const auto w_out_nn = p.w_out.rightCols(dims.m);
  Mat residual(batch, spec.d);
  residual.noalias() = h_lin * w_out_lin.transpose();
  residual.noalias() += h_nn * w_out_nn.transpose();
  residual -= targets;

  const double inv_n = 1.0 / static_cast<double>(batch);
  const double loss = residual.squaredNorm() * inv_n;
  if (!want_grad) return loss;

  MutableParamView g(grad_out.data(), dims);
  Mat dpred = (2.0 * inv_n) * residual; // B x d
  g.w_out.leftCols(dims.dk).noalias() = dpred.transpose() * h_lin;
  g.w_out.rightCols(dims.m).noalias() = dpred.transpose() * h_nn;
  Mat upstream(batch, dims.m);
  upstream.noalias() = dpred * w_out_nn;
  detail::mlp_backward_view(p.w, cache, upstream, g.w_in, g.b1, g.w, g.b2);
  return loss;
}

} // namespace detail

Mat adaptive_forward(const AdaptiveNvarModel& model, ConstMatRef h_lin, RunMode mode,
                     Philox* rng) {
  model.mlp.validate();
  if (model.w_out.cols() != model.feature_dim() || model.w_out.rows() != model.spec.d)
    throw DimensionError("readout shape does not match spec and MLP output");
  Mat h_nn = mlp_forward(model.mlp, h_lin, mode, rng);
  Mat out(h_lin.rows(), model.spec.d);
  out.noalias() = h_lin * model.w_out.leftCols(h_lin.cols()).transpose();
  out.noalias() += h_nn * model.w_out.rightCols(h_nn.cols()).transpose();
  return out;
}

TrainResult train(AdaptiveNvarModel& model, const TimeSeries& series,
                  const TrainConfig& config) {
  const EmbeddingSpec& spec = model.spec;
  spec.validate();
  const Index start =
      std::max(spec.first_index(), config.fit_start < 0 ? Index{0} : config.fit_start);
  if (series.rows() < start + 2)
    throw SeriesTooShortError("training series has " + std::to_string(series.rows()) +
                              " rows; need at least " + std::to_string(start + 2));

  const FeatureMatrix lin = delay_embed(series, spec);
  const Index first = start - lin.first_time_index;
  const Index n = series.rows() - 1 - start;
  const Mat h_lin = lin.rows.middleRows(first, n);
  const Mat targets = series.data.middleRows(start + 1, n) - series.data.middleRows(start, n);

  const Index hidden = model.mlp.hidden_dim();
  const Index m = model.mlp.output_dim();
  const double dropout = model.mlp.dropout_rate;

  Vec flat = detail::pack_params(model);
  Vec grad(flat.size());
  Philox dropout_rng(config.seed, rng_stream::dropout);

  TrainResult result;
  result.trace.reserve(static_cast<std::size_t>(config.adam_epochs) + 64);

  AdamState adam(flat.size(), config.adam_lr);
  for (Index epoch = 1; epoch <= config.adam_epochs; ++epoch) {
    const double loss = detail::adaptive_loss_and_grad(
        spec, hidden, m, dropout, h_lin, targets, flat, RunMode::Train, &dropout_rng, grad,
        true);
    if (!std::isfinite(loss))
      throw NumericError("training loss became non-finite at Adam epoch " +
                         std::to_string(epoch));
    adam_step(adam, flat, grad);
    result.trace.push_back({"adam", epoch, loss});
  }

  auto eval_fn = [&](ConstVecRef x, VecRef g) {
    return detail::adaptive_loss_and_grad(spec, hidden, m, dropout, h_lin, targets, x,
                                          RunMode::Eval, nullptr, g, true);
  };

  LbfgsState lbfgs;
  lbfgs.memory = config.lbfgs_memory;
  LbfgsResult lres = lbfgs_minimize(eval_fn, flat, lbfgs, config.lbfgs_max_iters);
  result.adam_final_loss = lres.trace.empty() ? 0.0 : lres.trace.front().loss;
  for (const auto& row : lres.trace) result.trace.push_back({"lbfgs", row.iter, row.loss});
  result.final_loss = lres.final_loss;
  result.lbfgs_status = lres.status;

  detail::unpack_params(flat, model);
  return result;
}

TimeSeries forecast(const AdaptiveNvarModel& model, ConstMatRef warmup_window, Index horizon,
                    double dt, double t0) {
  const EmbeddingSpec& spec = model.spec;
  if (horizon < 0) throw InvalidArgumentError("forecast horizon must be >= 0");
  if (warmup_window.rows() != spec.window_rows() || warmup_window.cols() != spec.d)
    throw DimensionError("warm-up window must be " + std::to_string(spec.window_rows()) + "x" +
                         std::to_string(spec.d) + " states");

  TimeSeries out;
  out.data.resize(horizon, spec.d);
  out.dt = dt;
  out.t0 = t0;

  Mat window = warmup_window;
  Mat lin(1, spec.linear_dim());
  for (Index step = 0; step < horizon; ++step) {
    const Index last = window.rows() - 1;
    for (Index delay = 0; delay < spec.k; ++delay)
      lin.block(0, delay * spec.d, 1, spec.d) = window.row(last - delay * spec.s);
    Mat delta = adaptive_forward(model, lin, RunMode::Eval);
    Vec next = window.row(last).transpose() + delta.row(0).transpose();
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kDivergenceLimit)
      throw DivergenceError("forecast diverged at step " + std::to_string(step + 1),
                            static_cast<long>(step + 1));
    out.data.row(step) = next.transpose();
    for (Index r = 0; r < last; ++r) window.row(r) = window.row(r + 1);
    window.row(last) = next.transpose();
  }
  return out;
}

} // namespace anvar
