#include "takt/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "takt/kernels.hpp"
#include "takt/rowmath.hpp"

namespace takt {

NoiseSchedule NoiseSchedule::linear(int t_train, int t_infer, double beta_lo,
                                    double beta_hi) {
  if (t_train < 2 || t_infer < 1 || t_infer > t_train)
    throw std::invalid_argument("NoiseSchedule: bad step counts");
  if (!(beta_lo > 0 && beta_hi < 1 && beta_lo <= beta_hi))
    throw std::invalid_argument("NoiseSchedule: betas must be in (0,1) increasing");
  NoiseSchedule s;
  s.t_train = t_train;
  s.t_infer = t_infer;
  s.betas.resize(static_cast<size_t>(t_train));
  s.alphas_cum.resize(static_cast<size_t>(t_train));
  double prod = 1.0;
  for (int t = 0; t < t_train; ++t) {
    const double beta =
        beta_lo + (beta_hi - beta_lo) * static_cast<double>(t) /
                      static_cast<double>(t_train - 1);
    s.betas[static_cast<size_t>(t)] = beta;
    prod *= (1.0 - beta);
    s.alphas_cum[static_cast<size_t>(t)] = prod;
  }
  return s;
}

std::vector<int> NoiseSchedule::inference_timesteps() const {
  const int stride = t_train / t_infer;
  std::vector<int> ts;
  ts.reserve(static_cast<size_t>(t_infer));
  for (int j = t_infer - 1; j >= 0; --j) ts.push_back(j * stride);
  return ts;
}

ActionPolicy::ActionPolicy(PolicyConfig cfg, uint64_t seed) : cfg_(cfg) {
  if (cfg_.state_dim <= 0)
    throw std::invalid_argument("ActionPolicy: state_dim must be set");
  Rng rng(mix_seed(seed, 0x706f6c696379ULL));
  const double s = cfg_.init_scale;
  auto randn = [&rng, s](std::vector<int64_t> shape) {
    return ParamStore::randn(std::move(shape), s, rng);
  };
  const int in_dim =
      cfg_.chunk_dim() + cfg_.state_enc_dim + cfg_.plan_dim + cfg_.t_emb_dim;
  params_.add("enc.w", randn({cfg_.state_dim, cfg_.state_enc_dim}));
  params_.add("enc.b", Array::zeros({1, cfg_.state_enc_dim}));
  params_.add("l1.w", randn({in_dim, cfg_.width}));
  params_.add("l1.b", Array::zeros({1, cfg_.width}));
  params_.add("l2.w", randn({cfg_.width, cfg_.width}));
  params_.add("l2.b", Array::zeros({1, cfg_.width}));
  params_.add("out.w", randn({cfg_.width, cfg_.chunk_dim()}));
  params_.add("out.b", Array::zeros({1, cfg_.chunk_dim()}));
}

Array ActionPolicy::time_embedding(int t, int dim) {
  Array e = Array::zeros({1, dim});
  const int half = dim / 2;
  for (int k = 0; k < half; ++k) {
    const double freq =
        std::exp(-std::log(10000.0) * static_cast<double>(k) / half);
    e.data[static_cast<size_t>(2 * k)] = std::sin(t * freq);
    e.data[static_cast<size_t>(2 * k + 1)] = std::cos(t * freq);
  }
  return e;
}

int ActionPolicy::forward_tape(Tape& tape, int x_node, int t, int state_leaf,
                               int plan_leaf, const NoiseSchedule& sched) const {
  if (t < 0 || t >= sched.t_train)
    throw std::invalid_argument("ActionPolicy: diffusion step out of range");
  auto& ps = const_cast<ParamStore&>(params_);
  int s_enc = tape.tanh_op(tape.add_row_broadcast(
      tape.matmul(state_leaf, tape.param(ps, "enc.w")), tape.param(ps, "enc.b")));
  int t_emb = tape.leaf(time_embedding(t, cfg_.t_emb_dim));
  int in = tape.concat_cols(tape.concat_cols(x_node, s_enc),
                            tape.concat_cols(plan_leaf, t_emb));
  int h1 = tape.tanh_op(tape.add_row_broadcast(
      tape.matmul(in, tape.param(ps, "l1.w")), tape.param(ps, "l1.b")));
  int h2 = tape.tanh_op(tape.add_row_broadcast(
      tape.matmul(h1, tape.param(ps, "l2.w")), tape.param(ps, "l2.b")));
  return tape.add_row_broadcast(tape.matmul(h2, tape.param(ps, "out.w")),
                                tape.param(ps, "out.b"));
}

Array ActionPolicy::predict_eps(const Array& x, int t, const Array& state,
                                const Array& plan_pooled,
                                const NoiseSchedule& sched) const {
  // Tape forward without backward; node count is tiny so the overhead is
  // negligible next to the matmuls.
  Tape tape;
  const int x_leaf = tape.leaf(x);
  const int s_leaf = tape.leaf(state);
  const int p_leaf = tape.leaf(plan_pooled);
  const int out = forward_tape(tape, x_leaf, t, s_leaf, p_leaf, sched);
  return tape.val(out);
}

int ActionPolicy::ddpm_loss_tape(Tape& tape, const Array& chunk_norm, int t,
                                 const Array& noise, const Array& state,
                                 const Array& plan_pooled,
                                 const NoiseSchedule& sched) const {
  if (t < 0 || t >= sched.t_train)
    throw std::invalid_argument("ddpm_loss: t out of range");
  if (!chunk_norm.same_shape(noise))
    throw std::invalid_argument("ddpm_loss: chunk/noise shape mismatch");
  const double abar = sched.alphas_cum[static_cast<size_t>(t)];
  Array x_t = Array::zeros(chunk_norm.shape);
  const double c0 = std::sqrt(abar);
  const double c1 = std::sqrt(1.0 - abar);
  for (int64_t i = 0; i < x_t.size(); ++i)
    x_t.data[static_cast<size_t>(i)] =
        c0 * chunk_norm.data[static_cast<size_t>(i)] +
        c1 * noise.data[static_cast<size_t>(i)];
  const int x_leaf = tape.leaf(std::move(x_t));
  const int s_leaf = tape.leaf(state);
  const int p_leaf = tape.leaf(plan_pooled);
  const int eps_hat = forward_tape(tape, x_leaf, t, s_leaf, p_leaf, sched);
  return tape.mse(eps_hat, tape.leaf(noise));
}

Array ActionPolicy::normalize_chunk(const Array& chunk) const {
  if (chunk.rows() != cfg_.horizon || chunk.cols() != 3)
    throw std::invalid_argument("normalize_chunk: expected [H,3]");
  Array out = Array::zeros({1, cfg_.chunk_dim()});
  for (int h = 0; h < cfg_.horizon; ++h) {
    out.data[static_cast<size_t>(3 * h)] = chunk.at(h, 0) / cfg_.max_step;
    out.data[static_cast<size_t>(3 * h + 1)] = chunk.at(h, 1) / cfg_.max_step;
    out.data[static_cast<size_t>(3 * h + 2)] = chunk.at(h, 2);
  }
  return out;
}

Array ActionPolicy::denormalize_chunk(const Array& flat) const {
  if (flat.size() != cfg_.chunk_dim())
    throw std::invalid_argument("denormalize_chunk: expected [1,3H]");
  Array out = Array::zeros({cfg_.horizon, 3});
  for (int h = 0; h < cfg_.horizon; ++h) {
    out.at(h, 0) = std::clamp(flat.data[static_cast<size_t>(3 * h)] * cfg_.max_step,
                              -cfg_.max_step, cfg_.max_step);
    out.at(h, 1) = std::clamp(
        flat.data[static_cast<size_t>(3 * h + 1)] * cfg_.max_step,
        -cfg_.max_step, cfg_.max_step);
    out.at(h, 2) =
        std::clamp(flat.data[static_cast<size_t>(3 * h + 2)], -1.0, 1.0);
  }
  return out;
}

Array ActionPolicy::ddim_sample(const Array& state, const Array& plan_pooled,
                                const NoiseSchedule& sched,
                                uint64_t seed) const {
  Rng rng(mix_seed(seed, 0x6464696dULL));
  Array x = Array::zeros({1, cfg_.chunk_dim()});
  for (double& v : x.data) v = rng.normal();

  const std::vector<int> ts = sched.inference_timesteps();
  for (size_t i = 0; i < ts.size(); ++i) {
    const int t = ts[i];
    const double abar = sched.alphas_cum[static_cast<size_t>(t)];
    const double abar_prev =
        (i + 1 < ts.size()) ? sched.alphas_cum[static_cast<size_t>(ts[i + 1])]
                            : 1.0;
    const Array eps = predict_eps(x, t, state, plan_pooled, sched);
    const double inv_sq = 1.0 / std::sqrt(abar);
    const double c1 = std::sqrt(1.0 - abar);
    const double sq_prev = std::sqrt(abar_prev);
    const double c1_prev = std::sqrt(1.0 - abar_prev);
    for (int64_t j = 0; j < x.size(); ++j) {
      const double e = eps.data[static_cast<size_t>(j)];
      const double x0 = (x.data[static_cast<size_t>(j)] - c1 * e) * inv_sq;
      x.data[static_cast<size_t>(j)] = sq_prev * x0 + c1_prev * e;
    }
  }
  return denormalize_chunk(x);
}

}  // namespace takt
