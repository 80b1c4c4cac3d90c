// Denoising-diffusion action-chunk policy: DDPM noise-prediction training,
// deterministic DDIM sampling, conditioned on state features and the pooled
// latent plan.
#pragma once

#include <cstdint>
#include <vector>

#include "takt/autograd.hpp"
#include "takt/optim.hpp"
#include "takt/rng.hpp"

namespace takt {

struct NoiseSchedule {
  int t_train = 1000;
  int t_infer = 20;
  std::vector<double> betas;        // size t_train, increasing in (0,1)
  std::vector<double> alphas_cum;   // strictly decreasing in (0,1]

  static NoiseSchedule linear(int t_train = 1000, int t_infer = 20,
                              double beta_lo = 1e-4, double beta_hi = 2e-2);

  // Evenly spaced training timesteps visited in descending order.
  std::vector<int> inference_timesteps() const;
};

struct PolicyConfig {
  int horizon = 8;        // H actions per chunk
  int width = 128;        // hidden width
  int state_dim = 0;      // raw observation feature length (set per task family)
  int state_enc_dim = 32;
  int plan_dim = 64;      // pooled plan length
  int t_emb_dim = 16;
  double max_step = 0.05;
  bool use_plan = true;   // false feeds zeros in place of the plan
  double init_scale = 0.05;

  int chunk_dim() const { return horizon * 3; }
};

class ActionPolicy {
 public:
  ActionPolicy(PolicyConfig cfg, uint64_t seed);

  const PolicyConfig& config() const { return cfg_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Noise prediction, no gradients. x is the normalized chunk [1, 3H].
  Array predict_eps(const Array& x, int t, const Array& state,
                    const Array& plan_pooled,
                    const NoiseSchedule& sched) const;

  // Differentiable counterpart over tape nodes.
  int forward_tape(Tape& tape, int x_node, int t, int state_leaf,
                   int plan_leaf, const NoiseSchedule& sched) const;

  // Noise-prediction loss for one (state, plan, chunk) sample at diffusion
  // step t: MSE between the predicted and true noise on
  // x_t = sqrt(abar_t) x0 + sqrt(1-abar_t) eps. Throws when t is out of range.
  int ddpm_loss_tape(Tape& tape, const Array& chunk_norm, int t,
                     const Array& noise, const Array& state,
                     const Array& plan_pooled, const NoiseSchedule& sched) const;

  // Deterministic (eta = 0) DDIM over the schedule's inference timesteps,
  // starting from a seeded Gaussian. Returns an [H,3] chunk in action units,
  // clamped to bounds.
  Array ddim_sample(const Array& state, const Array& plan_pooled,
                    const NoiseSchedule& sched, uint64_t seed) const;

  // dx,dy scaled by max_step; grip passed through.
  Array normalize_chunk(const Array& chunk) const;    // [H,3] -> [1,3H]
  Array denormalize_chunk(const Array& flat) const;   // [1,3H] -> [H,3], clamped

  static Array time_embedding(int t, int dim);

 private:
  PolicyConfig cfg_;
  ParamStore params_;
};

}  // namespace takt
