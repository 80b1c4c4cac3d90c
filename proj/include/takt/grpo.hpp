// Group-relative policy optimization over planner rollouts: group-normalized
// advantages, a nonnegative per-token KL estimator against the sampling
// snapshot, and one optimizer step per snapshot.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "takt/planner.hpp"
#include "takt/rewards.hpp"

namespace takt {

struct GrpoConfig {
  int group_size = 5;       // M
  double beta = 1e-2;       // KL weight
  double lr = 1e-6;         // paper-scale default; configs override
  int batch_prompts = 1;
  int iterations = 1000;
  double adv_eps = 1e-8;
  bool kl_to_cold_start = false;  // reference = per-iteration snapshot when false
  int kl_interval = 20;           // post-update KL measured every this many iters
  double early_stop_r_visual = 0.0;  // 0 disables early stopping
  int eval_interval = 50;
  bool debug_constant_reward = false;

  void validate() const;
};

// A_i = (r_i - mean) / max(std, eps), population std; all zero when the
// group is (numerically) constant. Requires M >= 2.
std::vector<double> compute_advantages(const std::vector<double>& rewards,
                                       double eps = 1e-8);

// Mean over tokens of rho - ln(rho) - 1 with rho = exp(ref - cur).
// Nonnegative; zero iff the sequences coincide.
double kl_estimate(const std::vector<double>& cur,
                   const std::vector<double>& ref);

struct Rollout {
  std::vector<int> tokens;
  std::vector<double> logprobs;      // under the sampling snapshot
  std::vector<double> ref_logprobs;  // KL reference (== logprobs by default)
  RewardBreakdown reward;
  double advantage = 0.0;
  ParsedResponse parsed;
};

struct RolloutPrompt {
  std::vector<int> prompt;
  Trajectory tau_hat;  // K-point reference trajectory
};

struct RolloutGroup {
  std::vector<int> prompt;
  std::vector<Rollout> rollouts;
};

// Negated group objective as a tape node (differentiable through the current
// parameters only).
int grpo_loss_tape(Tape& tape, const Planner& planner,
                   const RolloutGroup& group, double beta);

struct PlannerEvalStats {
  double r_total = 0, r_goal = 0, r_traj = 0, r_format = 0, r_visual = 0;
  double parse_rate = 0, format_rate = 0;
  double mean_dtw = 0;  // invalid parses count as sqrt(2)
  int n = 0;
};

// Greedy decoding over the prompt set, scored with the full reward config.
PlannerEvalStats eval_planner(const Planner& planner,
                              const std::vector<RolloutPrompt>& prompts,
                              const RewardConfig& reward_cfg);

struct RlIterLog {
  int iter = 0;
  double mean_r_total = 0, mean_r_goal = 0, mean_r_traj = 0, mean_r_format = 0;
  double mean_kl = 0;
  double loss = 0;
  double wall_ms = 0;
};

struct RlResult {
  int iterations_run = 0;
  PlannerEvalStats final_eval;
};

using RlLogSink = std::function<void(const RlIterLog&)>;

// Sampling uses the given decode config (temperature 1.0, top-p 0.99 by
// default); rewards are computed against each prompt's reference trajectory
// with train_reward, while early stopping evaluates eval_reward greedily.
RlResult train_rl(Planner& planner,
                  const std::vector<RolloutPrompt>& train_prompts,
                  const std::vector<RolloutPrompt>& eval_prompts,
                  const GrpoConfig& cfg, const RewardConfig& train_reward,
                  const RewardConfig& eval_reward, const DecodeConfig& decode,
                  uint64_t seed, const RlLogSink& sink = {});

}  // namespace takt
