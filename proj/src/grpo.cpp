#include "takt/grpo.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace takt {

void GrpoConfig::validate() const {
  if (group_size < 2) throw std::invalid_argument("GrpoConfig: group_size must be >= 2");
  if (beta < 0) throw std::invalid_argument("GrpoConfig: beta must be >= 0");
  if (batch_prompts < 1 || iterations < 0)
    throw std::invalid_argument("GrpoConfig: bad batch/iterations");
}

std::vector<double> compute_advantages(const std::vector<double>& rewards,
                                       double eps) {
  const size_t m = rewards.size();
  if (m < 2) throw std::invalid_argument("compute_advantages: need M >= 2");
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(m);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(m);
  const double std_dev = std::sqrt(var);
  std::vector<double> out(m, 0.0);
  if (std_dev < eps) return out;
  for (size_t i = 0; i < m; ++i) out[i] = (rewards[i] - mean) / std_dev;
  return out;
}

double kl_estimate(const std::vector<double>& cur,
                   const std::vector<double>& ref) {
  if (cur.size() != ref.size() || cur.empty())
    throw std::invalid_argument("kl_estimate: length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < cur.size(); ++i) {
    const double diff = ref[i] - cur[i];
    acc += std::exp(diff) - diff - 1.0;
  }
  return acc / static_cast<double>(cur.size());
}

int grpo_loss_tape(Tape& tape, const Planner& planner,
                   const RolloutGroup& group, double beta) {
  const int m = static_cast<int>(group.rollouts.size());
  if (m < 2) throw std::invalid_argument("grpo_loss_tape: need M >= 2 rollouts");
  int obj = -1;
  for (const Rollout& r : group.rollouts) {
    if (r.tokens.empty()) throw std::invalid_argument("grpo_loss_tape: empty rollout");
    std::vector<int> seq = group.prompt;
    seq.insert(seq.end(), r.tokens.begin(), r.tokens.end());
    const Planner::TapeOut out = planner.forward_tape(tape, seq);
    const int64_t p0 = static_cast<int64_t>(group.prompt.size());
    const int64_t l = static_cast<int64_t>(seq.size());
    int lp = tape.log_softmax_rows(tape.slice_rows(out.logits, p0 - 1, l - 1));
    std::vector<int64_t> targets(r.tokens.begin(), r.tokens.end());
    int picked = tape.pick_rows(lp, std::move(targets));  // [T,1]

    double sum_old = 0.0;
    for (double v : r.logprobs) sum_old += v;
    int ratio = tape.exp_op(tape.add_const(tape.sum(picked), -sum_old));
    int term = tape.scale(ratio, r.advantage);
    obj = (obj < 0) ? term : tape.add(obj, term);

    if (beta > 0.0) {
      const std::vector<double>& ref_lp =
          r.ref_logprobs.empty() ? r.logprobs : r.ref_logprobs;
      if (ref_lp.size() != r.tokens.size())
        throw std::invalid_argument("grpo_loss_tape: ref logprob length mismatch");
      Array ref = Array::zeros({static_cast<int64_t>(ref_lp.size()), 1});
      for (size_t i = 0; i < ref_lp.size(); ++i) ref.data[i] = ref_lp[i];
      int diff = tape.sub(tape.leaf(std::move(ref)), picked);
      int kl_vec = tape.add_const(tape.sub(tape.exp_op(diff), diff), -1.0);
      obj = tape.sub(obj, tape.scale(tape.mean(kl_vec), beta));
    }
  }
  return tape.scale(obj, -1.0 / static_cast<double>(m));
}

PlannerEvalStats eval_planner(const Planner& planner,
                              const std::vector<RolloutPrompt>& prompts,
                              const RewardConfig& reward_cfg) {
  PlannerEvalStats st;
  DecodeConfig dec;
  dec.greedy = true;
  Rng dummy(0);
  const int k = planner.config().k_points;
  for (const RolloutPrompt& p : prompts) {
    SampleResult s = planner.sample(p.prompt, dec, dummy);
    ParsedResponse parsed = parse_response(planner.vocab(), s.tokens, k);
    ResponseEval ev;
    ev.format_ok = format_reward(planner.vocab().detokenize(s.tokens)) > 0.5;
    ev.payload_valid = parsed.kind == ParsedResponse::Kind::kTrajectory;
    if (ev.payload_valid) ev.trajectory = parsed.trajectory;
    const RewardBreakdown rb = total_reward(ev, p.tau_hat, reward_cfg);
    st.r_total += rb.r_total;
    st.r_goal += rb.r_goal;
    st.r_traj += rb.r_traj;
    st.r_format += rb.r_format;
    st.r_visual += rb.r_visual;
    st.parse_rate += ev.payload_valid ? 1.0 : 0.0;
    st.format_rate += ev.format_ok ? 1.0 : 0.0;
    st.mean_dtw += ev.payload_valid ? dtw_distance(parsed.trajectory, p.tau_hat)
                                    : std::sqrt(2.0);
    ++st.n;
  }
  if (st.n > 0) {
    const double inv = 1.0 / st.n;
    st.r_total *= inv;
    st.r_goal *= inv;
    st.r_traj *= inv;
    st.r_format *= inv;
    st.r_visual *= inv;
    st.parse_rate *= inv;
    st.format_rate *= inv;
    st.mean_dtw *= inv;
  }
  return st;
}

RlResult train_rl(Planner& planner,
                  const std::vector<RolloutPrompt>& train_prompts,
                  const std::vector<RolloutPrompt>& eval_prompts,
                  const GrpoConfig& cfg, const RewardConfig& train_reward,
                  const RewardConfig& eval_reward, const DecodeConfig& decode,
                  uint64_t seed, const RlLogSink& sink) {
  cfg.validate();
  train_reward.validate();
  eval_reward.validate();
  if (train_prompts.empty()) throw std::invalid_argument("train_rl: no prompts");

  // Frozen copy for the optional cold-start KL reference.
  std::optional<Planner> cold;
  if (cfg.kl_to_cold_start) {
    cold.emplace(planner.config(), &planner.vocab(), 0);
    for (const auto& name : planner.params().names())
      cold->params().value(name) = planner.params().value(name);
  }

  Rng root(seed);
  const int k = planner.config().k_points;
  RlResult result;
  double last_kl = 0.0;

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    RlIterLog log;
    log.iter = iter;

    std::vector<RolloutGroup> groups;
    std::vector<const RolloutPrompt*> batch_prompts;
    int n_rollouts = 0;
    for (int j = 0; j < cfg.batch_prompts; ++j) {
      const size_t pi = (static_cast<size_t>(iter) * cfg.batch_prompts + j) %
                        train_prompts.size();
      const RolloutPrompt& rp = train_prompts[pi];
      RolloutGroup group;
      group.prompt = rp.prompt;
      std::vector<double> rewards;
      for (int i = 0; i < cfg.group_size; ++i) {
        Rng rr = root.fork((static_cast<uint64_t>(iter) << 24) ^
                           (static_cast<uint64_t>(j) << 12) ^
                           static_cast<uint64_t>(i));
        SampleResult s = planner.sample(rp.prompt, decode, rr);
        Rollout r;
        r.tokens = std::move(s.tokens);
        r.logprobs = std::move(s.logprobs);
        r.parsed = parse_response(planner.vocab(), r.tokens, k);
        ResponseEval ev;
        ev.format_ok =
            format_reward(planner.vocab().detokenize(r.tokens)) > 0.5;
        ev.payload_valid = r.parsed.kind == ParsedResponse::Kind::kTrajectory;
        if (ev.payload_valid) ev.trajectory = r.parsed.trajectory;
        r.reward = total_reward(ev, rp.tau_hat, train_reward);
        if (cfg.debug_constant_reward) {
          r.reward = RewardBreakdown{};
          r.reward.r_total = 0.5;
        }
        if (cold) r.ref_logprobs = cold->sequence_logprobs(rp.prompt, r.tokens);
        rewards.push_back(r.reward.r_total);
        log.mean_r_total += r.reward.r_total;
        log.mean_r_goal += r.reward.r_goal;
        log.mean_r_traj += r.reward.r_traj;
        log.mean_r_format += r.reward.r_format;
        ++n_rollouts;
        group.rollouts.push_back(std::move(r));
      }
      const std::vector<double> adv = compute_advantages(rewards, cfg.adv_eps);
      for (int i = 0; i < cfg.group_size; ++i)
        group.rollouts[static_cast<size_t>(i)].advantage =
            adv[static_cast<size_t>(i)];
      groups.push_back(std::move(group));
      batch_prompts.push_back(&rp);
    }

    double loss_val = 0.0;
    for (const RolloutGroup& group : groups) {
      Tape tape;
      const int loss = grpo_loss_tape(tape, planner, group, cfg.beta);
      const int scaled = tape.scale(loss, 1.0 / cfg.batch_prompts);
      tape.backward(scaled);
      tape.flush_param_grads();
      loss_val += tape.val(loss).data[0] / cfg.batch_prompts;
    }
    planner.params().adam_step(cfg.lr);
    result.iterations_run = iter + 1;

    // Post-update KL against the snapshot the rollouts were sampled from.
    if (cfg.kl_interval > 0 && iter % cfg.kl_interval == 0) {
      double kl = 0.0;
      int cnt = 0;
      for (const RolloutGroup& group : groups) {
        for (const Rollout& r : group.rollouts) {
          kl += kl_estimate(planner.sequence_logprobs(group.prompt, r.tokens),
                            r.logprobs);
          ++cnt;
        }
      }
      last_kl = cnt ? kl / cnt : 0.0;
    }

    log.mean_r_total /= n_rollouts;
    log.mean_r_goal /= n_rollouts;
    log.mean_r_traj /= n_rollouts;
    log.mean_r_format /= n_rollouts;
    log.mean_kl = last_kl;
    log.loss = loss_val;
    log.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    if (sink) sink(log);

    if (cfg.early_stop_r_visual > 0.0 && !eval_prompts.empty() &&
        (iter + 1) % cfg.eval_interval == 0) {
      const PlannerEvalStats ev = eval_planner(planner, eval_prompts, eval_reward);
      if (ev.r_visual >= cfg.early_stop_r_visual) break;
    }
  }

  result.final_eval = eval_prompts.empty()
                          ? PlannerEvalStats{}
                          : eval_planner(planner, eval_prompts, eval_reward);
  return result;
}

}  // namespace takt
