// Dual-rate runner: the planner is invoked every N environment steps (or on
// the observation window in self-correct mode) and the diffusion policy acts
// every step from receding-horizon chunks.
#pragma once

#include <cstdint>
#include <vector>

#include "takt/dataset.hpp"
#include "takt/diffusion.hpp"
#include "takt/planner.hpp"
#include "takt/sim.hpp"

namespace takt {

struct ExecutorConfig {
  int plan_every = 15;      // N
  bool self_correct = false;
  int window = 0;           // observation window W; 0 means plan_every
  double p_drop = 0.0;      // per carry-step drop probability
  int64_t forced_drop_step = -1;
  DecodeConfig decode{1.0, 0.99, 1024, /*greedy=*/true};

  void validate() const;
  int effective_window() const { return window > 0 ? window : plan_every; }
};

struct PlanEvent {
  int64_t step = 0;
  bool parsed_ok = false;
  Trajectory planned;
};

struct EpisodeTrace {
  Episode episode;
  std::vector<PlanEvent> plans;
  int64_t planner_calls = 0;
  int64_t parse_fallbacks = 0;  // unparseable plans fell back to previous c_t
  double planner_ms = 0.0;
  double policy_ms = 0.0;
};

EpisodeTrace run_episode(const Planner& planner, const ActionPolicy& policy,
                         const NoiseSchedule& sched, const TaskFamily& family,
                         const TaskSpec& task, const ExecutorConfig& cfg,
                         uint64_t seed);

struct EvalSummary {
  int episodes = 0;
  double success_rate = 0.0;
  double mean_steps = 0.0;
  double fallback_rate = 0.0;  // fallbacks per planner call
  int64_t planner_calls = 0;
  double planner_ms = 0.0;
  double policy_ms = 0.0;
};

EvalSummary evaluate_executor(const Planner& planner, const ActionPolicy& policy,
                              const NoiseSchedule& sched,
                              const TaskFamily& family, int episodes,
                              const ExecutorConfig& cfg, uint64_t seed,
                              std::vector<EpisodeTrace>* traces = nullptr);

// ---------------------------------------------------------------------------
// imitation training of the action policy on demos with cached plans
// ---------------------------------------------------------------------------

struct ImitationConfig {
  double lr = 1e-3;
  int steps = 3000;
  int batch = 32;
};

struct ImitationLogEntry {
  int step;
  double loss;
};

// Minimizes the noise-prediction loss over (state, plan, chunk) samples drawn
// from the demos. The planner is not touched; plans come from the per-episode
// cache. Throws when the cache is missing or mismatched.
std::vector<ImitationLogEntry> imitation_train(ActionPolicy& policy,
                                               const DemoSet& demos,
                                               const NoiseSchedule& sched,
                                               const ImitationConfig& cfg,
                                               uint64_t seed);

}  // namespace takt
