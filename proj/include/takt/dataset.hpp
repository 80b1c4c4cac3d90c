// Demo generation, prompt encoding, and the datasets that feed SFT, RL and
// imitation training. Demo files live in the TAKT array container.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "takt/grpo.hpp"
#include "takt/planner.hpp"
#include "takt/sim.hpp"

namespace takt {

// Prompt from the current observation: task words, then binned gripper /
// object / goal coordinates, a held marker and a terminal cue.
std::vector<int> encode_prompt(const TokenVocab& vocab, const TaskFamily& family,
                               int task_id, const Observation& cur);

// Windowed prompt (oldest, mid, current) used by self-corrective replanning.
std::vector<int> encode_prompt_window(const TokenVocab& vocab,
                                      const TaskFamily& family, int task_id,
                                      const Observation& oldest,
                                      const Observation& mid,
                                      const Observation& cur);

// Templated reasoning-span tokens for an SFT target.
std::vector<int> think_template(const TokenVocab& vocab, bool holding);

// Full SFT response: <think> words </think> <answer> trajectory </answer> EOS.
std::vector<int> render_response(const TokenVocab& vocab,
                                 const Trajectory& tau_hat, bool holding);

struct PlannerExample {
  std::vector<int> prompt;
  std::vector<int> response;  // SFT target
  Trajectory tau_hat;         // K-point reference
};

struct DatasetConfig {
  int starts_per_demo = 3;
  int k_points = 8;
  bool include_windowed = true;  // every other start also emits a window prompt
  int window = 15;
};

// Per-demo start-frame subsampling; each suffix is simplified to K keypoints
// and rendered into a target response.
std::vector<PlannerExample> build_planner_dataset(
    const TokenVocab& vocab, const TaskFamily& family,
    const std::vector<Episode>& demos, const DatasetConfig& cfg, uint64_t seed);

inline std::vector<RolloutPrompt> to_rollout_prompts(
    const std::vector<PlannerExample>& items) {
  std::vector<RolloutPrompt> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back({it.prompt, it.tau_hat});
  return out;
}

inline std::vector<SftItem> to_sft_items(
    const std::vector<PlannerExample>& items) {
  std::vector<SftItem> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back({it.prompt, it.response});
  return out;
}

// ---------------------------------------------------------------------------
// demo files
// ---------------------------------------------------------------------------

struct DemoSet {
  std::string family;
  std::vector<Episode> episodes;
  std::vector<Array> plans;  // per-episode cached latent plan (may be empty)
};

DemoSet generate_demos(const TaskFamily& family, int n, uint64_t seed);

void save_demos(const std::string& path, const DemoSet& demos);
DemoSet load_demos(const std::string& path);

// Greedy-decodes a plan for each episode's initial observation and caches the
// projected latent. Returns the number of episodes whose response failed to
// parse (those get zero plans).
int cache_plans(DemoSet& demos, const Planner& planner,
                const TaskFamily& family);

}  // namespace takt
