// Action-aligned rewards over predicted vs reference trajectories, plus the
// binary format and exact-match accuracy rewards.
#pragma once

#include <string>

#include "takt/geometry.hpp"

namespace takt {

struct RewardConfig {
  double w_goal = 0.5;
  double w_traj = 0.5;
  double w_visual = 0.9;
  double w_format = 0.1;

  // Throws std::invalid_argument when weights are negative or either pair
  // does not sum to 1.
  void validate() const;
};

struct RewardBreakdown {
  double r_goal = 0.0;
  double r_traj = 0.0;
  double r_format = 0.0;
  double r_visual = 0.0;
  double r_total = 0.0;
};

// What the reward needs to know about a parsed planner response.
struct ResponseEval {
  bool format_ok = false;
  bool payload_valid = false;  // exactly K in-range points
  Trajectory trajectory;       // meaningful only when payload_valid
};

// max(0, 1 - ||p - p_hat||^2): 1 when identical, clamped at 0.
double endpoint_score(const Point2& p, const Point2& p_hat);

// Mean endpoint score over (start, start) and (end, end). Both trajectories
// need >= 2 points.
double goal_reward(const Trajectory& tau, const Trajectory& tau_hat);

// max(0, 1 - dtw_distance(tau, tau_hat)).
double trajectory_reward(const Trajectory& tau, const Trajectory& tau_hat);

// 1 iff the text is exactly one <think>...</think> block followed by exactly
// one <answer>...</answer> block, with only whitespace outside the blocks and
// no tag appearing anywhere else.
double format_reward(const std::string& text);

// Splits a well-formed response into think/answer contents. Returns false
// when format_reward would be 0.
bool split_response(const std::string& text, std::string* think,
                    std::string* answer);

// 1 iff trimmed, case-insensitive equality with the gold option letter.
double accuracy_reward(const std::string& answer, const std::string& gold);

// Combines the components: invalid payloads zero the visual rewards while
// format is still judged on tag structure alone.
RewardBreakdown total_reward(const ResponseEval& parsed,
                             const Trajectory& tau_hat,
                             const RewardConfig& cfg);

}  // namespace takt
