#include "takt/rewards.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace takt {

namespace {

constexpr const char* kThinkOpen = "<think>";
constexpr const char* kThinkClose = "</think>";
constexpr const char* kAnswerOpen = "<answer>";
constexpr const char* kAnswerClose = "</answer>";

int count_occurrences(const std::string& s, const std::string& needle) {
  int count = 0;
  size_t pos = 0;
  while ((pos = s.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

bool whitespace_only(const std::string& s, size_t begin, size_t end) {
  for (size_t i = begin; i < end; ++i) {
    const char c = s[i];
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') return false;
  }
  return true;
}

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

void RewardConfig::validate() const {
  if (w_goal < 0 || w_traj < 0 || w_visual < 0 || w_format < 0)
    throw std::invalid_argument("RewardConfig: negative weight");
  if (std::abs(w_goal + w_traj - 1.0) > 1e-12)
    throw std::invalid_argument("RewardConfig: w_goal + w_traj must be 1");
  if (std::abs(w_visual + w_format - 1.0) > 1e-12)
    throw std::invalid_argument("RewardConfig: w_visual + w_format must be 1");
}

double endpoint_score(const Point2& p, const Point2& p_hat) {
  return std::max(0.0, 1.0 - point_dist_sq(p, p_hat));
}

double goal_reward(const Trajectory& tau, const Trajectory& tau_hat) {
  if (tau.size() < 2 || tau_hat.size() < 2)
    throw std::invalid_argument("goal_reward: trajectories need >= 2 points");
  return 0.5 * (endpoint_score(tau.front(), tau_hat.front()) +
                endpoint_score(tau.back(), tau_hat.back()));
}

double trajectory_reward(const Trajectory& tau, const Trajectory& tau_hat) {
  return std::max(0.0, 1.0 - dtw_distance(tau, tau_hat));
}

bool split_response(const std::string& text, std::string* think,
                    std::string* answer) {
  if (count_occurrences(text, kThinkOpen) != 1 ||
      count_occurrences(text, kThinkClose) != 1 ||
      count_occurrences(text, kAnswerOpen) != 1 ||
      count_occurrences(text, kAnswerClose) != 1)
    return false;

  const size_t t0 = text.find(kThinkOpen);
  const size_t t1 = text.find(kThinkClose);
  const size_t a0 = text.find(kAnswerOpen);
  const size_t a1 = text.find(kAnswerClose);
  if (!(t0 < t1 && t1 < a0 && a0 < a1)) return false;

  const size_t t0e = t0 + std::string(kThinkOpen).size();
  const size_t t1e = t1 + std::string(kThinkClose).size();
  const size_t a0e = a0 + std::string(kAnswerOpen).size();
  const size_t a1e = a1 + std::string(kAnswerClose).size();
  if (!whitespace_only(text, 0, t0)) return false;
  if (!whitespace_only(text, t1e, a0)) return false;
  if (!whitespace_only(text, a1e, text.size())) return false;

  if (think) *think = text.substr(t0e, t1 - t0e);
  if (answer) *answer = text.substr(a0e, a1 - a0e);
  return true;
}

double format_reward(const std::string& text) {
  return split_response(text, nullptr, nullptr) ? 1.0 : 0.0;
}

double accuracy_reward(const std::string& answer, const std::string& gold) {
  const std::string a = trim(answer);
  const std::string g = trim(gold);
  if (a.size() != g.size() || a.empty()) return 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(g[i])))
      return 0.0;
  }
  return 1.0;
}

RewardBreakdown total_reward(const ResponseEval& parsed,
                             const Trajectory& tau_hat,
                             const RewardConfig& cfg) {
  RewardBreakdown out;
  out.r_format = parsed.format_ok ? 1.0 : 0.0;
  if (parsed.payload_valid && parsed.trajectory.size() >= 2) {
    out.r_goal = goal_reward(parsed.trajectory, tau_hat);
    out.r_traj = trajectory_reward(parsed.trajectory, tau_hat);
  }
  out.r_visual = cfg.w_goal * out.r_goal + cfg.w_traj * out.r_traj;
  out.r_total = cfg.w_visual * out.r_visual + cfg.w_format * out.r_format;
  return out;
}

}  // namespace takt
