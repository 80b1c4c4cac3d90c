// Deterministic 2D tabletop pick-and-place: point-mass gripper, grasp on
// commanded close transitions, scripted proportional expert, failure
// injection and trace export.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "takt/geometry.hpp"
#include "takt/rng.hpp"

namespace takt {

struct ActionCommand {
  double dx = 0.0;
  double dy = 0.0;
  double grip = -1.0;  // >= 0 commands closed
};

struct SimConfig {
  double grasp_radius = 0.05;
  double max_step = 0.05;
  double goal_radius = 0.06;
};

struct ObjectState {
  Point2 pos;
  bool held = false;
};

struct SimState {
  Point2 gripper;
  bool grip_closed = false;
  double prev_grip_cmd = -1.0;  // grasp/release fire on command sign changes
  std::vector<ObjectState> objects;
  Point2 goal;
  int64_t step_count = 0;
};

struct TaskFamily {
  std::string name;
  int n_objects = 1;
  std::vector<std::string> instructions;  // index == target object
  int horizon = 120;
  SimConfig sim;

  static TaskFamily by_name(const std::string& name);
  int state_dim() const;  // StateFeatures length
};

struct TaskSpec {
  int task_id = 0;  // instruction index
  std::string instruction;
  int target_object = 0;
  int horizon = 120;
  SimState initial;
};

// Samples a solvable initial configuration (object/goal separation >= 0.2,
// objects pairwise separated). Throws after bounded resampling failures.
TaskSpec sample_task(const TaskFamily& family, Rng& rng);

// Pure dynamics: move clamped to max_step and the unit square, then apply
// grasp/release on commanded grip transitions (closing attaches the nearest
// free object within grasp_radius; opening releases in place).
SimState sim_step(const SimState& s, const ActionCommand& a,
                  const SimConfig& cfg);

bool task_success(const SimState& s, const TaskSpec& task, const SimConfig& cfg);

// With probability p_drop, a held object detaches at its current position and
// the grip opens. No-op when nothing is held.
SimState inject_failure(const SimState& s, double p_drop, Rng& rng);

struct Observation {
  std::vector<double> features;  // StateFeatures for the policy
  // Symbolic view for the planner prompt:
  Point2 gripper;
  bool grip_closed = false;
  bool any_held = false;
  std::vector<Point2> objects;
  std::vector<bool> held;
  Point2 goal;
  int task_id = 0;
};

Observation observe(const SimState& s, const TaskSpec& task,
                    const TaskFamily& family);

struct StepRecord {
  Observation obs;       // before the action
  ActionCommand action;
  SimState state_after;
};

struct Episode {
  TaskSpec task;
  std::vector<StepRecord> steps;
  bool success = false;
  int64_t injected_failure_step = -1;
  Trajectory gripper_path;  // dense, |steps|+1 points
};

// Scripted expert: approach target, grasp, carry to goal, release. Succeeds
// within the horizon on sampled tasks; throws if it cannot.
Episode expert_rollout(const TaskFamily& family, const TaskSpec& task);

// CSV with columns episode,step,gripper_x,gripper_y,grip,obj_x,obj_y,held,
// success (target object view).
void episodes_to_csv(const std::vector<Episode>& eps, const std::string& path);

// SVG overlay of planned vs executed gripper trajectories.
void episode_svg(const Episode& ep, const std::vector<Trajectory>& plans,
                 const std::string& path);

}  // namespace takt
