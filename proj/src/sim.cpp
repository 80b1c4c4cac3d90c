#include "takt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace takt {

TaskFamily TaskFamily::by_name(const std::string& name) {
  TaskFamily f;
  f.name = name;
  if (name == "pick_place_1") {
    f.n_objects = 1;
    f.instructions = {"move the red block to the tray"};
  } else if (name == "pick_place_2") {
    f.n_objects = 2;
    f.instructions = {"move the red block to the tray",
                      "move the blue block to the tray"};
  } else {
    throw std::invalid_argument("TaskFamily: unknown family " + name);
  }
  return f;
}

int TaskFamily::state_dim() const {
  // gripper(2) + grip flag + per object (x, y, held) + goal(2) + instruction
  // one-hot.
  return 3 + 3 * n_objects + 2 + static_cast<int>(instructions.size());
}

TaskSpec sample_task(const TaskFamily& family, Rng& rng) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    SimState s;
    s.gripper = {rng.uniform(0.08, 0.92), rng.uniform(0.08, 0.92)};
    s.goal = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    s.objects.clear();
    bool ok = true;
    for (int i = 0; i < family.n_objects && ok; ++i) {
      for (int tries = 0;; ++tries) {
        if (tries >= 50) {
          ok = false;
          break;
        }
        Point2 p{rng.uniform(0.08, 0.92), rng.uniform(0.08, 0.92)};
        if (point_dist(p, s.goal) < 0.2) continue;
        bool clash = false;
        for (const auto& o : s.objects)
          if (point_dist(p, o.pos) < 0.12) clash = true;
        if (clash) continue;
        s.objects.push_back({p, false});
        break;
      }
    }
    if (!ok) continue;
    TaskSpec task;
    task.task_id = static_cast<int>(
        rng.uniform_int(static_cast<int64_t>(family.instructions.size())));
    task.instruction = family.instructions[static_cast<size_t>(task.task_id)];
    task.target_object = task.task_id;
    task.horizon = family.horizon;
    task.initial = std::move(s);
    return task;
  }
  throw std::runtime_error("sample_task: could not sample a valid layout");
}

SimState sim_step(const SimState& s, const ActionCommand& a,
                  const SimConfig& cfg) {
  SimState out = s;
  const double dx = std::clamp(a.dx, -cfg.max_step, cfg.max_step);
  const double dy = std::clamp(a.dy, -cfg.max_step, cfg.max_step);
  out.gripper.x = std::clamp(out.gripper.x + dx, 0.0, 1.0);
  out.gripper.y = std::clamp(out.gripper.y + dy, 0.0, 1.0);
  for (auto& o : out.objects)
    if (o.held) o.pos = out.gripper;

  const bool want_closed = a.grip >= 0.0;
  const bool was_closed = s.prev_grip_cmd >= 0.0;
  if (want_closed && !was_closed) {
    out.grip_closed = true;
    bool holding = false;
    for (const auto& o : out.objects) holding = holding || o.held;
    if (!holding) {
      // Attach the nearest free object within reach; ties keep the lowest
      // index.
      int best = -1;
      double best_d = cfg.grasp_radius;
      for (size_t i = 0; i < out.objects.size(); ++i) {
        const double d = point_dist(out.objects[i].pos, out.gripper);
        if (d <= cfg.grasp_radius && (best < 0 || d < best_d)) {
          best = static_cast<int>(i);
          best_d = d;
        }
      }
      if (best >= 0) {
        out.objects[static_cast<size_t>(best)].held = true;
        out.objects[static_cast<size_t>(best)].pos = out.gripper;
      }
    }
  } else if (!want_closed && was_closed) {
    out.grip_closed = false;
    for (auto& o : out.objects) o.held = false;
  }
  out.prev_grip_cmd = a.grip;
  ++out.step_count;
  return out;
}

bool task_success(const SimState& s, const TaskSpec& task,
                  const SimConfig& cfg) {
  const auto& obj = s.objects[static_cast<size_t>(task.target_object)];
  return !obj.held && !s.grip_closed &&
         point_dist(obj.pos, s.goal) <= cfg.goal_radius;
}

SimState inject_failure(const SimState& s, double p_drop, Rng& rng) {
  bool holding = false;
  for (const auto& o : s.objects) holding = holding || o.held;
  if (!holding || p_drop <= 0.0) return s;
  if (rng.uniform() >= p_drop) return s;
  SimState out = s;
  for (auto& o : out.objects) o.held = false;
  out.grip_closed = false;
  out.prev_grip_cmd = -1.0;  // the grip is open; a fresh close can re-grasp
  return out;
}

Observation observe(const SimState& s, const TaskSpec& task,
                    const TaskFamily& family) {
  Observation o;
  o.gripper = s.gripper;
  o.grip_closed = s.grip_closed;
  o.goal = s.goal;
  o.task_id = task.task_id;
  for (const auto& obj : s.objects) {
    o.objects.push_back(obj.pos);
    o.held.push_back(obj.held);
    o.any_held = o.any_held || obj.held;
  }
  o.features.reserve(static_cast<size_t>(family.state_dim()));
  o.features.push_back(s.gripper.x);
  o.features.push_back(s.gripper.y);
  o.features.push_back(s.grip_closed ? 1.0 : 0.0);
  for (const auto& obj : s.objects) {
    o.features.push_back(obj.pos.x);
    o.features.push_back(obj.pos.y);
    o.features.push_back(obj.held ? 1.0 : 0.0);
  }
  o.features.push_back(s.goal.x);
  o.features.push_back(s.goal.y);
  for (size_t i = 0; i < family.instructions.size(); ++i)
    o.features.push_back(static_cast<int>(i) == task.task_id ? 1.0 : 0.0);
  return o;
}

Episode expert_rollout(const TaskFamily& family, const TaskSpec& task) {
  // Proportional controller tuned so episodes land in the 40-80 step range.
  constexpr double kGain = 0.18;
  constexpr double kReachTol = 0.008;

  Episode ep;
  ep.task = task;
  SimState s = task.initial;
  ep.gripper_path.points.push_back(s.gripper);

  enum class Phase { kApproach, kGrasp, kCarry, kRelease, kDone };
  Phase phase = Phase::kApproach;
  const SimConfig& cfg = family.sim;

  for (int t = 0; t < task.horizon && phase != Phase::kDone; ++t) {
    const Observation obs = observe(s, task, family);
    ActionCommand a;
    const Point2 target =
        (phase == Phase::kApproach || phase == Phase::kGrasp)
            ? s.objects[static_cast<size_t>(task.target_object)].pos
            : s.goal;
    const double dist = point_dist(s.gripper, target);
    switch (phase) {
      case Phase::kApproach: {
        if (dist <= kReachTol) {
          phase = Phase::kGrasp;
          a = {0.0, 0.0, 1.0};
        } else {
          double vx = kGain * (target.x - s.gripper.x);
          double vy = kGain * (target.y - s.gripper.y);
          const double vlen = std::sqrt(vx * vx + vy * vy);
          if (vlen > cfg.max_step) {
            vx *= cfg.max_step / vlen;
            vy *= cfg.max_step / vlen;
          }
          a = {vx, vy, -1.0};
        }
        break;
      }
      case Phase::kGrasp:
        a = {0.0, 0.0, 1.0};
        break;
      case Phase::kCarry: {
        if (dist <= kReachTol) {
          phase = Phase::kRelease;
          a = {0.0, 0.0, -1.0};
        } else {
          double vx = kGain * (target.x - s.gripper.x);
          double vy = kGain * (target.y - s.gripper.y);
          const double vlen = std::sqrt(vx * vx + vy * vy);
          if (vlen > cfg.max_step) {
            vx *= cfg.max_step / vlen;
            vy *= cfg.max_step / vlen;
          }
          a = {vx, vy, 1.0};
        }
        break;
      }
      case Phase::kRelease:
        a = {0.0, 0.0, -1.0};
        break;
      case Phase::kDone:
        break;
    }

    s = sim_step(s, a, cfg);
    ep.gripper_path.points.push_back(s.gripper);
    ep.steps.push_back({obs, a, s});

    if (phase == Phase::kGrasp &&
        s.objects[static_cast<size_t>(task.target_object)].held)
      phase = Phase::kCarry;
    if (phase == Phase::kRelease && !s.grip_closed) phase = Phase::kDone;
  }

  ep.success = task_success(s, task, cfg);
  if (!ep.success)
    throw std::runtime_error("expert_rollout: expert failed within horizon");
  return ep;
}

void episodes_to_csv(const std::vector<Episode>& eps, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("episodes_to_csv: cannot open " + path);
  os << "episode,step,gripper_x,gripper_y,grip,obj_x,obj_y,held,success\n";
  char buf[160];
  for (size_t e = 0; e < eps.size(); ++e) {
    const Episode& ep = eps[e];
    const size_t target = static_cast<size_t>(ep.task.target_object);
    for (size_t t = 0; t < ep.steps.size(); ++t) {
      const SimState& s = ep.steps[t].state_after;
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%.6f,%.6f,%d,%.6f,%.6f,%d,%d\n",
                    e, t, s.gripper.x, s.gripper.y, s.grip_closed ? 1 : 0,
                    s.objects[target].pos.x, s.objects[target].pos.y,
                    s.objects[target].held ? 1 : 0, ep.success ? 1 : 0);
      os << buf;
    }
  }
}

namespace {

void svg_polyline(std::ofstream& os, const Trajectory& t, const char* color,
                  double width) {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
     << width << "\" points=\"";
  char buf[48];
  for (const Point2& p : t.points) {
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", p.x * 400.0,
                  (1.0 - p.y) * 400.0);
    os << buf;
  }
  os << "\"/>\n";
}

}  // namespace

void episode_svg(const Episode& ep, const std::vector<Trajectory>& plans,
                 const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("episode_svg: cannot open " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" "
        "height=\"400\" viewBox=\"0 0 400 400\">\n";
  os << "<rect width=\"400\" height=\"400\" fill=\"#fafafa\"/>\n";
  const Point2 goal = ep.task.initial.goal;
  os << "<circle cx=\"" << goal.x * 400.0 << "\" cy=\"" << (1.0 - goal.y) * 400.0
     << "\" r=\"" << 0.06 * 400.0 << "\" fill=\"#cde8cd\"/>\n";
  for (size_t i = 0; i < ep.task.initial.objects.size(); ++i) {
    const Point2 p = ep.task.initial.objects[i].pos;
    os << "<circle cx=\"" << p.x * 400.0 << "\" cy=\"" << (1.0 - p.y) * 400.0
       << "\" r=\"5\" fill=\""
       << (static_cast<int>(i) == ep.task.target_object ? "#c44" : "#47c")
       << "\"/>\n";
  }
  for (const Trajectory& plan : plans) svg_polyline(os, plan, "#e6a23c", 1.5);
  svg_polyline(os, ep.gripper_path, "#333", 1.0);
  os << "</svg>\n";
}

}  // namespace takt
