#include "takt/dataset.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "takt/checkpoint.hpp"

namespace takt {

namespace {

void push_word(const TokenVocab& v, std::vector<int>& out, const char* w) {
  out.push_back(v.word(w));
}

void push_instruction(const TokenVocab& v, const std::string& instruction,
                      std::vector<int>& out) {
  std::istringstream iss(instruction);
  std::string w;
  while (iss >> w) out.push_back(v.word(w));
}

void push_coords(const TokenVocab& v, const Observation& o,
                 std::vector<int>& out, bool with_goal) {
  push_word(v, out, "gripper");
  out.push_back(v.bin_token(v.quantize(o.gripper.x)));
  out.push_back(v.bin_token(v.quantize(o.gripper.y)));
  for (const Point2& p : o.objects) {
    push_word(v, out, "object");
    out.push_back(v.bin_token(v.quantize(p.x)));
    out.push_back(v.bin_token(v.quantize(p.y)));
  }
  if (with_goal) {
    push_word(v, out, "goal");
    out.push_back(v.bin_token(v.quantize(o.goal.x)));
    out.push_back(v.bin_token(v.quantize(o.goal.y)));
  }
}

void push_state_suffix(const TokenVocab& v, const Observation& cur,
                       std::vector<int>& out) {
  push_word(v, out, cur.any_held ? "holding" : "free");
  push_word(v, out, "plan");
}

int family_id(const std::string& name) {
  if (name == "pick_place_1") return 1;
  if (name == "pick_place_2") return 2;
  throw std::invalid_argument("family_id: unknown family " + name);
}

std::string family_from_id(int id) {
  if (id == 1) return "pick_place_1";
  if (id == 2) return "pick_place_2";
  throw std::runtime_error("family_from_id: unknown id");
}

}  // namespace

std::vector<int> encode_prompt(const TokenVocab& vocab, const TaskFamily& family,
                               int task_id, const Observation& cur) {
  if (task_id < 0 || task_id >= static_cast<int>(family.instructions.size()))
    throw std::invalid_argument("encode_prompt: unknown instruction id");
  std::vector<int> out;
  out.push_back(vocab.bos());
  push_instruction(vocab, family.instructions[static_cast<size_t>(task_id)], out);
  push_coords(vocab, cur, out, /*with_goal=*/true);
  push_state_suffix(vocab, cur, out);
  return out;
}

std::vector<int> encode_prompt_window(const TokenVocab& vocab,
                                      const TaskFamily& family, int task_id,
                                      const Observation& oldest,
                                      const Observation& mid,
                                      const Observation& cur) {
  if (task_id < 0 || task_id >= static_cast<int>(family.instructions.size()))
    throw std::invalid_argument("encode_prompt_window: unknown instruction id");
  std::vector<int> out;
  out.push_back(vocab.bos());
  push_instruction(vocab, family.instructions[static_cast<size_t>(task_id)], out);
  push_word(vocab, out, "scene");
  push_coords(vocab, oldest, out, /*with_goal=*/false);
  push_word(vocab, out, "then");
  push_coords(vocab, mid, out, /*with_goal=*/false);
  push_word(vocab, out, "now");
  push_coords(vocab, cur, out, /*with_goal=*/true);
  push_state_suffix(vocab, cur, out);
  return out;
}

std::vector<int> think_template(const TokenVocab& vocab, bool holding) {
  std::vector<int> out;
  if (holding) {
    for (const char* w : {"carry", "to", "goal", "release"})
      out.push_back(vocab.word(w));
  } else {
    for (const char* w :
         {"reach", "object", "grasp", "carry", "to", "goal", "release"})
      out.push_back(vocab.word(w));
  }
  return out;
}

std::vector<int> render_response(const TokenVocab& vocab,
                                 const Trajectory& tau_hat, bool holding) {
  std::vector<int> out;
  out.push_back(vocab.think_open());
  const std::vector<int> think = think_template(vocab, holding);
  out.insert(out.end(), think.begin(), think.end());
  out.push_back(vocab.think_close());
  out.push_back(vocab.answer_open());
  const std::vector<int> traj = vocab.render_trajectory(tau_hat);
  out.insert(out.end(), traj.begin(), traj.end());
  out.push_back(vocab.answer_close());
  out.push_back(vocab.eos());
  return out;
}

std::vector<PlannerExample> build_planner_dataset(
    const TokenVocab& vocab, const TaskFamily& family,
    const std::vector<Episode>& demos, const DatasetConfig& cfg,
    uint64_t seed) {
  std::vector<PlannerExample> out;
  int counter = 0;
  for (size_t d = 0; d < demos.size(); ++d) {
    const Episode& ep = demos[d];
    const int64_t frames = ep.gripper_path.size();
    const std::vector<int64_t> starts = subsample_starts(
        frames, cfg.starts_per_demo, cfg.k_points, mix_seed(seed, d));
    for (int64_t s : starts) {
      Trajectory suffix;
      suffix.points.assign(ep.gripper_path.points.begin() + s,
                           ep.gripper_path.points.end());
      PlannerExample ex;
      ex.tau_hat = rdp_to_k(suffix, cfg.k_points);
      const size_t obs_idx = std::min<size_t>(static_cast<size_t>(s),
                                              ep.steps.size() - 1);
      const Observation& cur = ep.steps[obs_idx].obs;
      ex.response = render_response(vocab, ex.tau_hat, cur.any_held);
      const bool windowed = cfg.include_windowed && (counter % 2 == 1);
      if (windowed) {
        const size_t o_idx =
            static_cast<size_t>(std::max<int64_t>(0, s - cfg.window));
        const size_t m_idx =
            static_cast<size_t>(std::max<int64_t>(0, s - cfg.window / 2));
        ex.prompt = encode_prompt_window(
            vocab, family, ep.task.task_id, ep.steps[o_idx].obs,
            ep.steps[std::min(m_idx, ep.steps.size() - 1)].obs, cur);
      } else {
        ex.prompt = encode_prompt(vocab, family, ep.task.task_id, cur);
      }
      ++counter;
      out.push_back(std::move(ex));
    }
  }
  return out;
}

DemoSet generate_demos(const TaskFamily& family, int n, uint64_t seed) {
  DemoSet set;
  set.family = family.name;
  Rng root(seed);
  for (int i = 0; i < n; ++i) {
    Rng r = root.fork(static_cast<uint64_t>(i));
    const TaskSpec task = sample_task(family, r);
    set.episodes.push_back(expert_rollout(family, task));
  }
  set.plans.resize(set.episodes.size());
  return set;
}

void save_demos(const std::string& path, const DemoSet& demos) {
  ArrayMap arrays;
  arrays.emplace("meta",
                 Array({1, 2}, {static_cast<double>(family_id(demos.family)),
                                static_cast<double>(demos.episodes.size())}));
  char name[64];
  const TaskFamily family = TaskFamily::by_name(demos.family);
  const int sd = family.state_dim();
  for (size_t e = 0; e < demos.episodes.size(); ++e) {
    const Episode& ep = demos.episodes[e];
    const int64_t t_steps = static_cast<int64_t>(ep.steps.size());

    Array obs = Array::zeros({t_steps + 1, sd});
    for (int64_t t = 0; t < t_steps; ++t)
      for (int i = 0; i < sd; ++i)
        obs.at(t, i) = ep.steps[static_cast<size_t>(t)].obs.features[static_cast<size_t>(i)];
    const Observation final_obs = observe(ep.steps.back().state_after, ep.task, family);
    for (int i = 0; i < sd; ++i)
      obs.at(t_steps, i) = final_obs.features[static_cast<size_t>(i)];

    Array act = Array::zeros({t_steps, 3});
    for (int64_t t = 0; t < t_steps; ++t) {
      act.at(t, 0) = ep.steps[static_cast<size_t>(t)].action.dx;
      act.at(t, 1) = ep.steps[static_cast<size_t>(t)].action.dy;
      act.at(t, 2) = ep.steps[static_cast<size_t>(t)].action.grip;
    }

    Array path = Array::zeros({static_cast<int64_t>(ep.gripper_path.size()), 2});
    for (int64_t t = 0; t < ep.gripper_path.size(); ++t) {
      path.at(t, 0) = ep.gripper_path.points[static_cast<size_t>(t)].x;
      path.at(t, 1) = ep.gripper_path.points[static_cast<size_t>(t)].y;
    }

    Array task({1, 5}, {static_cast<double>(ep.task.task_id),
                        static_cast<double>(ep.task.target_object),
                        static_cast<double>(ep.task.horizon),
                        ep.success ? 1.0 : 0.0,
                        static_cast<double>(ep.injected_failure_step)});

    std::snprintf(name, sizeof(name), "ep%06zu.", e);
    arrays.emplace(std::string(name) + "obs", std::move(obs));
    arrays.emplace(std::string(name) + "act", std::move(act));
    arrays.emplace(std::string(name) + "path", std::move(path));
    arrays.emplace(std::string(name) + "task", std::move(task));
    if (e < demos.plans.size() && demos.plans[e].size() > 0)
      arrays.emplace(std::string(name) + "plan", demos.plans[e]);
  }
  save_arrays(path, arrays);
}

namespace {

SimState state_from_features(const std::vector<double>& f,
                             const TaskFamily& family, double prev_grip_cmd) {
  SimState s;
  s.gripper = {f[0], f[1]};
  s.grip_closed = f[2] > 0.5;
  s.prev_grip_cmd = prev_grip_cmd;
  for (int i = 0; i < family.n_objects; ++i) {
    ObjectState o;
    o.pos = {f[static_cast<size_t>(3 + 3 * i)], f[static_cast<size_t>(4 + 3 * i)]};
    o.held = f[static_cast<size_t>(5 + 3 * i)] > 0.5;
    s.objects.push_back(o);
  }
  const size_t g = static_cast<size_t>(3 + 3 * family.n_objects);
  s.goal = {f[g], f[g + 1]};
  return s;
}

}  // namespace

DemoSet load_demos(const std::string& path) {
  const ArrayMap arrays = load_arrays(path);
  auto meta_it = arrays.find("meta");
  if (meta_it == arrays.end())
    throw std::runtime_error("load_demos: missing meta in " + path);
  DemoSet set;
  set.family = family_from_id(static_cast<int>(meta_it->second.data[0]));
  const TaskFamily family = TaskFamily::by_name(set.family);
  const int n = static_cast<int>(meta_it->second.data[1]);
  const int sd = family.state_dim();
  char name[64];
  for (int e = 0; e < n; ++e) {
    std::snprintf(name, sizeof(name), "ep%06d.", e);
    const std::string base(name);
    const Array& obs = arrays.at(base + "obs");
    const Array& act = arrays.at(base + "act");
    const Array& path = arrays.at(base + "path");
    const Array& task = arrays.at(base + "task");
    if (obs.cols() != sd) throw std::runtime_error("load_demos: state_dim mismatch");

    Episode ep;
    ep.task.task_id = static_cast<int>(task.data[0]);
    ep.task.target_object = static_cast<int>(task.data[1]);
    ep.task.horizon = static_cast<int>(task.data[2]);
    ep.task.instruction =
        family.instructions[static_cast<size_t>(ep.task.task_id)];
    ep.success = task.data[3] > 0.5;
    ep.injected_failure_step = static_cast<int64_t>(task.data[4]);

    const int64_t t_steps = act.rows();
    std::vector<double> row(static_cast<size_t>(sd));
    for (int i = 0; i < sd; ++i) row[static_cast<size_t>(i)] = obs.at(0, i);
    ep.task.initial = state_from_features(row, family, -1.0);

    for (int64_t t = 0; t < t_steps; ++t) {
      StepRecord rec;
      for (int i = 0; i < sd; ++i) row[static_cast<size_t>(i)] = obs.at(t, i);
      const SimState before = state_from_features(
          row, family, t == 0 ? -1.0 : act.at(t - 1, 2));
      rec.obs = observe(before, ep.task, family);
      rec.action = {act.at(t, 0), act.at(t, 1), act.at(t, 2)};
      for (int i = 0; i < sd; ++i)
        row[static_cast<size_t>(i)] = obs.at(t + 1, i);
      rec.state_after = state_from_features(row, family, act.at(t, 2));
      rec.state_after.step_count = t + 1;
      ep.steps.push_back(std::move(rec));
    }
    for (int64_t t = 0; t < path.rows(); ++t)
      ep.gripper_path.points.push_back({path.at(t, 0), path.at(t, 1)});

    auto plan_it = arrays.find(base + "plan");
    set.plans.push_back(plan_it != arrays.end() ? plan_it->second : Array());
    set.episodes.push_back(std::move(ep));
  }
  return set;
}

int cache_plans(DemoSet& demos, const Planner& planner,
                const TaskFamily& family) {
  DecodeConfig dec;
  dec.greedy = true;
  Rng dummy(0);
  int failures = 0;
  demos.plans.resize(demos.episodes.size());
  for (size_t e = 0; e < demos.episodes.size(); ++e) {
    const Episode& ep = demos.episodes[e];
    const std::vector<int> prompt = encode_prompt(
        planner.vocab(), family, ep.task.task_id, ep.steps[0].obs);
    const SampleResult s = planner.sample(prompt, dec, dummy);
    const ParsedResponse parsed =
        parse_response(planner.vocab(), s.tokens, planner.config().k_points);
    if (parsed.kind == ParsedResponse::Kind::kTrajectory && s.hidden.rows() > 0) {
      demos.plans[e] = planner.project_latent(s.hidden);
    } else {
      demos.plans[e] = Array::zeros(
          {planner.config().n_queries, planner.config().d_model});
      ++failures;
    }
  }
  return failures;
}

}  // namespace takt
