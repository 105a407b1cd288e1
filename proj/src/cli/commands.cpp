#include "hf/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hf/cli/agent_io.hpp"
#include "hf/common/csv.hpp"
#include "hf/common/error.hpp"
#include "hf/common/rng.hpp"
#include "hf/dynamics/linear.hpp"
#include "hf/envs/metrics.hpp"
#include "hf/lqr/lqr.hpp"
#include "hf/mpc/receding.hpp"
#include "hf/rl/evaluate.hpp"
#include "hf/rl/trainer.hpp"

namespace hf::cli {

namespace fs = std::filesystem;

namespace {

std::vector<double> uniform_in(Rng& rng, const envs::BoxConstraint& box) {
  std::vector<double> v(box.dim());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng.uniform(box.lower[i], box.upper[i]);
  return v;
}

struct AgentRun {
  envs::Trajectory traj;
  double time_near_goal = 0.0;
  double time_outside = 0.0;
  int solver_failures = 0;
  bool plant_failed = false;
};

AgentRun run_actor(const envs::GoalEnv& plant, const rl::ActorCritic& ac,
                   std::span<const double> x0, std::span<const double> goal, int steps,
                   const envs::BoxConstraint& constraint_box, Rng& plant_rng) {
  AgentRun out;
  envs::GoalObservation obs = plant.observe(std::vector<double>(x0.begin(), x0.end()),
                                            std::vector<double>(goal.begin(), goal.end()));
  std::vector<double> u(static_cast<std::size_t>(plant.action_dim()));
  std::vector<std::vector<double>> achieved, states;
  for (int t = 0; t < steps; ++t) {
    rl::act(ac.actor, ac.norm, plant.action_box(), obs.state, obs.achieved_goal,
            obs.desired_goal, u);
    envs::GoalEnv::StepResult sr = plant.step(obs, u, plant_rng);
    out.traj.push_back({t, sr.obs.state, u, sr.reward, sr.scenario_index});
    if (sr.failed) {
      out.plant_failed = true;
      break;
    }
    states.push_back(sr.obs.state);
    achieved.push_back(sr.obs.achieved_goal);
    obs = std::move(sr.obs);
  }
  out.time_near_goal = envs::time_near_goal(achieved, goal);
  out.time_outside = envs::time_outside_constraints(states, constraint_box);
  return out;
}

AgentRun run_planner(const mpc::MpcProblem& prob, const envs::GoalEnv& plant,
                     std::span<const double> x0, std::span<const double> goal, int steps,
                     std::uint64_t solver_seed, std::uint64_t plant_seed) {
  Rng solver_rng(solver_seed), plant_rng(plant_seed);
  mpc::RecedingResult r =
      mpc::receding_horizon_run(prob, plant, steps, x0, goal, solver_rng, plant_rng);
  return {std::move(r.trajectory), r.time_near_goal, r.time_outside, r.solver_failures,
          r.plant_failed};
}

std::vector<std::string> state_names(const Experiment& ex) {
  if (ex.kind == EnvKind::Cstr) return {"c_a", "c_b", "t_r", "t_k"};
  std::vector<std::string> names;
  for (int i = 0; i < ex.plant_model->state_dim(); ++i)
    names.push_back("x" + std::to_string(i + 1));
  return names;
}

std::vector<std::string> action_names(const Experiment& ex) {
  if (ex.kind == EnvKind::Cstr) return {"f", "q_dot"};
  std::vector<std::string> names;
  for (int i = 0; i < ex.plant_model->action_dim(); ++i)
    names.push_back("u" + std::to_string(i + 1));
  return names;
}

}  // namespace

int cmd_train(const ConfigFile& cfg, const RunOptions& opts) {
  const Experiment ex = make_experiment(cfg);
  const std::uint64_t seed = resolve_seed(cfg, opts);
  const fs::path out = resolve_out(cfg, opts);
  fs::create_directories(out);

  const std::string scenario_name = cfg.get_str("env.scenarios", "training");
  const envs::GoalEnv env = make_env(ex, scenario_set_by_name(ex, scenario_name));
  const rl::TrainConfig tc = make_train_config(cfg, seed);

  rl::TrainResult result = rl::train(env, tc);

  nlohmann::json extra{{"seed", seed},
                       {"total_steps", tc.total_steps},
                       {"episodes", result.episodes},
                       {"dropped_episodes", result.dropped_episodes},
                       {"env", {{"kind", to_string(ex.kind)}, {"scenarios", scenario_name}}},
                       {"hidden", tc.hidden},
                       {"target_mode", rl::to_string(tc.target_mode)},
                       {"her", tc.her}};
  save_agent(out / "checkpoint", result.ac, std::move(extra));

  CsvWriter csv((out / "train_metrics.csv").string(),
                {"step", "episode", "return", "critic_loss", "actor_objective",
                 "buffer_size"});
  for (const rl::EpisodeMetrics& m : result.metrics)
    csv.row({std::to_string(m.step), std::to_string(m.episode), fmt_double(m.ret),
             fmt_double(m.critic_loss), fmt_double(m.actor_objective),
             std::to_string(m.buffer_size)});

  std::printf("trained %lld steps over %d episodes (%d dropped)\n",
              static_cast<long long>(tc.total_steps), result.episodes,
              result.dropped_episodes);
  std::printf("checkpoint: %s\n", (out / "checkpoint").string().c_str());
  std::printf("metrics: %s\n", (out / "train_metrics.csv").string().c_str());
  return 0;
}

int cmd_eval_rl(const ConfigFile& cfg, const RunOptions& opts) {
  const Experiment ex = make_experiment(cfg);
  const std::uint64_t seed = resolve_seed(cfg, opts);
  const fs::path out = resolve_out(cfg, opts);
  fs::create_directories(out);

  const rl::ActorCritic ac = load_agent(cfg.get_str("eval.checkpoint"));
  const envs::GoalEnv env = make_env(ex, ex.nominal_scenario);
  check_agent_env(ac, env);
  const rl::EvalOptions eo = make_eval_options(cfg, seed, opts.threads);

  const std::string mode = cfg.get_str("eval.mode", "both");
  std::vector<std::pair<std::string, const envs::ScenarioSet*>> modes;
  if (mode == "nominal" || mode == "both") modes.emplace_back("nominal", &ex.nominal_scenario);
  if (mode == "robust" || mode == "both") modes.emplace_back("robust", &ex.eval_scenarios);
  if (modes.empty())
    throw ConfigError("eval.mode must be nominal, robust, or both (got " + mode + ")");

  CsvWriter csv((out / "eval_metrics.csv").string(),
                {"mode", "rollout", "scenario_index", "tail_reward", "tail_pct_err"});
  for (const auto& [name, scenarios] : modes) {
    std::vector<rl::RolloutEval> rows = rl::evaluate_rl(ac.actor, ac.norm, env, *scenarios, eo);
    std::vector<double> errs, rewards;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      csv.row({name, std::to_string(i), std::to_string(rows[i].scenario_index),
               fmt_double(rows[i].tail_reward), fmt_double(rows[i].tail_pct_err)});
      errs.push_back(rows[i].tail_pct_err);
      rewards.push_back(rows[i].tail_reward);
    }
    std::printf("%s: %d rollouts, median tail error %s%%, median tail reward %s\n",
                name.c_str(), eo.n_starts, fmt_double(rl::median(errs)).c_str(),
                fmt_double(rl::median(rewards)).c_str());
  }
  std::printf("metrics: %s\n", (out / "eval_metrics.csv").string().c_str());
  return 0;
}

int cmd_compare(const ConfigFile& cfg, const RunOptions& opts) {
  const Experiment ex = make_experiment(cfg);
  const std::uint64_t seed = resolve_seed(cfg, opts);
  const fs::path out = resolve_out(cfg, opts);
  fs::create_directories(out);

  const rl::ActorCritic ac = load_agent(cfg.get_str("compare.checkpoint"));
  const envs::GoalEnv plant =
      make_env(ex, scenario_set_by_name(ex, cfg.get_str("compare.scenarios", "evaluation")));
  check_agent_env(ac, plant);

  const int rollouts = static_cast<int>(cfg.get_i64("compare.rollouts", 100));
  const int steps = static_cast<int>(cfg.get_i64("compare.steps", 100));

  mpc::MpcProblem unified = make_unified_problem(cfg, ex, &ac);
  mpc::MpcProblem baseline = make_baseline_problem(cfg, ex);

  CsvWriter csv((out / "compare_metrics.csv").string(),
                {"agent", "rollout", "metric", "value"});
  struct Summary {
    std::vector<double> tng, toc;
    int violating = 0, failures = 0;
  };
  std::map<std::string, Summary> summary;

  for (int i = 0; i < rollouts; ++i) {
    Rng draw(derive_seed(seed, static_cast<std::uint64_t>(3 * i)));
    const std::vector<double> x0 = uniform_in(draw, ex.init_box);
    const std::vector<double> goal = uniform_in(draw, ex.goal_box);
    const std::uint64_t solver_seed = derive_seed(seed, static_cast<std::uint64_t>(3 * i + 1));
    const std::uint64_t plant_seed = derive_seed(seed, static_cast<std::uint64_t>(3 * i + 2));

    set_goal_ref(baseline, ex, goal[0]);
    std::vector<std::pair<std::string, AgentRun>> runs;
    runs.emplace_back("mpc",
                      run_planner(baseline, plant, x0, goal, steps, solver_seed, plant_seed));
    {
      Rng plant_rng(plant_seed);
      runs.emplace_back("rl",
                        run_actor(plant, ac, x0, goal, steps, ex.state_box, plant_rng));
    }
    runs.emplace_back("rl_mpc",
                      run_planner(unified, plant, x0, goal, steps, solver_seed, plant_seed));

    for (auto& [agent, r] : runs) {
      csv.row({agent, std::to_string(i), "time_near_goal", fmt_double(r.time_near_goal)});
      csv.row({agent, std::to_string(i), "time_outside", fmt_double(r.time_outside)});
      csv.row({agent, std::to_string(i), "solver_failures", std::to_string(r.solver_failures)});
      Summary& s = summary[agent];
      s.tng.push_back(r.time_near_goal);
      s.toc.push_back(r.time_outside);
      if (r.time_outside < 0.0) ++s.violating;
      s.failures += r.solver_failures;
    }
  }

  for (auto& [agent, s] : summary)
    std::printf(
        "%s: median time-near-goal %s, median time-outside %s, violating %d/%d, "
        "solver failures %d\n",
        agent.c_str(), fmt_double(rl::median(s.tng)).c_str(),
        fmt_double(rl::median(s.toc)).c_str(), s.violating, rollouts, s.failures);
  std::printf("metrics: %s\n", (out / "compare_metrics.csv").string().c_str());
  return 0;
}

int cmd_profile(const ConfigFile& cfg, const RunOptions& opts) {
  const Experiment ex = make_experiment(cfg);
  const std::uint64_t seed = resolve_seed(cfg, opts);
  const fs::path out = resolve_out(cfg, opts);
  fs::create_directories(out);

  const rl::ActorCritic ac = load_agent(cfg.get_str("profile.checkpoint"));
  const envs::GoalEnv plant =
      make_env(ex, scenario_set_by_name(ex, cfg.get_str("profile.scenarios", "evaluation")));
  check_agent_env(ac, plant);

  Rng draw(derive_seed(seed, 777));
  std::vector<double> x0 = cfg.has("profile.start") ? cfg.get_f64_list("profile.start")
                                                    : uniform_in(draw, ex.init_box);
  std::vector<double> goal = cfg.has("profile.goal") ? cfg.get_f64_list("profile.goal")
                                                     : uniform_in(draw, ex.goal_box);
  if (static_cast<int>(x0.size()) != plant.state_dim())
    throw ConfigError("profile.start must have one value per state dimension");
  if (static_cast<int>(goal.size()) != plant.goal_dim())
    throw ConfigError("profile.goal must have one value per goal dimension");
  const int steps = static_cast<int>(cfg.get_i64("profile.steps", 100));

  mpc::MpcProblem unified = make_unified_problem(cfg, ex, &ac);
  mpc::MpcProblem baseline = make_baseline_problem(cfg, ex);
  set_goal_ref(baseline, ex, goal[0]);

  const std::uint64_t solver_seed = derive_seed(seed, 1);
  const std::uint64_t plant_seed = derive_seed(seed, 2);
  std::vector<std::pair<std::string, AgentRun>> runs;
  runs.emplace_back("mpc",
                    run_planner(baseline, plant, x0, goal, steps, solver_seed, plant_seed));
  {
    Rng plant_rng(plant_seed);
    runs.emplace_back("rl", run_actor(plant, ac, x0, goal, steps, ex.state_box, plant_rng));
  }
  runs.emplace_back("rl_mpc",
                    run_planner(unified, plant, x0, goal, steps, solver_seed, plant_seed));

  std::vector<std::string> header{"agent", "step"};
  for (const std::string& n : state_names(ex)) header.push_back(n);
  for (const std::string& n : action_names(ex)) header.push_back(n);
  header.push_back("reward");
  header.push_back("scenario_index");
  CsvWriter csv((out / "profile_traces.csv").string(), header);
  for (const auto& [agent, r] : runs)
    for (const envs::TrajectoryPoint& p : r.traj) {
      std::vector<std::string> row{agent, std::to_string(p.step)};
      for (double v : p.state) row.push_back(fmt_double(v));
      for (double v : p.action) row.push_back(fmt_double(v));
      row.push_back(fmt_double(p.reward));
      row.push_back(std::to_string(p.scenario_index));
      csv.row(row);
    }

  for (const auto& [agent, r] : runs)
    std::printf("%s: time-near-goal %s, time-outside %s, solver failures %d%s\n",
                agent.c_str(), fmt_double(r.time_near_goal).c_str(),
                fmt_double(r.time_outside).c_str(), r.solver_failures,
                r.plant_failed ? " (plant failed)" : "");
  std::printf("traces: %s\n", (out / "profile_traces.csv").string().c_str());
  return 0;
}

int cmd_lqr_demo(const ConfigFile& cfg, const RunOptions& opts) {
  const std::uint64_t seed = resolve_seed(cfg, opts);
  const std::string system = cfg.get_str("lqr.system", "double-integrator");

  lqr::LqrProblem lp;
  if (system == "double-integrator") {
    hf::dynamics::LinearSystem sys = dynamics::double_integrator(cfg.get_f64("lqr.dt", 0.1));
    lp.a = sys.a;
    lp.b = sys.b;
    lp.m = num::Tensor(2, 2, {1.0, 0.0, 0.0, 1.0});
    lp.r = num::Tensor(1, 1, {cfg.get_f64("lqr.r", 0.1)});
  } else if (system == "scalar") {
    lp.a = num::Tensor(1, 1, {cfg.get_f64("lqr.a", 1.0)});
    lp.b = num::Tensor(1, 1, {1.0});
    lp.m = num::Tensor(1, 1, {1.0});
    lp.r = num::Tensor(1, 1, {cfg.get_f64("lqr.r", 1.0)});
  } else if (system == "zero") {
    lp.a = num::Tensor(2, 2);
    lp.b = num::Tensor(2, 1, {1.0, 0.0});
    lp.m = num::Tensor(2, 2, {1.0, 0.0, 0.0, 1.0});
    lp.r = num::Tensor(1, 1, {1.0});
  } else {
    throw ConfigError("unknown lqr.system: " + system +
                      " (use double-integrator, scalar, or zero)");
  }
  lp.gamma = cfg.get_f64("lqr.gamma", 1.0);

  const lqr::LqrSolution sol = lqr::solve_dare(lp);
  const int n = lp.a.rows, m = lp.b.cols;
  std::printf("system: %s (n=%d, m=%d), gamma = %s\n", system.c_str(), n, m,
              fmt_double(lp.gamma).c_str());
  std::printf("P =\n");
  for (int i = 0; i < n; ++i) {
    std::printf(" ");
    for (int j = 0; j < n; ++j) std::printf(" %s", fmt_double(sol.p.at(i, j)).c_str());
    std::printf("\n");
  }
  std::printf("K =\n");
  for (int i = 0; i < m; ++i) {
    std::printf(" ");
    for (int j = 0; j < n; ++j) std::printf(" %s", fmt_double(sol.k.at(i, j)).c_str());
    std::printf("\n");
  }
  std::printf("residual = %s (tolerance 1e-10) after %d iterations\n",
              fmt_double(sol.residual).c_str(), sol.iterations);

  // planner-vs-policy check on the unconstrained problem
  mpc::MpcProblem p;
  p.model = std::make_shared<dynamics::LinearModel>(dynamics::LinearSystem{lp.a, lp.b});
  p.horizon = static_cast<int>(cfg.get_i64("lqr.mpc_horizon", 5));
  p.scenarios.params = {dynamics::ScenarioParam::nominal()};
  p.gamma = lp.gamma;
  p.stage = mpc::StageKind::Quadratic;
  p.stage_m = lp.m;
  p.stage_r = lp.r;
  p.terminal = mpc::TerminalKind::Quadratic;
  p.terminal_p = sol.p;
  p.state_box = envs::BoxConstraint(std::vector<double>(n, -1e6), std::vector<double>(n, 1e6));
  p.action_box = envs::BoxConstraint(std::vector<double>(m, -1e3), std::vector<double>(m, 1e3));
  p.budget.iterations = static_cast<int>(cfg.get_i64("lqr.iterations", 1500));
  p.budget.restarts = static_cast<int>(cfg.get_i64("lqr.restarts", 2));

  const int n_states = static_cast<int>(cfg.get_i64("lqr.states", 20));
  Rng rng(derive_seed(seed, 1));
  const mpc::ActionPlan warm = mpc::box_center_plan(p);
  double worst = 0.0;
  for (int t = 0; t < n_states; ++t) {
    std::vector<double> x0(static_cast<std::size_t>(n));
    for (double& v : x0) v = rng.uniform(-2.0, 2.0);
    Rng solver_rng(derive_seed(seed, static_cast<std::uint64_t>(100 + t)));
    const mpc::SolveResult res = mpc::solve(p, x0, {}, warm, solver_rng);
    std::vector<double> u_star(static_cast<std::size_t>(m));
    lqr::lqr_policy(sol, x0, u_star);
    for (int i = 0; i < m; ++i) {
      const double rel = std::abs(res.plan.u0[i] - u_star[i]) /
                         std::max({std::abs(res.plan.u0[i]), std::abs(u_star[i]), 1e-6});
      worst = std::max(worst, rel);
    }
  }
  const bool pass = worst <= 1e-3;
  std::printf("planner vs policy: max relative error %s over %d states (tolerance 0.001): %s\n",
              fmt_double(worst).c_str(), n_states, pass ? "PASS" : "FAIL");
  return pass ? 0 : 3;
}

}  // namespace hf::cli
