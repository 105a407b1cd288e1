#include "hf/cli/experiment.hpp"

#include <utility>

#include "hf/common/error.hpp"
#include "hf/dynamics/cstr.hpp"
#include "hf/dynamics/linear.hpp"

namespace hf::cli {

EnvKind env_kind_from_string(const std::string& s) {
  if (s == "cstr") return EnvKind::Cstr;
  if (s == "linear") return EnvKind::Linear;
  throw ConfigError("unknown env.kind: " + s + " (use cstr or linear)");
}

std::string to_string(EnvKind k) { return k == EnvKind::Cstr ? "cstr" : "linear"; }

Experiment make_experiment(const ConfigFile& cfg) {
  Experiment ex;
  ex.kind = env_kind_from_string(cfg.get_str("env.kind", "cstr"));

  if (ex.kind == EnvKind::Cstr) {
    envs::CstrSetup s;
    s.sigma_sq = cfg.get_f64("env.sigma_sq", s.sigma_sq);
    s.episode_len = static_cast<int>(cfg.get_i64("env.episode_len", s.episode_len));
    s.sim.dt = cfg.get_f64("env.dt", s.sim.dt);
    s.sim.substeps = static_cast<int>(cfg.get_i64("env.substeps", s.sim.substeps));
    const int grid_n = static_cast<int>(cfg.get_i64("env.grid_n", 10));
    ex.setup = s;

    ex.state_box = s.state_box;
    ex.goal_box = s.goal_box;
    ex.action_box = s.action_box;
    ex.init_box = s.state_box;  // starts sampled anywhere inside the constraint set
    ex.env_sigma_sq = s.sigma_sq;
    ex.episode_len = s.episode_len;

    ex.plant_sim = s.sim;
    ex.plant_model = std::make_shared<dynamics::CstrModel>(s.sim);
    ex.planner_sim = dynamics::SimConfig{cfg.get_f64("mpc.dt", s.sim.dt),
                                         static_cast<int>(cfg.get_i64("mpc.substeps", 1))};
    ex.planner_model = std::make_shared<dynamics::CstrModel>(ex.planner_sim);

    ex.train_scenarios = envs::cstr_training_scenarios(s, grid_n);
    ex.eval_scenarios = envs::cstr_evaluation_scenarios(s, grid_n);
    ex.mpc_scenarios = envs::cstr_mpc_scenarios(s);
    ex.nominal_scenario = envs::cstr_nominal_scenario();
    ex.goal_state_index = 1;  // concentration of the product species
  } else {
    const double dt = cfg.get_f64("env.dt", 0.1);
    auto model = std::make_shared<dynamics::LinearModel>(dynamics::double_integrator(dt),
                                                         std::vector<double>{0.0, 1.0});
    ex.plant_model = model;
    ex.planner_model = model;
    ex.plant_sim = dynamics::SimConfig{dt, 1};
    ex.planner_sim = ex.plant_sim;

    ex.state_box = envs::BoxConstraint({-2.0, -2.0}, {2.0, 2.0});
    ex.init_box = envs::BoxConstraint({-1.0, -1.0}, {1.0, 1.0});
    ex.goal_box = envs::BoxConstraint({-1.0}, {1.0});
    ex.action_box = envs::BoxConstraint({-1.0}, {1.0});
    ex.env_sigma_sq = cfg.get_f64("env.sigma_sq", 0.01);
    ex.episode_len = static_cast<int>(cfg.get_i64("env.episode_len", 50));

    envs::ScenarioSet sc;
    for (double s : cfg.get_f64_list("env.shifts", {}))
      sc.params.push_back(dynamics::ScenarioParam::shifted(s));
    if (sc.params.empty()) sc.params = {dynamics::ScenarioParam::nominal()};
    ex.train_scenarios = sc;
    ex.eval_scenarios = sc;
    ex.mpc_scenarios = sc;
    ex.nominal_scenario.params = {dynamics::ScenarioParam::nominal()};
    ex.goal_state_index = 0;  // position coordinate
  }

  const int gi = ex.goal_state_index;
  ex.goal_map = [gi](std::span<const double> s, std::span<double> g) { g[0] = s[gi]; };
  ex.goal_map_node = [gi](num::Tape& t, num::NodeId x) { return t.slice(x, gi, 1); };
  return ex;
}

const envs::ScenarioSet& scenario_set_by_name(const Experiment& ex, const std::string& name) {
  if (name == "training") return ex.train_scenarios;
  if (name == "nominal") return ex.nominal_scenario;
  if (name == "evaluation") return ex.eval_scenarios;
  if (name == "mpc") return ex.mpc_scenarios;
  throw ConfigError("unknown scenario set: " + name +
                    " (use training, nominal, evaluation, or mpc)");
}

envs::GoalEnv make_env(const Experiment& ex, const envs::ScenarioSet& scenarios) {
  return envs::GoalEnv(ex.plant_model, scenarios, ex.goal_map, 1, ex.env_sigma_sq,
                       ex.init_box, ex.goal_box, ex.action_box, ex.episode_len);
}

std::uint64_t resolve_seed(const ConfigFile& cfg, const RunOptions& opts) {
  if (opts.seed) return *opts.seed;
  return cfg.get_u64("run.seed", 0);
}

std::filesystem::path resolve_out(const ConfigFile& cfg, const RunOptions& opts) {
  if (opts.out_dir) return *opts.out_dir;
  return cfg.get_str("run.out", "out");
}

rl::TrainConfig make_train_config(const ConfigFile& cfg, std::uint64_t seed) {
  rl::TrainConfig tc;
  tc.total_steps = cfg.get_i64("train.total_steps", tc.total_steps);
  tc.batch_size = static_cast<int>(cfg.get_i64("train.batch_size", tc.batch_size));
  tc.buffer_capacity = static_cast<std::size_t>(
      cfg.get_i64("train.buffer_capacity", static_cast<std::int64_t>(tc.buffer_capacity)));
  tc.warmup_steps = static_cast<int>(cfg.get_i64("train.warmup_steps", tc.warmup_steps));
  tc.target_mode = rl::target_mode_from_string(cfg.get_str("train.target_mode", "sampled"));
  tc.her = cfg.get_bool("train.her", tc.her);
  tc.seed = seed;
  tc.hidden = cfg.get_int_list("train.hidden", tc.hidden);
  tc.updates_per_step = cfg.get_f64("train.updates_per_step", tc.updates_per_step);
  tc.gamma = cfg.get_f64("train.gamma", tc.gamma);
  tc.tau = cfg.get_f64("train.tau", tc.tau);
  tc.noise_scale = cfg.get_f64("train.noise_scale", tc.noise_scale);
  tc.actor_lr = cfg.get_f64("train.actor_lr", tc.actor_lr);
  tc.critic_lr = cfg.get_f64("train.critic_lr", tc.critic_lr);
  return tc;
}

rl::EvalOptions make_eval_options(const ConfigFile& cfg, std::uint64_t seed, int threads) {
  rl::EvalOptions eo;
  eo.n_starts = static_cast<int>(cfg.get_i64("eval.n_starts", eo.n_starts));
  eo.horizon = static_cast<int>(cfg.get_i64("eval.horizon", eo.horizon));
  eo.tail = static_cast<int>(cfg.get_i64("eval.tail", eo.tail));
  eo.seed = seed;
  eo.threads = threads;
  return eo;
}

namespace {

mpc::SolverBudget budget_from(const ConfigFile& cfg, const std::string& prefix) {
  mpc::SolverBudget b;
  b.iterations = static_cast<int>(cfg.get_i64(prefix + ".iterations", b.iterations));
  b.restarts = static_cast<int>(cfg.get_i64(prefix + ".restarts", b.restarts));
  b.step_size = cfg.get_f64(prefix + ".step_size", b.step_size);
  b.step_floor = cfg.get_f64(prefix + ".step_floor", b.step_floor);
  b.refine_iterations =
      static_cast<int>(cfg.get_i64(prefix + ".refine_iterations", b.refine_iterations));
  b.refine_restarts =
      static_cast<int>(cfg.get_i64(prefix + ".refine_restarts", b.refine_restarts));
  return b;
}

}  // namespace

mpc::MpcProblem make_unified_problem(const ConfigFile& cfg, const Experiment& ex,
                                     const rl::ActorCritic* critic) {
  mpc::MpcProblem p;
  p.model = ex.planner_model;
  p.horizon = static_cast<int>(cfg.get_i64("mpc.horizon", 5));
  p.scenarios = scenario_set_by_name(ex, cfg.get_str("mpc.scenarios", "mpc"));
  p.gamma = cfg.get_f64("mpc.gamma", 1.0);
  p.stage = mpc::StageKind::GaussianGoal;
  p.sigma_sq = cfg.get_f64("mpc.sigma_sq", 0.0625);
  p.goal_dim = 1;
  p.goal_map = ex.goal_map_node;
  p.penalty_weight = cfg.get_f64("mpc.penalty_weight", 1.0);
  p.terminal =
      mpc::terminal_kind_from_string(cfg.get_str("mpc.terminal", critic ? "critic" : "none"));
  p.critic = critic;
  p.state_box = ex.state_box;
  p.action_box = ex.action_box;
  p.budget = budget_from(cfg, "mpc");
  p.validate();
  return p;
}

mpc::MpcProblem make_baseline_problem(const ConfigFile& cfg, const Experiment& ex) {
  mpc::MpcProblem p;
  p.model = ex.planner_model;
  p.horizon = static_cast<int>(cfg.get_i64("baseline.horizon", 20));
  p.scenarios = scenario_set_by_name(ex, cfg.get_str("baseline.scenarios", "mpc"));
  p.gamma = cfg.get_f64("baseline.gamma", 1.0);
  p.stage = mpc::StageKind::Quadratic;

  const int n = ex.plant_model->state_dim();
  const int m = ex.plant_model->action_dim();
  const int gi = ex.goal_state_index;
  // weights act on box-normalized deviations so both reactor actuators and
  // both goal directions count comparably
  const double gw = cfg.get_f64("baseline.goal_weight", 1.0);
  const double aw = cfg.get_f64("baseline.action_weight", 1e-3);
  p.stage_m = num::Tensor(n, n);
  const double ghw = ex.state_box.halfwidth(static_cast<std::size_t>(gi));
  p.stage_m.at(gi, gi) = gw / (ghw * ghw);
  p.stage_r = num::Tensor(m, m);
  p.action_ref.resize(m);
  for (int i = 0; i < m; ++i) {
    const double hw = ex.action_box.halfwidth(static_cast<std::size_t>(i));
    p.stage_r.at(i, i) = aw / (hw * hw);
    p.action_ref[i] = ex.action_box.center(static_cast<std::size_t>(i));
  }
  set_goal_ref(p, ex, ex.goal_box.center(0));

  p.penalty_weight = cfg.get_f64("baseline.penalty_weight", 1000.0);
  p.terminal = mpc::TerminalKind::None;
  p.state_box = ex.state_box;
  p.action_box = ex.action_box;
  p.budget = budget_from(cfg, "baseline");
  p.validate();
  return p;
}

void set_goal_ref(mpc::MpcProblem& prob, const Experiment& ex, double goal_value) {
  prob.state_ref.assign(static_cast<std::size_t>(prob.state_dim()), 0.0);
  prob.state_ref[static_cast<std::size_t>(ex.goal_state_index)] = goal_value;
}

}  // namespace hf::cli
