// orl: desk-scale harness for offline training, UCB model selection, and
// expert-override fine-tuning on the built-in toy environments.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orl/envs.hpp"
#include "orl/io.hpp"
#include "orl/pipeline.hpp"

namespace {

using namespace orl;

// Wraps a stored model (either kind) as the deployable policy for env.
struct LoadedPolicy {
  StoredModel model;
  std::vector<int> greedy;        // discrete
  ContinuousPolicyFn fn;          // continuous
};

LoadedPolicy load_policy(const EnvBundle& env, const std::string& path) {
  LoadedPolicy p;
  p.model = load_model(path);
  if (p.model.env_id != env.id)
    throw std::runtime_error(path + ": model is for env '" + p.model.env_id +
                             "', not '" + env.id + "'");
  if (p.model.discrete != env.discrete)
    throw std::runtime_error(path + ": model kind does not match env " + env.id);
  if (env.discrete) {
    p.greedy = p.model.q.greedy();
  } else {
    const Mlp actor = p.model.ac.actor;
    p.fn = [actor](const Vec2& s) { return actor.forward({s[0], s[1]})[0]; };
  }
  return p;
}

CandidateSet policies_to_set(const EnvBundle& env,
                             const std::vector<std::string>& paths) {
  CandidateSet set;
  set.env_id = env.id;
  for (const std::string& path : paths) {
    LoadedPolicy p = load_policy(env, path);
    set.lambdas.push_back(0.0);  // unknown for externally trained models
    if (env.discrete)
      set.q.push_back(std::move(p.model.q));
    else
      set.ac.push_back(std::move(p.model.ac));
  }
  return set;
}

int cmd_gen_dataset(const std::string& env_id, long steps, double epsilon,
                    std::uint64_t seed, const std::string& out) {
  const EnvBundle env = make_env(env_id);
  Rng rng(derive_seed(seed, "dataset"));
  Dataset data = env.discrete
                     ? collect_dataset(env.mdp, env.expert, epsilon, steps, rng,
                                       env.id)
                     : collect_dataset(env.pm, env.expert_gain, epsilon, steps,
                                       rng, env.id);
  data.seed = seed;
  save_dataset(data, out);
  std::printf("wrote %zu transitions to %s\n", data.transitions.size(),
              out.c_str());
  return 0;
}

int cmd_train_offline(const std::string& env_id, const std::string& dataset,
                      double lambda, int epochs, int minibatch, double lr,
                      std::uint64_t seed, const std::string& out) {
  const EnvBundle env = make_env(env_id);
  const Dataset data = load_dataset(dataset);
  if (!data.env_id.empty() && data.env_id != env.id)
    throw std::runtime_error(dataset + ": dataset is for env '" + data.env_id +
                             "', not '" + env.id + "'");
  OfflineConfig cfg;
  cfg.lambda = lambda;
  cfg.epochs = epochs;
  cfg.minibatch = minibatch;
  cfg.gamma = env.discrete ? env.mdp.gamma : env.pm.gamma;
  cfg.seed = derive_seed(seed, "train");
  cfg.lr = lr > 0 ? lr : (env.discrete ? 0.02 : 1e-3);
  if (env.discrete) {
    const DiscreteQ q = train_offline_discrete(data, cfg, env.mdp.n_states,
                                               env.mdp.n_actions);
    save_model(q, env.id, out);
  } else {
    const ActorCritic ac = train_offline_continuous(data, cfg, env.pm);
    save_model(ac, env.id, out);
  }
  std::printf("trained lambda=%g model -> %s\n", lambda, out.c_str());
  return 0;
}

int cmd_eval(const std::string& env_id, const std::string& model_path,
             long episodes, std::uint64_t seed, const std::string& out) {
  const EnvBundle env = make_env(env_id);
  const LoadedPolicy p = load_policy(env, model_path);
  Rng rng(derive_seed(seed, "eval"));
  std::vector<EpisodeLog> logs;
  for (long i = 0; i < episodes; ++i)
    logs.push_back(env.discrete
                       ? rollout_episode(p.greedy, env.expert, env.mdp,
                                         env.score, rng)
                       : rollout_episode(p.fn, env.expert_fn(), env.pm,
                                         env.score, rng));
  write_eval_csv(logs, seed, model_path, out);
  double mean = 0.0;
  for (const EpisodeLog& log : logs) mean += log.score;
  mean /= episodes > 0 ? episodes : 1;
  std::printf("mean score over %ld episodes: %.6f\n", episodes, mean);
  if (env.discrete) {
    const ExpectedScore exact =
        expected_score_exact(env.mdp, p.greedy, env.expert, env.score);
    std::printf("exact expected score: %.6f\n", exact.value);
  }
  return 0;
}

int cmd_select(const std::string& env_id,
               const std::vector<std::string>& model_paths, long iterations,
               double beta, std::uint64_t seed, long oracle_episodes,
               const std::string& out) {
  const EnvBundle env = make_env(env_id);
  if (model_paths.size() < 2)
    throw std::runtime_error("select: need at least 2 --model files");
  const CandidateSet set = policies_to_set(env, model_paths);
  const std::vector<double> expected = candidate_expected_scores(
      env, set, oracle_episodes, derive_seed(seed, "oracle"));
  const double s_star = *std::max_element(expected.begin(), expected.end());
  const SelectionTrace trace = run_model_selection(
      env, set, iterations, beta, s_star, derive_seed(seed, "select"));
  write_selection_csv(trace, out);
  std::vector<long> pulls(set.size(), 0);
  for (int arm : trace.arm) ++pulls[arm];
  std::printf("oracle S* = %.6f\n", s_star);
  for (std::size_t i = 0; i < set.size(); ++i)
    std::printf("arm %zu (%s): expected %.6f, pulled %ld times\n", i + 1,
                model_paths[i].c_str(), expected[i], pulls[i]);
  std::printf("final cumulative regret: %.6f\n", trace.regret.back());
  return 0;
}

int cmd_finetune(const std::string& env_id, const std::string& model_path,
                 long iterations, double lr, bool replay, std::uint64_t seed,
                 const std::string& out, const std::string& out_model) {
  const EnvBundle env = make_env(env_id);
  LoadedPolicy p = load_policy(env, model_path);
  FinetuneConfig cfg;
  cfg.iterations = iterations;
  cfg.gamma = env.discrete ? env.mdp.gamma : env.pm.gamma;
  cfg.lr = lr > 0 ? lr : (env.discrete ? 0.05 : 5e-3);
  cfg.tau = env.score.tau;
  cfg.replay = replay;
  Rng rng(derive_seed(seed, "finetune"));
  FinetuneTrace trace;
  if (env.discrete) {
    trace = run_finetuning(p.model.q, env.expert, env.mdp, env.score, cfg, rng);
    if (!out_model.empty()) save_model(p.model.q, env.id, out_model);
  } else {
    trace = run_finetuning(p.model.ac, env.expert_fn(), env.pm, env.score, cfg,
                           rng);
    if (!out_model.empty()) save_model(p.model.ac, env.id, out_model);
  }
  write_finetune_csv(trace, out);
  const std::size_t n = trace.disagreements.size();
  const std::size_t w = std::min<std::size_t>(20, n);
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < w; ++i) first += trace.disagreements[i];
  for (std::size_t i = n - w; i < n; ++i) last += trace.disagreements[i];
  std::printf("mean disagreements: first %zu iters %.2f, last %zu iters %.2f\n",
              w, first / w, w, last / w);
  return 0;
}

int cmd_report(const std::vector<std::string>& traces, int window) {
  const ReportSummary summary = summarize_traces(traces, window);
  std::printf("%ld trace file(s), last-%d-iteration score: %s\n", summary.files,
              window, format_mean_std(summary.mean, summary.stddev).c_str());
  return 0;
}

int cmd_reproduce(const std::string& env_id, const std::string& config_path,
                  const std::string& out_dir) {
  const EnvBundle env = make_env(env_id);
  const Config cfg =
      config_path.empty() ? Config{} : parse_config(config_path);
  reproduce_protocol(env, cfg, out_dir);
  std::printf("protocol outputs written under %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale offline-RL deployment harness"};
  app.require_subcommand(1);

  std::string env_id = "grid5", dataset, model, out, out_model, config_path;
  std::vector<std::string> models, traces;
  long steps = 20000, episodes = 100, iterations = 100, oracle_episodes = 10000;
  double epsilon = 0.2, lambda = 0.0, lr = -1.0, beta = 1.0;
  int epochs = 30, minibatch = 64, window = 10;
  std::uint64_t seed = 7;
  bool replay = false;

  auto* gen = app.add_subcommand("gen-dataset", "collect an offline dataset");
  gen->add_option("--env", env_id)->check(CLI::IsMember({"grid5", "queue2", "pointmass"}));
  gen->add_option("--steps", steps)->check(CLI::PositiveNumber);
  gen->add_option("--epsilon", epsilon)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", seed);
  gen->add_option("--out", out)->required();

  auto* train = app.add_subcommand("train-offline", "train one penalized model");
  train->add_option("--env", env_id)->check(CLI::IsMember({"grid5", "queue2", "pointmass"}));
  train->add_option("--dataset", dataset)->required();
  train->add_option("--lambda", lambda)->check(CLI::NonNegativeNumber);
  train->add_option("--epochs", epochs)->check(CLI::PositiveNumber);
  train->add_option("--minibatch", minibatch)->check(CLI::PositiveNumber);
  train->add_option("--lr", lr);
  train->add_option("--seed", seed);
  train->add_option("--out", out)->required();

  auto* eval = app.add_subcommand("eval", "score a model over episodes");
  eval->add_option("--env", env_id)->check(CLI::IsMember({"grid5", "queue2", "pointmass"}));
  eval->add_option("--model", model)->required();
  eval->add_option("--episodes", episodes)->check(CLI::PositiveNumber);
  eval->add_option("--seed", seed);
  eval->add_option("--out", out)->required();

  auto* select = app.add_subcommand("select", "UCB selection over models");
  select->add_option("--env", env_id)->check(CLI::IsMember({"grid5", "queue2", "pointmass"}));
  select->add_option("--model", models)->required();
  select->add_option("--iterations", iterations)->check(CLI::PositiveNumber);
  select->add_option("--beta", beta)->check(CLI::NonNegativeNumber);
  select->add_option("--oracle-episodes", oracle_episodes)->check(CLI::PositiveNumber);
  select->add_option("--seed", seed);
  select->add_option("--out", out)->required();

  auto* fine = app.add_subcommand("finetune", "expert-override fine-tuning");
  fine->add_option("--env", env_id)->check(CLI::IsMember({"grid5", "queue2", "pointmass"}));
  fine->add_option("--model", model)->required();
  fine->add_option("--iterations", iterations)->check(CLI::PositiveNumber);
  fine->add_option("--lr", lr);
  fine->add_flag("--replay", replay);
  fine->add_option("--seed", seed);
  fine->add_option("--out", out)->required();
  fine->add_option("--out-model", out_model);

  auto* report = app.add_subcommand("report", "summarize trace CSVs");
  report->add_option("--trace", traces)->required();
  report->add_option("--window", window)->check(CLI::PositiveNumber);

  auto* repro = app.add_subcommand("reproduce", "run the full protocol");
  repro->add_option("--env", env_id)->check(CLI::IsMember({"grid5", "queue2", "pointmass"}));
  repro->add_option("--config", config_path);
  repro->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_dataset(env_id, steps, epsilon, seed, out);
    if (train->parsed())
      return cmd_train_offline(env_id, dataset, lambda, epochs, minibatch, lr,
                               seed, out);
    if (eval->parsed()) return cmd_eval(env_id, model, episodes, seed, out);
    if (select->parsed())
      return cmd_select(env_id, models, iterations, beta, seed,
                        oracle_episodes, out);
    if (fine->parsed())
      return cmd_finetune(env_id, model, iterations, lr, replay, seed, out,
                          out_model);
    if (report->parsed()) return cmd_report(traces, window);
    if (repro->parsed()) return cmd_reproduce(env_id, config_path, out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
