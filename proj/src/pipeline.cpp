#include "orl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace orl {

std::vector<int> candidate_policy(const CandidateSet& set, int i) {
  return set.q.at(i).greedy();
}

ContinuousPolicyFn candidate_policy_fn(const CandidateSet& set, int i) {
  const Mlp actor = set.ac.at(i).actor;  // by value: detach from the set
  return [actor](const Vec2& s) { return actor.forward({s[0], s[1]})[0]; };
}

std::vector<double> candidate_expected_scores(const EnvBundle& env,
                                              const CandidateSet& set,
                                              long mc_episodes,
                                              std::uint64_t seed) {
  std::vector<double> scores;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (env.discrete) {
      scores.push_back(expected_score_exact(env.mdp, candidate_policy(set, static_cast<int>(i)),
                                            env.expert, env.score)
                           .value);
    } else {
      Rng rng(derive_seed(seed, "oracle-mc", i));
      scores.push_back(expected_score_mc(env.pm, candidate_policy_fn(set, static_cast<int>(i)),
                                         env.expert_fn(), env.score,
                                         mc_episodes, rng)
                           .value);
    }
  }
  return scores;
}

double deploy_candidate(const EnvBundle& env, const CandidateSet& set, int arm,
                        Rng& rng) {
  if (env.discrete)
    return rollout_episode(candidate_policy(set, arm), env.expert, env.mdp,
                           env.score, rng)
        .score;
  return rollout_episode(candidate_policy_fn(set, arm), env.expert_fn(),
                         env.pm, env.score, rng)
      .score;
}

SelectionTrace run_model_selection(const EnvBundle& env,
                                   const CandidateSet& set, long iterations,
                                   double beta, double s_star,
                                   std::uint64_t seed) {
  Rng rng(seed);
  // Greedy policies are extracted once; deployment then only rolls episodes.
  std::vector<std::vector<int>> policies;
  std::vector<ContinuousPolicyFn> policy_fns;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (env.discrete)
      policies.push_back(candidate_policy(set, static_cast<int>(i)));
    else
      policy_fns.push_back(candidate_policy_fn(set, static_cast<int>(i)));
  }
  auto deploy = [&](int arm, Rng& r) {
    if (env.discrete)
      return rollout_episode(policies[arm], env.expert, env.mdp, env.score, r)
          .score;
    return rollout_episode(policy_fns[arm], env.expert_fn(), env.pm, env.score,
                           r)
        .score;
  };
  return run_selection(static_cast<int>(set.size()), iterations, beta, s_star,
                       deploy, rng);
}

void write_selection_csv(const SelectionTrace& trace, const std::string& path) {
  CsvWriter csv(path, {"k", "arm", "score", "regret",
                       "best_arm_so_far"});
  const std::size_t n = trace.arm.size();
  std::vector<long> pulls;
  std::vector<double> sums;
  for (std::size_t i = 0; i < n; ++i) {
    const int arm = trace.arm[i];
    if (arm >= static_cast<int>(pulls.size())) {
      pulls.resize(arm + 1, 0);
      sums.resize(arm + 1, 0.0);
    }
    pulls[arm] += 1;
    sums[arm] += trace.score[i];
    int best = 0;
    double best_mean = -1e300;
    for (std::size_t j = 0; j < pulls.size(); ++j) {
      if (pulls[j] == 0) continue;
      const double mean = sums[j] / pulls[j];
      if (mean > best_mean) {
        best_mean = mean;
        best = static_cast<int>(j);
      }
    }
    csv.row({std::to_string(i + 1), std::to_string(arm + 1),
             fmt_double(trace.score[i]), fmt_double(trace.regret[i]),
             std::to_string(best + 1)});
  }
  csv.close();
}

void write_finetune_csv(const FinetuneTrace& trace, const std::string& path) {
  CsvWriter csv(path, {"k", "env_return", "disagreements", "overrides",
                       "score"});
  for (std::size_t i = 0; i < trace.score.size(); ++i)
    csv.row({std::to_string(i + 1), fmt_double(trace.env_return[i]),
             std::to_string(trace.disagreements[i]),
             std::to_string(trace.overrides[i]), fmt_double(trace.score[i])});
  csv.close();
}

void write_eval_csv(const std::vector<EpisodeLog>& logs, std::uint64_t seed,
                    const std::string& model_id, const std::string& path) {
  CsvWriter csv(path, {"seed", "iteration", "model_id", "env_return",
                       "disagreements", "score"});
  double sum_ret = 0.0, sum_dis = 0.0, sum_score = 0.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    csv.row({std::to_string(seed), std::to_string(i + 1), model_id,
             fmt_double(logs[i].env_return),
             std::to_string(logs[i].disagreements),
             fmt_double(logs[i].score)});
    sum_ret += logs[i].env_return;
    sum_dis += logs[i].disagreements;
    sum_score += logs[i].score;
  }
  const double n = logs.empty() ? 1.0 : static_cast<double>(logs.size());
  csv.row({std::to_string(seed), "mean", model_id, fmt_double(sum_ret / n),
           fmt_double(sum_dis / n), fmt_double(sum_score / n)});
  csv.close();
}

namespace {

const std::vector<std::string> kSelectHeader = {
    "k", "arm", "score", "regret", "best_arm_so_far"};
const std::vector<std::string> kFinetuneHeader = {
    "k", "env_return", "disagreements", "overrides", "score"};
const std::vector<std::string> kEvalHeader = {
    "seed", "iteration", "model_id", "env_return", "disagreements", "score"};

std::size_t score_column(const std::vector<std::string>& header,
                         const std::string& path) {
  if (header != kSelectHeader && header != kFinetuneHeader &&
      header != kEvalHeader)
    throw std::runtime_error(path + ": unknown CSV header");
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == "score") return i;
  throw std::runtime_error(path + ": no score column");
}

}  // namespace

ReportSummary summarize_traces(const std::vector<std::string>& paths,
                               int window) {
  if (paths.empty()) throw std::invalid_argument("report: no trace files");
  std::vector<double> per_file;
  for (const std::string& path : paths) {
    const CsvFile csv = read_csv(path);
    const std::size_t col = score_column(csv.header, path);
    std::vector<double> scores;
    for (const auto& row : csv.rows) {
      if (csv.header == kEvalHeader && row[1] == "mean") continue;
      scores.push_back(std::strtod(row[col].c_str(), nullptr));
    }
    if (scores.empty()) throw std::runtime_error(path + ": no data rows");
    const std::size_t w = std::min<std::size_t>(window, scores.size());
    double acc = 0.0;
    for (std::size_t i = scores.size() - w; i < scores.size(); ++i)
      acc += scores[i];
    per_file.push_back(acc / w);
  }
  ReportSummary out;
  out.files = static_cast<long>(per_file.size());
  for (double v : per_file) out.mean += v;
  out.mean /= per_file.size();
  double var = 0.0;
  for (double v : per_file) var += (v - out.mean) * (v - out.mean);
  out.stddev = per_file.size() > 1
                   ? std::sqrt(var / (per_file.size() - 1))
                   : 0.0;
  return out;
}

std::string format_mean_std(double mean, double stddev) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", mean, stddev);
  return buf;
}

void reproduce_protocol(const EnvBundle& env, const Config& cfg,
                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto path = [&](const std::string& name) { return out_dir + "/" + name; };

  const std::uint64_t master = config_get_long(cfg, "seed", 7);
  const long dataset_steps = config_get_long(cfg, "dataset.steps", 20000);
  const double epsilon = config_get_double(cfg, "dataset.epsilon", 0.2);
  const long K = config_get_long(cfg, "select.K", 100);
  const double beta = config_get_double(cfg, "select.beta", 1.0);
  const long finetune_K = config_get_long(cfg, "finetune.K", 200);
  const int n_seeds = static_cast<int>(config_get_long(cfg, "seeds", 5));
  const long mc_episodes = config_get_long(cfg, "oracle.episodes", 10000);

  std::vector<double> lambdas;
  {
    std::string grid = config_get(cfg, "lambdas", "0,1,5,10,100");
    std::replace(grid.begin(), grid.end(), ',', ' ');
    std::istringstream ss(grid);
    double v;
    while (ss >> v) lambdas.push_back(v);
  }

  OfflineConfig ocfg;
  ocfg.epochs = static_cast<int>(config_get_long(cfg, "offline.epochs", 30));
  ocfg.minibatch =
      static_cast<int>(config_get_long(cfg, "offline.minibatch", 64));
  ocfg.lr = config_get_double(cfg, "offline.lr", env.discrete ? 0.02 : 1e-3);

  RunManifest manifest;
  manifest.config_hash = config_hash(cfg);
  auto note_stage = [&](const std::string& stage, std::uint64_t seed) {
    manifest.stage_seeds.emplace_back(stage, seed);
  };

  // Candidates and their expected scores.
  const std::uint64_t cand_seed = derive_seed(master, "candidates");
  note_stage("candidates", cand_seed);
  Rng data_rng(derive_seed(cand_seed, "dataset"));
  Dataset data = env.discrete
                     ? collect_dataset(env.mdp, env.expert, epsilon,
                                       dataset_steps, data_rng, env.id)
                     : collect_dataset(env.pm, env.expert_gain, epsilon,
                                       dataset_steps, data_rng, env.id);
  data.seed = derive_seed(cand_seed, "dataset");
  save_dataset(data, path("dataset.ds"));
  const CandidateSet set = build_candidates(env, lambdas, data, ocfg, cand_seed);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::string mp = path("model_" + std::to_string(i + 1) + ".model");
    if (env.discrete)
      save_model(set.q[i], env.id, mp);
    else
      save_model(set.ac[i], env.id, mp);
  }

  const std::vector<double> expected =
      candidate_expected_scores(env, set, mc_episodes, derive_seed(master, "oracle"));
  {
    CsvWriter csv(path("candidates.csv"), {"model", "lambda", "expected_score"});
    for (std::size_t i = 0; i < expected.size(); ++i)
      csv.row({std::to_string(i + 1), fmt_double(set.lambdas[i]),
               fmt_double(expected[i])});
    csv.close();
  }
  const double s_star = *std::max_element(expected.begin(), expected.end());
  const int worst = static_cast<int>(
      std::min_element(expected.begin(), expected.end()) - expected.begin());

  // Selection: UCB and baselines, one trace per seed.
  std::vector<std::string> ucb_files, random_files, highestq_files;
  for (int r = 0; r < n_seeds; ++r) {
    const std::uint64_t seed = derive_seed(master, "select", r);
    note_stage("select-" + std::to_string(r), seed);
    const SelectionTrace trace = run_model_selection(env, set, K, beta, s_star, seed);
    ucb_files.push_back(path("ucb_seed" + std::to_string(r) + ".csv"));
    write_selection_csv(trace, ucb_files.back());

    Rng rrng(derive_seed(master, "random-ensemble", r));
    SelectionTrace rnd;
    rnd.s_star = s_star;
    for (long k = 0; k < K; ++k) {
      const int arm = baseline_random_ensemble(static_cast<int>(set.size()), rrng);
      rnd.arm.push_back(arm);
      rnd.score.push_back(deploy_candidate(env, set, arm, rrng));
    }
    rnd.regret = cumulative_regret(rnd.score, s_star);
    random_files.push_back(path("random_seed" + std::to_string(r) + ".csv"));
    write_selection_csv(rnd, random_files.back());

    Rng hrng(derive_seed(master, "highest-q", r));
    const int harm = env.discrete ? baseline_highest_q(set.q, data)
                                  : baseline_highest_q(set.ac, data);
    SelectionTrace hq;
    hq.s_star = s_star;
    for (long k = 0; k < K; ++k) {
      hq.arm.push_back(harm);
      hq.score.push_back(deploy_candidate(env, set, harm, hrng));
    }
    hq.regret = cumulative_regret(hq.score, s_star);
    highestq_files.push_back(path("highestq_seed" + std::to_string(r) + ".csv"));
    write_selection_csv(hq, highestq_files.back());
  }

  // Fine-tuning of the worst candidate.
  FinetuneConfig fcfg;
  fcfg.iterations = finetune_K;
  fcfg.delta = config_get_double(cfg, "finetune.delta", 1.0);
  fcfg.tau = config_get_double(cfg, "finetune.tau", 0.09);
  fcfg.lr = config_get_double(cfg, "finetune.lr", env.discrete ? 0.05 : 5e-3);
  fcfg.gamma = env.discrete ? env.mdp.gamma : env.pm.gamma;
  std::vector<std::string> finetune_files;
  for (int r = 0; r < n_seeds; ++r) {
    const std::uint64_t seed = derive_seed(master, "finetune", r);
    note_stage("finetune-" + std::to_string(r), seed);
    Rng rng(seed);
    FinetuneTrace trace;
    if (env.discrete) {
      DiscreteQ model = set.q[worst];
      trace = run_finetuning(model, env.expert, env.mdp, env.score, fcfg, rng);
      if (r == 0) save_model(model, env.id, path("finetuned.model"));
    } else {
      ActorCritic model = set.ac[worst];
      trace = run_finetuning(model, env.expert_fn(), env.pm, env.score, fcfg, rng);
      if (r == 0) save_model(model, env.id, path("finetuned.model"));
    }
    finetune_files.push_back(path("finetune_seed" + std::to_string(r) + ".csv"));
    write_finetune_csv(trace, finetune_files.back());
  }

  // Summary table, last-10-iteration averages over seeds.
  {
    const ReportSummary ucb = summarize_traces(ucb_files);
    const ReportSummary rnd = summarize_traces(random_files);
    const ReportSummary hq = summarize_traces(highestq_files);
    const ReportSummary ft = summarize_traces(finetune_files);
    std::ofstream os(path("summary.txt"));
    os << "env " << env.id << "\n";
    os << "Online score, mean of last 10 iterations over " << n_seeds
       << " seeds\n";
    os << "Highest Q        " << format_mean_std(hq.mean, hq.stddev) << "\n";
    os << "Random Ensemble  " << format_mean_std(rnd.mean, rnd.stddev) << "\n";
    os << "UCB selection    " << format_mean_std(ucb.mean, ucb.stddev) << "\n";
    os << "Oracle           " << format_mean_std(s_star, 0.0) << "\n";
    os << "Fine-tuned (worst model, " << finetune_K << " iterations)  "
       << format_mean_std(ft.mean, ft.stddev) << "\n";
  }

  std::vector<std::string> outputs = {path("dataset.ds"), path("candidates.csv"),
                                      path("summary.txt")};
  for (const auto& f : ucb_files) outputs.push_back(f);
  for (const auto& f : random_files) outputs.push_back(f);
  for (const auto& f : highestq_files) outputs.push_back(f);
  for (const auto& f : finetune_files) outputs.push_back(f);
  for (const std::string& f : outputs)
    manifest.file_checksums.emplace_back(f, file_fnv64(f));
  manifest.save(path("manifest.txt"));
}

}  // namespace orl
