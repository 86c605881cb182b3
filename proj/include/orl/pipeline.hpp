#pragma once

#include <string>

#include "orl/envs.hpp"
#include "orl/finetune.hpp"
#include "orl/io.hpp"
#include "orl/select.hpp"

namespace orl {

// Greedy policy of candidate i as a deployable policy.
std::vector<int> candidate_policy(const CandidateSet& set, int i);
ContinuousPolicyFn candidate_policy_fn(const CandidateSet& set, int i);

// Expected online score per candidate: exact dynamic programming on finite
// envs, Monte-Carlo (mc_episodes rollouts) on continuous ones.
std::vector<double> candidate_expected_scores(const EnvBundle& env,
                                              const CandidateSet& set,
                                              long mc_episodes,
                                              std::uint64_t seed);

// One supervised episode of candidate `arm`; returns the realized score.
double deploy_candidate(const EnvBundle& env, const CandidateSet& set, int arm,
                        Rng& rng);

SelectionTrace run_model_selection(const EnvBundle& env,
                                   const CandidateSet& set, long iterations,
                                   double beta, double s_star,
                                   std::uint64_t seed);

void write_selection_csv(const SelectionTrace& trace, const std::string& path);
void write_finetune_csv(const FinetuneTrace& trace, const std::string& path);
void write_eval_csv(const std::vector<EpisodeLog>& logs, std::uint64_t seed,
                    const std::string& model_id, const std::string& path);

struct ReportSummary {
  double mean = 0.0;
  double stddev = 0.0;
  long files = 0;
};

// Mean (+- std over input files) of the last `window` scores per trace.
ReportSummary summarize_traces(const std::vector<std::string>& paths,
                               int window = 10);

std::string format_mean_std(double mean, double stddev);

// Full desk-scale protocol: candidates over the lambda grid, UCB vs the
// Highest-Q / Random-Ensemble / Oracle baselines over several seeds, and
// fine-tuning of the worst candidate. Writes CSVs, a summary, and a
// manifest under out_dir.
void reproduce_protocol(const EnvBundle& env, const Config& cfg,
                        const std::string& out_dir);

}  // namespace orl
