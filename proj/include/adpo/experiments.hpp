#pragma once

#include <map>
#include <string>
#include <vector>

#include "adpo/trainer.hpp"

namespace adpo {

// One comparison arm: a label plus the overrides applied on top of the shared
// base config.
struct ExperimentArm {
    std::string label;
    TrainConfig config;
};

struct ExperimentSpec {
    std::string name;
    TaskSpec task;
    std::vector<ExperimentArm> arms;
    std::vector<uint64_t> seeds;
    EvalConfig eval;
    std::string output_dir;  // empty: no files written

    void validate() const;
};

struct ArmRun {
    std::string label;
    uint64_t seed = 0;
    std::vector<StepMetrics> history;
    EvalReport report;
    long hacking_witnesses = 0;
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<ArmRun> runs;
};

// Trains every (arm, seed) pair with paired rollout seeds and evaluates the
// final parameters. All experiment entry points reduce to this.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Binary vs preference verification reward on a shared task; emits per-step
// score-concentration curves plus final ranking metrics.
ExperimentResult run_collapse_experiment(ExperimentSpec spec);

// Entangled vs decoupled advantages, preference reward in both arms.
ExperimentResult run_decoupling_experiment(ExperimentSpec spec);

// One trained model per margin value on the interval task.
struct MarginSweepRow {
    double margin = 0.0;
    EvalReport report;
};
std::vector<MarginSweepRow> run_margin_sweep(ExperimentSpec spec,
                                             const std::vector<double>& margins);

// Score histograms per arm after training, plus nonempty-bin counts.
struct ScoreDistributionRow {
    std::string label;
    std::vector<long> histogram;
    int nonempty_bins = 0;
};
std::vector<ScoreDistributionRow> run_score_distribution(ExperimentSpec spec);

// Median over seeds of a per-run statistic.
double median(std::vector<double> values);

// Preset specs used by the CLI and the acceptance suite.
ExperimentSpec collapse_spec(const std::string& output_dir = "");
ExperimentSpec decoupling_spec(const std::string& output_dir = "");
ExperimentSpec margin_sweep_spec(const std::string& output_dir = "");
ExperimentSpec best_of_n_spec(const std::string& output_dir = "");

void write_experiment_outputs(const ExperimentResult& result);

}  // namespace adpo
