#pragma once

#include <optional>
#include <vector>

#include "adpo/evaluation.hpp"
#include "adpo/objective.hpp"

namespace adpo {

struct TrainConfig {
    int group_size = 8;
    int batch_queries = 16;
    double learning_rate = 0.05;
    int steps = 300;
    int inner_epochs = 2;
    DecodeConfig decode{1.0, 0.99};
    ObjectiveConfig objective;
    Thresholds thresholds;
    InitMode init_mode = InitMode::Pretrained;
    double init_accuracy = 0.85;
    uint64_t seed = 0;

    void validate() const;
};

struct StepMetrics {
    int step = 0;
    double mean_answer_reward = 0.0;
    double pass1 = 0.0;
    double fraction_max_score = 0.0;
    std::optional<double> frac_correct_among_verif1;
    std::optional<double> auc;
    std::optional<double> ap;
    double objective = 0.0;
    double kl = 0.0;
    // Training-time reward-hacking witness: rollouts whose answer is wrong
    // yet receive strictly positive advantage on their answer tokens.
    long hacking_witnesses = 0;
};

struct TrainState {
    TaskSpec spec;
    std::vector<Query> queries;
    PolicyParams params;
    PolicyParams ref;
    TrainConfig config;
    int step = 0;
    int next_query = 0;  // batch cycling cursor
    long total_hacking_witnesses = 0;
};

std::vector<Group> collect_groups(const PolicyParams& params, const TaskSpec& spec,
                                  const std::vector<Query>& batch, int group_size,
                                  const DecodeConfig& decode, uint64_t seed);

TrainState init_train_state(const TaskSpec& spec, const TrainConfig& config);

StepMetrics train_step(TrainState& state);

struct TrainResult {
    std::vector<StepMetrics> history;
    PolicyParams params;
};

TrainResult train(const TaskSpec& spec, const TrainConfig& config);

}  // namespace adpo
