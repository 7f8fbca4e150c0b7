#pragma once

#include <optional>
#include <vector>

#include "adpo/policy.hpp"

namespace adpo {

enum class EvalProtocol { Pass1, Majority, BestOfN, CrossVerifier };

std::string to_string(EvalProtocol p);
EvalProtocol eval_protocol_from_string(const std::string& s);

struct EvalConfig {
    int num_samples = 8;  // N
    EvalProtocol protocol = EvalProtocol::BestOfN;
    DecodeConfig decode{0.2, 0.99};
    uint64_t seed = 0;

    void validate() const;
};

struct EvalReport {
    double pass1 = 0.0;
    double majority = 0.0;
    double best_of_n = 0.0;
    std::optional<double> mean_iou;  // Interval tasks
    std::optional<double> auc;
    std::optional<double> ap;
    std::vector<long> score_histogram;  // per score bin
    long num_rollouts = 0;
};

// Argmax of score, ties to the lowest index.
int best_of_n(const std::vector<Rollout>& rollouts);

// Modal answer encoding, ties to the smallest encoding.
int majority_vote(const std::vector<int>& answer_encodings);

// Mann-Whitney AUC with ties counted 1/2. Requires both classes.
std::optional<double> auc(const std::vector<double>& scores,
                          const std::vector<int>& labels);

// Mean precision at each positive's rank in descending score order; ties keep
// stable input order. Requires at least one positive.
std::optional<double> average_precision(const std::vector<double>& scores,
                                        const std::vector<int>& labels);

// Success predicate used for accuracy metrics: exact match for discrete,
// IoU > 0.5 for interval, answer reward >= 0.5 for agent.
bool rollout_success(TaskKind kind, double answer_reward);

EvalReport evaluate(const PolicyParams& params, const TaskSpec& spec,
                    const std::vector<Query>& queries, const EvalConfig& cfg,
                    const PolicyParams* verifier = nullptr);

}  // namespace adpo
