#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adpo/rewards.hpp"
#include "adpo/rng.hpp"
#include "adpo/tasks.hpp"

namespace adpo {

struct DecodeConfig {
    double temperature = 1.0;
    double top_p = 1.0;

    void validate() const;
};

enum class InitMode { Uniform, Pretrained };

// Tabular softmax policy. One answer-logit table per answer position and a
// score-logit table indexed by (query, sampled answer). The same layout is
// reused for gradients.
struct PolicyParams {
    TaskKind kind = TaskKind::Discrete;
    int num_queries = 0;
    std::vector<int> position_vocab;   // vocab size per answer position
    int score_bins = 0;
    int answer_indices = 0;

    // answer_logits[pos] has num_queries * position_vocab[pos] entries.
    std::vector<std::vector<double>> answer_logits;
    // num_queries * answer_indices * score_bins entries.
    std::vector<double> score_logits;

    static PolicyParams zeros_like_shape(const TaskSpec& spec);

    std::span<double> answer_row(int pos, int query);
    std::span<const double> answer_row(int pos, int query) const;
    std::span<double> score_row(int query, int answer_idx);
    std::span<const double> score_row(int query, int answer_idx) const;

    void fill(double v);
    // this += alpha * other, matching shapes required.
    void axpy(double alpha, const PolicyParams& other);
    bool same_shape(const PolicyParams& other) const;
    bool all_finite() const;
    size_t total_entries() const;
    // Flat view helpers for finite-difference style iteration.
    double* entry(size_t flat_index);
    const double* entry(size_t flat_index) const;
};

struct Rollout {
    int query_id = 0;
    std::vector<int> answer_tokens;
    int score_bin = 0;
    double score_value = 0.0;           // score_bin / (B - 1)
    std::vector<double> behavior_logprobs;  // one per token, answers then score
    RewardBundle rewards;

    int num_tokens() const {
        return static_cast<int>(answer_tokens.size()) + 1;
    }
};

struct Group {
    int query_id = 0;
    std::vector<Rollout> rollouts;
};

PolicyParams init_params(const TaskSpec& spec, InitMode mode, double accuracy_target,
                         const std::vector<Query>& queries);

// softmax(logits / T) followed by top-p truncation over the descending
// probability order (ties broken by index), renormalized. Returned vector is
// full-size with zeros outside the kept set.
std::vector<double> token_distribution(std::span<const double> logits,
                                       const DecodeConfig& cfg);

Rollout sample_rollout(const PolicyParams& params, const TaskSpec& spec,
                       const Query& query, const DecodeConfig& cfg, Rng& rng);

// Exact per-token log-probabilities under the untruncated T=1 distribution.
std::vector<double> logprob(const PolicyParams& params, const TaskSpec& spec,
                            const Rollout& rollout);

PolicyParams snapshot(const PolicyParams& params);

}  // namespace adpo
