#pragma once

#include <vector>

#include "adpo/policy.hpp"

namespace adpo {

// Disjoint masks routing advantages to token positions. answer covers every
// answer token, score exactly the score token.
struct TokenMasks {
    std::vector<int> answer;
    std::vector<int> score;
};

// Per-rollout advantages plus their broadcast over token positions.
struct AdvantageSet {
    double answer_adv = 0.0;     // from answer rewards
    double pref_adv = 0.0;       // from verification rewards
    std::vector<double> per_token;
};

// (R_i - mean) / std with population std; homogeneous groups (std < 1e-8)
// map to all zeros.
std::vector<double> group_normalize(const std::vector<double>& rewards);

TokenMasks token_masks(const Rollout& rollout);

std::vector<AdvantageSet> decoupled_advantages(const Group& group);

// Baseline that normalizes the summed answer + verification reward and
// broadcasts the single advantage to all tokens uniformly.
std::vector<AdvantageSet> entangled_advantages(const Group& group);

}  // namespace adpo
