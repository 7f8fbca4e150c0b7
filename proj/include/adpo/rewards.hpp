#pragma once

#include <optional>
#include <vector>

#include "adpo/tasks.hpp"

namespace adpo {

enum class VerifMode { None, Binary, Preference };

std::string to_string(VerifMode m);
VerifMode verif_mode_from_string(const std::string& s);

struct RewardBundle {
    double answer = 0.0;                 // R^a in [0,1]
    std::optional<double> binary;        // R^b in {0,1}, binary mode
    std::optional<double> preference;    // R^p in [0,1], preference mode

    // The verification reward under whichever mode populated the bundle.
    std::optional<double> verification() const {
        if (binary) return binary;
        return preference;
    }
};

struct Thresholds {
    double tau_s = 0.5;
    double tau_a = 0.5;
    double margin = 0.1;  // gamma, continuous contrastive sets

    void validate() const;
};

double answer_reward_discrete(const DecodedAnswer& predicted, const GroundTruth& truth);
double answer_reward_interval(const DecodedAnswer& predicted, const GroundTruth& truth);
double answer_reward_agent(const DecodedAnswer& predicted, const GroundTruth& truth);

// Dispatches on kind.
double answer_reward(const DecodedAnswer& predicted, const Query& query);

double binary_verification_reward(double score, double answer_reward,
                                  const Thresholds& th);

std::vector<int> contrastive_set_discrete(const std::vector<double>& answer_rewards,
                                          int i);
std::vector<int> contrastive_set_continuous(const std::vector<double>& answer_rewards,
                                            int i, double gamma);

double preference_verification_reward(const std::vector<double>& scores,
                                      const std::vector<double>& answer_rewards,
                                      int i, const std::vector<int>& contrastive);

// Full bundle for a group: answer rewards plus the verification reward
// selected by `mode`. Discrete tasks use the exact-match contrastive set,
// continuous tasks the margin-based one.
std::vector<RewardBundle> group_rewards(const std::vector<double>& answer_rewards,
                                        const std::vector<double>& scores,
                                        TaskKind kind, VerifMode mode,
                                        const Thresholds& th);

}  // namespace adpo
