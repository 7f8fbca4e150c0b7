#include "adpo/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adpo {

std::string to_string(VerifMode m) {
    switch (m) {
        case VerifMode::None: return "none";
        case VerifMode::Binary: return "binary";
        case VerifMode::Preference: return "preference";
    }
    return "?";
}

VerifMode verif_mode_from_string(const std::string& s) {
    if (s == "none") return VerifMode::None;
    if (s == "binary") return VerifMode::Binary;
    if (s == "preference") return VerifMode::Preference;
    throw std::invalid_argument("unknown verification mode: " + s);
}

void Thresholds::validate() const {
    if (!(tau_s > 0.0 && tau_s < 1.0)) throw std::invalid_argument("tau_s must be in (0,1)");
    if (!(tau_a > 0.0 && tau_a < 1.0)) throw std::invalid_argument("tau_a must be in (0,1)");
    if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
}

double answer_reward_discrete(const DecodedAnswer& predicted, const GroundTruth& truth) {
    if (predicted.kind != TaskKind::Discrete) {
        throw std::invalid_argument("answer_reward_discrete: kind mismatch");
    }
    return predicted.token == truth.discrete_answer ? 1.0 : 0.0;
}

double answer_reward_interval(const DecodedAnswer& predicted, const GroundTruth& truth) {
    if (predicted.kind != TaskKind::Interval) {
        throw std::invalid_argument("answer_reward_interval: kind mismatch");
    }
    if (predicted.lo > predicted.hi || truth.lo > truth.hi) {
        throw std::invalid_argument("inverted interval");
    }
    double inter = std::min(predicted.hi, truth.hi) - std::max(predicted.lo, truth.lo);
    if (inter < 0.0) return 0.0;
    double uni = std::max(predicted.hi, truth.hi) - std::min(predicted.lo, truth.lo);
    if (uni <= 0.0) return 1.0;  // both degenerate at the same point
    return inter / uni;
}

double answer_reward_agent(const DecodedAnswer& predicted, const GroundTruth& truth) {
    if (predicted.kind != TaskKind::Agent) {
        throw std::invalid_argument("answer_reward_agent: kind mismatch");
    }
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(predicted.x) || !in_unit(predicted.y) || !in_unit(truth.x) ||
        !in_unit(truth.y)) {
        throw std::invalid_argument("agent coordinates outside the unit square");
    }
    if (predicted.action_type != truth.action_type) return 0.0;
    double dx = predicted.x - truth.x;
    double dy = predicted.y - truth.y;
    double dist = std::sqrt(dx * dx + dy * dy);
    // Click rule: extra credit within 0.14 of the screen diagonal (sqrt(2)
    // for the unit square). Raw 0/+1/+2 normalized to [0,1].
    double threshold = 0.14 * std::sqrt(2.0);
    return dist < threshold ? 1.0 : 0.5;
}

double answer_reward(const DecodedAnswer& predicted, const Query& query) {
    switch (query.kind) {
        case TaskKind::Discrete: return answer_reward_discrete(predicted, query.truth);
        case TaskKind::Interval: return answer_reward_interval(predicted, query.truth);
        case TaskKind::Agent: return answer_reward_agent(predicted, query.truth);
    }
    throw std::logic_error("unreachable");
}

double binary_verification_reward(double score, double answer_reward,
                                  const Thresholds& th) {
    if (score < 0.0 || score > 1.0) throw std::invalid_argument("score outside [0,1]");
    return (score - th.tau_s) * (answer_reward - th.tau_a) > 0.0 ? 1.0 : 0.0;
}

std::vector<int> contrastive_set_discrete(const std::vector<double>& answer_rewards,
                                          int i) {
    if (i < 0 || i >= static_cast<int>(answer_rewards.size())) {
        throw std::out_of_range("contrastive_set_discrete: index out of range");
    }
    std::vector<int> set;
    for (int j = 0; j < static_cast<int>(answer_rewards.size()); ++j) {
        if (answer_rewards[j] != answer_rewards[i]) set.push_back(j);
    }
    return set;
}

std::vector<int> contrastive_set_continuous(const std::vector<double>& answer_rewards,
                                            int i, double gamma) {
    if (i < 0 || i >= static_cast<int>(answer_rewards.size())) {
        throw std::out_of_range("contrastive_set_continuous: index out of range");
    }
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    std::vector<int> set;
    for (int j = 0; j < static_cast<int>(answer_rewards.size()); ++j) {
        if (std::abs(answer_rewards[j] - answer_rewards[i]) > gamma) set.push_back(j);
    }
    return set;
}

double preference_verification_reward(const std::vector<double>& scores,
                                      const std::vector<double>& answer_rewards,
                                      int i, const std::vector<int>& contrastive) {
    if (scores.size() != answer_rewards.size()) {
        throw std::invalid_argument("scores/rewards length mismatch");
    }
    if (contrastive.empty()) return 0.0;
    int agree = 0;
    for (int j : contrastive) {
        if ((scores[i] - scores[j]) * (answer_rewards[i] - answer_rewards[j]) > 0.0) {
            ++agree;
        }
    }
    return static_cast<double>(agree) / static_cast<double>(contrastive.size());
}

std::vector<RewardBundle> group_rewards(const std::vector<double>& answer_rewards,
                                        const std::vector<double>& scores,
                                        TaskKind kind, VerifMode mode,
                                        const Thresholds& th) {
    if (answer_rewards.size() != scores.size()) {
        throw std::invalid_argument("group_rewards: length mismatch");
    }
    int g = static_cast<int>(answer_rewards.size());
    std::vector<RewardBundle> out(g);
    for (int i = 0; i < g; ++i) {
        out[i].answer = answer_rewards[i];
        switch (mode) {
            case VerifMode::None:
                break;
            case VerifMode::Binary:
                out[i].binary = binary_verification_reward(scores[i], answer_rewards[i], th);
                break;
            case VerifMode::Preference: {
                std::vector<int> set =
                    kind == TaskKind::Discrete
                        ? contrastive_set_discrete(answer_rewards, i)
                        : contrastive_set_continuous(answer_rewards, i, th.margin);
                out[i].preference =
                    preference_verification_reward(scores, answer_rewards, i, set);
                break;
            }
        }
    }
    return out;
}

}  // namespace adpo
