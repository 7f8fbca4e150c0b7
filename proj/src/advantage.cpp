#include "adpo/advantage.hpp"

#include <cmath>
#include <stdexcept>

namespace adpo {

std::vector<double> group_normalize(const std::vector<double>& rewards) {
    if (rewards.empty()) throw std::invalid_argument("group_normalize: empty group");
    int g = static_cast<int>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= g;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    double std_dev = std::sqrt(var / g);
    std::vector<double> out(g, 0.0);
    if (std_dev < 1e-8) return out;
    for (int i = 0; i < g; ++i) out[i] = (rewards[i] - mean) / std_dev;
    return out;
}

TokenMasks token_masks(const Rollout& rollout) {
    int answers = static_cast<int>(rollout.answer_tokens.size());
    if (answers < 1) throw MalformedRolloutError("rollout has no answer tokens");
    int n = answers + 1;
    TokenMasks m;
    m.answer.assign(n, 0);
    m.score.assign(n, 0);
    for (int t = 0; t < answers; ++t) m.answer[t] = 1;
    m.score[n - 1] = 1;
    return m;
}

static void require_rewards(const Group& group, bool need_verif) {
    for (const Rollout& r : group.rollouts) {
        if (need_verif && !r.rewards.verification()) {
            throw std::invalid_argument("rollout missing verification reward");
        }
    }
}

std::vector<AdvantageSet> decoupled_advantages(const Group& group) {
    require_rewards(group, false);
    int g = static_cast<int>(group.rollouts.size());
    std::vector<double> answer_rewards(g), verif_rewards(g, 0.0);
    for (int i = 0; i < g; ++i) {
        answer_rewards[i] = group.rollouts[i].rewards.answer;
        verif_rewards[i] = group.rollouts[i].rewards.verification().value_or(0.0);
    }
    std::vector<double> a_adv = group_normalize(answer_rewards);
    std::vector<double> p_adv = group_normalize(verif_rewards);
    std::vector<AdvantageSet> out(g);
    for (int i = 0; i < g; ++i) {
        out[i].answer_adv = a_adv[i];
        out[i].pref_adv = p_adv[i];
        TokenMasks m = token_masks(group.rollouts[i]);
        out[i].per_token.resize(m.answer.size());
        for (size_t t = 0; t < m.answer.size(); ++t) {
            out[i].per_token[t] = m.answer[t] ? a_adv[i] : p_adv[i];
        }
    }
    return out;
}

std::vector<AdvantageSet> entangled_advantages(const Group& group) {
    require_rewards(group, false);
    int g = static_cast<int>(group.rollouts.size());
    std::vector<double> totals(g);
    for (int i = 0; i < g; ++i) {
        totals[i] = group.rollouts[i].rewards.answer +
                    group.rollouts[i].rewards.verification().value_or(0.0);
    }
    std::vector<double> adv = group_normalize(totals);
    std::vector<AdvantageSet> out(g);
    for (int i = 0; i < g; ++i) {
        out[i].answer_adv = adv[i];
        out[i].pref_adv = adv[i];
        out[i].per_token.assign(group.rollouts[i].num_tokens(), adv[i]);
    }
    return out;
}

}  // namespace adpo
