#include "adpo/trainer.hpp"

#include <cmath>
#include <stdexcept>

namespace adpo {

void TrainConfig::validate() const {
    if (group_size < 2) throw std::invalid_argument("group_size must be >= 2");
    if (batch_queries < 1) throw std::invalid_argument("batch_queries must be >= 1");
    if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning_rate must be >= 0");
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    if (inner_epochs < 1) throw std::invalid_argument("inner_epochs must be >= 1");
    decode.validate();
    objective.validate();
    thresholds.validate();
    if (init_mode == InitMode::Pretrained &&
        !(init_accuracy > 0.0 && init_accuracy < 1.0)) {
        throw std::invalid_argument("init_accuracy must be in (0,1)");
    }
}

std::vector<Group> collect_groups(const PolicyParams& params, const TaskSpec& spec,
                                  const std::vector<Query>& batch, int group_size,
                                  const DecodeConfig& decode, uint64_t seed) {
    std::vector<Group> groups;
    groups.reserve(batch.size());
    for (const Query& q : batch) {
        Group g;
        g.query_id = q.id;
        Rng rng(Rng::mix(seed, 0x9c0eu + static_cast<uint64_t>(q.id)));
        for (int i = 0; i < group_size; ++i) {
            g.rollouts.push_back(sample_rollout(params, spec, q, decode, rng));
        }
        groups.push_back(std::move(g));
    }
    return groups;
}

TrainState init_train_state(const TaskSpec& spec, const TrainConfig& config) {
    spec.validate();
    config.validate();
    TrainState state;
    state.spec = spec;
    state.queries = make_task(spec);
    state.params = init_params(spec, config.init_mode, config.init_accuracy, state.queries);
    state.ref = snapshot(state.params);
    state.config = config;
    return state;
}

static void fill_group_rewards(const TaskSpec& spec, const std::vector<Query>& queries,
                               std::vector<Group>& groups, VerifMode mode,
                               const Thresholds& th) {
    for (Group& g : groups) {
        const Query& q = queries[g.query_id];
        std::vector<double> answer_rewards, scores;
        for (const Rollout& r : g.rollouts) {
            DecodedAnswer decoded = decode_answer(spec, q, r.answer_tokens);
            answer_rewards.push_back(answer_reward(decoded, q));
            scores.push_back(r.score_value);
        }
        std::vector<RewardBundle> bundles =
            group_rewards(answer_rewards, scores, spec.kind, mode, th);
        for (size_t i = 0; i < g.rollouts.size(); ++i) {
            g.rollouts[i].rewards = bundles[i];
        }
    }
}

static StepMetrics compute_metrics(const TrainState& state,
                                   const std::vector<Group>& groups,
                                   const ObjectiveTerms& terms) {
    StepMetrics m;
    m.step = state.step;
    long total = 0, max_score = 0, verif1 = 0, verif1_correct = 0;
    double reward_sum = 0.0, pass_sum = 0.0;
    std::vector<double> scores;
    std::vector<int> labels;
    for (const Group& g : groups) {
        std::vector<AdvantageSet> advs = state.config.objective.mode == AdvMode::Decoupled
                                             ? decoupled_advantages(g)
                                             : entangled_advantages(g);
        for (size_t i = 0; i < g.rollouts.size(); ++i) {
            const Rollout& r = g.rollouts[i];
            ++total;
            reward_sum += r.rewards.answer;
            bool success = rollout_success(state.spec.kind, r.rewards.answer);
            pass_sum += success ? 1.0 : 0.0;
            if (r.score_bin == state.spec.score_bins - 1) ++max_score;
            if (r.rewards.verification() && *r.rewards.verification() == 1.0) {
                ++verif1;
                if (success) ++verif1_correct;
            }
            scores.push_back(r.score_value);
            labels.push_back(success ? 1 : 0);
            if (!success && advs[i].answer_adv > 0.0) ++m.hacking_witnesses;
        }
    }
    m.mean_answer_reward = reward_sum / total;
    m.pass1 = pass_sum / total;
    m.fraction_max_score = static_cast<double>(max_score) / total;
    if (verif1 > 0) {
        m.frac_correct_among_verif1 = static_cast<double>(verif1_correct) / verif1;
    }
    m.auc = auc(scores, labels);
    m.ap = average_precision(scores, labels);
    m.objective = terms.total;
    m.kl = terms.kl;
    return m;
}

StepMetrics train_step(TrainState& state) {
    const TrainConfig& cfg = state.config;
    std::vector<Query> batch;
    for (int i = 0; i < cfg.batch_queries; ++i) {
        batch.push_back(state.queries[state.next_query]);
        state.next_query = (state.next_query + 1) % static_cast<int>(state.queries.size());
    }

    uint64_t step_seed = Rng::mix(cfg.seed, 0x57e9u + static_cast<uint64_t>(state.step));
    std::vector<Group> groups =
        collect_groups(state.params, state.spec, batch, cfg.group_size, cfg.decode,
                       step_seed);
    fill_group_rewards(state.spec, state.queries, groups, cfg.objective.verif,
                       cfg.thresholds);

    ObjectiveTerms terms =
        adpo_objective(groups, state.params, state.ref, state.spec, cfg.objective);
    StepMetrics metrics = compute_metrics(state, groups, terms);
    state.total_hacking_witnesses += metrics.hacking_witnesses;

    for (int epoch = 0; epoch < cfg.inner_epochs; ++epoch) {
        PolicyParams grad =
            adpo_gradient(groups, state.params, state.ref, state.spec, cfg.objective);
        if (!grad.all_finite()) {
            throw std::runtime_error("nonfinite gradient at step " +
                                     std::to_string(state.step));
        }
        state.params.axpy(cfg.learning_rate, grad);
    }

    ++state.step;
    return metrics;
}

TrainResult train(const TaskSpec& spec, const TrainConfig& config) {
    TrainState state = init_train_state(spec, config);
    TrainResult result{{}, state.params};
    result.history.reserve(config.steps);
    for (int s = 0; s < config.steps; ++s) {
        result.history.push_back(train_step(state));
    }
    result.params = state.params;
    return result;
}

}  // namespace adpo
