#include "adpo/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adpo {

std::string to_string(AdvMode m) {
    return m == AdvMode::Decoupled ? "decoupled" : "entangled";
}

AdvMode adv_mode_from_string(const std::string& s) {
    if (s == "decoupled") return AdvMode::Decoupled;
    if (s == "entangled") return AdvMode::Entangled;
    throw std::invalid_argument("unknown advantage mode: " + s);
}

void ObjectiveConfig::validate() const {
    if (!(clip_eps > 0.0 && clip_eps < 1.0)) {
        throw std::invalid_argument("clip_eps must be in (0,1)");
    }
    if (kl_coeff < 0.0) throw std::invalid_argument("kl_coeff must be >= 0");
}

double clipped_term(double ratio, double adv, double eps) {
    if (!(ratio > 0.0)) throw std::invalid_argument("ratio must be positive");
    double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
    return std::min(ratio * adv, clipped * adv);
}

static std::vector<double> softmax_t1(std::span<const double> logits) {
    double max_logit = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - max_logit);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

double kl_exact(std::span<const double> logits, std::span<const double> ref_logits) {
    if (logits.size() != ref_logits.size()) {
        throw std::invalid_argument("kl_exact: shape mismatch");
    }
    std::vector<double> p = softmax_t1(logits);
    std::vector<double> q = softmax_t1(ref_logits);
    double kl = 0.0;
    for (size_t i = 0; i < p.size(); ++i) kl += p[i] * std::log(p[i] / q[i]);
    return std::max(kl, 0.0);
}

namespace {

// One token's evaluation context: the logit row it was sampled from.
struct TokenContext {
    std::span<const double> row;
    std::span<const double> ref_row;
    int token;
    double advantage;
    double behavior_logprob;
    bool is_score;  // routes gradient to the score table
    int pos;        // answer position, when !is_score
    int row_query;
    int row_answer_idx;  // when is_score
};

std::vector<AdvantageSet> advantages_for(const Group& group, const ObjectiveConfig& cfg,
                                         bool zero_answer_adv, bool zero_pref_adv) {
    std::vector<AdvantageSet> advs = cfg.mode == AdvMode::Decoupled
                                         ? decoupled_advantages(group)
                                         : entangled_advantages(group);
    if (zero_answer_adv || zero_pref_adv) {
        for (size_t i = 0; i < advs.size(); ++i) {
            if (zero_answer_adv) advs[i].answer_adv = 0.0;
            if (zero_pref_adv) advs[i].pref_adv = 0.0;
            TokenMasks m = token_masks(group.rollouts[i]);
            for (size_t t = 0; t < advs[i].per_token.size(); ++t) {
                advs[i].per_token[t] = m.answer[t] ? advs[i].answer_adv : advs[i].pref_adv;
            }
        }
    }
    return advs;
}

template <typename TokenFn>
void walk_tokens(const std::vector<Group>& groups, const PolicyParams& params,
                 const PolicyParams& ref, const TaskSpec& spec,
                 const ObjectiveConfig& cfg, bool zero_answer_adv, bool zero_pref_adv,
                 TokenFn&& fn) {
    if (!params.same_shape(ref)) throw std::invalid_argument("params/ref shape mismatch");
    if (!params.all_finite()) throw std::invalid_argument("nonfinite logits");
    size_t total_rollouts = 0;
    for (const Group& g : groups) total_rollouts += g.rollouts.size();
    if (total_rollouts == 0) return;

    for (size_t gi = 0; gi < groups.size(); ++gi) {
        const Group& group = groups[gi];
        std::vector<AdvantageSet> advs =
            advantages_for(group, cfg, zero_answer_adv, zero_pref_adv);
        for (size_t ri = 0; ri < group.rollouts.size(); ++ri) {
            const Rollout& r = group.rollouts[ri];
            int n_tokens = r.num_tokens();
            if (static_cast<int>(r.behavior_logprobs.size()) != n_tokens) {
                throw MalformedRolloutError("behavior logprobs do not cover all tokens");
            }
            double weight = 1.0 / (static_cast<double>(total_rollouts) * n_tokens);
            int positions = static_cast<int>(r.answer_tokens.size());
            int aidx = answer_index(spec, r.answer_tokens);
            for (int t = 0; t < n_tokens; ++t) {
                TokenContext ctx;
                ctx.is_score = t == positions;
                ctx.row_query = r.query_id;
                if (ctx.is_score) {
                    ctx.row = params.score_row(r.query_id, aidx);
                    ctx.ref_row = ref.score_row(r.query_id, aidx);
                    ctx.token = r.score_bin;
                    ctx.pos = -1;
                    ctx.row_answer_idx = aidx;
                } else {
                    ctx.row = params.answer_row(t, r.query_id);
                    ctx.ref_row = ref.answer_row(t, r.query_id);
                    ctx.token = r.answer_tokens[t];
                    ctx.pos = t;
                    ctx.row_answer_idx = -1;
                }
                ctx.advantage = advs[ri].per_token[t];
                ctx.behavior_logprob = r.behavior_logprobs[t];
                fn(ctx, weight, gi, ri, t);
            }
        }
    }
}

}  // namespace

ObjectiveTerms adpo_objective(const std::vector<Group>& groups,
                              const PolicyParams& params, const PolicyParams& ref,
                              const TaskSpec& spec, const ObjectiveConfig& cfg) {
    cfg.validate();
    ObjectiveTerms terms;
    size_t rollout_count = 0;
    for (const Group& g : groups) rollout_count += g.rollouts.size();
    terms.ratios.reserve(rollout_count);
    for (const Group& g : groups) {
        for (const Rollout& r : g.rollouts) {
            terms.ratios.emplace_back(r.num_tokens(), 0.0);
        }
    }
    std::vector<size_t> group_offset(groups.size(), 0);
    size_t acc = 0;
    for (size_t gi = 0; gi < groups.size(); ++gi) {
        group_offset[gi] = acc;
        acc += groups[gi].rollouts.size();
    }

    walk_tokens(groups, params, ref, spec, cfg, false, false,
                [&](const TokenContext& ctx, double weight, size_t gi, size_t ri, int t) {
                    std::vector<double> p = softmax_t1(ctx.row);
                    double lp_new = std::log(p[ctx.token]);
                    double ratio = std::exp(lp_new - ctx.behavior_logprob);
                    terms.ratios[group_offset[gi] + ri][t] = ratio;
                    terms.surrogate += weight * clipped_term(ratio, ctx.advantage, cfg.clip_eps);
                    terms.kl += weight * kl_exact(ctx.row, ctx.ref_row);
                });
    terms.total = terms.surrogate - cfg.kl_coeff * terms.kl;
    return terms;
}

PolicyParams adpo_gradient(const std::vector<Group>& groups,
                           const PolicyParams& params, const PolicyParams& ref,
                           const TaskSpec& spec, const ObjectiveConfig& cfg,
                           bool zero_answer_adv, bool zero_pref_adv) {
    cfg.validate();
    PolicyParams grad = params;
    grad.fill(0.0);

    walk_tokens(
        groups, params, ref, spec, cfg, zero_answer_adv, zero_pref_adv,
        [&](const TokenContext& ctx, double weight, size_t, size_t, int) {
            std::vector<double> p = softmax_t1(ctx.row);
            double lp_new = std::log(p[ctx.token]);
            double ratio = std::exp(lp_new - ctx.behavior_logprob);
            double clipped = std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
            // min-selected branch; the clipped branch has zero derivative when
            // the clamp is active.
            bool unclipped_selected = ratio * ctx.advantage <= clipped * ctx.advantage;
            bool pass_through = unclipped_selected || ratio == clipped;
            double coeff = pass_through ? ctx.advantage * ratio : 0.0;

            std::span<double> out =
                ctx.is_score ? grad.score_row(ctx.row_query, ctx.row_answer_idx)
                             : grad.answer_row(ctx.pos, ctx.row_query);

            double kl = 0.0;
            std::vector<double> a(p.size());
            if (cfg.kl_coeff > 0.0) {
                std::vector<double> q = softmax_t1(ctx.ref_row);
                for (size_t v = 0; v < p.size(); ++v) {
                    a[v] = std::log(p[v] / q[v]);
                    kl += p[v] * a[v];
                }
            }
            for (size_t v = 0; v < p.size(); ++v) {
                double dlp = (static_cast<int>(v) == ctx.token ? 1.0 : 0.0) - p[v];
                double g = coeff * dlp;
                if (cfg.kl_coeff > 0.0) {
                    g -= cfg.kl_coeff * p[v] * (a[v] - kl);
                }
                out[v] += weight * g;
            }
        });
    return grad;
}

}  // namespace adpo
