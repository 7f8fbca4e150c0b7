#include "adpo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace adpo {

void DecodeConfig::validate() const {
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw std::invalid_argument("top_p must be in (0,1]");
}

PolicyParams PolicyParams::zeros_like_shape(const TaskSpec& spec) {
    spec.validate();
    PolicyParams p;
    p.kind = spec.kind;
    p.num_queries = spec.num_queries;
    p.score_bins = spec.score_bins;
    p.answer_indices = num_answer_indices(spec);
    int positions = answer_positions(spec.kind);
    p.position_vocab.resize(positions);
    p.answer_logits.resize(positions);
    for (int pos = 0; pos < positions; ++pos) {
        p.position_vocab[pos] = answer_position_vocab(spec, pos);
        p.answer_logits[pos].assign(
            static_cast<size_t>(spec.num_queries) * p.position_vocab[pos], 0.0);
    }
    p.score_logits.assign(static_cast<size_t>(spec.num_queries) * p.answer_indices *
                              spec.score_bins,
                          0.0);
    return p;
}

std::span<double> PolicyParams::answer_row(int pos, int query) {
    int v = position_vocab[pos];
    return {answer_logits[pos].data() + static_cast<size_t>(query) * v,
            static_cast<size_t>(v)};
}

std::span<const double> PolicyParams::answer_row(int pos, int query) const {
    int v = position_vocab[pos];
    return {answer_logits[pos].data() + static_cast<size_t>(query) * v,
            static_cast<size_t>(v)};
}

std::span<double> PolicyParams::score_row(int query, int answer_idx) {
    size_t off = (static_cast<size_t>(query) * answer_indices + answer_idx) * score_bins;
    return {score_logits.data() + off, static_cast<size_t>(score_bins)};
}

std::span<const double> PolicyParams::score_row(int query, int answer_idx) const {
    size_t off = (static_cast<size_t>(query) * answer_indices + answer_idx) * score_bins;
    return {score_logits.data() + off, static_cast<size_t>(score_bins)};
}

void PolicyParams::fill(double v) {
    for (auto& table : answer_logits) std::fill(table.begin(), table.end(), v);
    std::fill(score_logits.begin(), score_logits.end(), v);
}

bool PolicyParams::same_shape(const PolicyParams& other) const {
    if (answer_logits.size() != other.answer_logits.size()) return false;
    for (size_t p = 0; p < answer_logits.size(); ++p) {
        if (answer_logits[p].size() != other.answer_logits[p].size()) return false;
    }
    return score_logits.size() == other.score_logits.size();
}

void PolicyParams::axpy(double alpha, const PolicyParams& other) {
    if (!same_shape(other)) throw std::invalid_argument("axpy: shape mismatch");
    for (size_t p = 0; p < answer_logits.size(); ++p) {
        for (size_t i = 0; i < answer_logits[p].size(); ++i) {
            answer_logits[p][i] += alpha * other.answer_logits[p][i];
        }
    }
    for (size_t i = 0; i < score_logits.size(); ++i) {
        score_logits[i] += alpha * other.score_logits[i];
    }
}

bool PolicyParams::all_finite() const {
    for (const auto& table : answer_logits) {
        for (double v : table) {
            if (!std::isfinite(v)) return false;
        }
    }
    for (double v : score_logits) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

size_t PolicyParams::total_entries() const {
    size_t n = score_logits.size();
    for (const auto& table : answer_logits) n += table.size();
    return n;
}

double* PolicyParams::entry(size_t flat_index) {
    for (auto& table : answer_logits) {
        if (flat_index < table.size()) return table.data() + flat_index;
        flat_index -= table.size();
    }
    return score_logits.data() + flat_index;
}

const double* PolicyParams::entry(size_t flat_index) const {
    return const_cast<PolicyParams*>(this)->entry(flat_index);
}

PolicyParams init_params(const TaskSpec& spec, InitMode mode, double accuracy_target,
                         const std::vector<Query>& queries) {
    PolicyParams p = PolicyParams::zeros_like_shape(spec);
    if (mode == InitMode::Uniform) return p;
    if (!(accuracy_target > 0.0 && accuracy_target < 1.0)) {
        throw std::invalid_argument("pretrained accuracy target must be in (0,1)");
    }
    if (static_cast<int>(queries.size()) != spec.num_queries) {
        throw std::invalid_argument("init_params: queries do not match spec");
    }
    int positions = answer_positions(spec.kind);
    // Per-position target so the product over positions matches the overall
    // accuracy target.
    double per_pos = std::pow(accuracy_target, 1.0 / positions);
    for (const Query& q : queries) {
        for (int pos = 0; pos < positions; ++pos) {
            int vocab = p.position_vocab[pos];
            double b = std::log(per_pos * (vocab - 1) / (1.0 - per_pos));
            int true_token = 0;
            switch (spec.kind) {
                case TaskKind::Discrete:
                    true_token = q.truth.discrete_answer;
                    break;
                case TaskKind::Interval: {
                    double c = (q.truth.lo + q.truth.hi) / 2.0;
                    true_token = static_cast<int>(std::lround(c * (spec.answer_vocab - 1)));
                    break;
                }
                case TaskKind::Agent: {
                    if (pos == 0) {
                        true_token = q.truth.action_type;
                    } else {
                        int grid = static_cast<int>(
                            std::lround(std::sqrt(spec.answer_vocab)));
                        int col = std::min(grid - 1, static_cast<int>(q.truth.x * grid));
                        int row = std::min(grid - 1, static_cast<int>(q.truth.y * grid));
                        true_token = row * grid + col;
                    }
                    break;
                }
            }
            p.answer_row(pos, q.id)[true_token] = b;
        }
    }
    return p;
}

static std::vector<double> softmax(std::span<const double> logits, double inv_temp) {
    double max_logit = -std::numeric_limits<double>::infinity();
    for (double v : logits) max_logit = std::max(max_logit, v * inv_temp);
    std::vector<double> probs(logits.size());
    double sum = 0.0;
    for (size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] * inv_temp - max_logit);
        sum += probs[i];
    }
    for (double& v : probs) v /= sum;
    return probs;
}

std::vector<double> token_distribution(std::span<const double> logits,
                                       const DecodeConfig& cfg) {
    cfg.validate();
    double t = std::max(cfg.temperature, 1e-3);
    std::vector<double> probs = softmax(logits, 1.0 / t);
    if (cfg.top_p >= 1.0) return probs;

    std::vector<int> order(probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return probs[a] > probs[b]; });
    double cum = 0.0;
    size_t kept = 0;
    while (kept < order.size()) {
        cum += probs[order[kept]];
        ++kept;
        if (cum >= cfg.top_p) break;
    }
    std::vector<double> out(probs.size(), 0.0);
    for (size_t i = 0; i < kept; ++i) out[order[i]] = probs[order[i]] / cum;
    return out;
}

static int sample_index(const std::vector<double>& probs, Rng& rng) {
    double u = rng.next_double();
    double cum = 0.0;
    int last_nonzero = 0;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
        if (probs[i] <= 0.0) continue;
        last_nonzero = i;
        cum += probs[i];
        if (u < cum) return i;
    }
    return last_nonzero;
}

Rollout sample_rollout(const PolicyParams& params, const TaskSpec& spec,
                       const Query& query, const DecodeConfig& cfg, Rng& rng) {
    Rollout r;
    r.query_id = query.id;
    int positions = answer_positions(spec.kind);
    for (int pos = 0; pos < positions; ++pos) {
        std::vector<double> probs = token_distribution(params.answer_row(pos, query.id), cfg);
        int tok = sample_index(probs, rng);
        r.answer_tokens.push_back(tok);
        r.behavior_logprobs.push_back(std::log(probs[tok]));
    }
    int aidx = answer_index(spec, r.answer_tokens);
    std::vector<double> sprobs = token_distribution(params.score_row(query.id, aidx), cfg);
    r.score_bin = sample_index(sprobs, rng);
    r.score_value = static_cast<double>(r.score_bin) / (spec.score_bins - 1);
    r.behavior_logprobs.push_back(std::log(sprobs[r.score_bin]));
    return r;
}

static double log_softmax_at(std::span<const double> logits, int token) {
    if (token < 0 || token >= static_cast<int>(logits.size())) {
        throw std::out_of_range("token out of vocabulary");
    }
    double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - max_logit);
    return logits[token] - max_logit - std::log(sum);
}

std::vector<double> logprob(const PolicyParams& params, const TaskSpec& spec,
                            const Rollout& rollout) {
    std::vector<double> out;
    int positions = answer_positions(spec.kind);
    if (static_cast<int>(rollout.answer_tokens.size()) != positions) {
        throw MalformedRolloutError("rollout answer layout mismatch");
    }
    for (int pos = 0; pos < positions; ++pos) {
        out.push_back(log_softmax_at(params.answer_row(pos, rollout.query_id),
                                     rollout.answer_tokens[pos]));
    }
    int aidx = answer_index(spec, rollout.answer_tokens);
    out.push_back(
        log_softmax_at(params.score_row(rollout.query_id, aidx), rollout.score_bin));
    return out;
}

PolicyParams snapshot(const PolicyParams& params) { return params; }

}  // namespace adpo
