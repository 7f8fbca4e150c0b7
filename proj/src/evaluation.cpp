#include "adpo/evaluation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace adpo {

std::string to_string(EvalProtocol p) {
    switch (p) {
        case EvalProtocol::Pass1: return "pass1";
        case EvalProtocol::Majority: return "majority";
        case EvalProtocol::BestOfN: return "best_of_n";
        case EvalProtocol::CrossVerifier: return "cross_verifier";
    }
    return "?";
}

EvalProtocol eval_protocol_from_string(const std::string& s) {
    if (s == "pass1") return EvalProtocol::Pass1;
    if (s == "majority") return EvalProtocol::Majority;
    if (s == "best_of_n") return EvalProtocol::BestOfN;
    if (s == "cross_verifier") return EvalProtocol::CrossVerifier;
    throw std::invalid_argument("unknown eval protocol: " + s);
}

void EvalConfig::validate() const {
    if (num_samples < 1) throw std::invalid_argument("num_samples must be >= 1");
    if (protocol == EvalProtocol::Pass1 && num_samples != 1) {
        throw std::invalid_argument("pass1 protocol forces num_samples = 1");
    }
    decode.validate();
}

int best_of_n(const std::vector<Rollout>& rollouts) {
    if (rollouts.empty()) throw std::invalid_argument("best_of_n: empty pool");
    int best = 0;
    for (int i = 1; i < static_cast<int>(rollouts.size()); ++i) {
        if (rollouts[i].score_value > rollouts[best].score_value) best = i;
    }
    return best;
}

int majority_vote(const std::vector<int>& answer_encodings) {
    if (answer_encodings.empty()) throw std::invalid_argument("majority_vote: empty pool");
    std::map<int, int> counts;
    for (int a : answer_encodings) counts[a]++;
    int best = answer_encodings[0];
    int best_count = 0;
    for (const auto& [answer, count] : counts) {
        if (count > best_count) {  // map iterates ascending: ties keep smallest
            best = answer;
            best_count = count;
        }
    }
    return best;
}

std::optional<double> auc(const std::vector<double>& scores,
                          const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("auc: length mismatch");
    long n_pos = std::count(labels.begin(), labels.end(), 1);
    long n_neg = static_cast<long>(labels.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;

    // Rank-sum formulation with midranks for ties.
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] < scores[b]; });
    std::vector<double> rank(scores.size());
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        double mid = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
        for (size_t k = i; k < j; ++k) rank[order[k]] = mid;
        i = j;
    }
    double pos_rank_sum = 0.0;
    for (size_t k = 0; k < labels.size(); ++k) {
        if (labels[k] == 1) pos_rank_sum += rank[k];
    }
    double u = pos_rank_sum - static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
    return u / (static_cast<double>(n_pos) * n_neg);
}

std::optional<double> average_precision(const std::vector<double>& scores,
                                        const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw std::invalid_argument("average_precision: length mismatch");
    }
    long n_pos = std::count(labels.begin(), labels.end(), 1);
    if (n_pos == 0) return std::nullopt;

    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });
    double sum = 0.0;
    long hits = 0;
    for (size_t r = 0; r < order.size(); ++r) {
        if (labels[order[r]] == 1) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(n_pos);
}

bool rollout_success(TaskKind kind, double answer_reward) {
    switch (kind) {
        case TaskKind::Discrete: return answer_reward == 1.0;
        case TaskKind::Interval: return answer_reward > 0.5;
        case TaskKind::Agent: return answer_reward >= 0.5;
    }
    return false;
}

// Deterministic re-scoring by a separate verifier: expected score value under
// the verifier's score head at T=1.
static double verifier_score(const PolicyParams& verifier, const TaskSpec& spec,
                             int query_id, int answer_idx) {
    std::span<const double> row = verifier.score_row(query_id, answer_idx);
    double max_logit = *std::max_element(row.begin(), row.end());
    double sum = 0.0, acc = 0.0;
    for (size_t b = 0; b < row.size(); ++b) {
        double w = std::exp(row[b] - max_logit);
        sum += w;
        acc += w * static_cast<double>(b) / (spec.score_bins - 1);
    }
    return acc / sum;
}

EvalReport evaluate(const PolicyParams& params, const TaskSpec& spec,
                    const std::vector<Query>& queries, const EvalConfig& cfg,
                    const PolicyParams* verifier) {
    cfg.validate();
    if (cfg.protocol == EvalProtocol::CrossVerifier && verifier == nullptr) {
        throw std::invalid_argument("cross_verifier protocol needs verifier params");
    }
    EvalReport report;
    report.score_histogram.assign(spec.score_bins, 0);
    std::vector<double> pooled_scores;
    std::vector<int> pooled_labels;
    double pass1_sum = 0.0, majority_sum = 0.0, best_sum = 0.0, iou_sum = 0.0;
    long iou_count = 0;

    for (const Query& q : queries) {
        Rng rng(Rng::mix(cfg.seed, 0xe7a1u + static_cast<uint64_t>(q.id)));
        std::vector<Rollout> pool;
        std::vector<double> rewards_in_pool;
        std::vector<int> encodings;
        for (int n = 0; n < cfg.num_samples; ++n) {
            Rollout r = sample_rollout(params, spec, q, cfg.decode, rng);
            DecodedAnswer decoded = decode_answer(spec, q, r.answer_tokens);
            double ra = answer_reward(decoded, q);
            int aidx = answer_index(spec, r.answer_tokens);
            if (verifier != nullptr) {
                r.score_value = verifier_score(*verifier, spec, q.id, aidx);
                r.score_bin = static_cast<int>(
                    std::lround(r.score_value * (spec.score_bins - 1)));
            }
            report.score_histogram[r.score_bin]++;
            report.num_rollouts++;
            pooled_scores.push_back(r.score_value);
            pooled_labels.push_back(rollout_success(spec.kind, ra) ? 1 : 0);
            if (spec.kind == TaskKind::Interval) {
                iou_sum += ra;
                ++iou_count;
            }
            pool.push_back(std::move(r));
            rewards_in_pool.push_back(ra);
            encodings.push_back(aidx);
        }
        pass1_sum += rollout_success(spec.kind, rewards_in_pool[0]) ? 1.0 : 0.0;
        int chosen = best_of_n(pool);
        best_sum += rollout_success(spec.kind, rewards_in_pool[chosen]) ? 1.0 : 0.0;
        int voted = majority_vote(encodings);
        // Correctness of the voted answer equals the reward of any rollout
        // carrying that encoding.
        for (size_t i = 0; i < encodings.size(); ++i) {
            if (encodings[i] == voted) {
                majority_sum += rollout_success(spec.kind, rewards_in_pool[i]) ? 1.0 : 0.0;
                break;
            }
        }
    }

    double nq = static_cast<double>(queries.size());
    report.pass1 = pass1_sum / nq;
    report.majority = majority_sum / nq;
    report.best_of_n = best_sum / nq;
    if (iou_count > 0) report.mean_iou = iou_sum / iou_count;
    report.auc = auc(pooled_scores, pooled_labels);
    report.ap = average_precision(pooled_scores, pooled_labels);
    return report;
}

}  // namespace adpo
