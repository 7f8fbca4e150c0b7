#include "adpo/tasks.hpp"

#include <algorithm>
#include <cmath>

#include "adpo/rng.hpp"

namespace adpo {

std::string to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::Discrete: return "discrete";
        case TaskKind::Interval: return "interval";
        case TaskKind::Agent: return "agent";
    }
    return "?";
}

TaskKind task_kind_from_string(const std::string& s) {
    if (s == "discrete") return TaskKind::Discrete;
    if (s == "interval") return TaskKind::Interval;
    if (s == "agent") return TaskKind::Agent;
    throw std::invalid_argument("unknown task kind: " + s);
}

static int isqrt_exact(int k) {
    int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(k))));
    if (r * r != k) {
        throw std::invalid_argument(
            "agent task requires answer_vocab to be a perfect square, got " +
            std::to_string(k));
    }
    return r;
}

void TaskSpec::validate() const {
    if (num_queries <= 0) throw std::invalid_argument("num_queries must be positive");
    if (answer_vocab < 2) throw std::invalid_argument("answer_vocab must be >= 2");
    if (score_bins < 2) throw std::invalid_argument("score_bins must be >= 2");
    if (kind == TaskKind::Interval) {
        if (!(interval_width > 0.0 && interval_width <= 1.0)) {
            throw std::invalid_argument("interval_width must be in (0,1]");
        }
    }
    if (kind == TaskKind::Agent) {
        if (num_action_types <= 0) {
            throw std::invalid_argument("num_action_types must be positive");
        }
        isqrt_exact(answer_vocab);
    }
}

int answer_positions(TaskKind kind) {
    return kind == TaskKind::Agent ? 2 : 1;
}

int answer_position_vocab(const TaskSpec& spec, int pos) {
    if (spec.kind == TaskKind::Agent) {
        return pos == 0 ? spec.num_action_types : spec.answer_vocab;
    }
    return spec.answer_vocab;
}

int answer_index(const TaskSpec& spec, const std::vector<int>& answer_tokens) {
    if (static_cast<int>(answer_tokens.size()) != answer_positions(spec.kind)) {
        throw MalformedRolloutError("wrong answer token count");
    }
    if (spec.kind == TaskKind::Agent) {
        return answer_tokens[0] * spec.answer_vocab + answer_tokens[1];
    }
    return answer_tokens[0];
}

int num_answer_indices(const TaskSpec& spec) {
    return spec.kind == TaskKind::Agent
               ? spec.num_action_types * spec.answer_vocab
               : spec.answer_vocab;
}

std::vector<Query> make_task(const TaskSpec& spec) {
    spec.validate();
    Rng rng(Rng::mix(spec.seed, 0x7a5b5u));
    std::vector<Query> queries(spec.num_queries);
    for (int i = 0; i < spec.num_queries; ++i) {
        Query& q = queries[i];
        q.id = i;
        q.kind = spec.kind;
        switch (spec.kind) {
            case TaskKind::Discrete:
                q.truth.discrete_answer = rng.next_int(spec.answer_vocab);
                break;
            case TaskKind::Interval: {
                // Center drawn so the full-width interval stays inside [0,1].
                double half = spec.interval_width / 2.0;
                double c = half + rng.next_double() * (1.0 - spec.interval_width);
                q.truth.lo = c - half;
                q.truth.hi = c + half;
                break;
            }
            case TaskKind::Agent:
                q.truth.action_type = rng.next_int(spec.num_action_types);
                q.truth.x = rng.next_double();
                q.truth.y = rng.next_double();
                break;
        }
    }
    return queries;
}

DecodedAnswer decode_answer(const TaskSpec& spec, const Query& query,
                            const std::vector<int>& answer_tokens) {
    if (static_cast<int>(answer_tokens.size()) != answer_positions(query.kind)) {
        throw MalformedRolloutError("answer token count does not match task layout");
    }
    DecodedAnswer out;
    out.kind = query.kind;
    switch (query.kind) {
        case TaskKind::Discrete:
            out.token = answer_tokens[0];
            break;
        case TaskKind::Interval: {
            int k = spec.answer_vocab;
            double c = static_cast<double>(answer_tokens[0]) / (k - 1);
            double half = spec.interval_width / 2.0;
            out.lo = std::max(0.0, c - half);
            out.hi = std::min(1.0, c + half);
            break;
        }
        case TaskKind::Agent: {
            int grid = static_cast<int>(std::lround(std::sqrt(spec.answer_vocab)));
            int cell = answer_tokens[1];
            int row = cell / grid;
            int col = cell % grid;
            out.action_type = answer_tokens[0];
            out.x = (col + 0.5) / grid;
            out.y = (row + 0.5) / grid;
            break;
        }
    }
    return out;
}

}  // namespace adpo
