#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace adpo {

enum class TaskKind { Discrete, Interval, Agent };

std::string to_string(TaskKind kind);
TaskKind task_kind_from_string(const std::string& s);

// Ground truth for one query. Only the fields matching the task kind are
// meaningful.
struct GroundTruth {
    int discrete_answer = -1;     // Discrete: token index
    double lo = 0.0, hi = 0.0;    // Interval: [lo, hi] within [0,1], lo < hi
    int action_type = -1;         // Agent: type index
    double x = 0.0, y = 0.0;      // Agent: target point in the unit square
};

struct Query {
    int id = 0;
    TaskKind kind = TaskKind::Discrete;
    GroundTruth truth;
};

struct TaskSpec {
    TaskKind kind = TaskKind::Discrete;
    int num_queries = 16;
    int answer_vocab = 8;       // K; perfect square for Agent coordinate grid
    int score_bins = 11;        // B
    double interval_width = 0.2;  // Interval only
    int num_action_types = 4;   // Agent only
    uint64_t seed = 0;

    void validate() const;
};

// Decoded answer in task space. Mirrors GroundTruth's layout.
struct DecodedAnswer {
    TaskKind kind = TaskKind::Discrete;
    int token = -1;               // Discrete
    double lo = 0.0, hi = 0.0;    // Interval
    int action_type = -1;         // Agent
    double x = 0.0, y = 0.0;      // Agent
};

struct MalformedRolloutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Number of answer tokens per rollout for this task kind.
int answer_positions(TaskKind kind);

// Vocabulary size of answer position `pos`.
int answer_position_vocab(const TaskSpec& spec, int pos);

// Flat index of a full answer token sequence, used to address the score head.
int answer_index(const TaskSpec& spec, const std::vector<int>& answer_tokens);
int num_answer_indices(const TaskSpec& spec);

std::vector<Query> make_task(const TaskSpec& spec);

DecodedAnswer decode_answer(const TaskSpec& spec, const Query& query,
                            const std::vector<int>& answer_tokens);

}  // namespace adpo
