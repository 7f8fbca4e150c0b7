#include "adpo/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace adpo {

using nlohmann::json;

FullConfig default_config(const std::string& preset) {
    FullConfig cfg;
    if (preset == "toy") {
        // defaults in the struct definitions
    } else if (preset == "paper") {
        // Published large-scale settings, recorded for documentation; they
        // will not move a tabular policy in any reasonable number of steps.
        cfg.train.learning_rate = 1e-6;
        cfg.train.batch_queries = 128;
        cfg.train.steps = 1200;
        cfg.task.num_queries = 128;
    } else {
        throw ConfigError("unknown preset: " + preset);
    }
    return cfg;
}

namespace {

// Levenshtein distance for unknown-key suggestions.
int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= b.size(); ++j) {
            int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

void check_keys(const json& j, const std::string& path,
                const std::vector<std::string>& known) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) != known.end()) continue;
        std::string best;
        int best_dist = 1000;
        for (const auto& k : known) {
            int d = edit_distance(key, k);
            if (d < best_dist) {
                best_dist = d;
                best = k;
            }
        }
        std::string msg = path + ": unknown key '" + key + "'";
        if (best_dist <= 3) msg += " (did you mean '" + best + "'?)";
        throw ConfigError(msg);
    }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void get_string_enum(const json& j, const char* key, const std::string& path,
                     std::string& out) {
    if (j.contains(key)) {
        if (!j.at(key).is_string()) throw ConfigError(path + "." + key + ": expected string");
        out = j.at(key).get<std::string>();
    }
}

void parse_decode(const json& j, const std::string& path, DecodeConfig& out) {
    check_keys(j, path, {"temperature", "top_p"});
    get_if(j, "temperature", out.temperature);
    get_if(j, "top_p", out.top_p);
}

}  // namespace

FullConfig parse_config(const json& j, const std::string& preset) {
    FullConfig cfg = default_config(preset);
    check_keys(j, "$", {"task", "train", "eval", "experiment"});

    if (j.contains("task")) {
        const json& t = j.at("task");
        check_keys(t, "task",
                   {"kind", "num_queries", "answer_vocab", "score_bins",
                    "interval_width", "num_action_types", "seed"});
        std::string kind = to_string(cfg.task.kind);
        get_string_enum(t, "kind", "task", kind);
        cfg.task.kind = task_kind_from_string(kind);
        get_if(t, "num_queries", cfg.task.num_queries);
        get_if(t, "answer_vocab", cfg.task.answer_vocab);
        get_if(t, "score_bins", cfg.task.score_bins);
        get_if(t, "interval_width", cfg.task.interval_width);
        get_if(t, "num_action_types", cfg.task.num_action_types);
        get_if(t, "seed", cfg.task.seed);
    }
    if (j.contains("train")) {
        const json& t = j.at("train");
        check_keys(t, "train",
                   {"group_size", "batch_queries", "learning_rate", "steps",
                    "inner_epochs", "decode", "objective", "thresholds", "init", "seed"});
        get_if(t, "group_size", cfg.train.group_size);
        get_if(t, "batch_queries", cfg.train.batch_queries);
        get_if(t, "learning_rate", cfg.train.learning_rate);
        get_if(t, "steps", cfg.train.steps);
        get_if(t, "inner_epochs", cfg.train.inner_epochs);
        get_if(t, "seed", cfg.train.seed);
        if (t.contains("decode")) parse_decode(t.at("decode"), "train.decode", cfg.train.decode);
        if (t.contains("objective")) {
            const json& o = t.at("objective");
            check_keys(o, "train.objective",
                       {"clip_eps", "kl_coeff", "advantage_mode", "verification_mode"});
            get_if(o, "clip_eps", cfg.train.objective.clip_eps);
            get_if(o, "kl_coeff", cfg.train.objective.kl_coeff);
            std::string mode = to_string(cfg.train.objective.mode);
            get_string_enum(o, "advantage_mode", "train.objective", mode);
            cfg.train.objective.mode = adv_mode_from_string(mode);
            std::string verif = to_string(cfg.train.objective.verif);
            get_string_enum(o, "verification_mode", "train.objective", verif);
            cfg.train.objective.verif = verif_mode_from_string(verif);
        }
        if (t.contains("thresholds")) {
            const json& th = t.at("thresholds");
            check_keys(th, "train.thresholds", {"tau_s", "tau_a", "margin"});
            get_if(th, "tau_s", cfg.train.thresholds.tau_s);
            get_if(th, "tau_a", cfg.train.thresholds.tau_a);
            get_if(th, "margin", cfg.train.thresholds.margin);
        }
        if (t.contains("init")) {
            const json& init = t.at("init");
            check_keys(init, "train.init", {"mode", "accuracy"});
            std::string mode =
                cfg.train.init_mode == InitMode::Uniform ? "uniform" : "pretrained";
            get_string_enum(init, "mode", "train.init", mode);
            if (mode == "uniform") {
                cfg.train.init_mode = InitMode::Uniform;
            } else if (mode == "pretrained") {
                cfg.train.init_mode = InitMode::Pretrained;
            } else {
                throw ConfigError("train.init.mode: unknown value '" + mode + "'");
            }
            get_if(init, "accuracy", cfg.train.init_accuracy);
        }
    }
    if (j.contains("eval")) {
        const json& e = j.at("eval");
        check_keys(e, "eval", {"num_samples", "protocol", "decode", "seed"});
        get_if(e, "num_samples", cfg.eval.num_samples);
        std::string protocol = to_string(cfg.eval.protocol);
        get_string_enum(e, "protocol", "eval", protocol);
        cfg.eval.protocol = eval_protocol_from_string(protocol);
        if (e.contains("decode")) parse_decode(e.at("decode"), "eval.decode", cfg.eval.decode);
        get_if(e, "seed", cfg.eval.seed);
    }
    if (j.contains("experiment")) {
        const json& e = j.at("experiment");
        check_keys(e, "experiment", {"name", "seeds", "margins"});
        get_if(e, "name", cfg.experiment.name);
        get_if(e, "seeds", cfg.experiment.seeds);
        get_if(e, "margins", cfg.experiment.margins);
    }

    try {
        cfg.task.validate();
        cfg.train.validate();
        cfg.eval.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("config validation: ") + err.what());
    }
    if (cfg.train.objective.verif == VerifMode::Preference && cfg.train.group_size < 2) {
        throw ConfigError(
            "config validation: preference verification requires group_size >= 2");
    }
    return cfg;
}

FullConfig parse_config_file(const std::string& path, const std::string& preset) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("config parse error: ") + err.what());
    }
    return parse_config(j, preset);
}

json config_to_json(const FullConfig& cfg) {
    json j;
    j["task"] = {{"kind", to_string(cfg.task.kind)},
                 {"num_queries", cfg.task.num_queries},
                 {"answer_vocab", cfg.task.answer_vocab},
                 {"score_bins", cfg.task.score_bins},
                 {"interval_width", cfg.task.interval_width},
                 {"num_action_types", cfg.task.num_action_types},
                 {"seed", cfg.task.seed}};
    j["train"] = {
        {"group_size", cfg.train.group_size},
        {"batch_queries", cfg.train.batch_queries},
        {"learning_rate", cfg.train.learning_rate},
        {"steps", cfg.train.steps},
        {"inner_epochs", cfg.train.inner_epochs},
        {"seed", cfg.train.seed},
        {"decode",
         {{"temperature", cfg.train.decode.temperature}, {"top_p", cfg.train.decode.top_p}}},
        {"objective",
         {{"clip_eps", cfg.train.objective.clip_eps},
          {"kl_coeff", cfg.train.objective.kl_coeff},
          {"advantage_mode", to_string(cfg.train.objective.mode)},
          {"verification_mode", to_string(cfg.train.objective.verif)}}},
        {"thresholds",
         {{"tau_s", cfg.train.thresholds.tau_s},
          {"tau_a", cfg.train.thresholds.tau_a},
          {"margin", cfg.train.thresholds.margin}}},
        {"init",
         {{"mode", cfg.train.init_mode == InitMode::Uniform ? "uniform" : "pretrained"},
          {"accuracy", cfg.train.init_accuracy}}}};
    j["eval"] = {{"num_samples", cfg.eval.num_samples},
                 {"protocol", to_string(cfg.eval.protocol)},
                 {"decode",
                  {{"temperature", cfg.eval.decode.temperature},
                   {"top_p", cfg.eval.decode.top_p}}},
                 {"seed", cfg.eval.seed}};
    j["experiment"] = {{"name", cfg.experiment.name},
                       {"seeds", cfg.experiment.seeds},
                       {"margins", cfg.experiment.margins}};
    return j;
}

json metrics_to_json(const StepMetrics& m) {
    json j;
    j["step"] = m.step;
    j["mean_answer_reward"] = m.mean_answer_reward;
    j["pass1"] = m.pass1;
    j["fraction_max_score"] = m.fraction_max_score;
    j["frac_correct_among_verif1"] =
        m.frac_correct_among_verif1 ? json(*m.frac_correct_among_verif1) : json(nullptr);
    j["auc"] = m.auc ? json(*m.auc) : json(nullptr);
    j["ap"] = m.ap ? json(*m.ap) : json(nullptr);
    j["objective"] = m.objective;
    j["kl"] = m.kl;
    j["hacking_witnesses"] = m.hacking_witnesses;
    return j;
}

json report_to_json(const EvalReport& r) {
    json j;
    j["pass1"] = r.pass1;
    j["majority"] = r.majority;
    j["best_of_n"] = r.best_of_n;
    j["mean_iou"] = r.mean_iou ? json(*r.mean_iou) : json(nullptr);
    j["auc"] = r.auc ? json(*r.auc) : json(nullptr);
    j["ap"] = r.ap ? json(*r.ap) : json(nullptr);
    j["score_histogram"] = r.score_histogram;
    j["num_rollouts"] = r.num_rollouts;
    return j;
}

std::string config_hash(const FullConfig& cfg) {
    std::string dump = config_to_json(cfg).dump();
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace adpo
