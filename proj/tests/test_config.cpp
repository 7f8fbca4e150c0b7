#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "adpo/config.hpp"

using namespace adpo;
using nlohmann::json;

TEST_CASE("defaults round-trip through the echo") {
    FullConfig cfg = default_config("toy");
    json echo = config_to_json(cfg);
    FullConfig back = parse_config(echo);
    CHECK(config_to_json(back) == echo);
    CHECK(config_hash(back) == config_hash(cfg));
    CHECK_THROWS_AS(default_config("huge"), ConfigError);
}

TEST_CASE("partial configs keep defaults for everything else") {
    json j = {{"train", {{"learning_rate", 0.01}, {"steps", 7}}}};
    FullConfig cfg = parse_config(j);
    CHECK(cfg.train.learning_rate == 0.01);
    CHECK(cfg.train.steps == 7);
    CHECK(cfg.train.group_size == 8);
    CHECK(cfg.task.num_queries == 16);
    CHECK(cfg.eval.num_samples == 8);
}

TEST_CASE("unknown keys are rejected with a suggestion") {
    json j = {{"train", {{"lerning_rate", 0.01}}}};
    try {
        parse_config(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(msg.find("lerning_rate") != std::string::npos);
        CHECK(msg.find("learning_rate") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(json{{"trian", json::object()}}), ConfigError);
}

TEST_CASE("enum fields parse from strings") {
    json j = {{"task", {{"kind", "interval"}, {"answer_vocab", 11}}},
              {"train",
               {{"objective",
                 {{"advantage_mode", "entangled"}, {"verification_mode", "binary"}}}}},
              {"eval", {{"protocol", "majority"}}}};
    FullConfig cfg = parse_config(j);
    CHECK(cfg.task.kind == TaskKind::Interval);
    CHECK(cfg.train.objective.mode == AdvMode::Entangled);
    CHECK(cfg.train.objective.verif == VerifMode::Binary);
    CHECK(cfg.eval.protocol == EvalProtocol::Majority);

    json bad = {{"task", {{"kind", "triangular"}}}};
    CHECK_THROWS(parse_config(bad));
}

TEST_CASE("validation failures surface as ConfigError") {
    CHECK_THROWS_AS(parse_config(json{{"task", {{"num_queries", 0}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"train", {{"group_size", 0}}}}), ConfigError);
    CHECK_THROWS_AS(
        parse_config(json{{"train", {{"objective", {{"clip_eps", 1.5}}}}}}),
        ConfigError);
    // agent vocab must be a perfect square
    CHECK_THROWS_AS(
        parse_config(json{{"task", {{"kind", "agent"}, {"answer_vocab", 10}}}}),
        ConfigError);
}

TEST_CASE("config file parsing") {
    std::string path = "config_test.json";
    {
        std::ofstream out(path);
        out << R"({"train": {"seed": 9}})";
    }
    FullConfig cfg = parse_config_file(path);
    CHECK(cfg.train.seed == 9);
    std::remove(path.c_str());

    CHECK_THROWS_AS(parse_config_file("missing_config.json"), ConfigError);
    {
        std::ofstream out(path);
        out << "{not json";
    }
    CHECK_THROWS_AS(parse_config_file(path), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("config hash tracks content") {
    FullConfig a = default_config("toy");
    FullConfig b = default_config("toy");
    CHECK(config_hash(a) == config_hash(b));
    b.train.seed = 12345;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
}

TEST_CASE("metrics and report serialization handle optionals") {
    StepMetrics m;
    m.step = 3;
    m.auc = 0.75;
    json jm = metrics_to_json(m);
    CHECK(jm["step"] == 3);
    CHECK(jm["auc"] == 0.75);
    CHECK(jm["ap"].is_null());
    CHECK(jm["frac_correct_among_verif1"].is_null());

    EvalReport r;
    r.pass1 = 0.5;
    r.score_histogram = {1, 2, 3};
    json jr = report_to_json(r);
    CHECK(jr["pass1"] == 0.5);
    CHECK(jr["mean_iou"].is_null());
    CHECK(jr["score_histogram"] == json({1, 2, 3}));
}

TEST_CASE("paper preset differs from toy in the published knobs") {
    FullConfig paper = default_config("paper");
    CHECK(paper.train.learning_rate == 1e-6);
    CHECK(paper.train.batch_queries == 128);
    CHECK(paper.train.steps == 1200);
    CHECK(paper.task.num_queries == 128);
}
