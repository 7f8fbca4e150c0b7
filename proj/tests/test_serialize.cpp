#include <doctest.h>

#include <cstdio>
#include <sstream>

#include "adpo/serialize.hpp"
#include "adpo/rng.hpp"

using namespace adpo;

namespace {

PolicyParams random_params(uint64_t seed) {
    TaskSpec spec;
    spec.kind = TaskKind::Agent;
    spec.num_queries = 3;
    spec.answer_vocab = 9;
    spec.score_bins = 5;
    spec.num_action_types = 2;
    spec.seed = seed;
    auto queries = make_task(spec);
    PolicyParams p = init_params(spec, InitMode::Uniform, 0, queries);
    Rng rng(seed);
    for (size_t i = 0; i < p.total_entries(); ++i) {
        *p.entry(i) = 20.0 * (rng.next_double() - 0.5);
    }
    return p;
}

}  // namespace

TEST_CASE("save/load round-trips bit-exactly") {
    PolicyParams p = random_params(44);
    std::stringstream ss;
    save_params(p, ss);
    PolicyParams q = load_params(ss);
    CHECK(q.kind == p.kind);
    CHECK(q.num_queries == p.num_queries);
    CHECK(q.position_vocab == p.position_vocab);
    CHECK(q.score_bins == p.score_bins);
    CHECK(q.answer_indices == p.answer_indices);
    CHECK(q.answer_logits == p.answer_logits);
    CHECK(q.score_logits == p.score_logits);
}

TEST_CASE("serialization is byte-stable for identical params") {
    PolicyParams p = random_params(45);
    std::stringstream a, b;
    save_params(p, a);
    save_params(p, b);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("adpo-params-v1", 0) == 0);
}

TEST_CASE("extreme doubles survive the text round-trip") {
    TaskSpec spec;
    spec.kind = TaskKind::Discrete;
    spec.num_queries = 1;
    spec.answer_vocab = 4;
    spec.score_bins = 3;
    spec.seed = 1;
    auto queries = make_task(spec);
    PolicyParams p = init_params(spec, InitMode::Uniform, 0, queries);
    p.answer_row(0, 0)[0] = 0.1;  // not exactly representable
    p.answer_row(0, 0)[1] = -1e-300;
    p.answer_row(0, 0)[2] = 12345.678901234567;
    p.answer_row(0, 0)[3] = 0x1.fffffffffffffp+3;
    std::stringstream ss;
    save_params(p, ss);
    PolicyParams q = load_params(ss);
    CHECK(q.answer_logits == p.answer_logits);
}

TEST_CASE("file round-trip") {
    PolicyParams p = random_params(46);
    std::string path = "serialize_test_params.txt";
    save_params_file(p, path);
    PolicyParams q = load_params_file(path);
    CHECK(q.answer_logits == p.answer_logits);
    CHECK(q.score_logits == p.score_logits);
    std::remove(path.c_str());
}

TEST_CASE("corrupt input is rejected") {
    SUBCASE("wrong magic") {
        std::stringstream ss("not-a-params-file 1 2 3");
        CHECK_THROWS(load_params(ss));
    }
    SUBCASE("truncated body") {
        PolicyParams p = random_params(47);
        std::stringstream ss;
        save_params(p, ss);
        std::string text = ss.str();
        std::stringstream cut(text.substr(0, text.size() / 2));
        CHECK_THROWS(load_params(cut));
    }
    SUBCASE("missing file") {
        CHECK_THROWS(load_params_file("does_not_exist_params.txt"));
    }
}
