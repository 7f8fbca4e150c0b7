#include <doctest.h>

#include <cmath>

#include "adpo/policy.hpp"

using namespace adpo;

namespace {

TaskSpec discrete_spec(int queries = 2, int k = 8, int b = 11) {
    TaskSpec spec;
    spec.kind = TaskKind::Discrete;
    spec.num_queries = queries;
    spec.answer_vocab = k;
    spec.score_bins = b;
    spec.seed = 42;
    return spec;
}

}  // namespace

TEST_CASE("uniform init gives exactly uniform distributions") {
    TaskSpec spec = discrete_spec();
    auto queries = make_task(spec);
    PolicyParams p = init_params(spec, InitMode::Uniform, 0, queries);
    DecodeConfig cfg{1.0, 1.0};
    auto probs = token_distribution(p.answer_row(0, 0), cfg);
    for (double v : probs) CHECK(v == doctest::Approx(1.0 / 8).epsilon(1e-15));
}

TEST_CASE("pretrained init solves the softmax bias equation") {
    TaskSpec spec = discrete_spec();
    auto queries = make_task(spec);
    PolicyParams p = init_params(spec, InitMode::Pretrained, 0.85, queries);
    int true_token = queries[0].truth.discrete_answer;
    double b = p.answer_row(0, 0)[true_token];
    CHECK(b == doctest::Approx(std::log(0.85 * 7 / 0.15)).epsilon(1e-12));
    DecodeConfig cfg{1.0, 1.0};
    auto probs = token_distribution(p.answer_row(0, 0), cfg);
    CHECK(probs[true_token] == doctest::Approx(0.85).epsilon(1e-12));

    // a0 = 1/K reduces to uniform
    PolicyParams u = init_params(spec, InitMode::Pretrained, 1.0 / 8, queries);
    CHECK(u.answer_row(0, 0)[true_token] == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(init_params(spec, InitMode::Pretrained, 1.5, queries),
                    std::invalid_argument);
}

TEST_CASE("token_distribution: softmax, temperature and top-p") {
    DecodeConfig cfg{1.0, 1.0};
    std::vector<double> logits = {2.0, 0.0};
    auto probs = token_distribution(logits, cfg);
    CHECK(probs[0] == doctest::Approx(0.8808).epsilon(1e-4));
    CHECK(probs[1] == doctest::Approx(0.1192).epsilon(1e-4));
    CHECK(probs[0] + probs[1] == doctest::Approx(1.0).epsilon(1e-12));

    SUBCASE("top_p = 1 is the identity truncation") {
        DecodeConfig trunc{1.0, 0.999999999};
        // with probs .88/.12 the first token alone is below top_p=0.9999...,
        // so both stay; compare against untruncated
        auto full = token_distribution(logits, cfg);
        auto kept = token_distribution(logits, trunc);
        for (size_t i = 0; i < full.size(); ++i) {
            CHECK(kept[i] == doctest::Approx(full[i]).epsilon(1e-9));
        }
    }
    SUBCASE("top_p truncates the tail and renormalizes") {
        DecodeConfig trunc{1.0, 0.5};
        auto kept = token_distribution(logits, trunc);
        CHECK(kept[0] == 1.0);
        CHECK(kept[1] == 0.0);
    }
    SUBCASE("low temperature concentrates on the argmax") {
        DecodeConfig cold{1e-3, 1.0};
        auto probs2 = token_distribution(std::vector<double>{5.0, 0.0, 0.0}, cold);
        CHECK(probs2[0] == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("probabilities always sum to 1") {
        for (double tp : {0.3, 0.7, 0.99, 1.0}) {
            DecodeConfig c{0.7, tp};
            auto p = token_distribution(std::vector<double>{1.0, -2.0, 0.5, 0.0}, c);
            double sum = 0.0;
            for (double v : p) {
                CHECK(v >= 0.0);
                sum += v;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("sample_rollout is deterministic and consistent with logprob") {
    TaskSpec spec = discrete_spec();
    auto queries = make_task(spec);
    PolicyParams p = init_params(spec, InitMode::Pretrained, 0.6, queries);
    DecodeConfig cfg{1.0, 1.0};

    Rng rng1(123), rng2(123);
    Rollout a = sample_rollout(p, spec, queries[0], cfg, rng1);
    Rollout b = sample_rollout(p, spec, queries[0], cfg, rng2);
    CHECK(a.answer_tokens == b.answer_tokens);
    CHECK(a.score_bin == b.score_bin);
    CHECK(a.behavior_logprobs == b.behavior_logprobs);

    // at T=1, top_p=1 the recorded behavior logprobs equal logprob() exactly
    auto lp = logprob(p, spec, a);
    REQUIRE(lp.size() == a.behavior_logprobs.size());
    for (size_t t = 0; t < lp.size(); ++t) {
        CHECK(lp[t] == doctest::Approx(a.behavior_logprobs[t]).epsilon(1e-15));
    }
    CHECK(a.score_value == static_cast<double>(a.score_bin) / 10.0);
}

TEST_CASE("empirical answer frequencies match the uniform distribution") {
    TaskSpec spec = discrete_spec(1, 8, 3);
    auto queries = make_task(spec);
    PolicyParams p = init_params(spec, InitMode::Uniform, 0, queries);
    DecodeConfig cfg{1.0, 1.0};
    Rng rng(777);
    std::vector<int> counts(8, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        counts[sample_rollout(p, spec, queries[0], cfg, rng).answer_tokens[0]]++;
    }
    for (int v = 0; v < 8; ++v) {
        CHECK(std::abs(counts[v] / static_cast<double>(n) - 0.125) < 0.01);
    }
}

TEST_CASE("logprob basics") {
    TaskSpec spec = discrete_spec();
    auto queries = make_task(spec);
    PolicyParams p = init_params(spec, InitMode::Uniform, 0, queries);
    Rollout r;
    r.query_id = 0;
    r.answer_tokens = {3};
    r.score_bin = 2;
    auto lp = logprob(p, spec, r);
    CHECK(lp[0] == doctest::Approx(std::log(1.0 / 8)).epsilon(1e-12));
    CHECK(lp[1] == doctest::Approx(std::log(1.0 / 11)).epsilon(1e-12));

    // large bias saturates toward logprob 0
    p.answer_row(0, 0)[3] = 50.0;
    auto lp2 = logprob(p, spec, r);
    CHECK(lp2[0] == doctest::Approx(0.0).epsilon(1e-9));

    r.answer_tokens = {99};
    CHECK_THROWS_AS(logprob(p, spec, r), std::out_of_range);
}

TEST_CASE("score head conditions on the sampled answer") {
    TaskSpec spec = discrete_spec(1, 4, 5);
    auto queries = make_task(spec);
    PolicyParams p = init_params(spec, InitMode::Uniform, 0, queries);
    // distinct score distributions for answers 0 and 1
    p.score_row(0, 0)[4] = 5.0;
    p.score_row(0, 1)[0] = 5.0;
    DecodeConfig cfg{1.0, 1.0};
    auto d0 = token_distribution(p.score_row(0, 0), cfg);
    auto d1 = token_distribution(p.score_row(0, 1), cfg);
    CHECK(d0[4] > 0.9);
    CHECK(d1[0] > 0.9);
}

TEST_CASE("snapshot is a deep independent copy") {
    TaskSpec spec = discrete_spec();
    auto queries = make_task(spec);
    PolicyParams p = init_params(spec, InitMode::Pretrained, 0.85, queries);
    PolicyParams snap = snapshot(p);
    Rollout r;
    r.query_id = 0;
    r.answer_tokens = {1};
    r.score_bin = 0;
    auto before = logprob(p, spec, r);
    p.answer_row(0, 0)[1] += 3.0;
    auto after_snap = logprob(snap, spec, r);
    CHECK(after_snap[0] == before[0]);

    PolicyParams snap2 = snapshot(snapshot(p));
    CHECK(snap2.answer_logits == p.answer_logits);
    CHECK(snap2.score_logits == p.score_logits);
}
