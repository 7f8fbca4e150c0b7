#include <doctest.h>

#include <cmath>

#include "adpo/rewards.hpp"
#include "adpo/rng.hpp"

using namespace adpo;

namespace {

DecodedAnswer discrete_answer(int token) {
    DecodedAnswer d;
    d.kind = TaskKind::Discrete;
    d.token = token;
    return d;
}

DecodedAnswer interval_answer(double lo, double hi) {
    DecodedAnswer d;
    d.kind = TaskKind::Interval;
    d.lo = lo;
    d.hi = hi;
    return d;
}

DecodedAnswer agent_answer(int type, double x, double y) {
    DecodedAnswer d;
    d.kind = TaskKind::Agent;
    d.action_type = type;
    d.x = x;
    d.y = y;
    return d;
}

// Independent O(G^2) oracle for the preference verification reward: full
// pairwise enumeration from scratch.
double preference_oracle(const std::vector<double>& scores,
                         const std::vector<double>& rewards, int i, bool discrete,
                         double gamma) {
    int g = static_cast<int>(scores.size());
    int in_set = 0, agree = 0;
    for (int j = 0; j < g; ++j) {
        bool member = discrete ? rewards[j] != rewards[i]
                               : std::abs(rewards[j] - rewards[i]) > gamma;
        if (!member) continue;
        ++in_set;
        if ((scores[i] - scores[j]) * (rewards[i] - rewards[j]) > 0.0) ++agree;
    }
    if (in_set == 0) return 0.0;
    return static_cast<double>(agree) / in_set;
}

}  // namespace

TEST_CASE("discrete answer reward is exact match") {
    GroundTruth truth;
    truth.discrete_answer = 5;
    CHECK(answer_reward_discrete(discrete_answer(5), truth) == 1.0);
    CHECK(answer_reward_discrete(discrete_answer(4), truth) == 0.0);
    truth.discrete_answer = 0;
    CHECK(answer_reward_discrete(discrete_answer(0), truth) == 1.0);
    CHECK_THROWS_AS(answer_reward_discrete(interval_answer(0, 1), truth),
                    std::invalid_argument);
}

TEST_CASE("interval answer reward is IoU") {
    GroundTruth truth;
    truth.lo = 0.3;
    truth.hi = 0.5;
    CHECK(answer_reward_interval(interval_answer(0.2, 0.4), truth) ==
          doctest::Approx(0.1 / 0.3).epsilon(1e-12));
    truth.lo = 0.2;
    truth.hi = 0.4;
    CHECK(answer_reward_interval(interval_answer(0.2, 0.4), truth) == 1.0);
    truth.lo = 0.5;
    truth.hi = 0.6;
    CHECK(answer_reward_interval(interval_answer(0.0, 0.1), truth) == 0.0);
    CHECK_THROWS_AS(answer_reward_interval(interval_answer(0.4, 0.2), truth),
                    std::invalid_argument);
}

TEST_CASE("agent answer reward: type gate plus distance rule") {
    GroundTruth truth;
    truth.action_type = 1;
    truth.x = 0.0;
    truth.y = 0.0;
    CHECK(answer_reward_agent(agent_answer(1, 0.0, 0.0), truth) == 1.0);
    CHECK(answer_reward_agent(agent_answer(2, 0.0, 0.0), truth) == 0.0);
    // distance 0.2 vs threshold 0.14*sqrt(2) ~ 0.198
    CHECK(answer_reward_agent(agent_answer(1, 0.2, 0.0), truth) == 0.5);
    // distance 0.19 < threshold
    CHECK(answer_reward_agent(agent_answer(1, 0.19, 0.0), truth) == 1.0);
    CHECK_THROWS_AS(answer_reward_agent(agent_answer(1, 1.5, 0.0), truth),
                    std::invalid_argument);
}

TEST_CASE("binary verification reward thresholds with strict inequality") {
    Thresholds th;
    CHECK(binary_verification_reward(0.9, 1.0, th) == 1.0);
    CHECK(binary_verification_reward(0.9, 0.0, th) == 0.0);
    CHECK(binary_verification_reward(0.1, 0.0, th) == 1.0);
    CHECK(binary_verification_reward(0.5, 1.0, th) == 0.0);  // product exactly 0
    CHECK(binary_verification_reward(0.5, 0.0, th) == 0.0);
}

TEST_CASE("contrastive sets") {
    SUBCASE("discrete: different answer reward") {
        CHECK(contrastive_set_discrete({1, 1, 0, 0}, 0) == std::vector<int>{2, 3});
        CHECK(contrastive_set_discrete({1, 1, 1, 1}, 2).empty());
        CHECK(contrastive_set_discrete({0, 1}, 1) == std::vector<int>{0});
        CHECK_THROWS_AS(contrastive_set_discrete({1, 0}, 5), std::out_of_range);
    }
    SUBCASE("continuous: margin on quality difference, strict") {
        CHECK(contrastive_set_continuous({0.9, 0.85, 0.5}, 0, 0.1) ==
              std::vector<int>{2});
        CHECK(contrastive_set_continuous({0.9, 0.85, 0.5}, 2, 0.1) ==
              std::vector<int>{0, 1});
        CHECK(contrastive_set_continuous({0.9, 0.1, 0.5}, 0, 1.0).empty());
        CHECK_THROWS_AS(contrastive_set_continuous({0.9, 0.1}, 0, 0.0),
                        std::invalid_argument);
    }
}

TEST_CASE("preference verification reward worked example") {
    std::vector<double> s = {0.8, 0.3, 0.5, 0.1};
    std::vector<double> ra = {1, 1, 0, 0};
    std::vector<double> expect = {1.0, 0.5, 0.5, 1.0};
    for (int i = 0; i < 4; ++i) {
        auto set = contrastive_set_discrete(ra, i);
        CHECK(preference_verification_reward(s, ra, i, set) == expect[i]);
    }
}

TEST_CASE("homogeneous groups earn zero preference reward") {
    std::vector<double> s = {0.8, 0.3, 0.5};
    std::vector<double> ra = {1, 1, 1};
    for (int i = 0; i < 3; ++i) {
        auto set = contrastive_set_discrete(ra, i);
        CHECK(preference_verification_reward(s, ra, i, set) == 0.0);
    }
}

TEST_CASE("score ties earn nothing") {
    std::vector<double> s = {0.5, 0.5};
    std::vector<double> ra = {1, 0};
    CHECK(preference_verification_reward(s, ra, 0, {1}) == 0.0);
    CHECK(preference_verification_reward(s, ra, 1, {0}) == 0.0);
}

TEST_CASE("preference reward equals the pairwise enumeration oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        int g = 2 + rng.next_int(15);
        bool discrete = rng.next_int(2) == 0;
        std::vector<double> scores(g), rewards(g);
        for (int i = 0; i < g; ++i) {
            scores[i] = (rng.next_int(11)) / 10.0;
            rewards[i] = discrete ? rng.next_int(2) : rng.next_int(11) / 10.0;
        }
        for (int i = 0; i < g; ++i) {
            auto set = discrete ? contrastive_set_discrete(rewards, i)
                                : contrastive_set_continuous(rewards, i, 0.1);
            double got = preference_verification_reward(scores, rewards, i, set);
            double want = preference_oracle(scores, rewards, i, discrete, 0.1);
            CHECK(got == want);
        }
    }
}

TEST_CASE("two-sample symmetric consistency") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> s = {rng.next_int(11) / 10.0, rng.next_int(11) / 10.0};
        std::vector<double> ra = {1.0, 0.0};
        auto b = group_rewards(ra, s, TaskKind::Discrete, VerifMode::Preference, {});
        bool ordered = s[0] > s[1];
        CHECK((*b[0].preference == 1.0) == ordered);
        CHECK((*b[1].preference == 1.0) == ordered);
    }
}

TEST_CASE("group_rewards per mode") {
    Thresholds th;
    SUBCASE("preference mode on a mixed group") {
        auto b = group_rewards({1, 0}, {0.9, 0.1}, TaskKind::Discrete,
                               VerifMode::Preference, th);
        CHECK(*b[0].preference == 1.0);
        CHECK(*b[1].preference == 1.0);
        CHECK(!b[0].binary.has_value());
    }
    SUBCASE("binary mode on the same group") {
        auto b = group_rewards({1, 0}, {0.9, 0.1}, TaskKind::Discrete,
                               VerifMode::Binary, th);
        CHECK(*b[0].binary == 1.0);
        CHECK(*b[1].binary == 1.0);
        CHECK(!b[0].preference.has_value());
    }
    SUBCASE("singleton group in preference mode earns zero") {
        auto b = group_rewards({1}, {0.9}, TaskKind::Discrete, VerifMode::Preference, th);
        CHECK(*b[0].preference == 0.0);
    }
    SUBCASE("none mode leaves verification empty") {
        auto b = group_rewards({1, 0}, {0.9, 0.1}, TaskKind::Discrete, VerifMode::None, th);
        CHECK(!b[0].verification().has_value());
    }
}

TEST_CASE("every reward stays in range on random groups") {
    Rng rng(99);
    Thresholds th;
    for (int trial = 0; trial < 100; ++trial) {
        int g = 1 + rng.next_int(12);
        std::vector<double> scores(g), rewards(g);
        for (int i = 0; i < g; ++i) {
            scores[i] = rng.next_double();
            rewards[i] = rng.next_double();
        }
        for (VerifMode mode : {VerifMode::Binary, VerifMode::Preference}) {
            auto b = group_rewards(rewards, scores, TaskKind::Interval, mode, th);
            for (const RewardBundle& r : b) {
                CHECK(r.answer >= 0.0);
                CHECK(r.answer <= 1.0);
                if (r.verification()) {
                    CHECK(*r.verification() >= 0.0);
                    CHECK(*r.verification() <= 1.0);
                }
            }
        }
    }
}
