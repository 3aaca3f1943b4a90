#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ruaf/features.hpp"

using namespace ruaf;
using namespace ruaf::features;
using oracles::trace_from_done_set;
using oracles::trace_from_order;

namespace {

constexpr Fraction kThird{1, 3};

traces::Cohort cohort_from_traces(std::vector<traces::LearnerTrace> traces, std::size_t R,
                                  traces::AnalysisConfig config = {}) {
    traces::Cohort cohort;
    cohort.config = config;
    for (std::size_t r = 1; r <= R; ++r)
        cohort.curriculum.resources.push_back({1, static_cast<int>(r)});
    cohort.curriculum.types.assign(R, ingest::ResourceType::unknown);
    cohort.traces = std::move(traces);
    return cohort;
}

}  // namespace

TEST_CASE("done_between counts the inclusive window (i, r]") {
    const auto t = trace_from_done_set({1, 2, 3, 6}, 9);
    CHECK(done_between(t, 3, 5) == 0);  // resources 4 and 5 not done
    CHECK(done_between(t, 3, 6) == 1);
    CHECK(done_between(t, 1, 9) == 3);
    CHECK(done_between(t, 5, 6) == 1);  // i+1 = r case
    CHECK(done_between(t, 6, 7) == 0);
}

TEST_CASE("done_between equals direct enumeration on random traces") {
    std::mt19937_64 rng(42);
    for (int round = 0; round < 200; ++round) {
        const auto t = oracles::random_trace(rng, 8);
        for (std::size_t i = 1; i < t.resource_count; ++i) {
            for (std::size_t r = i + 1; r <= t.resource_count; ++r) {
                CHECK(done_between(t, i, r) == oracles::count_done_between(t, i, r));
            }
        }
    }
}

TEST_CASE("dropout property on the nine-resource example") {
    const auto t = trace_from_done_set({1, 2, 3, 6}, 9);
    CHECK(dropout_property(t, kThird, 3));
    CHECK_FALSE(dropout_property(t, kThird, 2));
    CHECK_FALSE(dropout_property(t, kThird, 1));
}

TEST_CASE("dropout property is vacuous at R") {
    std::mt19937_64 rng(43);
    for (int round = 0; round < 50; ++round) {
        const auto t = oracles::random_trace(rng, 8);
        CHECK(dropout_property(t, kThird, t.resource_count));
    }
}

TEST_CASE("dropout property matches brute force on random traces") {
    std::mt19937_64 rng(44);
    for (int round = 0; round < 500; ++round) {
        const auto t = oracles::random_trace(rng, 8);
        for (std::size_t i = 1; i <= t.resource_count; ++i)
            CHECK(dropout_property(t, kThird, i) == oracles::dropout_property(t, kThird, i));
    }
}

TEST_CASE("dropout point examples") {
    CHECK(dropout_point(trace_from_done_set({1, 2, 3, 6}, 9), kThird).index == 3);
    CHECK(dropout_point(trace_from_done_set({1, 2, 3, 4}, 4), kThird).index == 4);
    CHECK(dropout_point(trace_from_done_set({5}, 6), kThird).index == 1);
}

TEST_CASE("dropout point agrees with brute force over all done sets, R=7") {
    for (unsigned mask = 0; mask < (1u << 7); ++mask) {
        std::vector<std::size_t> done;
        for (std::size_t r = 1; r <= 7; ++r)
            if (mask & (1u << (r - 1))) done.push_back(r);
        const auto t = trace_from_done_set(done, 7);
        CHECK(dropout_point(t, kThird).index == oracles::dropout_point(t, kThird));
    }
}

TEST_CASE("order sets from the footnote example") {
    const auto t = trace_from_order({1, 4, 2, 3, 5, 6}, 6);
    const auto s4 = order_sets(t, 4);
    CHECK(s4.a_set == std::set<std::size_t>{2, 3});
    CHECK(s4.b_set == std::set<std::size_t>{});
    const auto s2 = order_sets(t, 2);
    CHECK(s2.a_set == std::set<std::size_t>{});
    CHECK(s2.b_set == std::set<std::size_t>{4});
}

TEST_CASE("classify_order on the footnote examples") {
    SUBCASE("1,4,2,3,5,6: resource 4 early, others on time") {
        const auto t = trace_from_order({1, 4, 2, 3, 5, 6}, 6);
        CHECK(classify_order(t, 4, 2) == OrderClass::early);
        for (std::size_t r : {1u, 2u, 3u, 5u, 6u})
            CHECK(classify_order(t, r, 2) == OrderClass::on_time);
    }
    SUBCASE("1,2,4,3,5,6: a single swap flags nothing at k=2") {
        const auto t = trace_from_order({1, 2, 4, 3, 5, 6}, 6);
        for (std::size_t r = 1; r <= 6; ++r)
            CHECK(classify_order(t, r, 2) == OrderClass::on_time);
    }
    SUBCASE("curriculum order: everything on time") {
        const auto t = trace_from_order({1, 2, 3, 4, 5, 6}, 6);
        for (std::size_t r = 1; r <= 6; ++r) {
            const auto sets = order_sets(t, r);
            CHECK(sets.a_set.empty());
            CHECK(sets.b_set.empty());
            CHECK(classify_order(t, r, 2) == OrderClass::on_time);
        }
    }
}

TEST_CASE("classify_order matches brute force on random traces") {
    std::mt19937_64 rng(45);
    for (int round = 0; round < 400; ++round) {
        const auto t = oracles::random_trace(rng, 8);
        const int k = 1 + static_cast<int>(rng() % 3);
        for (std::size_t r = 1; r <= t.resource_count; ++r) {
            if (!t.done[r]) continue;
            CHECK(classify_order(t, r, k) == oracles::classify_order(t, r, k));
        }
    }
}

TEST_CASE("the early and late conditions exclude each other") {
    // every member of A(r) already has r and all of B(r) in its B set, so an
    // early witness forces |B(r)| <= |A(r)|-2; symmetrically for late. Checked
    // exhaustively over all orders of up to 6 done resources.
    std::vector<std::size_t> order{1, 2, 3, 4, 5, 6};
    do {
        for (int k = 1; k <= 2; ++k) {
            for (std::size_t r = 1; r <= 6; ++r) {
                const bool early = oracles::classified_early(order, r, k);
                const bool late = oracles::classified_late(order, r, k);
                CHECK_FALSE((early && late));
            }
        }
    } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("came_back") {
    const std::size_t R = 8;
    SUBCASE("four later resources inside the window beats threshold 3") {
        traces::LearnerTrace t;
        t.learner_id = "l";
        t.resource_count = R;
        t.done.assign(R + 1, false);
        t.visits.push_back({1, 0, 5000});  // window spans the next four visits
        t.done[1] = true;
        for (std::size_t i = 2; i <= 5; ++i) {
            t.visits.push_back({i, static_cast<EpochSeconds>(600 * (i - 1)), 600 * (i - 1) + 90});
            t.done[i] = true;
        }
        CHECK(came_back(t, 1, 3));
        SUBCASE("exactly three inside is not enough (strict more-than)") {
            t.visits[0].completion = 2000;  // only visits at 600, 1200, 1800 inside
            CHECK_FALSE(came_back(t, 1, 3));
        }
    }
    SUBCASE("no completion timestamp means no come-back") {
        auto t = trace_from_order({1, 2, 3, 4, 5}, R);
        t.visits[0].completion.reset();
        t.done[1] = true;  // keep it done regardless
        CHECK_FALSE(came_back(t, 1, 0));
    }
    SUBCASE("earlier-curriculum and not-done visits inside the window do not count") {
        traces::LearnerTrace t;
        t.learner_id = "l";
        t.resource_count = R;
        t.done.assign(R + 1, false);
        t.visits.push_back({5, 0, 5000});
        t.done[5] = true;
        t.visits.push_back({4, 600, 700});  // earlier in curriculum
        t.done[4] = true;
        t.visits.push_back({6, 1200, 1230});  // later but not done
        t.visits.push_back({7, 1800, 1900});
        t.done[7] = true;
        CHECK_FALSE(came_back(t, 5, 1));  // only resource 7 counts
        CHECK(came_back(t, 5, 0));
    }
}

TEST_CASE("came_back matches brute force on random traces") {
    std::mt19937_64 rng(46);
    for (int round = 0; round < 400; ++round) {
        const auto t = oracles::random_trace(rng, 8);
        const int threshold = static_cast<int>(rng() % 4);
        for (std::size_t r = 1; r <= t.resource_count; ++r)
            CHECK(came_back(t, r, threshold) == oracles::came_back(t, r, threshold));
    }
}

TEST_CASE("aggregate: single learner doing everything in order") {
    auto cohort = cohort_from_traces({trace_from_order({1, 2, 3, 4}, 4)}, 4);
    const auto table = aggregate_features(cohort);
    REQUIRE(table.rows.size() == 4);
    CHECK(table.cohort_size == 1);
    for (std::size_t r = 0; r < 4; ++r) {
        const auto& row = table.rows[r];
        CHECK(row.active_count == 1);
        CHECK(row.drop.value == (r == 3 ? 1.0 : 0.0));
        CHECK(row.skip.value == 0.0);
        CHECK(row.peek.value == 0.0);
        CHECK(row.early.value == 0.0);
        CHECK(row.late.value == 0.0);
        CHECK(row.back.value == 0.0);
    }
}

TEST_CASE("aggregate: one peeking learner out of ten gives peek 0.1") {
    std::vector<traces::LearnerTrace> traces;
    // nine learners stop cleanly after resource 2 of 6
    for (int i = 0; i < 9; ++i)
        traces.push_back(trace_from_done_set({1, 2}, 6, "a" + std::to_string(i)));
    // one learner does 1, 2 and peeks at 6
    traces.push_back(trace_from_done_set({1, 2, 6}, 6, "peeker"));
    auto cohort = cohort_from_traces(std::move(traces), 6);
    const auto table = aggregate_features(cohort);

    const auto peeker = trace_from_done_set({1, 2, 6}, 6);
    REQUIRE(dropout_point(peeker, kThird).index == 2);  // 6 is past the dropout point
    CHECK(table.rows[5].peek.value == doctest::Approx(0.1));
    CHECK(table.rows[5].peek_count == 1);
    // nobody is active at resource 6, so its ratio features are undefined
    CHECK(table.rows[5].active_count == 0);
    CHECK_FALSE(table.rows[5].drop.defined);
    CHECK_FALSE(table.rows[5].skip.defined);
    CHECK(table.rows[5].peek.defined);
}

TEST_CASE("aggregate invariants on a mixed cohort") {
    std::vector<traces::LearnerTrace> traces;
    traces.push_back(trace_from_order({1, 4, 2, 3, 5, 6}, 6, "a"));
    traces.push_back(trace_from_done_set({1, 2}, 6, "b"));
    traces.push_back(trace_from_done_set({1, 2, 3, 5}, 6, "c"));
    traces.push_back(trace_from_done_set({5}, 6, "d"));
    auto cohort = cohort_from_traces(std::move(traces), 6);
    const auto table = aggregate_features(cohort);

    CHECK(table.rows[0].active_count == table.cohort_size);
    std::size_t drop_total = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        drop_total += table.rows[r].drop_count;
        if (r > 0) CHECK(table.rows[r].active_count <= table.rows[r - 1].active_count);
        for (const auto& f : {table.rows[r].drop, table.rows[r].skip, table.rows[r].peek,
                              table.rows[r].early, table.rows[r].late, table.rows[r].back}) {
            if (f.defined) {
                CHECK(f.value >= 0.0);
                CHECK(f.value <= 1.0);
            }
        }
    }
    CHECK(drop_total == table.cohort_size);
}

TEST_CASE("aggregation ignores learner processing order and thread count") {
    std::mt19937_64 rng(47);
    std::vector<traces::LearnerTrace> traces;
    for (int i = 0; i < 40; ++i) {
        auto t = oracles::random_trace(rng, 8);
        t.resource_count = 8;
        t.done.resize(9, false);
        t.learner_id = "l" + std::to_string(i);
        if (t.done_count() == 0) continue;
        traces.push_back(std::move(t));
    }
    auto shuffled = traces;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);

    auto c1 = cohort_from_traces(traces, 8);
    auto c2 = cohort_from_traces(shuffled, 8);
    const auto t1 = aggregate_features(c1, 1);
    const auto t2 = aggregate_features(c2, 4);
    REQUIRE(t1.rows.size() == t2.rows.size());
    for (std::size_t r = 0; r < t1.rows.size(); ++r) {
        CHECK(t1.rows[r].active_count == t2.rows[r].active_count);
        CHECK(t1.rows[r].drop_count == t2.rows[r].drop_count);
        CHECK(t1.rows[r].skip_count == t2.rows[r].skip_count);
        CHECK(t1.rows[r].peek_count == t2.rows[r].peek_count);
        CHECK(t1.rows[r].early_count == t2.rows[r].early_count);
        CHECK(t1.rows[r].late_count == t2.rows[r].late_count);
        CHECK(t1.rows[r].back_count == t2.rows[r].back_count);
    }
}

TEST_CASE("shifting all timestamps changes nothing") {
    std::mt19937_64 rng(48);
    for (int round = 0; round < 30; ++round) {
        auto t = oracles::random_trace(rng, 8);
        if (t.done_count() == 0) continue;
        auto shifted = t;
        for (auto& v : shifted.visits) {
            v.first_visit += 86400 * 365;
            if (v.completion) *v.completion += 86400 * 365;
        }
        auto c1 = cohort_from_traces({t}, t.resource_count);
        auto c2 = cohort_from_traces({shifted}, t.resource_count);
        const auto t1 = aggregate_features(c1);
        const auto t2 = aggregate_features(c2);
        for (std::size_t r = 0; r < t1.rows.size(); ++r) {
            CHECK(t1.rows[r].active_count == t2.rows[r].active_count);
            CHECK(t1.rows[r].drop == t2.rows[r].drop);
            CHECK(t1.rows[r].skip == t2.rows[r].skip);
            CHECK(t1.rows[r].peek == t2.rows[r].peek);
            CHECK(t1.rows[r].early == t2.rows[r].early);
            CHECK(t1.rows[r].late == t2.rows[r].late);
            CHECK(t1.rows[r].back == t2.rows[r].back);
        }
    }
}

TEST_CASE("no resource is both skip- and peek-contributing for one learner") {
    std::mt19937_64 rng(49);
    for (int round = 0; round < 100; ++round) {
        const auto t = oracles::random_trace(rng, 8);
        if (t.done_count() == 0) continue;
        const auto dp = dropout_point(t, kThird).index;
        for (std::size_t r = 1; r <= t.resource_count; ++r) {
            const bool skip_side = dp >= r && !t.done[r];
            const bool peek_side = t.done[r] && dp < r;
            CHECK_FALSE((skip_side && peek_side));
        }
    }
}
