#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ruaf/alignment.hpp"

using namespace ruaf;
using namespace ruaf::alignment;
using oracles::trace_from_done_set;
using oracles::trace_from_order;

namespace {

traces::Cohort cohort_from_traces(std::vector<traces::LearnerTrace> traces, std::size_t R) {
    traces::Cohort cohort;
    for (std::size_t r = 1; r <= R; ++r)
        cohort.curriculum.resources.push_back({1, static_cast<int>(r)});
    cohort.curriculum.types.assign(R, ingest::ResourceType::unknown);
    cohort.traces = std::move(traces);
    return cohort;
}

std::vector<std::size_t> random_sequence(std::mt19937_64& rng, std::size_t R) {
    std::vector<std::size_t> pool;
    for (std::size_t r = 1; r <= R; ++r)
        if (rng() % 100 < 55) pool.push_back(r);
    std::shuffle(pool.begin(), pool.end(), rng);
    return pool;
}

}  // namespace

TEST_CASE("model structure") {
    const auto m = build_model(3);
    CHECK(m.visible_transition_count() == 3);
    CHECK(m.drop_transition_count() == 3);
    CHECK(m.places.size() == 5);
    CHECK(m.places[m.start_place].name == "p0");
    CHECK(m.places[m.end_place].name == "end");
    CHECK_THROWS_AS(build_model(0), std::invalid_argument);
}

TEST_CASE("the model language is exactly prefix-then-drop") {
    SUBCASE("R=4 has four complete runs") {
        const auto m = build_model(4);
        auto runs = enumerate_complete_runs(m);
        REQUIRE(runs.size() == 4);
        std::vector<bool> seen(5, false);
        for (const auto& run : runs) {
            // run must be r1..rj, drop-j
            REQUIRE(!run.empty());
            const auto& last = m.transitions[run.back()];
            CHECK(last.is_drop);
            const std::size_t j = last.index;
            REQUIRE(run.size() == j + 1);
            for (std::size_t p = 0; p + 1 < run.size(); ++p) {
                const auto& t = m.transitions[run[p]];
                CHECK_FALSE(t.is_drop);
                CHECK(t.index == p + 1);
            }
            seen[j] = true;
        }
        for (std::size_t j = 1; j <= 4; ++j) CHECK(seen[j]);
    }
    SUBCASE("R=1 has the single run 1,drop-1") {
        const auto runs = enumerate_complete_runs(build_model(1));
        REQUIRE(runs.size() == 1);
        CHECK(runs[0].size() == 2);
    }
}

TEST_CASE("alignment of 1,2,6,5,4 drops at 2 with cost 3") {
    const auto a = align_sequence({1, 2, 6, 5, 4}, 6);
    CHECK(a.cost == 3);
    CHECK(a.dropout_index == 2);
    const std::vector<AlignmentMove> expected = {
        {MoveKind::sync, 1},     {MoveKind::sync, 2},     {MoveKind::drop, 2},
        {MoveKind::log_only, 6}, {MoveKind::log_only, 5}, {MoveKind::log_only, 4},
    };
    CHECK(a.moves == expected);
}

TEST_CASE("perfect trace aligns with zero cost at the full prefix") {
    const auto a = align_sequence({1, 2, 3, 4, 5, 6}, 6);
    CHECK(a.cost == 0);
    CHECK(a.dropout_index == 6);
    const auto b = align_sequence({1}, 3);
    CHECK(b.cost == 0);
    CHECK(b.dropout_index == 1);
}

TEST_CASE("alignment projections reproduce the trace and a complete run") {
    std::mt19937_64 rng(50);
    for (int round = 0; round < 300; ++round) {
        const std::size_t R = 1 + rng() % 8;
        const auto seq = random_sequence(rng, R);
        const auto a = align_sequence(seq, R);
        std::vector<std::size_t> log_side, model_side;
        std::size_t drops = 0, drop_index = 0, drop_position = 0;
        for (std::size_t p = 0; p < a.moves.size(); ++p) {
            const auto& mv = a.moves[p];
            if (mv.kind == MoveKind::sync || mv.kind == MoveKind::log_only)
                log_side.push_back(mv.index);
            if (mv.kind == MoveKind::sync || mv.kind == MoveKind::model_only)
                model_side.push_back(mv.index);
            if (mv.kind == MoveKind::drop) {
                ++drops;
                drop_index = mv.index;
                drop_position = p;
            }
        }
        CHECK(log_side == seq);
        REQUIRE(drops == 1);
        CHECK(drop_index == a.dropout_index);
        REQUIRE(model_side.size() == a.dropout_index);
        for (std::size_t i = 0; i < model_side.size(); ++i) CHECK(model_side[i] == i + 1);
        // the drop fires after the whole model prefix
        for (std::size_t p = drop_position; p < a.moves.size(); ++p) {
            CHECK(a.moves[p].kind != MoveKind::model_only);
            CHECK(a.moves[p].kind != MoveKind::sync);
        }
        // cost adds up: one per log_only or model_only move
        std::int64_t recount = 0;
        for (const auto& mv : a.moves)
            if (mv.kind == MoveKind::log_only || mv.kind == MoveKind::model_only) ++recount;
        CHECK(recount == a.cost);
    }
}

TEST_CASE("alignment is optimal versus run-and-matching enumeration") {
    std::mt19937_64 rng(51);
    for (int round = 0; round < 400; ++round) {
        const std::size_t R = 1 + rng() % 8;
        const auto seq = random_sequence(rng, R);
        const auto got = align_sequence(seq, R);
        const auto want = oracles::best_alignment(seq, R);
        CHECK(got.cost == want.cost);
        CHECK(got.dropout_index == want.dropout_index);
    }
}

TEST_CASE("zero cost exactly for curriculum prefixes") {
    std::mt19937_64 rng(52);
    for (int round = 0; round < 300; ++round) {
        const std::size_t R = 1 + rng() % 8;
        const auto seq = random_sequence(rng, R);
        const auto a = align_sequence(seq, R);
        if (seq.empty()) {
            // the model cannot reach the end without one visible transition
            CHECK(a.cost == 1);
            CHECK(a.dropout_index == 1);
            continue;
        }
        bool is_prefix = true;
        for (std::size_t i = 0; i < seq.size(); ++i)
            if (seq[i] != i + 1) is_prefix = false;
        CHECK((a.cost == 0) == is_prefix);
        // replace-everything bound
        CHECK(a.cost <= static_cast<std::int64_t>(seq.size() + a.dropout_index));
    }
}

TEST_CASE("alignment_order verdicts") {
    SUBCASE("a single swap flags exactly one of the pair") {
        const auto a = align_sequence({1, 2, 4, 3, 5, 6}, 6);
        CHECK(a.cost == 2);
        const auto flags = alignment_order(a, 6);
        int flagged = 0;
        for (std::size_t r : {3u, 4u})
            if (flags[r] == AlignFlag::early || flags[r] == AlignFlag::late) ++flagged;
        CHECK(flagged == 1);
        for (std::size_t r : {1u, 2u, 5u, 6u}) CHECK(flags[r] == AlignFlag::on_time);
    }
    SUBCASE("perfect order is all on_time") {
        const auto a = align_sequence({1, 2, 3, 4}, 4);
        const auto flags = alignment_order(a, 4);
        for (std::size_t r = 1; r <= 4; ++r) CHECK(flags[r] == AlignFlag::on_time);
    }
    SUBCASE("resources done past the drop prefix are late, untouched ones are none") {
        const auto a = align_sequence({1, 2, 6, 5, 4}, 6);
        const auto flags = alignment_order(a, 6);
        CHECK(flags[1] == AlignFlag::on_time);
        CHECK(flags[2] == AlignFlag::on_time);
        CHECK(flags[3] == AlignFlag::none);  // inside nobody's moves
        CHECK(flags[4] == AlignFlag::late);
        CHECK(flags[5] == AlignFlag::late);
        CHECK(flags[6] == AlignFlag::late);
    }
    SUBCASE("skipped resources inside the prefix") {
        const auto a = align_sequence({1, 3, 4}, 4);
        // best prefix is 1..4 with resource 2 as a model-only move
        CHECK(a.cost == 1);
        CHECK(a.dropout_index == 4);
        const auto flags = alignment_order(a, 4);
        CHECK(flags[1] == AlignFlag::on_time);
        CHECK(flags[2] == AlignFlag::skipped);
        CHECK(flags[3] == AlignFlag::on_time);
        CHECK(flags[4] == AlignFlag::on_time);
    }
    SUBCASE("a short trace drops immediately rather than spanning the gap") {
        const auto a = align_sequence({1, 3}, 3);
        // drop at 1 plus a log move for 3 ties with spanning to 3; smaller j wins
        CHECK(a.cost == 1);
        CHECK(a.dropout_index == 1);
        const auto flags = alignment_order(a, 3);
        CHECK(flags[1] == AlignFlag::on_time);
        CHECK(flags[2] == AlignFlag::none);
        CHECK(flags[3] == AlignFlag::late);
    }
}

TEST_CASE("aggregate_alignment on a curriculum-order cohort has no order flags") {
    std::vector<traces::LearnerTrace> ts;
    ts.push_back(trace_from_done_set({1, 2, 3}, 6, "a"));
    ts.push_back(trace_from_done_set({1, 2, 3, 4, 5, 6}, 6, "b"));
    ts.push_back(trace_from_done_set({1}, 6, "c"));
    auto cohort = cohort_from_traces(std::move(ts), 6);
    const auto model = build_model(cohort.curriculum);
    const auto alignments = align_cohort(cohort, model, 2);
    const auto table = aggregate_alignment(cohort, alignments);
    REQUIRE(table.rows.size() == 6);
    CHECK(table.rows[0].active_count == 3);
    for (const auto& row : table.rows) {
        if (row.early.defined) CHECK(row.early.value == 0.0);
        if (row.late.defined) CHECK(row.late.value == 0.0);
    }
    // dropout indices 3, 6, 1 -> active 3,2,2,1,1,1
    CHECK(table.rows[1].active_count == 2);
    CHECK(table.rows[5].active_count == 1);
}

TEST_CASE("a perfect single learner gives the same table on both sides") {
    auto cohort = cohort_from_traces({trace_from_order({1, 2, 3, 4}, 4, "a")}, 4);
    const auto outcomes = features::evaluate_cohort(cohort, 1);
    const auto ruaf_table = features::aggregate_outcomes(cohort, outcomes);
    const auto model = build_model(cohort.curriculum);
    const auto alignments = align_cohort(cohort, model, 1);
    const auto align_table = aggregate_alignment(cohort, alignments);
    REQUIRE(ruaf_table.rows.size() == align_table.rows.size());
    for (std::size_t r = 0; r < 4; ++r) {
        CHECK(ruaf_table.rows[r].active_count == align_table.rows[r].active_count);
        CHECK(ruaf_table.rows[r].drop.value == align_table.rows[r].drop.value);
        CHECK(ruaf_table.rows[r].early.value == align_table.rows[r].early.value);
        CHECK(ruaf_table.rows[r].late.value == align_table.rows[r].late.value);
    }
}

TEST_CASE("compare: identical inputs give zero deltas") {
    std::vector<traces::LearnerTrace> ts;
    for (int i = 0; i < 5; ++i)
        ts.push_back(trace_from_done_set({1, 2, 3}, 3, "l" + std::to_string(i)));
    auto cohort = cohort_from_traces(std::move(ts), 3);
    const auto outcomes = features::evaluate_cohort(cohort, 1);
    const auto ruaf_table = features::aggregate_outcomes(cohort, outcomes);
    const auto alignments = align_cohort(cohort, build_model(cohort.curriculum), 1);
    const auto align_table = aggregate_alignment(cohort, alignments);
    const auto report = compare(cohort, ruaf_table, align_table, outcomes, alignments);
    CHECK(report.summary.learners == 5);
    CHECK(report.summary.mean_dropout_delta == 0.0);
    CHECK(report.summary.identical_dropout_fraction == 1.0);
    CHECK(report.summary.order_agreement_fraction == 1.0);
    REQUIRE(report.summary.mean_active_ratio.defined);
    CHECK(report.summary.mean_active_ratio.value == 1.0);
    for (const auto& lc : report.learners) CHECK(lc.delta() == 0);
}

TEST_CASE("compare: the footnote learner lands four resources earlier") {
    auto cohort = cohort_from_traces({trace_from_order({1, 2, 6, 5, 4}, 6, "a")}, 6);
    const auto outcomes = features::evaluate_cohort(cohort, 1);
    REQUIRE(outcomes[0].dropout == 6);  // brute-forced in the features suite
    const auto alignments = align_cohort(cohort, build_model(cohort.curriculum), 1);
    const auto report = compare(cohort, features::aggregate_outcomes(cohort, outcomes),
                                aggregate_alignment(cohort, alignments), outcomes, alignments);
    REQUIRE(report.learners.size() == 1);
    CHECK(report.learners[0].ruaf_dropout == 6);
    CHECK(report.learners[0].alignment_dropout == 2);
    CHECK(report.learners[0].delta() == -4);
}

TEST_CASE("compare rejects mismatched inputs") {
    auto cohort = cohort_from_traces({trace_from_done_set({1, 2}, 3, "a")}, 3);
    const auto outcomes = features::evaluate_cohort(cohort, 1);
    const auto ruaf_table = features::aggregate_outcomes(cohort, outcomes);
    const auto alignments = align_cohort(cohort, build_model(cohort.curriculum), 1);
    const auto align_table = aggregate_alignment(cohort, alignments);

    auto other = cohort_from_traces({trace_from_done_set({1, 2}, 4, "a")}, 4);
    const auto other_outcomes = features::evaluate_cohort(other, 1);
    const auto other_table = features::aggregate_outcomes(other, other_outcomes);
    CHECK_THROWS_AS(compare(cohort, other_table, align_table, outcomes, alignments),
                    ingest::ValidationError);

    auto bigger = cohort_from_traces(
        {trace_from_done_set({1, 2}, 3, "a"), trace_from_done_set({1}, 3, "b")}, 3);
    const auto bigger_outcomes = features::evaluate_cohort(bigger, 1);
    const auto bigger_table = features::aggregate_outcomes(bigger, bigger_outcomes);
    CHECK_THROWS_AS(compare(cohort, bigger_table, align_table, outcomes, alignments),
                    ingest::ValidationError);
}

TEST_CASE("alignment dropout never exceeds the dropout point on random traces") {
    std::mt19937_64 rng(53);
    for (int round = 0; round < 500; ++round) {
        const auto t = oracles::random_trace(rng, 8);
        if (t.done_count() == 0) continue;
        const auto ruaf_dropout = features::dropout_point(t, Fraction{1, 3}).index;
        const auto a = align_sequence(t.done_sequence(), t.resource_count, t.learner_id);
        CHECK(a.dropout_index <= ruaf_dropout);
    }
}
