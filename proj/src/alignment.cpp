#include "ruaf/alignment.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "ruaf/parallel.hpp"

namespace ruaf::alignment {

std::size_t SequentialDropModel::visible_transition_count() const {
    return static_cast<std::size_t>(
        std::count_if(transitions.begin(), transitions.end(),
                      [](const Transition& t) { return !t.is_drop; }));
}

std::size_t SequentialDropModel::drop_transition_count() const {
    return transitions.size() - visible_transition_count();
}

SequentialDropModel build_model(std::size_t resource_count) {
    if (resource_count == 0) throw std::invalid_argument("model needs at least one resource");
    SequentialDropModel m;
    m.resource_count = resource_count;
    m.places.reserve(resource_count + 2);
    for (std::size_t i = 0; i <= resource_count; ++i) m.places.push_back({"p" + std::to_string(i)});
    m.places.push_back({"end"});
    m.start_place = 0;
    m.end_place = m.places.size() - 1;
    for (std::size_t r = 1; r <= resource_count; ++r)
        m.transitions.push_back({"r" + std::to_string(r), false, r, r - 1, r});
    for (std::size_t j = 1; j <= resource_count; ++j)
        m.transitions.push_back({"drop-" + std::to_string(j), true, j, j, m.end_place});
    return m;
}

SequentialDropModel build_model(const ingest::Curriculum& curriculum) {
    return build_model(curriculum.size());
}

std::vector<std::vector<std::size_t>> enumerate_complete_runs(const SequentialDropModel& model) {
    std::vector<std::vector<std::size_t>> runs;
    std::vector<int> marking(model.places.size(), 0);
    marking[model.start_place] = 1;
    std::vector<std::size_t> fired;

    auto dfs = [&](auto&& self) -> void {
        if (marking[model.end_place] == 1) {
            runs.push_back(fired);
            return;
        }
        for (std::size_t t = 0; t < model.transitions.size(); ++t) {
            const Transition& tr = model.transitions[t];
            if (marking[tr.pre_place] == 0) continue;
            --marking[tr.pre_place];
            ++marking[tr.post_place];
            fired.push_back(t);
            self(self);
            fired.pop_back();
            --marking[tr.post_place];
            ++marking[tr.pre_place];
        }
    };
    dfs(dfs);
    return runs;
}

namespace {

// m[j] = longest strictly increasing subsequence of the trace restricted to
// values <= j, for all j at once (Fenwick prefix-max over values; each value
// occurs at most once).
std::vector<std::size_t> lis_by_prefix(const std::vector<std::size_t>& seq, std::size_t R) {
    std::vector<std::size_t> fenwick(R + 1, 0);
    auto query = [&](std::size_t v) {  // max over values [1, v]
        std::size_t best = 0;
        for (; v > 0; v -= v & (~v + 1)) best = std::max(best, fenwick[v]);
        return best;
    };
    auto update = [&](std::size_t v, std::size_t val) {
        for (; v <= R; v += v & (~v + 1)) fenwick[v] = std::max(fenwick[v], val);
    };
    std::vector<std::size_t> best_at(R + 1, 0);
    for (const std::size_t v : seq) {
        const std::size_t len = query(v - 1) + 1;
        if (len > best_at[v]) {
            best_at[v] = len;
            update(v, len);
        }
    }
    std::vector<std::size_t> m(R + 1, 0);
    for (std::size_t j = 1; j <= R; ++j) m[j] = std::max(m[j - 1], best_at[j]);
    return m;
}

}  // namespace

Alignment align_sequence(const std::vector<std::size_t>& seq, std::size_t R,
                         std::string learner_id) {
    assert(R >= 1);
    Alignment result;
    result.learner_id = std::move(learner_id);
    const std::size_t n = seq.size();

    const auto m = lis_by_prefix(seq, R);
    std::int64_t best_cost = 0;
    std::size_t best_j = 0;
    for (std::size_t j = 1; j <= R; ++j) {
        const auto cost = static_cast<std::int64_t>(j) + static_cast<std::int64_t>(n) -
                          2 * static_cast<std::int64_t>(m[j]);
        if (best_j == 0 || cost < best_cost) {
            best_cost = cost;
            best_j = j;
        }
    }
    result.cost = best_cost;
    result.dropout_index = best_j;

    // Move reconstruction against the fixed run r1..r_bestj drop-bestj:
    // suffix-cost table, then a walk preferring sync > model_only > log_only.
    const std::size_t j = best_j;
    std::vector<std::vector<std::int64_t>> d(n + 1, std::vector<std::int64_t>(j + 1, 0));
    for (std::size_t a = 0; a <= n; ++a) d[a][j] = static_cast<std::int64_t>(n - a);
    for (std::size_t b = 0; b <= j; ++b) d[n][b] = static_cast<std::int64_t>(j - b);
    for (std::size_t a = n; a-- > 0;) {
        for (std::size_t b = j; b-- > 0;) {
            std::int64_t best = 1 + std::min(d[a][b + 1], d[a + 1][b]);
            if (seq[a] == b + 1) best = std::min(best, d[a + 1][b + 1]);
            d[a][b] = best;
        }
    }
    assert(d[0][0] == best_cost);

    std::size_t a = 0, b = 0;
    auto model_advanced = [&]() {
        if (b == j) result.moves.push_back({MoveKind::drop, j});
    };
    while (a < n || b < j) {
        if (b < j && a < n && seq[a] == b + 1 && d[a][b] == d[a + 1][b + 1]) {
            result.moves.push_back({MoveKind::sync, b + 1});
            ++a;
            ++b;
            model_advanced();
        } else if (b < j && d[a][b] == 1 + d[a][b + 1]) {
            result.moves.push_back({MoveKind::model_only, b + 1});
            ++b;
            model_advanced();
        } else {
            result.moves.push_back({MoveKind::log_only, seq[a]});
            ++a;
        }
    }
    return result;
}

Alignment align(const LearnerTrace& trace, const SequentialDropModel& model) {
    assert(trace.resource_count == model.resource_count);
    return align_sequence(trace.done_sequence(), model.resource_count, trace.learner_id);
}

std::string align_flag_name(AlignFlag f) {
    switch (f) {
        case AlignFlag::none: return "none";
        case AlignFlag::on_time: return "on_time";
        case AlignFlag::early: return "early";
        case AlignFlag::late: return "late";
        case AlignFlag::skipped: return "skipped";
    }
    return "none";
}

std::vector<AlignFlag> alignment_order(const Alignment& alignment, std::size_t R) {
    std::vector<AlignFlag> flags(R + 1, AlignFlag::none);
    std::vector<std::size_t> log_pos(R + 1, 0), model_pos(R + 1, 0);  // 1-based move positions
    for (std::size_t p = 0; p < alignment.moves.size(); ++p) {
        const AlignmentMove& mv = alignment.moves[p];
        switch (mv.kind) {
            case MoveKind::sync: flags[mv.index] = AlignFlag::on_time; break;
            case MoveKind::log_only: log_pos[mv.index] = p + 1; break;
            case MoveKind::model_only: model_pos[mv.index] = p + 1; break;
            case MoveKind::drop: break;
        }
    }
    for (std::size_t r = 1; r <= R; ++r) {
        if (flags[r] == AlignFlag::on_time) continue;
        if (log_pos[r] && model_pos[r])
            flags[r] = log_pos[r] < model_pos[r] ? AlignFlag::early : AlignFlag::late;
        else if (log_pos[r])
            flags[r] = AlignFlag::late;  // done past the chosen drop prefix
        else if (model_pos[r])
            flags[r] = AlignFlag::skipped;
    }
    return flags;
}

std::vector<Alignment> align_cohort(const Cohort& cohort, const SequentialDropModel& model,
                                    unsigned threads) {
    if (threads == 0) threads = default_thread_count();
    std::vector<Alignment> alignments(cohort.traces.size());
    parallel_for(cohort.traces.size(), threads, [&](std::size_t i) {
        alignments[i] = align(cohort.traces[i], model);
    });
    return alignments;
}

AlignmentTable aggregate_alignment(const Cohort& cohort, const std::vector<Alignment>& alignments) {
    const std::size_t R = cohort.resource_count();
    AlignmentTable table;
    table.cohort_size = cohort.learner_count();
    table.rows.resize(R);
    for (std::size_t r = 1; r <= R; ++r) table.rows[r - 1].resource = cohort.curriculum.resources[r - 1];

    for (const auto& al : alignments) {
        const auto flags = alignment_order(al, R);
        for (std::size_t r = 1; r <= R; ++r) {
            if (al.dropout_index < r) continue;  // not active here
            AlignmentFeatureRow& row = table.rows[r - 1];
            ++row.active_count;
            if (al.dropout_index == r) ++row.drop_count;
            if (flags[r] == AlignFlag::early) ++row.early_count;
            if (flags[r] == AlignFlag::late) ++row.late_count;
        }
    }
    for (auto& row : table.rows) {
        if (row.active_count == 0) continue;
        const auto active = static_cast<double>(row.active_count);
        row.drop = {static_cast<double>(row.drop_count) / active, true};
        row.early = {static_cast<double>(row.early_count) / active, true};
        row.late = {static_cast<double>(row.late_count) / active, true};
    }
    return table;
}

ComparisonReport compare(const Cohort& cohort, const features::FeatureTable& ruaf_table,
                         const AlignmentTable& alignment_table,
                         const std::vector<features::LearnerOutcome>& ruaf_outcomes,
                         const std::vector<Alignment>& alignments) {
    const std::size_t R = cohort.resource_count();
    const std::size_t L = cohort.learner_count();
    if (ruaf_table.rows.size() != R || alignment_table.rows.size() != R)
        throw ingest::ValidationError("comparison inputs disagree on the curriculum size");
    for (std::size_t r = 0; r < R; ++r) {
        if (ruaf_table.rows[r].resource != cohort.curriculum.resources[r] ||
            alignment_table.rows[r].resource != cohort.curriculum.resources[r])
            throw ingest::ValidationError("comparison inputs disagree on the curriculum");
    }
    if (ruaf_table.cohort_size != L || alignment_table.cohort_size != L ||
        ruaf_outcomes.size() != L || alignments.size() != L)
        throw ingest::ValidationError("comparison inputs disagree on the cohort");
    for (std::size_t i = 0; i < L; ++i) {
        if (ruaf_outcomes[i].learner_id != cohort.traces[i].learner_id ||
            alignments[i].learner_id != cohort.traces[i].learner_id)
            throw ingest::ValidationError("comparison inputs disagree on learner order");
    }

    ComparisonReport report;
    report.summary.learners = L;
    report.learners.reserve(L);
    report.resources.resize(R);
    for (std::size_t r = 0; r < R; ++r) {
        report.resources[r].resource = cohort.curriculum.resources[r];
        report.resources[r].ruaf_active = ruaf_table.rows[r].active_count;
        report.resources[r].alignment_active = alignment_table.rows[r].active_count;
        if (ruaf_table.rows[r].active_count > 0)
            report.resources[r].active_ratio = {
                static_cast<double>(alignment_table.rows[r].active_count) /
                    static_cast<double>(ruaf_table.rows[r].active_count),
                true};
    }

    std::int64_t delta_sum = 0;
    std::size_t identical = 0;
    std::size_t compared_total = 0, agree_total = 0;
    for (std::size_t i = 0; i < L; ++i) {
        LearnerComparison lc;
        lc.learner_id = cohort.traces[i].learner_id;
        lc.ruaf_dropout = ruaf_outcomes[i].dropout;
        lc.alignment_dropout = alignments[i].dropout_index;
        delta_sum += lc.delta();
        if (lc.delta() == 0) ++identical;
        report.learners.push_back(lc);

        const auto flags = alignment_order(alignments[i], R);
        for (std::size_t r = 1; r <= R; ++r) {
            if (!cohort.traces[i].done[r]) continue;
            ResourceComparison& rc = report.resources[r - 1];
            ++rc.order_compared;
            ++compared_total;
            const features::OrderClass ruaf_class = ruaf_outcomes[i].order[r];
            const AlignFlag align_class = flags[r];
            const bool agree =
                (ruaf_class == features::OrderClass::on_time && align_class == AlignFlag::on_time) ||
                (ruaf_class == features::OrderClass::early && align_class == AlignFlag::early) ||
                (ruaf_class == features::OrderClass::late && align_class == AlignFlag::late);
            if (agree) {
                ++rc.order_agree;
                ++agree_total;
            }
        }
    }
    if (L > 0) {
        report.summary.mean_dropout_delta = static_cast<double>(delta_sum) / static_cast<double>(L);
        report.summary.identical_dropout_fraction =
            static_cast<double>(identical) / static_cast<double>(L);
    }
    double ratio_sum = 0;
    std::size_t ratio_n = 0;
    for (const auto& rc : report.resources) {
        if (rc.active_ratio.defined) {
            ratio_sum += rc.active_ratio.value;
            ++ratio_n;
        }
    }
    if (ratio_n > 0) report.summary.mean_active_ratio = {ratio_sum / static_cast<double>(ratio_n), true};
    if (compared_total > 0)
        report.summary.order_agreement_fraction =
            static_cast<double>(agree_total) / static_cast<double>(compared_total);
    return report;
}

}  // namespace ruaf::alignment
