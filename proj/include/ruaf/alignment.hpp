#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ruaf/features.hpp"
#include "ruaf/traces.hpp"

namespace ruaf::alignment {

using features::Nullable;
using traces::Cohort;
using traces::LearnerTrace;

struct Place {
    std::string name;
};

struct Transition {
    std::string label;
    bool is_drop = false;
    std::size_t index = 0;  // resource index, or drop index for drop transitions
    std::size_t pre_place = 0;
    std::size_t post_place = 0;
};

// Linear net over the curriculum: place chain p0 -> r1 -> p1 -> ... -> pR,
// plus a drop-j shortcut from every post-place pj to the end place. Complete
// runs are exactly r1..rj drop-j for 1 <= j <= R.
struct SequentialDropModel {
    std::size_t resource_count = 0;
    std::vector<Place> places;
    std::vector<Transition> transitions;
    std::size_t start_place = 0;
    std::size_t end_place = 0;

    [[nodiscard]] std::size_t visible_transition_count() const;
    [[nodiscard]] std::size_t drop_transition_count() const;
};

SequentialDropModel build_model(std::size_t resource_count);
SequentialDropModel build_model(const ingest::Curriculum& curriculum);

// Token replay from the start place; every firing sequence that parks the
// token on the end place, as transition indices. Test instrument, not on the
// alignment hot path.
std::vector<std::vector<std::size_t>> enumerate_complete_runs(const SequentialDropModel& model);

enum class MoveKind { sync, log_only, model_only, drop };

// Costs: sync 0, log_only 1, model_only 1, drop 0.
struct AlignmentMove {
    MoveKind kind = MoveKind::sync;
    std::size_t index = 0;  // resource index; drop index j for drop moves

    friend bool operator==(const AlignmentMove&, const AlignmentMove&) = default;
};

struct Alignment {
    std::string learner_id;
    std::vector<AlignmentMove> moves;
    std::int64_t cost = 0;
    std::size_t dropout_index = 0;  // j of the fired drop transition
};

// Minimal-cost alignment of a done sequence against the model. The optimal
// dropout j minimizes j + n - 2*m_j with m_j the longest increasing
// subsequence of the trace restricted to indices <= j; ties resolve to the
// smallest j. Moves are reconstructed preferring sync over model_only over
// log_only at equal cost.
Alignment align_sequence(const std::vector<std::size_t>& done_sequence, std::size_t resource_count,
                         std::string learner_id = {});
Alignment align(const LearnerTrace& trace, const SequentialDropModel& model);

enum class AlignFlag { none, on_time, early, late, skipped };

std::string align_flag_name(AlignFlag f);

// Per-resource verdicts from the move sequence (index 1..R). Synced
// resources are on_time; a traced resource whose log move sits before its
// model move is early, after it late; traced resources beyond the chosen
// drop prefix are late; model moves without a log counterpart are skipped.
std::vector<AlignFlag> alignment_order(const Alignment& alignment, std::size_t resource_count);

std::vector<Alignment> align_cohort(const Cohort& cohort, const SequentialDropModel& model,
                                    unsigned threads = 0);

struct AlignmentFeatureRow {
    ingest::ResourceId resource;
    std::size_t active_count = 0;
    std::size_t drop_count = 0, early_count = 0, late_count = 0;
    Nullable drop, early, late;
};

struct AlignmentTable {
    std::vector<AlignmentFeatureRow> rows;
    std::size_t cohort_size = 0;
};

// Same aggregation recipe as the features module with dropout_index in
// place of the dropout point and alignment verdicts in place of A/B order
// classification.
AlignmentTable aggregate_alignment(const Cohort& cohort, const std::vector<Alignment>& alignments);

struct LearnerComparison {
    std::string learner_id;
    std::size_t ruaf_dropout = 0;
    std::size_t alignment_dropout = 0;

    [[nodiscard]] std::int64_t delta() const {
        return static_cast<std::int64_t>(alignment_dropout) - static_cast<std::int64_t>(ruaf_dropout);
    }
};

struct ResourceComparison {
    ingest::ResourceId resource;
    std::size_t ruaf_active = 0;
    std::size_t alignment_active = 0;
    Nullable active_ratio;           // alignment/ruaf where ruaf active > 0
    std::size_t order_compared = 0;  // learners that did the resource
    std::size_t order_agree = 0;     // identical order verdict on both sides
};

struct ComparisonSummary {
    std::size_t learners = 0;
    double mean_dropout_delta = 0.0;
    Nullable mean_active_ratio;
    double identical_dropout_fraction = 0.0;
    double order_agreement_fraction = 0.0;
};

struct ComparisonReport {
    ComparisonSummary summary;
    std::vector<LearnerComparison> learners;
    std::vector<ResourceComparison> resources;
};

// Deltas are signed alignment - RUAF. Throws when the tables do not describe
// the same curriculum and cohort.
ComparisonReport compare(const Cohort& cohort, const features::FeatureTable& ruaf_table,
                         const AlignmentTable& alignment_table,
                         const std::vector<features::LearnerOutcome>& ruaf_outcomes,
                         const std::vector<Alignment>& alignments);

}  // namespace ruaf::alignment
