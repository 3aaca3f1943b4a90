#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ruaf/fraction.hpp"
#include "ruaf/ingest.hpp"

namespace ruaf::traces {

// Tunable thresholds of the analysis. Defaults: a resource counts as done
// after more than one minute, the dropout window tolerance is one third,
// coming back needs more than three later resources, and order flags need
// two witnesses.
struct AnalysisConfig {
    std::int64_t min_done_seconds = 60;
    Fraction dropout_fraction{1, 3};
    int back_threshold = 3;
    int order_k = 2;

    void validate() const;
};

struct Visit {
    std::size_t index = 0;  // 1-based curriculum index
    EpochSeconds first_visit = 0;
    std::optional<EpochSeconds> completion;
};

// One learner after preprocessing: visits ordered by (first_visit, index)
// and the set of indices whose visit lasted strictly longer than the done
// threshold. Sub-threshold visits stay in `visits` for ordering purposes but
// never enter `done`.
struct LearnerTrace {
    std::string learner_id;
    std::size_t resource_count = 0;  // R
    std::vector<Visit> visits;
    std::vector<bool> done;  // size R+1, 1-based

    [[nodiscard]] bool is_done(std::size_t index) const {
        return index < done.size() && done[index];
    }
    [[nodiscard]] std::size_t done_count() const;
    // done resources in visit order (the learner's observable sequence)
    [[nodiscard]] std::vector<std::size_t> done_sequence() const;
    [[nodiscard]] std::vector<std::size_t> done_indices_sorted() const;
};

// Retained learners (at least one done resource), sorted by learner_id.
struct Cohort {
    std::vector<LearnerTrace> traces;
    ingest::Curriculum curriculum;
    AnalysisConfig config;

    [[nodiscard]] std::size_t learner_count() const { return traces.size(); }
    [[nodiscard]] std::size_t resource_count() const { return curriculum.size(); }
};

Cohort build_cohort(const ingest::EventLog& log, const ingest::Curriculum& curriculum,
                    const AnalysisConfig& config);

struct CohortStats {
    std::size_t learners = 0;
    std::size_t resources = 0;
    double done_density = 0.0;  // mean done fraction over (learner, resource)
    bool empty_cohort = false;
};

CohortStats cohort_stats(const Cohort& cohort);

}  // namespace ruaf::traces
