#include "ruaf/traces.hpp"

#include <algorithm>
#include <stdexcept>

namespace ruaf::traces {

void AnalysisConfig::validate() const {
    if (min_done_seconds <= 0) throw std::invalid_argument("min_done_seconds must be positive");
    if (!dropout_fraction.valid())
        throw std::invalid_argument("dropout_fraction must be in (0,1)");
    if (back_threshold < 0) throw std::invalid_argument("back_threshold must be >= 0");
    if (order_k <= 0) throw std::invalid_argument("order_k must be positive");
}

std::size_t LearnerTrace::done_count() const {
    return static_cast<std::size_t>(std::count(done.begin(), done.end(), true));
}

std::vector<std::size_t> LearnerTrace::done_sequence() const {
    std::vector<std::size_t> seq;
    seq.reserve(visits.size());
    for (const auto& v : visits) {
        if (done[v.index]) seq.push_back(v.index);
    }
    return seq;
}

std::vector<std::size_t> LearnerTrace::done_indices_sorted() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < done.size(); ++i) {
        if (done[i]) out.push_back(i);
    }
    return out;
}

Cohort build_cohort(const ingest::EventLog& log, const ingest::Curriculum& curriculum,
                    const AnalysisConfig& config) {
    config.validate();
    Cohort cohort;
    cohort.curriculum = curriculum;
    cohort.config = config;
    const std::size_t R = curriculum.size();

    LearnerTrace trace;
    auto flush = [&]() {
        if (trace.visits.empty()) return;
        // order by first visit, curriculum index breaking timestamp ties
        std::sort(trace.visits.begin(), trace.visits.end(), [](const Visit& a, const Visit& b) {
            if (a.first_visit != b.first_visit) return a.first_visit < b.first_visit;
            return a.index < b.index;
        });
        if (trace.done_count() > 0) cohort.traces.push_back(std::move(trace));
        trace = LearnerTrace{};
    };

    for (const auto& rec : log.records) {
        if (trace.learner_id != rec.learner_id) {
            flush();
            trace.learner_id = rec.learner_id;
            trace.resource_count = R;
            trace.done.assign(R + 1, false);
        }
        const std::size_t index = curriculum.index_of(rec.resource);
        if (index == 0)
            throw ingest::ValidationError("log resource " + rec.resource.str() +
                                          " is not in the curriculum");
        trace.visits.push_back({index, rec.first_visited_at, rec.last_completed_at});
        if (rec.duration_seconds() > config.min_done_seconds) trace.done[index] = true;
    }
    flush();
    // records are already in canonical learner order, so traces are too
    return cohort;
}

CohortStats cohort_stats(const Cohort& cohort) {
    CohortStats stats;
    stats.learners = cohort.learner_count();
    stats.resources = cohort.resource_count();
    stats.empty_cohort = cohort.traces.empty();
    if (stats.learners == 0 || stats.resources == 0) return stats;
    std::size_t total_done = 0;
    for (const auto& t : cohort.traces) total_done += t.done_count();
    stats.done_density = static_cast<double>(total_done) /
                         (static_cast<double>(stats.learners) * static_cast<double>(stats.resources));
    return stats;
}

}  // namespace ruaf::traces
