#include "ruaf/features.hpp"

#include <cassert>

#include "ruaf/parallel.hpp"

namespace ruaf::features {

using traces::Visit;

namespace {

// prefix[i] = number of done resources with index <= i
std::vector<std::size_t> done_prefix(const LearnerTrace& trace) {
    const std::size_t R = trace.resource_count;
    std::vector<std::size_t> prefix(R + 1, 0);
    for (std::size_t i = 1; i <= R; ++i)
        prefix[i] = prefix[i - 1] + (trace.done[i] ? 1u : 0u);
    return prefix;
}

// |A(x)| and |B(x)| for every done resource, from the visit-ordered done
// sequence. setup once per learner, O(m^2) in the done count.
struct OrderCounts {
    std::vector<std::size_t> seq;       // done indices in visit order
    std::vector<std::size_t> a_size;    // keyed by curriculum index
    std::vector<std::size_t> b_size;
    std::vector<std::size_t> position;  // visit position of a done index, 1-based; 0 = absent

    explicit OrderCounts(const LearnerTrace& trace)
        : seq(trace.done_sequence()),
          a_size(trace.resource_count + 1, 0),
          b_size(trace.resource_count + 1, 0),
          position(trace.resource_count + 1, 0) {
        for (std::size_t p = 0; p < seq.size(); ++p) position[seq[p]] = p + 1;
        for (std::size_t p = 0; p < seq.size(); ++p) {
            for (std::size_t q = p + 1; q < seq.size(); ++q) {
                if (seq[q] < seq[p]) {
                    ++a_size[seq[p]];  // seq[q] is before seq[p] in curriculum, started after
                    ++b_size[seq[q]];  // seq[p] is after seq[q] in curriculum, started before
                }
            }
        }
    }

    [[nodiscard]] OrderClass classify(std::size_t r, int order_k) const {
        const std::size_t pr = position[r];
        if (pr == 0) return OrderClass::on_time;
        int early_witnesses = 0;
        for (std::size_t q = pr; q < seq.size(); ++q) {  // members of A(r)
            if (seq[q] < r && b_size[seq[q]] < a_size[r]) ++early_witnesses;
        }
        if (early_witnesses >= order_k) return OrderClass::early;
        int late_witnesses = 0;
        for (std::size_t q = 0; q + 1 < pr; ++q) {  // members of B(r)
            if (seq[q] > r && a_size[seq[q]] < b_size[r]) ++late_witnesses;
        }
        if (late_witnesses >= order_k) return OrderClass::late;
        return OrderClass::on_time;
    }
};

}  // namespace

std::size_t done_between(const LearnerTrace& trace, std::size_t i, std::size_t r) {
    assert(1 <= i && i < r && r <= trace.resource_count);
    std::size_t count = 0;
    for (std::size_t x = i + 1; x <= r; ++x)
        if (trace.done[x]) ++count;
    return count;
}

bool dropout_property(const LearnerTrace& trace, const Fraction& fraction, std::size_t i) {
    assert(1 <= i && i <= trace.resource_count);
    const auto prefix = done_prefix(trace);
    for (std::size_t r = i + 1; r <= trace.resource_count; ++r) {
        const auto count = static_cast<std::int64_t>(prefix[r] - prefix[i]);
        if (!fraction.leq_scaled(count, static_cast<std::int64_t>(r - i))) return false;
    }
    return true;
}

DropoutPoint dropout_point(const LearnerTrace& trace, const Fraction& fraction) {
    const std::size_t R = trace.resource_count;
    const auto prefix = done_prefix(trace);
    for (std::size_t i = 1; i <= R; ++i) {
        bool holds = true;
        for (std::size_t r = i + 1; r <= R; ++r) {
            const auto count = static_cast<std::int64_t>(prefix[r] - prefix[i]);
            if (!fraction.leq_scaled(count, static_cast<std::int64_t>(r - i))) {
                holds = false;
                break;
            }
        }
        if (holds) return {trace.learner_id, i};
    }
    return {trace.learner_id, R};  // unreachable: P(R) is vacuous
}

OrderSets order_sets(const LearnerTrace& trace, std::size_t r) {
    OrderSets sets;
    const auto seq = trace.done_sequence();
    std::size_t pr = 0;
    for (std::size_t p = 0; p < seq.size(); ++p) {
        if (seq[p] == r) {
            pr = p + 1;
            break;
        }
    }
    if (pr == 0) return sets;
    for (std::size_t p = pr; p < seq.size(); ++p)
        if (seq[p] < r) sets.a_set.insert(seq[p]);
    for (std::size_t p = 0; p + 1 < pr; ++p)
        if (seq[p] > r) sets.b_set.insert(seq[p]);
    return sets;
}

std::string order_class_name(OrderClass c) {
    switch (c) {
        case OrderClass::early: return "early";
        case OrderClass::late: return "late";
        case OrderClass::on_time: return "on_time";
    }
    return "on_time";
}

OrderClass classify_order(const LearnerTrace& trace, std::size_t r, int order_k) {
    return OrderCounts(trace).classify(r, order_k);
}

bool came_back(const LearnerTrace& trace, std::size_t r, int back_threshold) {
    const Visit* target = nullptr;
    for (const auto& v : trace.visits) {
        if (v.index == r) {
            target = &v;
            break;
        }
    }
    if (target == nullptr || !target->completion) return false;
    int inside = 0;
    for (const auto& v : trace.visits) {
        if (v.index > r && trace.done[v.index] && v.first_visit > target->first_visit &&
            v.first_visit < *target->completion)
            ++inside;
    }
    return inside > back_threshold;
}

LearnerOutcome evaluate_learner(const LearnerTrace& trace, const traces::AnalysisConfig& config) {
    LearnerOutcome out;
    out.learner_id = trace.learner_id;
    out.dropout = dropout_point(trace, config.dropout_fraction).index;
    out.order.assign(trace.resource_count + 1, OrderClass::on_time);
    out.back.assign(trace.resource_count + 1, false);
    const OrderCounts counts(trace);
    for (std::size_t r = 1; r <= trace.resource_count; ++r) {
        if (!trace.done[r]) continue;
        out.order[r] = counts.classify(r, config.order_k);
        out.back[r] = came_back(trace, r, config.back_threshold);
    }
    return out;
}

std::vector<LearnerOutcome> evaluate_cohort(const Cohort& cohort, unsigned threads) {
    if (threads == 0) threads = default_thread_count();
    std::vector<LearnerOutcome> outcomes(cohort.traces.size());
    parallel_for(cohort.traces.size(), threads, [&](std::size_t i) {
        outcomes[i] = evaluate_learner(cohort.traces[i], cohort.config);
    });
    return outcomes;
}

FeatureTable aggregate_outcomes(const Cohort& cohort, const std::vector<LearnerOutcome>& outcomes) {
    const std::size_t R = cohort.resource_count();
    FeatureTable table;
    table.cohort_size = cohort.learner_count();
    table.rows.resize(R);
    for (std::size_t r = 1; r <= R; ++r) table.rows[r - 1].resource = cohort.curriculum.resources[r - 1];

    for (std::size_t li = 0; li < cohort.traces.size(); ++li) {
        const LearnerTrace& trace = cohort.traces[li];
        const LearnerOutcome& outcome = outcomes[li];
        for (std::size_t r = 1; r <= R; ++r) {
            ResourceFeatureRow& row = table.rows[r - 1];
            const bool active = outcome.dropout >= r;
            const bool done = trace.done[r];
            if (active) {
                ++row.active_count;
                if (outcome.dropout == r) ++row.drop_count;
                if (!done) ++row.skip_count;
                if (done) {
                    if (outcome.order[r] == OrderClass::early) ++row.early_count;
                    if (outcome.order[r] == OrderClass::late) ++row.late_count;
                    if (outcome.back[r]) ++row.back_count;
                }
            } else if (done) {
                ++row.peek_count;
            }
        }
    }

    for (auto& row : table.rows) {
        const auto active = static_cast<double>(row.active_count);
        if (row.active_count > 0) {
            row.drop = {static_cast<double>(row.drop_count) / active, true};
            row.skip = {static_cast<double>(row.skip_count) / active, true};
            row.early = {static_cast<double>(row.early_count) / active, true};
            row.late = {static_cast<double>(row.late_count) / active, true};
            row.back = {static_cast<double>(row.back_count) / active, true};
        }
        if (table.cohort_size > 0)
            row.peek = {static_cast<double>(row.peek_count) / static_cast<double>(table.cohort_size),
                        true};
    }
    return table;
}

FeatureTable aggregate_features(const Cohort& cohort, unsigned threads) {
    return aggregate_outcomes(cohort, evaluate_cohort(cohort, threads));
}

}  // namespace ruaf::features
