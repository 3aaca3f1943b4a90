#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ruaf/traces.hpp"

namespace ruaf::features {

using traces::Cohort;
using traces::LearnerTrace;

// Number of done resources with curriculum index in [i+1, r].
// Requires 1 <= i < r <= R.
std::size_t done_between(const LearnerTrace& trace, std::size_t i, std::size_t r);

// The dropout property P(i): for every r with i < r <= R, the learner has
// done at most fraction*(r-i) of the resources in (i, r]. Vacuously true at
// i = R.
bool dropout_property(const LearnerTrace& trace, const Fraction& fraction, std::size_t i);

struct DropoutPoint {
    std::string learner_id;
    std::size_t index = 0;
};

// Earliest curriculum index satisfying the dropout property. Always exists
// because P(R) is vacuous.
DropoutPoint dropout_point(const LearnerTrace& trace, const Fraction& fraction);

// A(r): done resources before r in the curriculum that the learner started
// after starting r. B(r): done resources after r started before r.
struct OrderSets {
    std::set<std::size_t> a_set;
    std::set<std::size_t> b_set;
};

OrderSets order_sets(const LearnerTrace& trace, std::size_t r);

enum class OrderClass { on_time, early, late };

std::string order_class_name(OrderClass c);

// Early: at least k members r_i of A(r) have |B(r_i)| < |A(r)|. Late: the
// mirrored condition on B(r). Early is checked first; the two conditions are
// in fact mutually exclusive (each member of A(r) forces |B(r)| < |A(r)| - 1
// and vice versa).
OrderClass classify_order(const LearnerTrace& trace, std::size_t r, int order_k);

// True iff strictly more than back_threshold later-curriculum done resources
// were first visited strictly inside r's visit..completion window. False
// when r was not visited or has no completion.
bool came_back(const LearnerTrace& trace, std::size_t r, int back_threshold);

// Everything the per-resource aggregation needs from one learner; also the
// RUAF side of the alignment comparison.
struct LearnerOutcome {
    std::string learner_id;
    std::size_t dropout = 0;
    std::vector<OrderClass> order;  // size R+1, valid at done indices
    std::vector<bool> back;         // size R+1, valid at done indices
};

LearnerOutcome evaluate_learner(const LearnerTrace& trace, const traces::AnalysisConfig& config);

std::vector<LearnerOutcome> evaluate_cohort(const Cohort& cohort, unsigned threads = 0);

struct Nullable {
    double value = 0.0;
    bool defined = false;

    friend bool operator==(const Nullable&, const Nullable&) = default;
};

// Per-resource aggregates. Fractions carry their integer numerators so the
// conservation invariants can be checked exactly; a zero denominator makes
// the fraction undefined rather than 0/0.
struct ResourceFeatureRow {
    ingest::ResourceId resource;
    std::size_t active_count = 0;
    std::size_t drop_count = 0, skip_count = 0, peek_count = 0;
    std::size_t early_count = 0, late_count = 0, back_count = 0;
    Nullable drop, skip, peek, early, late, back;
};

struct FeatureTable {
    std::vector<ResourceFeatureRow> rows;  // curriculum order
    std::size_t cohort_size = 0;           // |L|
};

// Aggregation (1-based r):
//   active(r) = #{l : dropout(l) >= r}
//   drop(r)   = #{l : dropout(l) = r} / active(r)
//   skip(r)   = #{l active at r with r not done} / active(r)
//   peek(r)   = #{l : r done and dropout(l) < r} / |L|
//   early(r), late(r) = active learners with that order class / active(r)
//   back(r)   = #{l active at r that came back to r} / active(r)
FeatureTable aggregate_features(const Cohort& cohort, unsigned threads = 0);

FeatureTable aggregate_outcomes(const Cohort& cohort, const std::vector<LearnerOutcome>& outcomes);

}  // namespace ruaf::features
