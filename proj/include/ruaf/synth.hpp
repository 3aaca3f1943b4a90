#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ruaf/features.hpp"
#include "ruaf/ingest.hpp"
#include "ruaf/traces.hpp"

namespace ruaf::synth {

enum class DropoutKind { uniform, geometric, weights };

// Cohort generator following the dropout-point assumption: each learner
// works from resource 1 up to a drawn dropout, with skips before it, peeks
// past it, bounded local reordering, and optional long revisit windows.
struct GeneratorParams {
    std::size_t resource_count = 20;
    std::vector<std::size_t> week_lengths;  // empty: one week holding everything
    std::size_t n_learners = 100;
    DropoutKind dropout_kind = DropoutKind::uniform;
    double geometric_p = 0.1;            // geometric kind: trial success probability
    std::vector<double> dropout_weights; // weights kind: one weight per resource
    double week_bump = 1.0;              // pmf multiplier at week-boundary resources
    double p_skip = 0.0;
    double p_peek = 0.0;
    double p_revisit = 0.0;
    std::size_t reorder_window = 0;  // max visit displacement
    std::uint64_t seed = 1;

    void validate() const;
    // dropout pmf over indices 1..R (index 0 unused), bump applied
    [[nodiscard]] std::vector<double> dropout_pmf() const;
};

ingest::Curriculum curriculum_for(const GeneratorParams& params);

struct LearnerTruth {
    std::string learner_id;
    std::size_t intended_dropout = 0;
    std::vector<std::size_t> skipped;
    std::vector<std::size_t> peeked;
    std::vector<std::size_t> revisited;
    std::vector<std::size_t> intended_order;  // emitted visit order, curriculum indices
};

struct GroundTruth {
    GeneratorParams params;
    std::vector<LearnerTruth> learners;
};

struct GeneratedCohort {
    ingest::EventLog log;
    GroundTruth truth;
};

// Deterministic in (params, seed): every learner draws from its own
// substream, so generation order never shows in the output.
GeneratedCohort generate_cohort(const GeneratorParams& params);

struct OracleTolerances {
    double skip_tol = 0.04;
    double peek_tol = 0.01;
    std::size_t min_active = 200;  // rows below this stay out of the skip check
};

struct OracleCheck {
    std::string name;
    bool applicable = true;
    bool pass = true;
    std::string detail;
};

struct OracleReport {
    std::vector<OracleCheck> checks;

    [[nodiscard]] bool all_pass() const;
};

// Compares recovered aggregates against generator ground truth:
//  - dropout_bound (needs p_peek = 0): recovered <= intended for everyone
//  - dropout_exact: recovered == intended for learners without any skip
//  - skip_rate: per-resource skip within skip_tol of p_skip where active
//    count reaches min_active
//  - peek_rate: mean peek within peek_tol of the ground-truth peek rate
OracleReport oracle_check(const traces::Cohort& cohort, const features::FeatureTable& table,
                          const GroundTruth& truth, const OracleTolerances& tol = {});

// JSON (de)serialization for the CLI simulate subcommand.
std::string params_to_json(const GeneratorParams& params);
GeneratorParams params_from_json(std::istream& in);
GeneratorParams params_from_json_file(const std::string& path);
std::string ground_truth_to_json(const GroundTruth& truth);

}  // namespace ruaf::synth
