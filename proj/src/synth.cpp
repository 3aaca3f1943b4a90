#include "ruaf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace ruaf::synth {

namespace {

using json = nlohmann::json;

constexpr EpochSeconds kBaseTime = 1468195200;  // 2016-07-11 00:00:00 UTC
constexpr std::int64_t kSlotSeconds = 180;
constexpr std::int64_t kDoneSeconds = 90;          // strictly above the 60 s default
constexpr std::int64_t kRevisitSpanVisits = 5;     // later first-visits inside the window

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Thin wrapper so draws stay deterministic across platforms; std::mt19937_64
// is fully specified, the std distributions are not.
struct Rng {
    std::mt19937_64 gen;

    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
};

std::string learner_name(std::size_t index, std::size_t total) {
    int width = 1;
    for (std::size_t v = total; v >= 10; v /= 10) ++width;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "L%0*zu", width, index + 1);
    return buf;
}

}  // namespace

void GeneratorParams::validate() const {
    if (resource_count == 0) throw std::invalid_argument("resource_count must be positive");
    if (!week_lengths.empty()) {
        std::size_t sum = 0;
        for (std::size_t w : week_lengths) {
            if (w == 0) throw std::invalid_argument("week lengths must be positive");
            sum += w;
        }
        if (sum != resource_count)
            throw std::invalid_argument("week lengths must sum to resource_count");
    }
    for (double p : {p_skip, p_peek, p_revisit}) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probabilities must be in [0,1]");
    }
    if (dropout_kind == DropoutKind::geometric && !(geometric_p > 0.0 && geometric_p <= 1.0))
        throw std::invalid_argument("geometric p must be in (0,1]");
    if (dropout_kind == DropoutKind::weights) {
        if (dropout_weights.size() != resource_count)
            throw std::invalid_argument("need one dropout weight per resource");
        double sum = 0;
        for (double w : dropout_weights) {
            if (w < 0) throw std::invalid_argument("dropout weights must be non-negative");
            sum += w;
        }
        if (!(sum > 0)) throw std::invalid_argument("dropout weights must not be all zero");
    }
    if (week_bump <= 0) throw std::invalid_argument("week_bump must be positive");
    if (reorder_window >= resource_count)
        throw std::invalid_argument("reorder_window must be smaller than resource_count");
}

std::vector<double> GeneratorParams::dropout_pmf() const {
    const std::size_t R = resource_count;
    std::vector<double> pmf(R + 1, 0.0);
    switch (dropout_kind) {
        case DropoutKind::uniform:
            for (std::size_t r = 1; r <= R; ++r) pmf[r] = 1.0 / static_cast<double>(R);
            break;
        case DropoutKind::geometric: {
            // truncated: leftover mass lands on R
            double survive = 1.0;
            for (std::size_t r = 1; r < R; ++r) {
                pmf[r] = survive * geometric_p;
                survive *= 1.0 - geometric_p;
            }
            pmf[R] = survive;
            break;
        }
        case DropoutKind::weights:
            for (std::size_t r = 1; r <= R; ++r) pmf[r] = dropout_weights[r - 1];
            break;
    }
    if (week_bump != 1.0 && !week_lengths.empty() && week_lengths.size() > 1) {
        std::size_t boundary = 0;
        for (std::size_t w = 0; w + 1 < week_lengths.size(); ++w) {
            boundary += week_lengths[w];
            pmf[boundary] *= week_bump;      // last resource of a week
            pmf[boundary + 1] *= week_bump;  // first resource of the next
        }
    }
    double sum = 0;
    for (std::size_t r = 1; r <= R; ++r) sum += pmf[r];
    for (std::size_t r = 1; r <= R; ++r) pmf[r] /= sum;
    return pmf;
}

ingest::Curriculum curriculum_for(const GeneratorParams& params) {
    ingest::Curriculum c;
    const auto weeks = params.week_lengths.empty()
                           ? std::vector<std::size_t>{params.resource_count}
                           : params.week_lengths;
    for (std::size_t w = 0; w < weeks.size(); ++w) {
        for (std::size_t s = 0; s < weeks[w]; ++s)
            c.resources.push_back({static_cast<int>(w + 1), static_cast<int>(s + 1)});
    }
    c.types.assign(c.resources.size(), ingest::ResourceType::unknown);
    return c;
}

GeneratedCohort generate_cohort(const GeneratorParams& params) {
    params.validate();
    GeneratedCohort out;
    out.truth.params = params;
    const std::size_t R = params.resource_count;
    const auto curriculum = curriculum_for(params);
    const auto pmf = params.dropout_pmf();
    std::vector<double> cdf(R + 1, 0.0);
    for (std::size_t r = 1; r <= R; ++r) cdf[r] = cdf[r - 1] + pmf[r];
    cdf[R] = 1.0;

    for (std::size_t li = 0; li < params.n_learners; ++li) {
        Rng rng(splitmix64(params.seed ^ splitmix64(static_cast<std::uint64_t>(li) + 1)));
        LearnerTruth truth;
        truth.learner_id = learner_name(li, params.n_learners);

        const double u = rng.uniform();
        std::size_t d = 1;
        while (d < R && cdf[d] <= u) ++d;
        truth.intended_dropout = d;

        std::vector<std::size_t> done;
        for (std::size_t r = 1; r <= R; ++r) {
            const bool draw = rng.bernoulli(r <= d ? params.p_skip : params.p_peek);
            if (r <= d) {
                if (draw) truth.skipped.push_back(r);
                else done.push_back(r);
            } else if (draw) {
                truth.peeked.push_back(r);
                done.push_back(r);
            }
        }

        // bounded local shuffle: jittered sort keys keep displacement <= window
        if (params.reorder_window > 0 && done.size() > 1) {
            std::vector<std::pair<double, std::size_t>> keyed(done.size());
            for (std::size_t p = 0; p < done.size(); ++p) {
                keyed[p] = {static_cast<double>(p) +
                                rng.uniform() * static_cast<double>(params.reorder_window),
                            done[p]};
            }
            std::stable_sort(keyed.begin(), keyed.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            for (std::size_t p = 0; p < done.size(); ++p) done[p] = keyed[p].second;
        }
        truth.intended_order = done;

        for (std::size_t p = 0; p < done.size(); ++p) {
            const EpochSeconds fv = kBaseTime + static_cast<EpochSeconds>(p) * kSlotSeconds;
            EpochSeconds completion = fv + kDoneSeconds;
            if (rng.bernoulli(params.p_revisit)) {
                truth.revisited.push_back(done[p]);
                completion = fv + kRevisitSpanVisits * kSlotSeconds + kDoneSeconds;
            }
            ingest::StepActivityRecord rec;
            rec.learner_id = truth.learner_id;
            rec.resource = curriculum.resources[done[p] - 1];
            rec.first_visited_at = fv;
            rec.last_completed_at = completion;
            out.log.records.push_back(std::move(rec));
        }
        std::sort(truth.revisited.begin(), truth.revisited.end());
        out.truth.learners.push_back(std::move(truth));
    }

    std::sort(out.log.records.begin(), out.log.records.end(),
              [](const ingest::StepActivityRecord& a, const ingest::StepActivityRecord& b) {
                  if (a.learner_id != b.learner_id) return a.learner_id < b.learner_id;
                  return a.resource < b.resource;
              });
    return out;
}

bool OracleReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.pass; });
}

OracleReport oracle_check(const traces::Cohort& cohort, const features::FeatureTable& table,
                          const GroundTruth& truth, const OracleTolerances& tol) {
    OracleReport report;
    const GeneratorParams& params = truth.params;

    std::vector<const LearnerTruth*> by_id;
    by_id.reserve(truth.learners.size());
    for (const auto& lt : truth.learners) by_id.push_back(&lt);
    std::sort(by_id.begin(), by_id.end(),
              [](const LearnerTruth* a, const LearnerTruth* b) { return a->learner_id < b->learner_id; });
    auto find_truth = [&](const std::string& id) -> const LearnerTruth* {
        const auto it = std::lower_bound(
            by_id.begin(), by_id.end(), id,
            [](const LearnerTruth* lt, const std::string& key) { return lt->learner_id < key; });
        return (it != by_id.end() && (*it)->learner_id == id) ? *it : nullptr;
    };

    OracleCheck bound{"dropout_bound", params.p_peek == 0.0, true, ""};
    OracleCheck exact{"dropout_exact", params.p_peek == 0.0, true, ""};
    if (bound.applicable) {
        for (const auto& trace : cohort.traces) {
            const LearnerTruth* lt = find_truth(trace.learner_id);
            if (lt == nullptr) {
                bound.pass = false;
                bound.detail = "learner " + trace.learner_id + " missing from ground truth";
                break;
            }
            const std::size_t recovered =
                features::dropout_point(trace, cohort.config.dropout_fraction).index;
            if (recovered > lt->intended_dropout) {
                bound.pass = false;
                bound.detail = "learner " + trace.learner_id + ": recovered " +
                               std::to_string(recovered) + " > intended " +
                               std::to_string(lt->intended_dropout);
                break;
            }
            if (lt->skipped.empty() && recovered != lt->intended_dropout) {
                exact.pass = false;
                exact.detail = "skip-free learner " + trace.learner_id + ": recovered " +
                               std::to_string(recovered) + " != intended " +
                               std::to_string(lt->intended_dropout);
            }
        }
    } else {
        bound.detail = exact.detail = "needs p_peek = 0";
    }
    report.checks.push_back(bound);
    report.checks.push_back(exact);

    OracleCheck skip{"skip_rate", true, true, ""};
    std::size_t checked = 0;
    for (const auto& row : table.rows) {
        if (row.active_count < tol.min_active || !row.skip.defined) continue;
        ++checked;
        const double err = std::abs(row.skip.value - params.p_skip);
        if (err > tol.skip_tol) {
            skip.pass = false;
            skip.detail = "resource " + row.resource.str() + ": skip " +
                          std::to_string(row.skip.value) + " vs p_skip " +
                          std::to_string(params.p_skip);
            break;
        }
    }
    if (skip.pass) skip.detail = std::to_string(checked) + " resource(s) within tolerance";
    report.checks.push_back(skip);

    OracleCheck peek{"peek_rate", true, true, ""};
    if (!table.rows.empty() && cohort.learner_count() > 0) {
        double recovered_sum = 0;
        for (const auto& row : table.rows) recovered_sum += row.peek.defined ? row.peek.value : 0.0;
        const double recovered_mean = recovered_sum / static_cast<double>(table.rows.size());
        std::size_t peeked_total = 0;
        for (const auto& trace : cohort.traces) {
            const LearnerTruth* lt = find_truth(trace.learner_id);
            if (lt != nullptr) peeked_total += lt->peeked.size();
        }
        const double truth_mean =
            static_cast<double>(peeked_total) /
            (static_cast<double>(table.rows.size()) * static_cast<double>(cohort.learner_count()));
        const double err = std::abs(recovered_mean - truth_mean);
        peek.pass = err <= tol.peek_tol;
        peek.detail = "recovered mean " + std::to_string(recovered_mean) + " vs ground truth " +
                      std::to_string(truth_mean);
    } else {
        peek.applicable = false;
        peek.detail = "empty cohort";
    }
    report.checks.push_back(peek);
    return report;
}

namespace {

json params_to_json_obj(const GeneratorParams& p) {
    json j;
    j["resources"] = p.resource_count;
    if (!p.week_lengths.empty()) j["weeks"] = p.week_lengths;
    j["learners"] = p.n_learners;
    switch (p.dropout_kind) {
        case DropoutKind::uniform: j["dropout"] = {{"kind", "uniform"}}; break;
        case DropoutKind::geometric:
            j["dropout"] = {{"kind", "geometric"}, {"p", p.geometric_p}};
            break;
        case DropoutKind::weights:
            j["dropout"] = {{"kind", "weights"}, {"weights", p.dropout_weights}};
            break;
    }
    if (p.week_bump != 1.0) j["week_bump"] = p.week_bump;
    j["p_skip"] = p.p_skip;
    j["p_peek"] = p.p_peek;
    j["p_revisit"] = p.p_revisit;
    j["reorder_window"] = p.reorder_window;
    j["seed"] = p.seed;
    return j;
}

}  // namespace

std::string params_to_json(const GeneratorParams& params) {
    return params_to_json_obj(params).dump(2) + "\n";
}

GeneratorParams params_from_json(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad params JSON: ") + e.what());
    }
    GeneratorParams p;
    try {
        p.resource_count = j.at("resources").get<std::size_t>();
        if (j.contains("weeks")) p.week_lengths = j["weeks"].get<std::vector<std::size_t>>();
        p.n_learners = j.at("learners").get<std::size_t>();
        if (j.contains("dropout")) {
            const json& d = j["dropout"];
            const std::string kind = d.at("kind").get<std::string>();
            if (kind == "uniform") {
                p.dropout_kind = DropoutKind::uniform;
            } else if (kind == "geometric") {
                p.dropout_kind = DropoutKind::geometric;
                p.geometric_p = d.at("p").get<double>();
            } else if (kind == "weights") {
                p.dropout_kind = DropoutKind::weights;
                p.dropout_weights = d.at("weights").get<std::vector<double>>();
            } else {
                throw std::invalid_argument("unknown dropout kind '" + kind + "'");
            }
        }
        if (j.contains("week_bump")) p.week_bump = j["week_bump"].get<double>();
        if (j.contains("p_skip")) p.p_skip = j["p_skip"].get<double>();
        if (j.contains("p_peek")) p.p_peek = j["p_peek"].get<double>();
        if (j.contains("p_revisit")) p.p_revisit = j["p_revisit"].get<double>();
        if (j.contains("reorder_window")) p.reorder_window = j["reorder_window"].get<std::size_t>();
        if (j.contains("seed")) p.seed = j["seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad params JSON: ") + e.what());
    }
    p.validate();
    return p;
}

GeneratorParams params_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open params file '" + path + "'");
    return params_from_json(in);
}

std::string ground_truth_to_json(const GroundTruth& truth) {
    json j;
    j["params"] = params_to_json_obj(truth.params);
    json learners = json::array();
    for (const auto& lt : truth.learners) {
        json l;
        l["id"] = lt.learner_id;
        l["intended_dropout"] = lt.intended_dropout;
        l["skipped"] = lt.skipped;
        l["peeked"] = lt.peeked;
        l["revisited"] = lt.revisited;
        l["order"] = lt.intended_order;
        learners.push_back(std::move(l));
    }
    j["learners"] = std::move(learners);
    return j.dump(2) + "\n";
}

}  // namespace ruaf::synth
