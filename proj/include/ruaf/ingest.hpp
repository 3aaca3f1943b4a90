#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ruaf/timestamp.hpp"

namespace ruaf::ingest {

// Curriculum item identifier, rendered "week.step" (e.g. "1.2"). Ordering is
// numeric on the (week, step) pair, never string order.
struct ResourceId {
    int week = 0;
    int step = 0;

    [[nodiscard]] std::string str() const {
        return std::to_string(week) + "." + std::to_string(step);
    }

    friend auto operator<=>(const ResourceId&, const ResourceId&) = default;
};

std::optional<ResourceId> parse_resource_id(const std::string& text);

enum class ResourceType { video, article, discussion, quiz, assessment, unknown };

std::string resource_type_name(ResourceType t);
std::optional<ResourceType> parse_resource_type(const std::string& text);

// One validated row of the step-activity log: a learner's first visit to a
// resource and, when present, their last completion of it.
struct StepActivityRecord {
    std::string learner_id;
    ResourceId resource;
    EpochSeconds first_visited_at = 0;
    std::optional<EpochSeconds> last_completed_at;

    [[nodiscard]] std::int64_t duration_seconds() const {
        return last_completed_at ? *last_completed_at - first_visited_at : 0;
    }

    friend bool operator==(const StepActivityRecord&, const StepActivityRecord&) = default;
};

struct RowError {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string reason;
};

// Raised for stream-level problems (unreadable input, missing header
// columns) and for curriculum validation failures.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Validated, deduplicated log. Records are kept in canonical
// (learner_id, resource) order so parsing is independent of row order.
struct EventLog {
    std::vector<StepActivityRecord> records;

    // learner_id -> indices into records, ascending
    [[nodiscard]] std::map<std::string, std::vector<std::size_t>> learner_index() const;
    [[nodiscard]] std::size_t learner_count() const;

    friend bool operator==(const EventLog&, const EventLog&) = default;
};

struct ParseResult {
    EventLog log;
    std::vector<RowError> errors;
};

// CSV with a header naming at least learner_id, resource (alias: step),
// first_visited_at, last_completed_at. Extra columns are ignored. Malformed
// rows become RowErrors; duplicate (learner, resource) rows merge to the
// earliest visit and latest completion.
ParseResult parse_step_activity(std::istream& in);
ParseResult parse_step_activity_file(const std::string& path);

void serialize_step_activity(const EventLog& log, std::ostream& out);

// Ordered course structure; index of a resource is its 1-based position.
struct Curriculum {
    std::vector<ResourceId> resources;
    std::vector<ResourceType> types;  // same length as resources

    [[nodiscard]] std::size_t size() const { return resources.size(); }
    // 1-based curriculum index, 0 if unknown
    [[nodiscard]] std::size_t index_of(const ResourceId& r) const;
    [[nodiscard]] int week_of(std::size_t index) const { return resources[index - 1].week; }
};

// Reconstructs the curriculum as the sorted set of resource ids observed in
// the log. Types come out unknown; use load_curriculum for a declared order.
Curriculum derive_curriculum(const EventLog& log);

// Sidecar CSV "resource[,type]", one resource per line in curriculum order.
// A leading "resource,type" header line is tolerated. Every resource present
// in `log` must appear in the file.
Curriculum load_curriculum(std::istream& in, const EventLog& log);
Curriculum load_curriculum_file(const std::string& path, const EventLog& log);

}  // namespace ruaf::ingest
