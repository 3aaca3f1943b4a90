#include "ruaf/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace ruaf::ingest {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

bool parse_positive_int(const std::string& s, int& out) {
    if (s.empty() || s.size() > 9) return false;
    long v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    if (v <= 0) return false;
    out = static_cast<int>(v);
    return true;
}

}  // namespace

std::optional<ResourceId> parse_resource_id(const std::string& text) {
    const auto dot = text.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= text.size()) return std::nullopt;
    ResourceId id;
    if (!parse_positive_int(text.substr(0, dot), id.week)) return std::nullopt;
    if (!parse_positive_int(text.substr(dot + 1), id.step)) return std::nullopt;
    return id;
}

std::string resource_type_name(ResourceType t) {
    switch (t) {
        case ResourceType::video: return "video";
        case ResourceType::article: return "article";
        case ResourceType::discussion: return "discussion";
        case ResourceType::quiz: return "quiz";
        case ResourceType::assessment: return "assessment";
        case ResourceType::unknown: return "";
    }
    return "";
}

std::optional<ResourceType> parse_resource_type(const std::string& text) {
    if (text.empty()) return ResourceType::unknown;
    if (text == "video") return ResourceType::video;
    if (text == "article") return ResourceType::article;
    if (text == "discussion") return ResourceType::discussion;
    if (text == "quiz") return ResourceType::quiz;
    if (text == "assessment") return ResourceType::assessment;
    return std::nullopt;
}

std::map<std::string, std::vector<std::size_t>> EventLog::learner_index() const {
    std::map<std::string, std::vector<std::size_t>> index;
    for (std::size_t i = 0; i < records.size(); ++i) index[records[i].learner_id].push_back(i);
    return index;
}

std::size_t EventLog::learner_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i == 0 || records[i].learner_id != records[i - 1].learner_id) ++n;
    }
    return n;
}

ParseResult parse_step_activity(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty input: no header line");

    const auto header = split_csv_line(line);
    int col_learner = -1, col_resource = -1, col_first = -1, col_last = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string& h = header[i];
        if (h == "learner_id") col_learner = static_cast<int>(i);
        else if (h == "resource" || h == "step") col_resource = static_cast<int>(i);
        else if (h == "first_visited_at") col_first = static_cast<int>(i);
        else if (h == "last_completed_at") col_last = static_cast<int>(i);
    }
    if (col_learner < 0 || col_resource < 0 || col_first < 0 || col_last < 0) {
        std::string missing;
        if (col_learner < 0) missing += " learner_id";
        if (col_resource < 0) missing += " resource";
        if (col_first < 0) missing += " first_visited_at";
        if (col_last < 0) missing += " last_completed_at";
        throw ValidationError("header missing required column(s):" + missing);
    }
    const std::size_t needed = static_cast<std::size_t>(
        std::max({col_learner, col_resource, col_first, col_last})) + 1;

    ParseResult result;
    // key: learner_id \0 resource -> index into records (pre-merge)
    std::unordered_map<std::string, std::size_t> seen;
    std::size_t line_no = 1;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() < needed) {
            result.errors.push_back({line_no, "expected at least " + std::to_string(needed) +
                                                  " columns, got " + std::to_string(fields.size())});
            continue;
        }

        StepActivityRecord rec;
        rec.learner_id = fields[static_cast<std::size_t>(col_learner)];
        if (rec.learner_id.empty()) {
            result.errors.push_back({line_no, "empty learner_id"});
            continue;
        }
        const std::string& res_text = fields[static_cast<std::size_t>(col_resource)];
        const auto rid = parse_resource_id(res_text);
        if (!rid) {
            result.errors.push_back({line_no, "unparseable resource id '" + res_text + "'"});
            continue;
        }
        rec.resource = *rid;
        const std::string& first_text = fields[static_cast<std::size_t>(col_first)];
        const auto first = parse_timestamp(first_text);
        if (!first) {
            result.errors.push_back({line_no, "bad first_visited_at '" + first_text + "'"});
            continue;
        }
        rec.first_visited_at = *first;
        const std::string& last_text = fields[static_cast<std::size_t>(col_last)];
        if (!last_text.empty()) {
            const auto last = parse_timestamp(last_text);
            if (!last) {
                result.errors.push_back({line_no, "bad last_completed_at '" + last_text + "'"});
                continue;
            }
            if (*last < rec.first_visited_at) {
                result.errors.push_back({line_no, "last_completed_at precedes first_visited_at"});
                continue;
            }
            rec.last_completed_at = *last;
        }

        const std::string key = rec.learner_id + '\0' + rec.resource.str();
        const auto it = seen.find(key);
        if (it == seen.end()) {
            seen.emplace(key, result.log.records.size());
            result.log.records.push_back(std::move(rec));
        } else {
            // re-exported rows: earliest visit, latest completion
            StepActivityRecord& kept = result.log.records[it->second];
            kept.first_visited_at = std::min(kept.first_visited_at, rec.first_visited_at);
            if (rec.last_completed_at &&
                (!kept.last_completed_at || *rec.last_completed_at > *kept.last_completed_at))
                kept.last_completed_at = rec.last_completed_at;
        }
    }

    std::sort(result.log.records.begin(), result.log.records.end(),
              [](const StepActivityRecord& a, const StepActivityRecord& b) {
                  if (a.learner_id != b.learner_id) return a.learner_id < b.learner_id;
                  return a.resource < b.resource;
              });
    return result;
}

ParseResult parse_step_activity_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open log file '" + path + "'");
    return parse_step_activity(in);
}

void serialize_step_activity(const EventLog& log, std::ostream& out) {
    out << "learner_id,resource,first_visited_at,last_completed_at\n";
    for (const auto& rec : log.records) {
        out << rec.learner_id << ',' << rec.resource.str() << ','
            << format_timestamp(rec.first_visited_at) << ',';
        if (rec.last_completed_at) out << format_timestamp(*rec.last_completed_at);
        out << '\n';
    }
}

std::size_t Curriculum::index_of(const ResourceId& r) const {
    const auto it = std::lower_bound(resources.begin(), resources.end(), r);
    if (it == resources.end() || *it != r) return 0;
    return static_cast<std::size_t>(it - resources.begin()) + 1;
}

Curriculum derive_curriculum(const EventLog& log) {
    if (log.records.empty()) throw ValidationError("cannot derive curriculum from an empty log");
    std::vector<ResourceId> ids;
    ids.reserve(log.records.size());
    for (const auto& rec : log.records) ids.push_back(rec.resource);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    Curriculum c;
    c.resources = std::move(ids);
    c.types.assign(c.resources.size(), ResourceType::unknown);
    return c;
}

Curriculum load_curriculum(std::istream& in, const EventLog& log) {
    Curriculum c;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (line_no == 1 && (t == "resource,type" || t == "resource")) continue;
        const auto fields = split_csv_line(t);
        const auto rid = parse_resource_id(fields[0]);
        if (!rid)
            throw ValidationError("curriculum line " + std::to_string(line_no) +
                                  ": unparseable resource id '" + fields[0] + "'");
        if (!c.resources.empty() && !(c.resources.back() < *rid))
            throw ValidationError("curriculum line " + std::to_string(line_no) + ": resource " +
                                  rid->str() + " out of (week,step) order");
        ResourceType type = ResourceType::unknown;
        if (fields.size() > 1) {
            const auto parsed = parse_resource_type(fields[1]);
            if (!parsed)
                throw ValidationError("curriculum line " + std::to_string(line_no) +
                                      ": unknown resource type '" + fields[1] + "'");
            type = *parsed;
        }
        c.resources.push_back(*rid);
        c.types.push_back(type);
    }
    if (c.resources.empty()) throw ValidationError("curriculum file is empty");
    for (const auto& rec : log.records) {
        if (c.index_of(rec.resource) == 0)
            throw ValidationError("unknown resource " + rec.resource.str());
    }
    return c;
}

Curriculum load_curriculum_file(const std::string& path, const EventLog& log) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open curriculum file '" + path + "'");
    return load_curriculum(in, log);
}

}  // namespace ruaf::ingest
