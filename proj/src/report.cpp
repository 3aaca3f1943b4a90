#include "ruaf/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace ruaf::report {

namespace {

using json = nlohmann::json;

json nullable_json(const features::Nullable& v) {
    if (!v.defined) return nullptr;
    return v.value;
}

std::string csv_cell(const features::Nullable& v) {
    return v.defined ? format_double(v.value) : std::string{};
}

std::string xy(double x, double y) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    std::string s = buf;
    std::snprintf(buf, sizeof(buf), "%.2f", y);
    return s + "\" y=\"" + buf;
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_feature_csv(const features::FeatureTable& table, std::ostream& out) {
    out << "resource,active,drop,skip,peek,early,late,back\n";
    for (const auto& row : table.rows) {
        out << row.resource.str() << ',' << row.active_count << ',' << csv_cell(row.drop) << ','
            << csv_cell(row.skip) << ',' << csv_cell(row.peek) << ',' << csv_cell(row.early) << ','
            << csv_cell(row.late) << ',' << csv_cell(row.back) << '\n';
    }
}

void write_feature_json(const features::FeatureTable& table, std::ostream& out) {
    json j;
    j["learners"] = table.cohort_size;
    json rows = json::array();
    for (const auto& row : table.rows) {
        rows.push_back({{"resource", row.resource.str()},
                        {"active", row.active_count},
                        {"drop", nullable_json(row.drop)},
                        {"skip", nullable_json(row.skip)},
                        {"peek", nullable_json(row.peek)},
                        {"early", nullable_json(row.early)},
                        {"late", nullable_json(row.late)},
                        {"back", nullable_json(row.back)}});
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << '\n';
}

namespace {

features::Nullable parse_cell(const std::string& cell) {
    if (cell.empty()) return {};
    double v = 0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw ingest::ValidationError("bad numeric cell '" + cell + "'");
    return {v, true};
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            std::string tail = line.substr(start);
            if (!tail.empty() && tail.back() == '\r') tail.pop_back();
            out.push_back(std::move(tail));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

}  // namespace

features::FeatureTable read_feature_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ingest::ValidationError("empty feature table");
    if (split_line(line) !=
        std::vector<std::string>{"resource", "active", "drop", "skip", "peek", "early", "late",
                                 "back"})
        throw ingest::ValidationError("unexpected feature table header");
    features::FeatureTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != 8) throw ingest::ValidationError("feature row needs 8 cells");
        features::ResourceFeatureRow row;
        const auto rid = ingest::parse_resource_id(cells[0]);
        if (!rid) throw ingest::ValidationError("bad resource id '" + cells[0] + "'");
        row.resource = *rid;
        std::size_t active = 0;
        const auto res = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), active);
        if (res.ec != std::errc()) throw ingest::ValidationError("bad active count '" + cells[1] + "'");
        row.active_count = active;
        row.drop = parse_cell(cells[2]);
        row.skip = parse_cell(cells[3]);
        row.peek = parse_cell(cells[4]);
        row.early = parse_cell(cells[5]);
        row.late = parse_cell(cells[6]);
        row.back = parse_cell(cells[7]);
        table.rows.push_back(row);
    }
    return table;
}

void write_alignment_csv(const alignment::AlignmentTable& table, std::ostream& out) {
    out << "resource,active,drop,early,late\n";
    for (const auto& row : table.rows) {
        out << row.resource.str() << ',' << row.active_count << ',' << csv_cell(row.drop) << ','
            << csv_cell(row.early) << ',' << csv_cell(row.late) << '\n';
    }
}

void write_alignment_json(const alignment::AlignmentTable& table, std::ostream& out) {
    json j;
    j["learners"] = table.cohort_size;
    json rows = json::array();
    for (const auto& row : table.rows) {
        rows.push_back({{"resource", row.resource.str()},
                        {"active", row.active_count},
                        {"drop", nullable_json(row.drop)},
                        {"early", nullable_json(row.early)},
                        {"late", nullable_json(row.late)}});
    }
    j["rows"] = std::move(rows);
    out << j.dump(2) << '\n';
}

void write_comparison_csv(const alignment::ComparisonReport& report, std::ostream& out) {
    out << "learner_id,ruaf_dropout,alignment_dropout,delta\n";
    for (const auto& lc : report.learners) {
        out << lc.learner_id << ',' << lc.ruaf_dropout << ',' << lc.alignment_dropout << ','
            << lc.delta() << '\n';
    }
}

void write_comparison_json(const alignment::ComparisonReport& report, std::ostream& out) {
    json j;
    j["summary"] = {{"learners", report.summary.learners},
                    {"mean_dropout_delta", report.summary.mean_dropout_delta},
                    {"mean_active_ratio", nullable_json(report.summary.mean_active_ratio)},
                    {"identical_dropout_fraction", report.summary.identical_dropout_fraction},
                    {"order_agreement_fraction", report.summary.order_agreement_fraction}};
    json resources = json::array();
    for (const auto& rc : report.resources) {
        resources.push_back({{"resource", rc.resource.str()},
                             {"ruaf_active", rc.ruaf_active},
                             {"alignment_active", rc.alignment_active},
                             {"active_ratio", nullable_json(rc.active_ratio)},
                             {"order_compared", rc.order_compared},
                             {"order_agree", rc.order_agree}});
    }
    j["resources"] = std::move(resources);
    json learners = json::array();
    for (const auto& lc : report.learners) {
        learners.push_back({{"learner_id", lc.learner_id},
                            {"ruaf_dropout", lc.ruaf_dropout},
                            {"alignment_dropout", lc.alignment_dropout},
                            {"delta", lc.delta()}});
    }
    j["learners"] = std::move(learners);
    out << j.dump(2) << '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ingest::ValidationError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw ingest::ValidationError("failed writing '" + path + "'");
}

std::string render_chart(const ChartSpec& spec) {
    const std::size_t R = spec.values.size();
    if (R == 0) throw ingest::ValidationError("cannot render a chart for an empty table");
    if (spec.weeks.size() != R || spec.labels.size() != R)
        throw ingest::ValidationError("chart spec fields must have one entry per resource");

    double max_value = 0;
    for (const auto& v : spec.values)
        if (v.defined) max_value = std::max(max_value, v.value);
    double y_max = spec.y_max > 0 ? spec.y_max : max_value;
    if (y_max <= 0) y_max = spec.percent ? 0.01 : 1.0;

    const double margin_left = 64, margin_right = 16, margin_top = 34, margin_bottom = 42;
    const double plot_w = spec.width - margin_left - margin_right;
    const double plot_h = spec.height - margin_top - margin_bottom;
    const double base_y = margin_top + plot_h;
    const double slot = plot_w / static_cast<double>(R);
    const double bar_w = slot * 0.8;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(spec.width) + "\" height=\"" +
           num(spec.height) + "\" viewBox=\"0 0 " + num(spec.width) + " " + num(spec.height) +
           "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + num(spec.width) + "\" height=\"" + num(spec.height) +
           "\" fill=\"#ffffff\"/>\n";
    svg += "<text x=\"" + xy(margin_left, margin_top - 14) +
           "\" font-family=\"sans-serif\" font-size=\"15\" font-weight=\"bold\">" + spec.feature +
           "</text>\n";

    // horizontal gridlines and axis labels
    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double value = y_max * static_cast<double>(i) / ticks;
        const double y = base_y - plot_h * static_cast<double>(i) / ticks;
        svg += "<line x1=\"" + num(margin_left) + "\" y1=\"" + num(y) + "\" x2=\"" +
               num(margin_left + plot_w) + "\" y2=\"" + num(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        char label[48];
        if (spec.percent)
            std::snprintf(label, sizeof(label), "%.4g%%", value * 100.0);
        else
            std::snprintf(label, sizeof(label), "%.4g", value);
        svg += "<text x=\"" + xy(margin_left - 6, y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + label +
               "</text>\n";
    }

    // bars; even weeks lighter than odd weeks
    const std::size_t label_step =
        slot >= 20 ? 1 : static_cast<std::size_t>((20.0 + slot - 1) / slot);
    for (std::size_t i = 0; i < R; ++i) {
        const double x = margin_left + slot * static_cast<double>(i) + (slot - bar_w) / 2;
        if (spec.values[i].defined) {
            const double h = plot_h * std::min(spec.values[i].value, y_max) / y_max;
            const std::string& shade = spec.weeks[i] % 2 == 0 ? spec.even_shade : spec.odd_shade;
            svg += "<rect x=\"" + xy(x, base_y - h) + "\" width=\"" + num(bar_w) + "\" height=\"" +
                   num(h) + "\" fill=\"" + shade + "\"/>\n";
        } else {
            // no data: tick mark instead of a bar
            svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(base_y - 4) + "\" x2=\"" +
                   num(x + bar_w) + "\" y2=\"" + num(base_y - 4) +
                   "\" stroke=\"#999999\" stroke-width=\"2\"/>\n";
        }
        if (i % label_step == 0) {
            svg += "<text x=\"" + xy(x + bar_w / 2, base_y + 14) +
                   "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
                   spec.labels[i] + "</text>\n";
        }
    }

    svg += "<line x1=\"" + num(margin_left) + "\" y1=\"" + num(margin_top) + "\" x2=\"" +
           num(margin_left) + "\" y2=\"" + num(base_y) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + num(margin_left) + "\" y1=\"" + num(base_y) + "\" x2=\"" +
           num(margin_left + plot_w) + "\" y2=\"" + num(base_y) +
           "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace ruaf::report
