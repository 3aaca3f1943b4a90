#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ruaf/alignment.hpp"
#include "ruaf/features.hpp"

namespace ruaf::report {

// Shortest round-trip decimal form (via to_chars), so CSV -> parse -> CSV is
// byte-stable.
std::string format_double(double v);

void write_feature_csv(const features::FeatureTable& table, std::ostream& out);
void write_feature_json(const features::FeatureTable& table, std::ostream& out);
features::FeatureTable read_feature_csv(std::istream& in);

void write_alignment_csv(const alignment::AlignmentTable& table, std::ostream& out);
void write_alignment_json(const alignment::AlignmentTable& table, std::ostream& out);

void write_comparison_csv(const alignment::ComparisonReport& report, std::ostream& out);
void write_comparison_json(const alignment::ComparisonReport& report, std::ostream& out);

// Writes with path context on failure.
void write_text_file(const std::string& path, const std::string& content);

// One bar per resource in curriculum order. Odd weeks use the darker shade.
// Null values leave a gap with a tick mark at the baseline. For percent
// charts the axis is labelled in %, scaled to the maximum value; `y_max`
// overrides the scale (used for the active chart: 0..|L|).
struct ChartSpec {
    std::string feature;
    std::vector<features::Nullable> values;
    std::vector<int> weeks;           // week number per resource
    std::vector<std::string> labels;  // resource id per resource
    double width = 960;
    double height = 380;
    std::string odd_shade = "#2b6cb0";
    std::string even_shade = "#a8c7e7";
    bool percent = true;
    double y_max = 0;  // 0: derive from values
};

std::string render_chart(const ChartSpec& spec);

}  // namespace ruaf::report
