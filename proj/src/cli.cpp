#include "ruaf/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ruaf/alignment.hpp"
#include "ruaf/features.hpp"
#include "ruaf/ingest.hpp"
#include "ruaf/parallel.hpp"
#include "ruaf/report.hpp"
#include "ruaf/synth.hpp"
#include "ruaf/traces.hpp"

namespace ruaf::cli {

namespace {

namespace fs = std::filesystem;

struct AnalysisFlags {
    std::string log_path;
    std::string curriculum_path;
    std::string config_path;
    std::string out_dir = ".";
    std::string course;  // defaults to the log file stem
    std::string min_seconds;
    std::string dropout_fraction;
    std::string back_threshold;
    std::string order_k;
    bool charts = false;
    unsigned threads = 0;
};

void add_analysis_flags(CLI::App* cmd, AnalysisFlags& flags) {
    cmd->add_option("log", flags.log_path, "step-activity CSV log")->required();
    cmd->add_option("--curriculum", flags.curriculum_path, "curriculum sidecar CSV");
    cmd->add_option("--config", flags.config_path, "key=value parameter file");
    cmd->add_option("--out", flags.out_dir, "output directory (default: .)");
    cmd->add_option("--course", flags.course, "course name used in output file names");
    cmd->add_option("--min-seconds", flags.min_seconds, "done threshold in seconds (default 60)");
    cmd->add_option("--dropout-fraction", flags.dropout_fraction,
                    "dropout window fraction, e.g. 1/3 or 0.25 (default 1/3)");
    cmd->add_option("--back-threshold", flags.back_threshold, "coming-back threshold (default 3)");
    cmd->add_option("--order-k", flags.order_k, "early/late witness count (default 2)");
    cmd->add_flag("--charts", flags.charts, "render SVG charts");
    cmd->add_option("--threads", flags.threads, "worker threads (default: hardware)");
}

std::int64_t parse_int_flag(const std::string& text, const char* name) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ingest::ValidationError(std::string("bad value for ") + name + ": '" + text + "'");
    }
}

traces::AnalysisConfig resolve_config(const AnalysisFlags& flags) {
    traces::AnalysisConfig config;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) throw ingest::ValidationError("cannot open config file '" + flags.config_path + "'");
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ingest::ValidationError("config line " + std::to_string(line_no) +
                                              ": expected key=value");
            const std::string key = line.substr(0, eq);
            const std::string value = line.substr(eq + 1);
            if (key == "min_done_seconds") config.min_done_seconds = parse_int_flag(value, key.c_str());
            else if (key == "dropout_fraction") config.dropout_fraction = parse_fraction(value);
            else if (key == "back_threshold")
                config.back_threshold = static_cast<int>(parse_int_flag(value, key.c_str()));
            else if (key == "order_k")
                config.order_k = static_cast<int>(parse_int_flag(value, key.c_str()));
            else
                throw ingest::ValidationError("config line " + std::to_string(line_no) +
                                              ": unknown key '" + key + "'");
        }
    }
    // explicit flags override the config file
    if (!flags.min_seconds.empty())
        config.min_done_seconds = parse_int_flag(flags.min_seconds, "--min-seconds");
    if (!flags.dropout_fraction.empty()) {
        try {
            config.dropout_fraction = parse_fraction(flags.dropout_fraction);
        } catch (const std::invalid_argument& e) {
            throw ingest::ValidationError(e.what());
        }
    }
    if (!flags.back_threshold.empty())
        config.back_threshold = static_cast<int>(parse_int_flag(flags.back_threshold, "--back-threshold"));
    if (!flags.order_k.empty())
        config.order_k = static_cast<int>(parse_int_flag(flags.order_k, "--order-k"));
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ingest::ValidationError(e.what());
    }
    return config;
}

struct PipelineData {
    traces::Cohort cohort;
    std::string course;
    fs::path out_dir;
};

PipelineData load_pipeline(const AnalysisFlags& flags) {
    PipelineData data;
    auto parsed = ingest::parse_step_activity_file(flags.log_path);
    for (const auto& err : parsed.errors)
        std::cerr << "warning: line " << err.line << ": " << err.reason << '\n';

    const auto curriculum = flags.curriculum_path.empty()
                                ? ingest::derive_curriculum(parsed.log)
                                : ingest::load_curriculum_file(flags.curriculum_path, parsed.log);
    data.cohort = traces::build_cohort(parsed.log, curriculum, resolve_config(flags));
    data.course = flags.course.empty() ? fs::path(flags.log_path).stem().string() : flags.course;
    data.out_dir = flags.out_dir;
    fs::create_directories(data.out_dir);

    const auto stats = traces::cohort_stats(data.cohort);
    if (stats.empty_cohort)
        std::cerr << "warning: no learner passed the done threshold; cohort is empty\n";
    std::cout << "learners=" << stats.learners << " resources=" << stats.resources
              << " done_density=" << report::format_double(stats.done_density) << '\n';
    return data;
}

std::vector<int> resource_weeks(const traces::Cohort& cohort) {
    std::vector<int> weeks;
    weeks.reserve(cohort.resource_count());
    for (const auto& r : cohort.curriculum.resources) weeks.push_back(r.week);
    return weeks;
}

std::vector<std::string> resource_labels(const traces::Cohort& cohort) {
    std::vector<std::string> labels;
    labels.reserve(cohort.resource_count());
    for (const auto& r : cohort.curriculum.resources) labels.push_back(r.str());
    return labels;
}

void write_feature_outputs(const PipelineData& data, const features::FeatureTable& table,
                           bool charts) {
    std::ostringstream csv;
    report::write_feature_csv(table, csv);
    report::write_text_file((data.out_dir / (data.course + "-features.csv")).string(), csv.str());
    std::ostringstream js;
    report::write_feature_json(table, js);
    report::write_text_file((data.out_dir / (data.course + "-features.json")).string(), js.str());

    if (!charts) return;
    const auto weeks = resource_weeks(data.cohort);
    const auto labels = resource_labels(data.cohort);
    auto chart = [&](const std::string& name, auto&& value_of, bool percent, double y_max) {
        report::ChartSpec spec;
        spec.feature = name;
        spec.weeks = weeks;
        spec.labels = labels;
        spec.percent = percent;
        spec.y_max = y_max;
        for (const auto& row : table.rows) spec.values.push_back(value_of(row));
        report::write_text_file((data.out_dir / (data.course + "-" + name + ".svg")).string(),
                                report::render_chart(spec));
    };
    using Row = features::ResourceFeatureRow;
    chart("active", [](const Row& r) {
        return features::Nullable{static_cast<double>(r.active_count), true};
    }, false, static_cast<double>(table.cohort_size));
    chart("drop", [](const Row& r) { return r.drop; }, true, 0);
    chart("skip", [](const Row& r) { return r.skip; }, true, 0);
    chart("peek", [](const Row& r) { return r.peek; }, true, 0);
    chart("early", [](const Row& r) { return r.early; }, true, 0);
    chart("late", [](const Row& r) { return r.late; }, true, 0);
    chart("back", [](const Row& r) { return r.back; }, true, 0);
}

void write_alignment_outputs(const PipelineData& data, const alignment::AlignmentTable& table,
                             bool charts) {
    std::ostringstream csv;
    report::write_alignment_csv(table, csv);
    report::write_text_file((data.out_dir / (data.course + "-alignment.csv")).string(), csv.str());
    std::ostringstream js;
    report::write_alignment_json(table, js);
    report::write_text_file((data.out_dir / (data.course + "-alignment.json")).string(), js.str());

    if (!charts) return;
    const auto weeks = resource_weeks(data.cohort);
    const auto labels = resource_labels(data.cohort);
    auto chart = [&](const std::string& name, auto&& value_of, bool percent, double y_max) {
        report::ChartSpec spec;
        spec.feature = "alignment-" + name;
        spec.weeks = weeks;
        spec.labels = labels;
        spec.percent = percent;
        spec.y_max = y_max;
        for (const auto& row : table.rows) spec.values.push_back(value_of(row));
        report::write_text_file(
            (data.out_dir / (data.course + "-alignment-" + name + ".svg")).string(),
            report::render_chart(spec));
    };
    using Row = alignment::AlignmentFeatureRow;
    chart("active", [](const Row& r) {
        return features::Nullable{static_cast<double>(r.active_count), true};
    }, false, static_cast<double>(table.cohort_size));
    chart("drop", [](const Row& r) { return r.drop; }, true, 0);
    chart("early", [](const Row& r) { return r.early; }, true, 0);
    chart("late", [](const Row& r) { return r.late; }, true, 0);
}

int cmd_analyze(const AnalysisFlags& flags) {
    const auto data = load_pipeline(flags);
    const auto table = features::aggregate_features(data.cohort, flags.threads);
    write_feature_outputs(data, table, flags.charts);
    return 0;
}

int cmd_align(const AnalysisFlags& flags) {
    const auto data = load_pipeline(flags);
    const auto model = alignment::build_model(data.cohort.curriculum);
    const auto alignments = alignment::align_cohort(data.cohort, model, flags.threads);
    const auto table = alignment::aggregate_alignment(data.cohort, alignments);
    write_alignment_outputs(data, table, flags.charts);
    return 0;
}

int cmd_compare(const AnalysisFlags& flags) {
    const auto data = load_pipeline(flags);
    const auto outcomes = features::evaluate_cohort(data.cohort, flags.threads);
    const auto feature_table = features::aggregate_outcomes(data.cohort, outcomes);
    const auto model = alignment::build_model(data.cohort.curriculum);
    const auto alignments = alignment::align_cohort(data.cohort, model, flags.threads);
    const auto alignment_table = alignment::aggregate_alignment(data.cohort, alignments);
    const auto comparison =
        alignment::compare(data.cohort, feature_table, alignment_table, outcomes, alignments);

    write_feature_outputs(data, feature_table, flags.charts);
    write_alignment_outputs(data, alignment_table, flags.charts);
    std::ostringstream csv;
    report::write_comparison_csv(comparison, csv);
    report::write_text_file((data.out_dir / (data.course + "-comparison.csv")).string(), csv.str());
    std::ostringstream js;
    report::write_comparison_json(comparison, js);
    report::write_text_file((data.out_dir / (data.course + "-comparison.json")).string(), js.str());
    return 0;
}

struct SimulateFlags {
    std::string params_path;
    std::string out_path = "simulated.csv";
    std::uint64_t seed = 0;
    bool seed_given = false;
};

int cmd_simulate(const SimulateFlags& flags) {
    synth::GeneratorParams params;
    if (!flags.params_path.empty()) {
        try {
            params = synth::params_from_json_file(flags.params_path);
        } catch (const std::invalid_argument& e) {
            throw ingest::ValidationError(e.what());
        }
    }
    if (flags.seed_given) params.seed = flags.seed;

    const auto generated = synth::generate_cohort(params);

    const fs::path out_path(flags.out_path);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    std::ostringstream log_csv;
    ingest::serialize_step_activity(generated.log, log_csv);
    report::write_text_file(out_path.string(), log_csv.str());

    std::string base = flags.out_path;
    if (base.size() > 4 && base.substr(base.size() - 4) == ".csv") base.resize(base.size() - 4);
    report::write_text_file(base + ".truth.json", synth::ground_truth_to_json(generated.truth));

    const auto curriculum = synth::curriculum_for(params);
    std::string curriculum_csv = "resource,type\n";
    for (const auto& r : curriculum.resources) curriculum_csv += r.str() + ",\n";
    report::write_text_file(base + ".curriculum.csv", curriculum_csv);

    std::cout << "log=" << flags.out_path << " learners=" << params.n_learners
              << " resources=" << params.resource_count << '\n';
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Resource usage analysis for FutureLearn step-activity logs", "ruaf"};
    app.require_subcommand(1);

    AnalysisFlags analyze_flags, align_flags, compare_flags;
    auto* analyze = app.add_subcommand("analyze", "compute the per-resource feature table");
    add_analysis_flags(analyze, analyze_flags);
    auto* align = app.add_subcommand("align", "compute the alignment-based feature table");
    add_analysis_flags(align, align_flags);
    auto* compare = app.add_subcommand("compare", "run both analyses and compare them");
    add_analysis_flags(compare, compare_flags);

    SimulateFlags simulate_flags;
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic log with ground truth");
    simulate->add_option("--params", simulate_flags.params_path, "generator parameters JSON");
    auto* seed_opt = simulate->add_option("--seed", simulate_flags.seed, "override the seed");
    simulate->add_option("--out", simulate_flags.out_path, "output log path (default simulated.csv)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }
    simulate_flags.seed_given = seed_opt->count() > 0;

    try {
        if (analyze->parsed()) return cmd_analyze(analyze_flags);
        if (align->parsed()) return cmd_align(align_flags);
        if (compare->parsed()) return cmd_compare(compare_flags);
        if (simulate->parsed()) return cmd_simulate(simulate_flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace ruaf::cli
