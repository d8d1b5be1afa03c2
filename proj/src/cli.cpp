#include "sketchml/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sketchml/trace.hpp"

namespace sketchml {

namespace {

DataFormat infer_format(const std::string& source, const std::optional<std::string>& flag) {
    if (flag) {
        if (*flag == "csv") return DataFormat::csv;
        throw Error("cli", "unsupported format '" + *flag + "' (supported: csv)");
    }
    const auto dot = source.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : source.substr(dot + 1);
    if (ext == "csv" || ext.empty()) return DataFormat::csv;
    throw Error("cli", "cannot infer format from extension '." + ext + "'; pass --format");
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
    RunConfig config;
    std::optional<std::string> format_flag;
    std::string label_col = "last";
    std::string feature_select = "all";
    std::optional<std::uint64_t> seed_flag;
    std::optional<double> budget_seconds;
    std::optional<std::size_t> max_evals;
    bool has_header = false, no_header = false;

    CLI::App app{"search a classifier/hyperparameter space for a labeled CSV and predict"};
    app.add_option("--source", config.source, "labeled training CSV")->required();
    app.add_option("--test-source", config.test_source, "unlabeled CSV to predict");
    app.add_option("--format", format_flag, "input format (csv)");
    app.add_flag("--has-header", has_header, "first row is a header");
    app.add_flag("--no-header", no_header, "first row is data");
    app.add_option("--label-col", label_col, "label column: zero-based index or 'last'");
    app.add_option("--k", config.k, "cross-validation folds (>= 2)");
    app.add_option("--seed", seed_flag, "random seed");
    app.add_option("--budget-seconds", budget_seconds, "wall-clock budget");
    app.add_option("--max-evals", max_evals, "evaluation-count budget");
    app.add_option("--feature-select", feature_select, "all | variance");
    app.add_option("--out", config.out_path, "predictions CSV path");
    app.add_option("--trace", config.trace_path, "search trace path (JSON lines)");
    app.add_option("--report", config.report_path, "report path");
    app.add_flag("--verbose", config.verbose, "per-evaluation progress lines");

    app.parse(argc, argv);  // throws CLI::ParseError

    if (has_header && no_header)
        throw Error("cli", "--has-header and --no-header contradict each other");
    if (has_header) config.has_header = true;
    if (no_header) config.has_header = false;

    config.format = infer_format(config.source, format_flag);
    if (label_col == "last") {
        config.label_column = {true, 0};
    } else {
        try {
            config.label_column = {false, static_cast<std::size_t>(std::stoul(label_col))};
        } catch (const std::exception&) {
            throw Error("cli", "--label-col must be a zero-based index or 'last'");
        }
    }
    if (config.k < 2) throw Error("cli", "--k must be at least 2");

    if (seed_flag) {
        config.seed = *seed_flag;
    } else if (const char* env = std::getenv("SKETCHML_SEED")) {
        try {
            config.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw Error("cli", "SKETCHML_SEED is not an integer");
        }
    }
    if (budget_seconds) config.budget.wall_clock_seconds = *budget_seconds;
    if (max_evals) config.budget.max_evaluations = *max_evals;

    if (feature_select == "all")
        config.feature_select = FeatureSelectMode::all;
    else if (feature_select == "variance")
        config.feature_select = FeatureSelectMode::variance_threshold;
    else
        throw Error("cli", "--feature-select must be 'all' or 'variance'");
    return config;
}

int run(const RunConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();

    Dataset train;
    std::optional<Dataset> test;
    try {
        const RawTable table = acquire(config.source, config.format, config.has_header);
        train = split_label(table, config.label_column);
        if (config.test_source) {
            RawTable ttable = acquire(*config.test_source, config.format, config.has_header);
            // unlabeled: every column is a feature
            Dataset d;
            d.feature_names = ttable.column_names;
            d.features = Matrix(ttable.n_rows, ttable.n_cols);
            d.missing_mask.assign(ttable.n_rows * ttable.n_cols, 0);
            for (std::size_t i = 0; i < ttable.n_rows; ++i)
                for (std::size_t j = 0; j < ttable.n_cols; ++j) {
                    const std::string& cell = ttable.cells[i][j];
                    if (is_missing_marker(cell)) {
                        d.missing_mask[i * ttable.n_cols + j] = 1;
                        continue;
                    }
                    const auto v = parse_numeric(cell);
                    if (!v)
                        throw Error("ingest", "non-numeric cell '" + cell + "' at row " +
                                                  std::to_string(i));
                    d.features(i, j) = *v;
                }
            test = std::move(d);
        }
    } catch (const Error& e) {
        std::cerr << "error [" << e.module() << "]: " << e.what()
                  << "\nhint: check the input file, --label-col and header flags\n";
        return kExitInput;
    }

    try {
        DatasetProfile prof = profile(train);
        const FoldPlan plan = stratified_folds(*train.labels, config.k, config.seed);
        for (const auto& w : plan.warnings) std::cerr << "warning: " << w << "\n";
        separability_test(prof, train, plan, config.seed);

        SearchSpace space = default_space();
        const std::size_t initial_size = space.size();
        space = static_prune(space, prof);

        SearchOptions options;
        options.seed = config.seed;
        options.feature_select = config.feature_select;
        if (config.verbose)
            options.on_evaluation = [](const EvalRecord& r) {
                std::cerr << trace_line_for(r).dump() << "\n";
            };

        const ResultsLedger ledger = run_search(space, train, plan, config.budget, options);
        const EvalRecord& best = select_best(ledger);
        const double wall_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        if (config.trace_path) write_trace_file(*config.trace_path, ledger);

        ReportInputs rin;
        rin.profile = prof;
        rin.initial_space_size = initial_size;
        rin.post_static_size = ledger.initial_size;
        rin.ledger = &ledger;
        rin.total_wall_seconds = wall_s;
        const std::string report = render_report(rin);
        if (config.report_path) {
            std::ofstream out(*config.report_path);
            if (!out) throw Error("cli", "cannot write report: " + *config.report_path);
            out << report;
        } else {
            std::cout << report;
        }

        if (test) {
            const auto labels = final_predict(best, train, *test, config.seed);
            std::ostream* out = &std::cout;
            std::ofstream file;
            if (config.out_path) {
                file.open(*config.out_path);
                if (!file) throw Error("cli", "cannot write predictions: " + *config.out_path);
                out = &file;
            }
            *out << "label\n";
            for (const auto& label : labels) *out << label << "\n";
        }
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error [" << e.module() << "]: " << e.what()
                  << "\nhint: relax the budget or check the dataset shape\n";
        return kExitSearch;
    }
}

int cli_main(int argc, const char* const* argv) {
    try {
        return run(parse_args(argc, argv));
    } catch (const CLI::ParseError& e) {
        CLI::App app;
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error [" << e.module() << "]: " << e.what() << "\n";
        return kExitUsage;
    }
}

}  // namespace sketchml
