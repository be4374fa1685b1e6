#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "smartbayes/bench.hpp"
#include "smartbayes/classify.hpp"
#include "smartbayes/model_io.hpp"
#include "smartbayes/simulate.hpp"

namespace {

using namespace smartbayes;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::size_t> parse_sizes(const std::string& list) {
    std::vector<std::size_t> sizes;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            const long v = std::stol(tok);
            if (v < 1) throw std::invalid_argument("not positive");
            sizes.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw UsageError("--sizes expects a comma-separated list of positive integers, got '" +
                             tok + "'");
        }
    }
    if (sizes.empty()) throw UsageError("--sizes list is empty");
    return sizes;
}

std::optional<std::pair<std::string, std::string>> parse_label_map(const std::string& arg) {
    if (arg.empty()) return std::nullopt;
    const auto pos = arg.find(':');
    if (pos == std::string::npos || pos == 0 || pos + 1 == arg.size())
        throw UsageError("--label-map expects NEG:POS");
    return std::make_pair(arg.substr(0, pos), arg.substr(pos + 1));
}

std::optional<PreprocessRule> parse_preprocess(const std::string& arg) {
    if (arg.empty() || arg == "none") return std::nullopt;
    if (arg == "drop-noncontinuous") return PreprocessRule::drop_noncontinuous();
    const auto pos = arg.find(':');
    if (pos != std::string::npos) {
        const std::string kind = arg.substr(0, pos);
        const std::string col = arg.substr(pos + 1);
        if (col.empty()) throw UsageError("--preprocess " + kind + " needs a column name");
        if (kind == "quartile-filter") return PreprocessRule::quartile_filter(col);
        if (kind == "median-binarize") return PreprocessRule::median_binarize(col);
    }
    throw UsageError(
        "--preprocess expects none|drop-noncontinuous|quartile-filter:COL|median-binarize:COL");
}

std::vector<Classifier> parse_classifiers(const std::string& list) {
    std::vector<Classifier> out;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(classifier_from_name(tok));
        } catch (const std::exception&) {
            throw UsageError("--classifiers expects a comma list drawn from nb,lr,sb");
        }
    }
    if (out.empty()) throw UsageError("--classifiers list is empty");
    return out;
}

struct GridSpec {
    double lo, hi;
    int steps;
};

GridSpec parse_grid(const std::string& arg) {
    GridSpec g;
    char extra;
    if (std::sscanf(arg.c_str(), "%lf:%lf:%d%c", &g.lo, &g.hi, &g.steps, &extra) != 3 ||
        g.steps < 2 || !(g.hi > g.lo))
        throw UsageError("--grid expects MIN:MAX:STEPS with MAX > MIN and STEPS >= 2");
    return g;
}

int run_bench(const std::string& data, const std::string& label_col, const std::string& label_map,
              const std::string& preprocess_arg, const std::string& sizes_arg, int reps,
              std::uint64_t seed, const std::string& classifiers_arg, const std::string& out,
              const std::string& svg, int threads) {
    if (reps < 1) throw UsageError("--reps must be >= 1");
    if (threads < 1) throw UsageError("--threads must be >= 1");
    BenchConfig cfg;
    cfg.data_path = data;
    cfg.label_column = label_col;
    cfg.label_map = parse_label_map(label_map);
    cfg.preprocess_rule = parse_preprocess(preprocess_arg);
    if (cfg.preprocess_rule && cfg.preprocess_rule->kind != PreprocessKind::DropNoncontinuous &&
        cfg.preprocess_rule->response_column != label_col)
        throw UsageError("--label-col must name the --preprocess response column");
    if (!sizes_arg.empty()) cfg.training_sizes = parse_sizes(sizes_arg);
    cfg.replications = reps;
    cfg.master_seed = seed;
    cfg.classifiers = parse_classifiers(classifiers_arg);
    cfg.threads = threads;

    const LearningCurve curve = run_benchmark(cfg);
    emit_curve_csv(curve, out);
    if (!svg.empty()) emit_svg_plot(curve, svg);
    return 0;
}

int run_simulate(const std::string& dist, double df, int p, const std::string& params_from,
                 const std::string& label_col, const std::string& label_map,
                 const std::string& sizes_arg, int reps, std::uint64_t seed,
                 const std::string& out, const std::string& svg, int threads) {
    if (dist != "gaussian" && dist != "t") throw UsageError("--dist expects gaussian or t");
    if (dist == "t" && !(df > 0.0)) throw UsageError("--dist t requires --df > 0");
    if (dist == "gaussian" && df > 0.0) throw UsageError("--df applies only to --dist t");
    if (reps < 1) throw UsageError("--reps must be >= 1");
    if (threads < 1) throw UsageError("--threads must be >= 1");

    SimulationPlan plan;
    if (!params_from.empty()) {
        if (label_col.empty()) throw UsageError("--params-from requires --label-col");
        const Dataset ds = load_csv(params_from, label_col, parse_label_map(label_map));
        std::tie(plan.class0, plan.class1) = estimate_class_params(ds);
    } else {
        if (p < 1) throw UsageError("--p must be a positive dimension");
        std::tie(plan.class0, plan.class1) = synthetic_class_params(static_cast<std::size_t>(p));
    }
    if (dist == "t") {
        plan.class0.df = df;
        plan.class1.df = df;
    }
    plan.training_sizes = parse_sizes(sizes_arg);
    plan.replications = reps;
    plan.master_seed = seed;
    plan.threads = threads;
    if (dist == "t") {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "t%g", df);
        plan.name = buf;
    } else {
        plan.name = "gaussian";
    }

    const LearningCurve curve = run_simulation(plan);
    emit_curve_csv(curve, out);
    if (!svg.empty()) emit_svg_plot(curve, svg);
    return 0;
}

void note_dropped_rows(const Dataset& ds) {
    if (ds.dropped_rows > 0)
        std::cerr << "note: dropped " << ds.dropped_rows
                  << " row(s) with missing or unparseable cells\n";
}

int run_fit(const std::string& data, const std::string& label_col, const std::string& label_map,
            const std::string& model_kind, const std::string& out) {
    const Dataset ds = load_csv(data, label_col, parse_label_map(label_map));
    note_dropped_rows(ds);
    ModelFile file;
    file.feature_names = ds.column_names;
    if (model_kind == "nb") {
        file.model = fit_naive_bayes(ds);
    } else if (model_kind == "lr") {
        file.model = fit_logistic(ds.features, ds.labels);
    } else if (model_kind == "sb") {
        const SmartBayesModel sb = fit_smart_bayes(ds);
        // per-feature weight summary; exp(coef) is the odds ratio per unit
        // increase of that log-density-ratio feature
        Eigen::Index col = 0;
        for (const auto& m : sb.ratio_models) {
            if (m.kind == RatioKind::Constant) continue;
            const double coef = sb.logistic.coefficients[col++];
            std::cerr << "feature " << ds.column_names[static_cast<std::size_t>(m.feature_index)]
                      << ": coefficient " << coef << ", odds ratio per unit z " << std::exp(coef)
                      << "\n";
        }
        file.model = sb;
    } else {
        throw UsageError("--model expects nb, lr or sb");
    }
    save_model(file, out);
    return 0;
}

int run_predict(const std::string& model_path, const std::string& data, const std::string& out) {
    const ModelFile file = load_model(model_path);
    const Dataset ds = load_csv_columns(data, file.feature_names);
    note_dropped_rows(ds);
    PredictionResult pred;
    if (const auto* lr = std::get_if<LogisticModel>(&file.model))
        pred = predict_logistic(*lr, ds.features);
    else if (const auto* nb = std::get_if<NaiveBayesModel>(&file.model))
        pred = predict_naive_bayes(*nb, ds.features);
    else
        pred = predict_smart_bayes(std::get<SmartBayesModel>(file.model), ds.features);

    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write file: " + out);
    os << "row,score,predicted\n";
    char buf[40];
    for (Eigen::Index i = 0; i < pred.scores.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.10g", pred.scores[i]);
        os << i << ',' << buf << ',' << pred.predicted[i] << '\n';
    }
    return 0;
}

int run_ratio(const std::string& data, const std::string& label_col, const std::string& label_map,
              const std::string& feature, const std::string& grid_arg, const std::string& out) {
    const GridSpec grid = parse_grid(grid_arg);
    const Dataset ds = load_csv(data, label_col, parse_label_map(label_map));
    note_dropped_rows(ds);
    auto it = std::find(ds.column_names.begin(), ds.column_names.end(), feature);
    if (it == ds.column_names.end()) throw std::runtime_error("feature not found: " + feature);
    const Eigen::VectorXd x = ds.features.col(it - ds.column_names.begin());

    const MarginalRatioModel spline_model = fit_marginal_ratio(x, ds.labels);
    const MarginalRatioModel gaussian_model = fit_gaussian_ratio(x, ds.labels);

    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write file: " + out);
    os << "x,z_spline,z_gaussian\n";
    char buf[40];
    for (int i = 0; i < grid.steps; ++i) {
        const double xv = grid.lo + (grid.hi - grid.lo) * i / (grid.steps - 1);
        std::snprintf(buf, sizeof(buf), "%.10g", xv);
        os << buf;
        std::snprintf(buf, sizeof(buf), "%.10g", eval_log_ratio(spline_model, xv));
        os << ',' << buf;
        std::snprintf(buf, sizeof(buf), "%.10g", eval_log_ratio(gaussian_model, xv));
        os << ',' << buf << '\n';
    }
    return 0;
}

int run_plot(const std::string& in, const std::string& out) {
    emit_svg_plot(parse_curve_csv(in), out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid classifier toolkit: logistic regression on spline-estimated "
                 "log-density-ratio features, with Naive Bayes and logistic baselines"};
    app.require_subcommand(1);

    std::string data, label_col, label_map, preprocess_arg, sizes_arg, classifiers_arg = "nb,lr,sb";
    std::string out, svg, dist, params_from, model_kind, model_path, feature, grid_arg, curve_in;
    int reps = 200, p = 0, threads = 1;
    std::uint64_t seed = 0;
    double df = 0.0;

    auto* bench = app.add_subcommand("bench", "Learning-curve benchmark on a CSV dataset");
    bench->add_option("--data", data, "input CSV path")->required();
    bench->add_option("--label-col", label_col, "label column name")->required();
    bench->add_option("--label-map", label_map, "NEG:POS label mapping");
    bench->add_option("--preprocess", preprocess_arg,
                      "none|drop-noncontinuous|quartile-filter:COL|median-binarize:COL");
    bench->add_option("--sizes", sizes_arg, "comma list of training sizes (default: ladder)");
    bench->add_option("--reps", reps, "replications per size (default 200)");
    bench->add_option("--seed", seed, "master seed");
    bench->add_option("--classifiers", classifiers_arg, "comma list from nb,lr,sb");
    bench->add_option("--out", out, "curve CSV output path")->required();
    bench->add_option("--svg", svg, "optional SVG plot path");
    bench->add_option("--threads", threads, "worker pool size (default 1)");

    auto* simulate = app.add_subcommand("simulate", "Learning curves on generated data");
    simulate->add_option("--dist", dist, "gaussian|t")->required();
    simulate->add_option("--df", df, "degrees of freedom for --dist t");
    simulate->add_option("--p", p, "dimension for the synthetic problem");
    simulate->add_option("--params-from", params_from, "CSV whose class geometry to mimic");
    simulate->add_option("--label-col", label_col, "label column for --params-from");
    simulate->add_option("--label-map", label_map, "NEG:POS label mapping for --params-from");
    simulate->add_option("--sizes", sizes_arg, "comma list of per-class draw counts")->required();
    simulate->add_option("--reps", reps, "replications per size (default 100)");
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--out", out, "curve CSV output path")->required();
    simulate->add_option("--svg", svg, "optional SVG plot path");
    simulate->add_option("--threads", threads, "worker pool size (default 1)");

    auto* fit = app.add_subcommand("fit", "Fit one classifier and save it");
    fit->add_option("--data", data, "input CSV path")->required();
    fit->add_option("--label-col", label_col, "label column name")->required();
    fit->add_option("--label-map", label_map, "NEG:POS label mapping");
    fit->add_option("--model", model_kind, "nb|lr|sb")->required();
    fit->add_option("--out", out, "model JSON output path")->required();

    auto* predict = app.add_subcommand("predict", "Score a CSV with a saved model");
    predict->add_option("--model", model_path, "model JSON path")->required();
    predict->add_option("--data", data, "input CSV path")->required();
    predict->add_option("--out", out, "prediction CSV output path")->required();

    auto* ratio = app.add_subcommand("ratio", "Emit one feature's log-density-ratio curves");
    ratio->add_option("--data", data, "input CSV path")->required();
    ratio->add_option("--label-col", label_col, "label column name")->required();
    ratio->add_option("--label-map", label_map, "NEG:POS label mapping");
    ratio->add_option("--feature", feature, "feature column name")->required();
    ratio->add_option("--grid", grid_arg, "MIN:MAX:STEPS evaluation grid")->required();
    ratio->add_option("--out", out, "ratio CSV output path")->required();

    auto* plot = app.add_subcommand("plot", "Render a curve CSV as SVG");
    plot->add_option("--in", curve_in, "curve CSV path")->required();
    plot->add_option("--out", out, "SVG output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    // reps default differs between subcommands
    if (simulate->parsed() && simulate->count("--reps") == 0) reps = 100;

    try {
        if (bench->parsed())
            return run_bench(data, label_col, label_map, preprocess_arg, sizes_arg, reps, seed,
                             classifiers_arg, out, svg, threads);
        if (simulate->parsed())
            return run_simulate(dist, df, p, params_from, label_col, label_map, sizes_arg, reps,
                                seed, out, svg, threads);
        if (fit->parsed()) return run_fit(data, label_col, label_map, model_kind, out);
        if (predict->parsed()) return run_predict(model_path, data, out);
        if (ratio->parsed())
            return run_ratio(data, label_col, label_map, feature, grid_arg, out);
        if (plot->parsed()) return run_plot(curve_in, out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
