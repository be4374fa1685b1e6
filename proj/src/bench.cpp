#include "smartbayes/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "smartbayes/classify.hpp"
#include "smartbayes/parallel.hpp"
#include "smartbayes/rng.hpp"

namespace smartbayes {

namespace {

constexpr std::uint64_t kStreamSplit = 20;
constexpr int kMaxRedraws = 100;

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

int classifier_rank(Classifier c) { return static_cast<int>(c); }

const char* classifier_color(Classifier c) {
    switch (c) {
        case Classifier::NB: return "#1b9e77";
        case Classifier::LR: return "#d95f02";
        case Classifier::SB: return "#7570b3";
    }
    return "#000000";
}

}  // namespace

std::vector<std::size_t> default_size_ladder(std::size_t n, std::size_t p) {
    const double lo = 2.0 * (static_cast<double>(p) + 2.0);
    const double hi = 0.7 * static_cast<double>(n);
    if (lo >= hi) throw std::runtime_error("dataset too small for the default size ladder");
    std::vector<std::size_t> sizes;
    for (int k = 0; k < 8; ++k) {
        const double s = lo * std::pow(hi / lo, static_cast<double>(k) / 7.0);
        const std::size_t m = static_cast<std::size_t>(std::llround(s));
        if (sizes.empty() || m > sizes.back()) sizes.push_back(m);
    }
    return sizes;
}

LearningCurve run_benchmark(const Dataset& ds, const std::string& name,
                            const std::vector<std::size_t>& training_sizes, int replications,
                            std::uint64_t master_seed, const std::vector<Classifier>& classifiers,
                            int threads) {
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (training_sizes.empty()) throw std::invalid_argument("training sizes must be non-empty");
    if (classifiers.empty()) throw std::invalid_argument("classifier set must be non-empty");
    for (std::size_t m : training_sizes)
        if (m >= ds.n())
            throw std::runtime_error("training size " + std::to_string(m) +
                                     " is not below the dataset row count " + std::to_string(ds.n()));

    struct CellResult {
        std::vector<double> errors;
        int redraws = 0;
    };
    const std::size_t reps = static_cast<std::size_t>(replications);
    const std::size_t cells = training_sizes.size() * reps;
    std::vector<CellResult> results(cells);

    parallel_for(cells, threads, [&](std::size_t job) {
        const std::size_t size_idx = job / reps;
        const std::size_t rep = job % reps;
        const std::size_t m = training_sizes[size_idx];
        const std::uint64_t rep_seed = derive_seed(master_seed, m, rep);

        CellResult& cell = results[job];
        SplitResult parts;
        bool ok = false;
        for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
            try {
                parts = split(ds, SplitSpec{m, derive_seed(rep_seed, kStreamSplit,
                                                           static_cast<std::uint64_t>(attempt)),
                                            SplitMode::RandomMRestTest});
                ok = true;
                break;
            } catch (const std::runtime_error& e) {
                if (std::string(e.what()).find("degenerate") == std::string::npos) throw;
                ++cell.redraws;
            }
        }
        if (!ok)
            throw std::runtime_error("all replications degenerate at size " + std::to_string(m));
        for (Classifier c : classifiers)
            cell.errors.push_back(holdout_error(c, parts.train, parts.test));
    });

    LearningCurve curve;
    for (std::size_t ci = 0; ci < classifiers.size(); ++ci)
        for (std::size_t si = 0; si < training_sizes.size(); ++si) {
            std::vector<double> errs(reps);
            int redraws = 0;
            for (std::size_t rep = 0; rep < reps; ++rep) {
                const CellResult& cell = results[si * reps + rep];
                errs[rep] = cell.errors[ci];
                redraws += cell.redraws;
            }
            const auto [mean, sd] = mean_sd(errs);
            curve.rows.push_back({name, classifiers[ci], training_sizes[si], mean, sd,
                                  replications, redraws});
        }
    std::sort(curve.rows.begin(), curve.rows.end(), [](const CurveRow& a, const CurveRow& b) {
        if (classifier_rank(a.classifier) != classifier_rank(b.classifier))
            return classifier_rank(a.classifier) < classifier_rank(b.classifier);
        return a.train_size < b.train_size;
    });
    return curve;
}

LearningCurve run_benchmark(const BenchConfig& cfg) {
    Dataset ds;
    const bool derives_labels =
        cfg.preprocess_rule && cfg.preprocess_rule->kind != PreprocessKind::DropNoncontinuous;
    if (derives_labels)
        ds = load_csv_unlabeled(cfg.data_path);
    else
        ds = load_csv(cfg.data_path, cfg.label_column, cfg.label_map);
    if (cfg.preprocess_rule) ds = preprocess(ds, *cfg.preprocess_rule);

    std::string name = cfg.dataset_name;
    if (name.empty()) name = std::filesystem::path(cfg.data_path).stem().string();
    const std::vector<std::size_t> sizes =
        cfg.training_sizes.empty() ? default_size_ladder(ds.n(), ds.p()) : cfg.training_sizes;
    return run_benchmark(ds, name, sizes, cfg.replications, cfg.master_seed, cfg.classifiers,
                         cfg.threads);
}

void emit_curve_csv(const LearningCurve& curve, const std::string& path) {
    std::vector<CurveRow> rows = curve.rows;
    std::sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
        if (classifier_rank(a.classifier) != classifier_rank(b.classifier))
            return classifier_rank(a.classifier) < classifier_rank(b.classifier);
        return a.train_size < b.train_size;
    });
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "dataset,classifier,train_size,mean_error,sd_error,replications,redraws\n";
    for (const auto& r : rows)
        out << r.dataset << ',' << classifier_name(r.classifier) << ',' << r.train_size << ','
            << fmt6(r.mean_error) << ',' << fmt6(r.sd_error) << ',' << r.replications << ','
            << r.redraws << '\n';
    if (!out) throw std::runtime_error("failed writing file: " + path);
}

LearningCurve parse_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty curve file: " + path);
    if (line != "dataset,classifier,train_size,mean_error,sd_error,replications,redraws")
        throw std::runtime_error("unrecognized curve header in " + path);
    LearningCurve curve;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 7) throw std::runtime_error("bad curve row: " + line);
        CurveRow row;
        row.dataset = cells[0];
        row.classifier = classifier_from_name(cells[1]);
        row.train_size = std::stoul(cells[2]);
        row.mean_error = std::stod(cells[3]);
        row.sd_error = std::stod(cells[4]);
        row.replications = std::stoi(cells[5]);
        row.redraws = std::stoi(cells[6]);
        curve.rows.push_back(std::move(row));
    }
    return curve;
}

void emit_svg_plot(const LearningCurve& curve, const std::string& path) {
    if (curve.rows.empty()) throw std::runtime_error("cannot plot an empty curve");

    std::map<Classifier, std::vector<const CurveRow*>> series;
    std::size_t min_m = curve.rows.front().train_size, max_m = min_m;
    double max_err = 0.0;
    for (const auto& r : curve.rows) {
        series[r.classifier].push_back(&r);
        min_m = std::min(min_m, r.train_size);
        max_m = std::max(max_m, r.train_size);
        max_err = std::max(max_err, r.mean_error);
    }
    for (auto& [c, rows] : series)
        std::sort(rows.begin(), rows.end(), [](const CurveRow* a, const CurveRow* b) {
            return a->train_size < b->train_size;
        });

    const double y_max = std::max(0.05, std::ceil(max_err / 0.05) * 0.05);
    const double width = 720.0, height = 480.0;
    const double left = 70.0, right = width - 150.0, top = 20.0, bottom = height - 50.0;
    const double x_span = max_m > min_m ? static_cast<double>(max_m - min_m) : 1.0;
    auto sx = [&](std::size_t m) {
        return left + (static_cast<double>(m - min_m) / x_span) * (right - left);
    };
    auto sy = [&](double e) { return bottom - (e / y_max) * (bottom - top); };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    // axes
    out << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(bottom) << "\" x2=\"" << fmt2(right)
        << "\" y2=\"" << fmt2(bottom) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(top) << "\" x2=\"" << fmt2(left)
        << "\" y2=\"" << fmt2(bottom) << "\" stroke=\"black\"/>\n";

    // y ticks
    for (int k = 0; k <= 4; ++k) {
        const double e = y_max * k / 4.0;
        const double y = sy(e);
        out << "<line x1=\"" << fmt2(left - 4) << "\" y1=\"" << fmt2(y) << "\" x2=\"" << fmt2(left)
            << "\" y2=\"" << fmt2(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt2(left - 8) << "\" y=\"" << fmt2(y + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmt2(e) << "</text>\n";
    }
    // x ticks at observed training sizes
    std::vector<std::size_t> ticks;
    for (const auto& r : curve.rows)
        if (std::find(ticks.begin(), ticks.end(), r.train_size) == ticks.end())
            ticks.push_back(r.train_size);
    std::sort(ticks.begin(), ticks.end());
    for (std::size_t m : ticks) {
        const double x = sx(m);
        out << "<line x1=\"" << fmt2(x) << "\" y1=\"" << fmt2(bottom) << "\" x2=\"" << fmt2(x)
            << "\" y2=\"" << fmt2(bottom + 4) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt2(x) << "\" y=\"" << fmt2(bottom + 18)
            << "\" font-size=\"12\" text-anchor=\"middle\">" << m << "</text>\n";
    }
    out << "<text x=\"" << fmt2((left + right) / 2) << "\" y=\"" << fmt2(height - 12)
        << "\" font-size=\"13\" text-anchor=\"middle\">training size</text>\n";
    out << "<text x=\"16\" y=\"" << fmt2((top + bottom) / 2)
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << fmt2((top + bottom) / 2) << ")\">mean misclassification rate</text>\n";

    // one polyline per classifier
    for (const auto& [c, rows] : series) {
        out << "<polyline fill=\"none\" stroke=\"" << classifier_color(c)
            << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i) out << ' ';
            out << fmt2(sx(rows[i]->train_size)) << ',' << fmt2(sy(rows[i]->mean_error));
        }
        out << "\"/>\n";
    }

    // legend
    double ly = top + 10.0;
    for (const auto& [c, rows] : series) {
        (void)rows;
        out << "<rect x=\"" << fmt2(right + 16) << "\" y=\"" << fmt2(ly - 9)
            << "\" width=\"18\" height=\"6\" fill=\"" << classifier_color(c) << "\"/>\n";
        out << "<text x=\"" << fmt2(right + 40) << "\" y=\"" << fmt2(ly)
            << "\" font-size=\"12\">" << classifier_name(c) << "</text>\n";
        ly += 20.0;
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("failed writing file: " + path);
}

}  // namespace smartbayes
