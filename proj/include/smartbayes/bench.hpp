#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smartbayes/curve.hpp"
#include "smartbayes/dataset.hpp"

namespace smartbayes {

struct BenchConfig {
    std::string data_path;
    std::string label_column;
    std::optional<std::pair<std::string, std::string>> label_map;
    std::optional<PreprocessRule> preprocess_rule;
    std::vector<std::size_t> training_sizes;  // empty selects the default ladder
    int replications = 200;
    std::uint64_t master_seed = 0;
    std::vector<Classifier> classifiers = {Classifier::NB, Classifier::LR, Classifier::SB};
    int threads = 1;
    std::string dataset_name;  // defaults to the file stem
};

// Geometric ladder of 8 training sizes from 2*(p+2) up to 70% of n.
std::vector<std::size_t> default_size_ladder(std::size_t n, std::size_t p);

// For each training size m and replication: split m rows for training and
// the rest for testing (redrawing degenerate single-class splits with
// derived follow-up seeds), fit each requested classifier, and aggregate the
// test misclassification rates. Deterministic in master_seed regardless of
// thread count.
LearningCurve run_benchmark(const BenchConfig& cfg);

// Same protocol on an already-loaded dataset.
LearningCurve run_benchmark(const Dataset& ds, const std::string& name,
                            const std::vector<std::size_t>& training_sizes, int replications,
                            std::uint64_t master_seed, const std::vector<Classifier>& classifiers,
                            int threads = 1);

// Header dataset,classifier,train_size,mean_error,sd_error,replications,redraws;
// rows sorted by (classifier, train_size); reals with 6 decimals.
void emit_curve_csv(const LearningCurve& curve, const std::string& path);

LearningCurve parse_curve_csv(const std::string& path);

// Static SVG: one polyline per classifier over (train_size, mean_error),
// labeled axes and a legend. Byte-identical output for a given curve.
void emit_svg_plot(const LearningCurve& curve, const std::string& path);

}  // namespace smartbayes
