#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smartbayes {

enum class Classifier { NB, LR, SB };

inline std::string classifier_name(Classifier c) {
    switch (c) {
        case Classifier::NB: return "nb";
        case Classifier::LR: return "lr";
        case Classifier::SB: return "sb";
    }
    return "?";
}

inline Classifier classifier_from_name(const std::string& name) {
    if (name == "nb") return Classifier::NB;
    if (name == "lr") return Classifier::LR;
    if (name == "sb") return Classifier::SB;
    throw std::runtime_error("unknown classifier: " + name);
}

struct CurveRow {
    std::string dataset;
    Classifier classifier;
    std::size_t train_size;
    double mean_error;
    double sd_error;
    int replications;
    int redraws;  // degenerate-split redraw tally for this cell
};

// (training size x classifier) -> misclassification summary over
// replications. The primary evaluation artifact.
struct LearningCurve {
    std::vector<CurveRow> rows;
};

// Mean and sample standard deviation (zero for a single replication).
inline std::pair<double, double> mean_sd(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("mean_sd of empty vector");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (static_cast<double>(values.size()) - 1.0))};
}

}  // namespace smartbayes
