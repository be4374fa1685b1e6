#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace smartbayes {

// Feature matrix with binary labels. Immutable by convention after
// construction; safe to share read-only across threads.
struct Dataset {
    Eigen::MatrixXd features;               // n x p
    Eigen::VectorXi labels;                 // n entries, each 0 or 1
    std::vector<std::string> column_names;  // p entries
    std::size_t dropped_rows = 0;           // rows discarded at ingestion

    std::size_t n() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t p() const { return static_cast<std::size_t>(features.cols()); }
};

// Throws if labels are non-binary, the matrix is empty, or sizes disagree.
void validate_dataset(const Dataset& ds);

// Loads a CSV with a header row. The label column is removed from the
// features; its values must be literal 0/1 or match label_map (negative
// class first). Rows with an unparseable or empty cell are dropped and
// counted in Dataset::dropped_rows; rows with the wrong cell count are an
// error.
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::optional<std::pair<std::string, std::string>>& label_map = std::nullopt);

// Loads every column as a feature and zero-fills the labels. Used when the
// labels are derived later by a preprocessing rule.
Dataset load_csv_unlabeled(const std::string& path);

// Loads only the named columns (in the given order), ignoring all others.
// Labels are zero-filled. Used to feed stored models whose input files may
// carry extra columns.
Dataset load_csv_columns(const std::string& path, const std::vector<std::string>& columns);

enum class PreprocessKind { DropNoncontinuous, QuartileFilter, MedianBinarize };

struct PreprocessRule {
    PreprocessKind kind;
    int min_distinct = 10;        // DropNoncontinuous: columns with fewer distinct values go
    std::string response_column;  // QuartileFilter / MedianBinarize

    static PreprocessRule drop_noncontinuous(int min_distinct = 10);
    static PreprocessRule quartile_filter(std::string response_column);
    static PreprocessRule median_binarize(std::string response_column);
};

// DropNoncontinuous removes near-discrete feature columns and keeps labels.
// QuartileFilter relabels from the response column: rows below Q1 become
// class 0, above Q3 class 1, everything in [Q1, Q3] is dropped. The response
// column leaves the feature set. MedianBinarize labels rows by response
// strictly greater than the median and also removes the response column.
Dataset preprocess(const Dataset& ds, const PreprocessRule& rule);

// Linear interpolation between order statistics (the "type 7" rule).
// prob in [0, 1]; values need not be sorted.
double quantile(std::vector<double> values, double prob);

enum class SplitMode { RandomMRestTest, HalfHalf };

struct SplitSpec {
    std::size_t train_size = 0;  // ignored for HalfHalf
    std::uint64_t seed = 0;
    SplitMode mode = SplitMode::RandomMRestTest;
};

struct SplitResult {
    Dataset train;
    Dataset test;
};

// Deterministic disjoint partition. Throws "degenerate training split" when
// the training part ends up single-class; callers redraw with a derived
// follow-up seed.
SplitResult split(const Dataset& ds, const SplitSpec& spec);

// Decision scores on the log-odds scale with their induced labels.
// predicted[i] == 1 exactly when scores[i] >= 0.
struct PredictionResult {
    Eigen::VectorXi predicted;
    Eigen::VectorXd scores;
};

PredictionResult to_prediction(const Eigen::VectorXd& scores);

double misclassification_rate(const Eigen::VectorXi& predicted, const Eigen::VectorXi& truth);

}  // namespace smartbayes
