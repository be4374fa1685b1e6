#pragma once

#include <string>
#include <variant>
#include <vector>

#include "smartbayes/classify.hpp"

namespace smartbayes {

// On-disk model document. Reals are serialized as full-precision decimal
// strings so a save/load round trip reproduces every parameter bit-exactly.
struct ModelFile {
    static constexpr int kSchemaVersion = 1;

    std::vector<std::string> feature_names;  // columns the model was fitted on
    std::variant<LogisticModel, NaiveBayesModel, SmartBayesModel> model;

    std::string kind() const;  // "lr", "nb" or "sb"
};

void save_model(const ModelFile& file, const std::string& path);

// Rejects unknown schema versions and malformed documents.
ModelFile load_model(const std::string& path);

}  // namespace smartbayes
