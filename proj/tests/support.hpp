#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "smartbayes/dataset.hpp"
#include "smartbayes/rng.hpp"

namespace testsupport {

// Scratch directory removed at scope exit.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("smartbayes_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    out << contents;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Two shifted Gaussian classes on one feature: x | y=0 ~ N(mu0, sd^2),
// x | y=1 ~ N(mu1, sd^2), n per class.
inline void two_gaussian_sample(std::size_t n_per_class, double mu0, double mu1, double sd,
                                std::uint64_t seed, Eigen::VectorXd& x, Eigen::VectorXi& y) {
    smartbayes::Rng rng(seed);
    const Eigen::Index n = static_cast<Eigen::Index>(2 * n_per_class);
    x.resize(n);
    y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool one = i >= static_cast<Eigen::Index>(n_per_class);
        x[i] = (one ? mu1 : mu0) + sd * rng.normal();
        y[i] = one ? 1 : 0;
    }
}

// p-dimensional dataset with classes shifted along every coordinate.
inline smartbayes::Dataset shifted_gaussian_dataset(std::size_t n_per_class, std::size_t p,
                                                    double shift, std::uint64_t seed) {
    smartbayes::Rng rng(seed);
    smartbayes::Dataset ds;
    const Eigen::Index n = static_cast<Eigen::Index>(2 * n_per_class);
    ds.features.resize(n, static_cast<Eigen::Index>(p));
    ds.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool one = i >= static_cast<Eigen::Index>(n_per_class);
        ds.labels[i] = one ? 1 : 0;
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(p); ++j)
            ds.features(i, j) = (one ? shift : 0.0) + rng.normal();
    }
    for (std::size_t j = 0; j < p; ++j) ds.column_names.push_back("x" + std::to_string(j + 1));
    return ds;
}

}  // namespace testsupport
