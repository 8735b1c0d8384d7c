#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace mcpart {

// Dense in-memory samples with integer class labels in [0, n_classes).
struct Dataset {
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    std::vector<double> features;  // row-major, size() * n_features
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * n_features, n_features};
    }
    void add(std::span<const double> x, int label);
    std::size_t class_count(int label) const;
};

// Two-class training set with labels in {-1, +1}.
struct BinaryDataset {
    std::size_t n_features = 0;
    std::vector<double> features;
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * n_features, n_features};
    }
};

// Sparse "label index:value" text, indices 1-based on disk and 0-based in
// memory.  Values are written with 17 significant digits so a round trip is
// bit exact.
Dataset load_libsvm(const std::filesystem::path& path);
void save_libsvm(const Dataset& data, const std::filesystem::path& path);

// Applies one ternary coding-matrix row over the dataset's classes: classes
// coded -1/+1 keep their samples with the new label, classes coded 0 are
// dropped.  Throws DataError when only one side ends up populated.
BinaryDataset relabel(const Dataset& data, std::span<const int> row);

// Per-class shuffle then split; returns (train, holdout).  Every class keeps
// at least one sample on each side.
std::pair<Dataset, Dataset> stratified_split(const Dataset& data,
                                             double holdout_fraction,
                                             std::uint64_t seed);

}  // namespace mcpart
