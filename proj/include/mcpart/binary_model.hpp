#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mcpart/dataset.hpp"

namespace mcpart {

// Linear two-class scorer.  The raw score is w.x + bias; the decision value
// maps it through the calibration sigmoid into (-1, 1):
//   r(x) = 2 * sigmoid(cal_scale * (w.x + bias) + cal_offset) - 1
struct BinaryModel {
    std::string name;
    std::vector<double> weights;
    double bias = 0.0;
    double cal_scale = 1.0;
    double cal_offset = 0.0;

    std::size_t dim() const { return weights.size(); }
};

struct LogisticConfig {
    double learning_rate = 0.5;
    int epochs = 300;
    double l2 = 1e-3;            // on the weights, not the bias
    std::uint64_t seed = 0;      // reserved; full-batch descent from zero is deterministic
};

// Full-batch gradient descent on the regularized logistic loss.  Both labels
// must be present; features must be finite.
BinaryModel train_logistic(const BinaryDataset& data, const LogisticConfig& config,
                           std::string name = "");

double raw_score(const BinaryModel& model, std::span<const double> x);

// Calibrated decision value, clamped just inside (-1, 1).
double decide(const BinaryModel& model, std::span<const double> x);

struct CalibrationResult {
    BinaryModel model;
    bool skipped = false;  // holdout was empty or single-class
};

// One-dimensional logistic fit of the labels on the raw scores (Newton
// iterations, small L2 on the scale only).  Replaces cal_scale/cal_offset.
CalibrationResult fit_calibration(const BinaryModel& model, const BinaryDataset& holdout);

// Plain-text key/value persistence, one file per model.
void save_binary_model(const BinaryModel& model, const std::filesystem::path& path);
BinaryModel load_binary_model(const std::filesystem::path& path);

}  // namespace mcpart
