#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcpart/binary_model.hpp"
#include "mcpart/control_lang.hpp"
#include "mcpart/dataset.hpp"
#include "mcpart/solver.hpp"

namespace mcpart {

// A control spec bound to its trained binaries and the class-label table.
struct MulticlassModel {
    ControlSpec spec;
    std::map<std::string, BinaryModel> binaries;
    std::vector<int> class_labels;  // flattened-matrix column -> dataset label
    std::size_t n_features = 0;
};

struct TrainConfig {
    LogisticConfig logistic;
    bool calibrate = false;            // Platt-style refit on a held-out slice
    double calibration_fraction = 0.2;
};

// Trains one binary per flattened partition row.  The spec's absolute leaf
// labels must be exactly the dataset's classes 0..n_classes-1, each with
// training samples present.
MulticlassModel train_multiclass(const ControlSpec& spec, const Dataset& data,
                                 const TrainConfig& config);

enum class Method { vote, unconstrained, constrained, one_vs_one_inverse, recursive };

Method method_from_string(const std::string& name);
std::string method_name(Method method);

struct Prediction {
    int label = -1;
    std::vector<double> probabilities;  // indexed by dataset label; empty for
                                        // winner-only and vote output
    std::optional<double> winner_probability;
};

// Recursive descent of a pure tree spec: sign of each decision picks the
// child, the winner's probability is the product of (1 + |r|) / 2 along the
// path.  Returns (label, probability).
std::pair<int, double> solve_tree(const MulticlassModel& model, std::span<const double> x);

// Binds a model to its flattened coding matrix for repeated prediction.
// When the matrix is strict the reduced least-squares factorization is built
// once and reused across test points.
class Predictor {
public:
    explicit Predictor(const MulticlassModel& model);

    Prediction predict(std::span<const double> x, Method method) const;

    const CodingMatrix& matrix() const { return flat_.matrix; }
    const std::vector<int>& labels() const { return flat_.labels; }
    std::size_t n_classes() const { return flat_.labels.size(); }

private:
    Vec decisions(std::span<const double> x) const;

    const MulticlassModel& model_;
    FlattenResult flat_;
    std::vector<const BinaryModel*> row_models_;
    bool is_one_vs_one_ = false;
    bool is_pure_tree_ = false;
    struct StrictCache;
    std::shared_ptr<const StrictCache> strict_cache_;  // only for strict matrices
};

// Model directory layout: a "manifest" file carrying the header and the
// control text, plus one "<name>.model" file per binary.
void save_model(const MulticlassModel& model, const std::filesystem::path& dir);
MulticlassModel load_model(const std::filesystem::path& dir);

}  // namespace mcpart
