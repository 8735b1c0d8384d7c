#include "mcpart/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mcpart/errors.hpp"
#include "mcpart/rng.hpp"

namespace mcpart {

namespace {

// Split a binary set into (train, calibration) keeping both labels on each
// side when possible.
std::pair<BinaryDataset, BinaryDataset> split_binary(const BinaryDataset& data,
                                                     double fraction,
                                                     std::uint64_t seed) {
    std::vector<std::size_t> neg, pos;
    for (std::size_t i = 0; i < data.size(); ++i)
        (data.labels[i] < 0 ? neg : pos).push_back(i);
    Rng rng(seed);
    BinaryDataset train, cal;
    train.n_features = cal.n_features = data.n_features;
    for (auto* group : {&neg, &pos}) {
        rng.shuffle(*group);
        std::size_t n_cal = static_cast<std::size_t>(
            std::llround(fraction * static_cast<double>(group->size())));
        n_cal = std::min(n_cal, group->size() > 1 ? group->size() - 1 : std::size_t{0});
        for (std::size_t k = 0; k < group->size(); ++k) {
            BinaryDataset& dst = k < n_cal ? cal : train;
            const auto x = data.row((*group)[k]);
            dst.features.insert(dst.features.end(), x.begin(), x.end());
            dst.labels.push_back(data.labels[(*group)[k]]);
        }
    }
    return {std::move(train), std::move(cal)};
}

}  // namespace

MulticlassModel train_multiclass(const ControlSpec& spec, const Dataset& data,
                                 const TrainConfig& config) {
    const FlattenResult flat = to_coding_matrix(spec);
    const std::size_t n_c = flat.labels.size();
    if (n_c != data.n_classes)
        throw DataError("control spec covers " + std::to_string(n_c) +
                        " classes but the dataset declares " +
                        std::to_string(data.n_classes));
    std::set<int> spec_labels(flat.labels.begin(), flat.labels.end());
    for (std::size_t c = 0; c < data.n_classes; ++c) {
        if (!spec_labels.count(static_cast<int>(c)))
            throw DataError("dataset class " + std::to_string(c) +
                            " is not covered by the control spec");
        if (data.class_count(static_cast<int>(c)) == 0)
            throw DataError("dataset has no samples for class " + std::to_string(c));
    }

    MulticlassModel model;
    model.spec = spec;
    model.class_labels = flat.labels;
    model.n_features = data.n_features;

    std::vector<int> class_row(data.n_classes);
    for (std::size_t i = 0; i < flat.matrix.n_partitions(); ++i) {
        // Matrix columns follow leaf order; spread the row over the labels.
        for (std::size_t j = 0; j < n_c; ++j)
            class_row[static_cast<std::size_t>(flat.labels[j])] = flat.matrix.at(i, j);

        BinaryDataset binary = relabel(data, class_row);
        BinaryModel trained;
        if (config.calibrate) {
            auto [fit_part, cal_part] =
                split_binary(binary, config.calibration_fraction,
                             config.logistic.seed + 0x9e3779b9u * (i + 1));
            trained = train_logistic(fit_part, config.logistic, flat.names[i]);
            trained = fit_calibration(trained, cal_part).model;
        } else {
            trained = train_logistic(binary, config.logistic, flat.names[i]);
        }
        model.binaries.emplace(flat.names[i], std::move(trained));
    }
    return model;
}

Method method_from_string(const std::string& name) {
    if (name == "vote") return Method::vote;
    if (name == "unconstrained") return Method::unconstrained;
    if (name == "constrained") return Method::constrained;
    if (name == "1v1-inverse") return Method::one_vs_one_inverse;
    if (name == "recursive") return Method::recursive;
    throw std::invalid_argument("unknown method '" + name + "'");
}

std::string method_name(Method method) {
    switch (method) {
        case Method::vote: return "vote";
        case Method::unconstrained: return "unconstrained";
        case Method::constrained: return "constrained";
        case Method::one_vs_one_inverse: return "1v1-inverse";
        case Method::recursive: return "recursive";
    }
    return "?";
}

namespace {

const BinaryModel& binary_by_name(const MulticlassModel& model, const std::string& name) {
    const auto it = model.binaries.find(name);
    if (it == model.binaries.end())
        throw DataError("model has no trained binary named '" + name + "'");
    return it->second;
}

}  // namespace

std::pair<int, double> solve_tree(const MulticlassModel& model, std::span<const double> x) {
    if (!is_pure_tree(model.spec))
        throw std::invalid_argument("recursive descent needs a pure tree spec");
    const Branch* node = &model.spec.root;
    double probability = 1.0;
    while (!node->is_leaf()) {
        const double r = decide(binary_by_name(model, node->name), x);
        if (r > 0.0) {
            probability *= (1.0 + r) / 2.0;
            node = &node->children[1];
        } else {  // ties descend left
            probability *= (1.0 - r) / 2.0;
            node = &node->children[0];
        }
    }
    return {node->cls, probability};
}

struct Predictor::StrictCache {
    StrictSolver solver;
    explicit StrictCache(const CodingMatrix& A) : solver(A) {}
};

Predictor::Predictor(const MulticlassModel& model)
    : model_(model), flat_(to_coding_matrix(model.spec)) {
    // probabilities are reported by label, so labels must be 0..n_classes-1
    std::set<int> labels(flat_.labels.begin(), flat_.labels.end());
    if (labels.size() != flat_.labels.size() || *labels.begin() != 0 ||
        static_cast<std::size_t>(*labels.rbegin()) + 1 != flat_.labels.size())
        throw DataError("model labels must cover 0.." +
                        std::to_string(flat_.labels.size() - 1) + " exactly");
    row_models_.reserve(flat_.names.size());
    for (const auto& name : flat_.names) row_models_.push_back(&binary_by_name(model, name));
    is_one_vs_one_ = flat_.matrix == one_vs_one(flat_.labels.size());
    is_pure_tree_ = is_pure_tree(model.spec);
    if (flat_.matrix.is_strict())
        strict_cache_ = std::make_shared<const StrictCache>(flat_.matrix);
}

Vec Predictor::decisions(std::span<const double> x) const {
    Vec r(row_models_.size());
    for (std::size_t i = 0; i < row_models_.size(); ++i) r[i] = decide(*row_models_[i], x);
    return r;
}

Prediction Predictor::predict(std::span<const double> x, Method method) const {
    if (x.size() != model_.n_features)
        throw std::invalid_argument("feature dimension does not match model");
    Prediction out;

    if (method == Method::recursive) {
        if (!is_pure_tree_)
            throw std::invalid_argument("recursive method requires a pure tree spec");
        const auto [label, probability] = solve_tree(model_, x);
        out.label = label;
        out.winner_probability = probability;
        return out;
    }
    if (method == Method::vote) {
        const Vec r = decisions(x);
        out.label = flat_.labels[vote(flat_.matrix, r)];
        return out;
    }

    Vec p_cols;
    const Vec r = decisions(x);
    switch (method) {
        case Method::unconstrained:
            p_cols = strict_cache_ ? strict_cache_->solver.solve_unconstrained(r)
                                   : solve_unconstrained(flat_.matrix, r);
            break;
        case Method::constrained:
            p_cols = solve_constrained(flat_.matrix, r);
            break;
        case Method::one_vs_one_inverse:
            if (!is_one_vs_one_)
                throw std::invalid_argument(
                    "1v1-inverse method requires a one-vs-one control spec");
            p_cols = solve_one_vs_one(r, n_classes());
            break;
        default:
            throw std::invalid_argument("unsupported method");
    }

    // Map column order to label order; argmax ties go to the lowest label.
    out.probabilities.assign(n_classes(), 0.0);
    for (std::size_t j = 0; j < p_cols.size(); ++j)
        out.probabilities[static_cast<std::size_t>(flat_.labels[j])] = p_cols[j];
    std::size_t best = 0;
    for (std::size_t j = 1; j < out.probabilities.size(); ++j)
        if (out.probabilities[j] > out.probabilities[best]) best = j;
    out.label = static_cast<int>(best);
    out.winner_probability = out.probabilities[best];
    return out;
}

namespace {
constexpr const char* kManifestName = "manifest";
}

void save_model(const MulticlassModel& model, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const FlattenResult flat = to_coding_matrix(model.spec);
    std::ofstream out(dir / kManifestName);
    if (!out) throw DataError("cannot write " + (dir / kManifestName).string());
    out << "multiclass-model 1\n";
    out << "n_classes " << flat.labels.size() << '\n';
    out << "n_features " << model.n_features << '\n';
    out << "labels";
    for (int label : model.class_labels) out << ' ' << label;
    out << '\n';
    out << "control:\n";
    out << print_control(model.spec);
    if (!out) throw DataError("write failed for model manifest");

    for (const auto& name : flat.names)
        save_binary_model(binary_by_name(model, name), dir / (name + ".model"));
}

MulticlassModel load_model(const std::filesystem::path& dir) {
    std::ifstream in(dir / kManifestName);
    if (!in) throw DataError("cannot open " + (dir / kManifestName).string());
    std::string line;
    std::getline(in, line);
    if (line != "multiclass-model 1")
        throw DataError((dir / kManifestName).string() + ": not a model manifest");

    MulticlassModel model;
    std::size_t n_classes = 0;
    while (std::getline(in, line)) {
        if (line == "control:") break;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "n_classes") {
            ls >> n_classes;
        } else if (key == "n_features") {
            ls >> model.n_features;
        } else if (key == "labels") {
            int label;
            while (ls >> label) model.class_labels.push_back(label);
        } else {
            throw DataError("manifest: unknown key '" + key + "'");
        }
        if (ls.fail() && !ls.eof()) throw DataError("manifest: malformed '" + key + "' line");
    }
    std::ostringstream control_text;
    control_text << in.rdbuf();
    model.spec = parse_control(control_text.str());

    const FlattenResult flat = to_coding_matrix(model.spec);
    if (flat.labels.size() != n_classes || model.class_labels != flat.labels)
        throw DataError("manifest label table does not match the control spec");
    for (const auto& name : flat.names)
        model.binaries.emplace(name, load_binary_model(dir / (name + ".model")));
    for (const auto& [name, binary] : model.binaries)
        if (binary.dim() != model.n_features)
            throw DataError("binary '" + name + "' dimension does not match manifest");
    return model;
}

}  // namespace mcpart
