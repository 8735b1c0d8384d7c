#include "mcpart/binary_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mcpart/errors.hpp"

namespace mcpart {

namespace {

constexpr double kDecisionClamp = 1.0 - 1e-12;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

BinaryModel train_logistic(const BinaryDataset& data, const LogisticConfig& config,
                           std::string name) {
    if (data.size() == 0) throw DataError("empty binary training set");
    bool has_neg = false, has_pos = false;
    for (int y : data.labels) {
        if (y != -1 && y != 1) throw std::invalid_argument("binary labels must be -1 or +1");
        has_neg = has_neg || y < 0;
        has_pos = has_pos || y > 0;
    }
    if (!has_neg || !has_pos) throw DataError("both classes required to train");
    for (double v : data.features)
        if (!std::isfinite(v)) throw DataError("non-finite feature value in training data");
    if (config.epochs < 1 || config.learning_rate <= 0.0 || config.l2 < 0.0)
        throw std::invalid_argument("bad logistic training configuration");

    const std::size_t dim = data.n_features;
    const double n = static_cast<double>(data.size());
    BinaryModel model;
    model.name = std::move(name);
    model.weights.assign(dim, 0.0);

    std::vector<double> grad(dim);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_bias = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto x = data.row(i);
            const double y = data.labels[i];
            double s = model.bias;
            for (std::size_t j = 0; j < dim; ++j) s += model.weights[j] * x[j];
            const double pull = -y * sigmoid(-y * s);  // d/ds log(1 + exp(-y s))
            for (std::size_t j = 0; j < dim; ++j) grad[j] += pull * x[j];
            grad_bias += pull;
        }
        for (std::size_t j = 0; j < dim; ++j) {
            grad[j] = grad[j] / n + config.l2 * model.weights[j];
            model.weights[j] -= config.learning_rate * grad[j];
        }
        model.bias -= config.learning_rate * grad_bias / n;
    }
    return model;
}

double raw_score(const BinaryModel& model, std::span<const double> x) {
    if (x.size() != model.dim())
        throw std::invalid_argument("feature dimension does not match model");
    double s = model.bias;
    for (std::size_t j = 0; j < x.size(); ++j) s += model.weights[j] * x[j];
    return s;
}

double decide(const BinaryModel& model, std::span<const double> x) {
    const double z = model.cal_scale * raw_score(model, x) + model.cal_offset;
    const double r = 2.0 * sigmoid(z) - 1.0;
    return std::clamp(r, -kDecisionClamp, kDecisionClamp);
}

CalibrationResult fit_calibration(const BinaryModel& model, const BinaryDataset& holdout) {
    CalibrationResult result{model, false};
    bool has_neg = false, has_pos = false;
    for (int y : holdout.labels) {
        has_neg = has_neg || y < 0;
        has_pos = has_pos || y > 0;
    }
    if (holdout.size() == 0 || !has_neg || !has_pos) {
        result.skipped = true;
        return result;
    }

    std::vector<double> scores(holdout.size());
    for (std::size_t i = 0; i < holdout.size(); ++i)
        scores[i] = raw_score(model, holdout.row(i));

    // Newton iterations for P(y=+1|s) = sigmoid(a s + b), ridge on a only so
    // constant scores settle at a = 0 with b carrying the base rate.
    const double n = static_cast<double>(holdout.size());
    const double lambda = 1e-3;
    double a = 1.0, b = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        double ga = lambda * a, gb = 0.0;
        double haa = lambda, hab = 0.0, hbb = 0.0;
        for (std::size_t i = 0; i < holdout.size(); ++i) {
            const double s = scores[i];
            const double p = sigmoid(a * s + b);
            const double target = holdout.labels[i] > 0 ? 1.0 : 0.0;
            const double e = p - target;
            const double w = std::max(p * (1.0 - p), 1e-12);
            ga += e * s / n;
            gb += e / n;
            haa += w * s * s / n;
            hab += w * s / n;
            hbb += w / n;
        }
        const double det = haa * hbb - hab * hab;
        if (std::abs(det) < 1e-300) break;
        const double da = (hbb * ga - hab * gb) / det;
        const double db = (haa * gb - hab * ga) / det;
        a -= da;
        b -= db;
        if (std::abs(da) + std::abs(db) < 1e-10) break;
    }
    result.model.cal_scale = a;
    result.model.cal_offset = b;
    return result;
}

void save_binary_model(const BinaryModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "binary-model 1\n";
    out << "name " << model.name << '\n';
    out << "dim " << model.dim() << '\n';
    out << "bias " << num(model.bias) << '\n';
    out << "cal_scale " << num(model.cal_scale) << '\n';
    out << "cal_offset " << num(model.cal_offset) << '\n';
    out << "weights";
    for (double w : model.weights) out << ' ' << num(w);
    out << '\n';
    if (!out) throw DataError("write failed for " + path.string());
}

BinaryModel load_binary_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    if (header != "binary-model 1")
        throw DataError(path.string() + ": not a binary model file");

    BinaryModel model;
    std::size_t dim = 0;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key == "name") {
            std::string rest;
            std::getline(ls, rest);
            const auto start = rest.find_first_not_of(' ');
            model.name = start == std::string::npos ? "" : rest.substr(start);
        } else if (key == "dim") {
            ls >> dim;
        } else if (key == "bias") {
            ls >> model.bias;
        } else if (key == "cal_scale") {
            ls >> model.cal_scale;
        } else if (key == "cal_offset") {
            ls >> model.cal_offset;
        } else if (key == "weights") {
            double w;
            while (ls >> w) model.weights.push_back(w);
        } else {
            throw DataError(path.string() + ": unknown key '" + key + "'");
        }
        if (ls.fail() && !ls.eof())
            throw DataError(path.string() + ": malformed value for '" + key + "'");
    }
    if (model.dim() != dim)
        throw DataError(path.string() + ": weight count does not match dim");
    return model;
}

}  // namespace mcpart
