#include "mcpart/eval.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mcpart/errors.hpp"

namespace mcpart {

std::int64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

ConfusionMatrix confusion(const std::vector<int>& predicted, const std::vector<int>& truth,
                          std::size_t n_classes) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("confusion: prediction/truth length mismatch");
    ConfusionMatrix cm;
    cm.n_classes = n_classes;
    cm.counts.assign(n_classes * n_classes, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i], e = predicted[i];
        if (t < 0 || e < 0 || static_cast<std::size_t>(t) >= n_classes ||
            static_cast<std::size_t>(e) >= n_classes)
            throw DataError("confusion: label out of range at sample " + std::to_string(i));
        ++cm.counts[static_cast<std::size_t>(t) * n_classes + static_cast<std::size_t>(e)];
    }
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    const std::int64_t n = cm.total();
    if (n == 0) throw std::invalid_argument("accuracy: empty confusion matrix");
    std::int64_t hits = 0;
    for (std::size_t j = 0; j < cm.n_classes; ++j) hits += cm.at(j, j);
    return static_cast<double>(hits) / static_cast<double>(n);
}

double uncertainty_coefficient(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total == 0) throw std::invalid_argument("uncertainty_coefficient: empty matrix");
    const double n = static_cast<double>(total);

    std::vector<double> p_true(cm.n_classes, 0.0), p_est(cm.n_classes, 0.0);
    for (std::size_t t = 0; t < cm.n_classes; ++t)
        for (std::size_t e = 0; e < cm.n_classes; ++e) {
            const double p = static_cast<double>(cm.at(t, e)) / n;
            p_true[t] += p;
            p_est[e] += p;
        }

    double h_true = 0.0;
    for (double p : p_true)
        if (p > 0.0) h_true -= p * std::log(p);
    if (h_true == 0.0)
        throw NumericError("uncertainty_coefficient: truth has a single class");

    double info = 0.0;
    for (std::size_t t = 0; t < cm.n_classes; ++t)
        for (std::size_t e = 0; e < cm.n_classes; ++e) {
            const double p = static_cast<double>(cm.at(t, e)) / n;
            if (p > 0.0) info += p * std::log(p / (p_true[t] * p_est[e]));
        }
    return info / h_true;
}

double brier(const std::vector<std::vector<double>>& probabilities,
             const std::vector<int>& truth) {
    if (probabilities.size() != truth.size())
        throw std::invalid_argument("brier: prediction/truth length mismatch");
    if (probabilities.empty()) throw std::invalid_argument("brier: no samples");
    double sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto& p = probabilities[i];
        if (truth[i] < 0 || static_cast<std::size_t>(truth[i]) >= p.size())
            throw DataError("brier: truth label out of range at sample " + std::to_string(i));
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double d = p[j] - (static_cast<std::size_t>(truth[i]) == j ? 1.0 : 0.0);
            sum += d * d;
        }
    }
    return std::sqrt(sum / static_cast<double>(truth.size()));
}

double brier_winner(const std::vector<double>& winner_probability,
                    const std::vector<bool>& correct) {
    if (winner_probability.size() != correct.size())
        throw std::invalid_argument("brier_winner: length mismatch");
    if (winner_probability.empty()) throw std::invalid_argument("brier_winner: no samples");
    double sum = 0.0;
    for (std::size_t i = 0; i < correct.size(); ++i) {
        const double d = winner_probability[i] - (correct[i] ? 1.0 : 0.0);
        sum += 2.0 * d * d;  // (p - y)^2 + ((1-p) - (1-y))^2
    }
    return std::sqrt(sum / static_cast<double>(correct.size()));
}

}  // namespace mcpart
