#pragma once

#include <cstdint>
#include <vector>

namespace mcpart {

struct ConfusionMatrix {
    std::size_t n_classes = 0;
    std::vector<std::int64_t> counts;  // row = true class, column = predicted

    std::int64_t at(std::size_t truth, std::size_t predicted) const {
        return counts[truth * n_classes + predicted];
    }
    std::int64_t total() const;
};

ConfusionMatrix confusion(const std::vector<int>& predicted, const std::vector<int>& truth,
                          std::size_t n_classes);

double accuracy(const ConfusionMatrix& cm);

// Mutual information between truth and prediction divided by the entropy of
// the truth, natural logarithms, 0 log 0 = 0.  Throws NumericError when the
// truth carries a single class (zero entropy).
double uncertainty_coefficient(const ConfusionMatrix& cm);

// Root mean squared residual between probability vectors and one-hot truth:
//   sqrt( (1/n) sum_i sum_j (p_ij - delta_{j,y_i})^2 )
double brier(const std::vector<std::vector<double>>& probabilities,
             const std::vector<int>& truth);

// Winner-only variant: each sample contributes the two-component residual of
// (p_win, 1 - p_win) against the correctness indicator.
double brier_winner(const std::vector<double>& winner_probability,
                    const std::vector<bool>& correct);

}  // namespace mcpart
