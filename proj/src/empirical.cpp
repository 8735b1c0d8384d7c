#include "mcpart/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mcpart/errors.hpp"
#include "mcpart/rng.hpp"

namespace mcpart {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        d += diff * diff;
    }
    return d;
}

std::vector<std::size_t> class_indices(const Dataset& data, int cls) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (data.labels[i] == cls) out.push_back(i);
    return out;
}

std::vector<std::span<const double>> rows_of(const Dataset& data,
                                             const std::vector<std::size_t>& indices) {
    std::vector<std::span<const double>> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(data.row(i));
    return out;
}

}  // namespace

double centroid_distance(const Dataset& data, int class_a, int class_b) {
    const auto ia = class_indices(data, class_a);
    const auto ib = class_indices(data, class_b);
    if (ia.size() < 2 || ib.size() < 2)
        throw DataError("centroid_distance: both classes need at least 2 samples");

    const std::size_t dim = data.n_features;
    auto moments = [&](const std::vector<std::size_t>& idx) {
        std::vector<double> mu(dim, 0.0);
        for (std::size_t i : idx) {
            const auto x = data.row(i);
            for (std::size_t k = 0; k < dim; ++k) mu[k] += x[k];
        }
        for (double& v : mu) v /= static_cast<double>(idx.size());
        double scatter = 0.0;
        for (std::size_t i : idx) {
            const auto x = data.row(i);
            for (std::size_t k = 0; k < dim; ++k) {
                const double diff = x[k] - mu[k];
                scatter += diff * diff;
            }
        }
        const double spread = std::sqrt(scatter) / static_cast<double>(idx.size() - 1);
        return std::pair{mu, spread};
    };

    const auto [mu_a, spread_a] = moments(ia);
    const auto [mu_b, spread_b] = moments(ib);
    double mean_gap = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double diff = mu_b[k] - mu_a[k];
        mean_gap += diff * diff;
    }
    if (mean_gap == 0.0) return 0.0;
    const double denom = std::sqrt(spread_a * spread_b);
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return mean_gap / denom;
}

double hausdorff_distance(const std::vector<std::span<const double>>& a,
                          const std::vector<std::span<const double>>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("hausdorff_distance: point sets must be nonempty");
    auto directed = [](const auto& from, const auto& to) {
        double worst = 0.0;
        for (const auto& x : from) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& y : to) nearest = std::min(nearest, squared_distance(x, y));
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    return std::sqrt(std::max(directed(a, b), directed(b, a)));
}

namespace {

std::vector<std::size_t> subsample(std::vector<std::size_t> indices, std::size_t cap,
                                   Rng& rng) {
    if (indices.size() <= cap) return indices;
    rng.shuffle(indices);
    indices.resize(cap);
    std::sort(indices.begin(), indices.end());
    return indices;
}

}  // namespace

ClassDistanceMatrix distance_matrix(const Dataset& data, ClassMetric metric,
                                    std::size_t cap, std::uint64_t seed) {
    if (data.n_classes < 2) throw std::invalid_argument("distance_matrix: need >= 2 classes");
    if (cap < 1) throw std::invalid_argument("distance_matrix: cap must be positive");

    ClassDistanceMatrix out;
    out.n_classes = data.n_classes;
    out.metric = metric;
    out.d.assign(data.n_classes * data.n_classes, 0.0);

    std::vector<std::vector<std::size_t>> members(data.n_classes);
    Rng rng(seed);
    for (std::size_t c = 0; c < data.n_classes; ++c) {
        auto idx = class_indices(data, static_cast<int>(c));
        if (idx.empty())
            throw DataError("distance_matrix: class " + std::to_string(c) + " has no samples");
        members[c] = metric == ClassMetric::hausdorff ? subsample(std::move(idx), cap, rng)
                                                      : std::move(idx);
    }

    for (std::size_t i = 0; i < data.n_classes; ++i)
        for (std::size_t j = i + 1; j < data.n_classes; ++j) {
            const double d = metric == ClassMetric::centroid
                                 ? centroid_distance(data, static_cast<int>(i),
                                                     static_cast<int>(j))
                                 : hausdorff_distance(rows_of(data, members[i]),
                                                      rows_of(data, members[j]));
            out.d[i * data.n_classes + j] = d;
            out.d[j * data.n_classes + i] = d;
        }
    return out;
}

PartitionTree build_dendrogram(const ClassDistanceMatrix& distances, const Dataset& data,
                               Linkage linkage, std::size_t cap, std::uint64_t seed,
                               std::vector<double>* merge_distances) {
    const std::size_t n = distances.n_classes;
    if (n < 2) throw std::invalid_argument("build_dendrogram: need >= 2 classes");

    struct Cluster {
        PartitionTree tree;
        int min_member;
        int birth;                         // merge step; 0 for the original classes
        std::vector<std::size_t> samples;  // only kept for pooled recomputation
    };

    Rng rng(seed);
    std::vector<Cluster> clusters;
    for (std::size_t c = 0; c < n; ++c) {
        Cluster cl{PartitionTree::leaf(static_cast<int>(c)), static_cast<int>(c), 0, {}};
        if (linkage == Linkage::pooled_hausdorff) {
            auto idx = class_indices(data, static_cast<int>(c));
            if (idx.empty())
                throw DataError("build_dendrogram: class " + std::to_string(c) +
                                " has no samples");
            cl.samples = subsample(std::move(idx), cap, rng);
        }
        clusters.push_back(std::move(cl));
    }

    // Current pairwise distances, row-major over the live cluster list.
    std::vector<std::vector<double>> dist(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) dist[i][j] = distances.at(i, j);

    for (int step = 1; clusters.size() > 1; ++step) {
        std::size_t bi = 0, bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < clusters.size(); ++i)
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                const double d = dist[i][j];
                const auto key = std::pair{clusters[i].min_member, clusters[j].min_member};
                const auto best_key =
                    std::pair{clusters[bi].min_member, clusters[bj].min_member};
                if (d < best || (d == best && key < best_key)) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }

        if (merge_distances) merge_distances->push_back(best);
        Cluster& a = clusters[bi];
        Cluster& b = clusters[bj];
        // Most recently formed cluster on the left; two original classes put
        // the lower label on the left.
        const bool a_left = a.birth != b.birth ? a.birth > b.birth
                                               : a.min_member < b.min_member;
        Cluster merged;
        merged.tree = a_left ? PartitionTree::internal(std::move(a.tree), std::move(b.tree))
                             : PartitionTree::internal(std::move(b.tree), std::move(a.tree));
        merged.min_member = std::min(a.min_member, b.min_member);
        merged.birth = step;
        if (linkage == Linkage::pooled_hausdorff) {
            merged.samples = std::move(a.samples);
            merged.samples.insert(merged.samples.end(), b.samples.begin(), b.samples.end());
        }

        std::vector<double> merged_row(clusters.size());
        for (std::size_t k = 0; k < clusters.size(); ++k) {
            if (k == bi || k == bj) continue;
            switch (linkage) {
                case Linkage::single:
                    merged_row[k] = std::min(dist[bi][k], dist[bj][k]);
                    break;
                case Linkage::complete:
                    merged_row[k] = std::max(dist[bi][k], dist[bj][k]);
                    break;
                case Linkage::pooled_hausdorff:
                    merged_row[k] = hausdorff_distance(rows_of(data, merged.samples),
                                                       rows_of(data, clusters[k].samples));
                    break;
            }
        }

        // Replace cluster bi with the merge, drop bj, and patch the distances.
        clusters[bi] = std::move(merged);
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
        merged_row.erase(merged_row.begin() + static_cast<std::ptrdiff_t>(bj));
        for (auto& row : dist) row.erase(row.begin() + static_cast<std::ptrdiff_t>(bj));
        dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(bj));
        for (std::size_t k = 0; k < clusters.size(); ++k) {
            dist[bi][k] = merged_row[k];
            dist[k][bi] = merged_row[k];
        }
        dist[bi][bi] = 0.0;
    }
    return std::move(clusters.front().tree);
}

}  // namespace mcpart
