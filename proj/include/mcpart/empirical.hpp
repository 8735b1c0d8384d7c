#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mcpart/coding_matrix.hpp"
#include "mcpart/dataset.hpp"

namespace mcpart {

enum class ClassMetric { centroid, hausdorff };
enum class Linkage { single, complete, pooled_hausdorff };

// Symmetric pairwise inter-class distances with a zero diagonal.
struct ClassDistanceMatrix {
    std::size_t n_classes = 0;
    ClassMetric metric = ClassMetric::centroid;
    std::vector<double> d;  // row-major n_classes x n_classes

    double at(std::size_t i, std::size_t j) const { return d[i * n_classes + j]; }
};

// Squared distance between the class means scaled by sqrt(s_i s_j), where
// s is the spread sqrt(sum |x - mu|^2) / (n - 1).  Zero spread with distinct
// means returns +infinity.  Both classes need at least two samples.
double centroid_distance(const Dataset& data, int class_a, int class_b);

// Symmetric Hausdorff distance between two point sets under the Euclidean
// point metric.
double hausdorff_distance(const std::vector<std::span<const double>>& a,
                          const std::vector<std::span<const double>>& b);

// Pairwise distances between all classes.  For the Hausdorff metric each
// class is first subsampled deterministically to at most `cap` points.
ClassDistanceMatrix distance_matrix(const Dataset& data, ClassMetric metric,
                                    std::size_t cap = 500, std::uint64_t seed = 0);

// Agglomerative merging of the two closest clusters until one remains.
// single/complete update the given distances; pooled_hausdorff recomputes the
// Hausdorff distance on the merged sample sets.  At each merge the cluster
// formed most recently becomes the left child (two original classes tie-break
// with the lower label on the left), so dominated datasets grow left chains.
// merge_distances, when given, receives the distance of each merge in order.
PartitionTree build_dendrogram(const ClassDistanceMatrix& distances, const Dataset& data,
                               Linkage linkage, std::size_t cap = 500,
                               std::uint64_t seed = 0,
                               std::vector<double>* merge_distances = nullptr);

}  // namespace mcpart
