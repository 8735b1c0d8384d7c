#pragma once

// Shared fixtures for the unit and acceptance suites: reference control
// files, displayed reference matrices, toy data generators, and brute-force
// oracles kept independent of the library's solver path.

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "mcpart/coding_matrix.hpp"
#include "mcpart/dataset.hpp"
#include "mcpart/rng.hpp"
#include "mcpart/solver.hpp"

namespace testutil {

using mcpart::CodingMatrix;
using mcpart::Dataset;
using mcpart::QMatrix;
using mcpart::Rng;
using mcpart::Vec;

// --- reference control files -------------------------------------------

inline const char* kFlatEightClass = R"(
  Row1 0 1 2 3 / 4 5 6 7;
  Row2 0 1 / 2 3;
  Row3 0 / 1;
  Row4 2 / 3;
  Row5 4 5 / 6 7;
  Row6 4 / 5;
  Row7 6 / 7;
  {0 1 2 3 4 5 6 7}
)";

inline const char* kTreeEightClass = R"(
  Row1 {
    Row2 {
      Row3 {0 1}
      Row4 {2 3}
    }
    Row5 {
      Row6 {4 5}
      Row7 {6 7}
    }
  }
)";

inline const char* kOneVsOneFourClass = R"(
  model01 0 / 1;
  model02 0 / 2;
  model03 0 / 3;
  model12 1 / 2;
  model13 1 / 3;
  model23 2 / 3;
  {0 1 2 3}
)";

inline const char* kOneVsRestFourClass = R"(
  model0 1 2 3 / 0;
  model1 0 2 3 / 1;
  model2 0 1 3 / 2;
  model3 0 1 2 / 3;
  {0 1 2 3}
)";

inline const char* kLandTree = R"(
  TreeVsField {
    EvergreenVsDeciduous {0 1}
    CornVsWheat {2 3}
  }
)";

inline const char* kNineClass = R"(
  TREESvsFIELD 0 / 1;
  TREESvsWATER 0 / 2;
  FIELDvsWATER3 1 / 2;
  {
    DECIDUOUSvsEVERGREEN 0 / 1;
    DECIDUOUSvsSHRUB 0 / 2;
    EVERGREENvsSHRUB 1 / 2;
    {1 2 3}
    CORNvsWHEAT 0 / 1;
    CORNvsLEGUME 0 / 2;
    WHEATvsLEGUME 1 / 2;
    {4 5 6}
    FRESHvsSALT 0 / 1;
    FRESHvsMARSH 0 / 2;
    SALTvsMARSH 1 / 2;
    {7 8 9}
  }
)";

inline const char* kShuttleHier = R"(
shuttle_hier {
  shuttle_hier.00 {
    0
    shuttle_hier.00.01 {
      1
      2
    }
  }
  shuttle_hier.01 {
    shuttle_hier.01.00 {
      3
      4
    }
    shuttle_hier.01.01 {
      5
      6
    }
  }
}
)";

inline const char* kShuttleEmpNested = R"(
shuttle_emp {
  shuttle_emp.00  {
    shuttle_emp.00.00 {
      shuttle_emp.00.00.00 {
        shuttle_emp.00.00.00.00 {
          shuttle_emp.00.00.00.00.00 {
            2
            1
          }
          5
        }
        6
      }
      3
    }
    4
  }
  0
}
)";

inline const char* kShuttleEmpFlat = R"(
shuttle_emp 0 1 2 3 4 5 / 6;
shuttle_emp.00 0 1 2 3 4 / 5;
shuttle_emp.00.00 0 1 2 3 / 4;
shuttle_emp.00.00.00 0 1 2 / 3;
shuttle_emp.00.00.00.00 0 1 / 2;
shuttle_emp.00.00.00.00.00 0 / 1;
{ 2 1 6 5 3 4 0}
)";

// Repeats one binary name across distinct partitions; must be rejected.
inline const char* kShuttleAdjDuplicateNames = R"(
shuttle_adj-00 0 / 1 2 3 4 5 6;
shuttle_adj-00 0 1 / 2 3 4 5 6;
shuttle_adj-00 0 1 2 / 3 4 5 6;
shuttle_adj-00 0 1 2 3 / 4 5 6;
shuttle_adj-00 0 1 2 3 4 / 5 6;
shuttle_adj-00 0 1 2 3 4 5 / 6;
{0 1 2 3 4 5 6}
)";

inline std::vector<const char*> reference_listings() {
    return {kFlatEightClass, kTreeEightClass, kOneVsOneFourClass, kOneVsRestFourClass,
            kLandTree,       kNineClass,      kShuttleHier,       kShuttleEmpNested,
            kShuttleEmpFlat};
}

// --- displayed reference matrices ---------------------------------------

inline CodingMatrix one_vs_rest_4_reference() {
    return CodingMatrix::from_rows({{1, -1, -1, -1},
                                    {-1, 1, -1, -1},
                                    {-1, -1, 1, -1},
                                    {-1, -1, -1, 1}});
}

inline CodingMatrix one_vs_one_4_reference() {
    return CodingMatrix::from_rows({{-1, 1, 0, 0},
                                    {-1, 0, 1, 0},
                                    {-1, 0, 0, 1},
                                    {0, -1, 1, 0},
                                    {0, -1, 0, 1},
                                    {0, 0, -1, 1}});
}

inline CodingMatrix exhaustive_4_reference() {
    return CodingMatrix::from_rows({{-1, 1, 1, 1},
                                    {1, -1, 1, 1},
                                    {-1, -1, 1, 1},
                                    {1, 1, -1, 1},
                                    {-1, 1, -1, 1},
                                    {1, -1, -1, 1},
                                    {-1, -1, -1, 1}});
}

inline CodingMatrix adjacent_7_reference() {
    return CodingMatrix::from_rows({{-1, 1, 1, 1, 1, 1, 1},
                                    {-1, -1, 1, 1, 1, 1, 1},
                                    {-1, -1, -1, 1, 1, 1, 1},
                                    {-1, -1, -1, -1, 1, 1, 1},
                                    {-1, -1, -1, -1, -1, 1, 1},
                                    {-1, -1, -1, -1, -1, -1, 1}});
}

inline CodingMatrix hierarchical_8_reference() {
    return CodingMatrix::from_rows({{-1, -1, -1, -1, 1, 1, 1, 1},
                                    {-1, -1, 1, 1, 0, 0, 0, 0},
                                    {-1, 1, 0, 0, 0, 0, 0, 0},
                                    {0, 0, -1, 1, 0, 0, 0, 0},
                                    {0, 0, 0, 0, -1, -1, 1, 1},
                                    {0, 0, 0, 0, -1, 1, 0, 0},
                                    {0, 0, 0, 0, 0, 0, -1, 1}});
}

// --- toy data -------------------------------------------------------------

// Gaussian blobs, one class per mean, isotropic sigma.
inline Dataset make_blobs(const std::vector<std::vector<double>>& means,
                          std::size_t per_class, double sigma, std::uint64_t seed) {
    Rng rng(seed);
    Dataset data;
    data.n_features = means.front().size();
    data.n_classes = means.size();
    for (std::size_t c = 0; c < means.size(); ++c)
        for (std::size_t k = 0; k < per_class; ++k) {
            for (std::size_t d = 0; d < data.n_features; ++d)
                data.features.push_back(means[c][d] + sigma * rng.normal());
            data.labels.push_back(static_cast<int>(c));
        }
    return data;
}

// Interior point of the probability simplex.
inline Vec random_interior_probability(std::size_t n, Rng& rng) {
    Vec p(n);
    double sum = 0.0;
    for (double& v : p) {
        v = -std::log(1.0 - rng.uniform());  // exponential draw
        sum += v;
    }
    const double floor_mass = 0.05;
    for (double& v : p) v = (1.0 - floor_mass) * v / sum + floor_mass / n;
    return p;
}

// --- oracles ----------------------------------------------------------------

// Exhaustive search over the simplex grid with the given step; minimizes
// |Q p - r|^2.  Independent of the active-set implementation.
inline Vec grid_search_simplex(const QMatrix& q, const Vec& r, double step) {
    const std::size_t n = q.cols;
    const int ticks = static_cast<int>(std::lround(1.0 / step));
    Vec best;
    double best_cost = std::numeric_limits<double>::infinity();
    Vec p(n, 0.0);

    auto cost = [&](const Vec& candidate) {
        double total = 0.0;
        for (std::size_t i = 0; i < q.rows; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < n; ++j) dot += q.at(i, j) * candidate[j];
            const double d = dot - r[i];
            total += d * d;
        }
        return total;
    };

    // Recursive walk over grid points with coordinates summing to `ticks`.
    auto walk = [&](auto&& self, std::size_t dim, int remaining) -> void {
        if (dim + 1 == n) {
            p[dim] = remaining * step;
            const double c = cost(p);
            if (c < best_cost) {
                best_cost = c;
                best = p;
            }
            return;
        }
        for (int t = 0; t <= remaining; ++t) {
            p[dim] = t * step;
            self(self, dim + 1, remaining - t);
        }
    };
    walk(walk, 0, ticks);
    return best;
}

// Every strict two-sided partition of n classes, canonicalized to have the
// first entry equal to -1 (global sign is irrelevant).
inline std::set<std::vector<int>> all_strict_partitions(std::size_t n_classes) {
    std::set<std::vector<int>> out;
    const std::size_t total = std::size_t{1} << n_classes;
    for (std::size_t word = 0; word < total; ++word) {
        std::vector<int> row(n_classes);
        int pos = 0, neg = 0;
        for (std::size_t j = 0; j < n_classes; ++j) {
            row[j] = (word >> j) & 1 ? 1 : -1;
            (row[j] > 0 ? pos : neg)++;
        }
        if (pos == 0 || neg == 0) continue;
        if (row[0] == 1)
            for (int& v : row) v = -v;
        out.insert(row);
    }
    return out;
}

inline std::vector<int> canonical_row(std::span<const std::int8_t> row) {
    std::vector<int> out(row.begin(), row.end());
    auto first_nonzero = std::find_if(out.begin(), out.end(), [](int v) { return v != 0; });
    if (first_nonzero != out.end() && *first_nonzero > 0)
        for (int& v : out) v = -v;
    return out;
}

inline double linf(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

inline std::size_t argmax(const Vec& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace testutil
