#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "mcpart/coding_matrix.hpp"

namespace mcpart {

using Vec = std::vector<double>;

// System matrix coupling class probabilities to decision values:
//   q_ij = a_ij + (1 - |a_ij|) r_i
// so Q p = r on the probability simplex.  Q equals A when A is strict.
struct QMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // row-major

    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

// Diagnostics filled by the solvers.
struct SolveInfo {
    bool min_norm_fallback = false;  // unconstrained: reduced system was rank deficient
    bool budget_exhausted = false;   // constrained: returned best feasible iterate
    bool kkt_fallback = false;       // one-vs-one: singular system, rerouted
    int iterations = 0;
};

// r_i = sum_j a_ij p_j / sum_j |a_ij| p_j.  Throws NumericError when a row's
// denominator vanishes.  Serves as the oracle for the inverse solvers.
Vec forward(const CodingMatrix& A, const Vec& p);

QMatrix build_q(const CodingMatrix& A, const Vec& r);

// Minimizes |Q p - r|^2 subject to sum(p) = 1 only, by eliminating the last
// probability.  The output may carry negative entries; no clipping happens
// here.  A rank-deficient reduced system falls back to the minimum-norm
// least-squares solution and sets the flag.
Vec solve_unconstrained(const CodingMatrix& A, const Vec& r, SolveInfo* info = nullptr);

// Exact minimizer of |Q p - r|^2 subject to sum(p) = 1 and p >= 0, via a
// primal active-set method with the normalization handled by variable
// elimination.  Iterations are capped at 3 * n_classes; when the cap is hit
// the best feasible iterate is returned and the flag set.
Vec solve_constrained(const CodingMatrix& A, const Vec& r, SolveInfo* info = nullptr);

// Same active-set core for an arbitrary system matrix and target.
Vec solve_constrained_system(const QMatrix& q, const Vec& target, SolveInfo* info = nullptr);

// One-vs-one coupling: solves the homogeneous rearrangement
//   q_ij = a_ij - r_i |a_ij|,  Q p = 0
// with the normalization attached through a Lagrange multiplier, giving one
// dense (n_classes + 1)-dimensional linear solve.  Nonnegativity is not
// enforced; it holds automatically for this system.  r must follow
// one_vs_one(n_classes) row order.
Vec solve_one_vs_one(const Vec& r, std::size_t n_classes, SolveInfo* info = nullptr);

// One-vs-rest closed form p_i = (r_i + 1) / 2 with the Lagrange shift that
// restores sum(p) = 1; projected through the constrained path only when some
// entry comes out negative.
Vec solve_one_vs_rest(const Vec& r);

// Plain least squares |A p - r|^2 with no constraints at all.  Used to check
// the voting equivalence on orthogonal matrices.
Vec least_squares_raw(const CodingMatrix& A, const Vec& r);

// argmax of A^T r; ties go to the lowest class index.
std::size_t vote(const CodingMatrix& A, const Vec& r);

enum class DistanceMetric { hamming, euclidean };

// argmin over columns of the metric between r and the column.  Hamming snaps
// r to signs first (r >= 0 counts as +1) and scores a zero entry as half a
// mismatch.  Ties go to the lowest class index.
std::size_t decode_distance(const CodingMatrix& A, const Vec& r, DistanceMetric metric);

// Max violation of the KKT conditions of min |Q p - target|^2 on the simplex
// at the point p: stationarity on the support, multiplier sign off it, and
// primal feasibility.
double kkt_residual(const QMatrix& q, const Vec& target, const Vec& p);

// For a strict matrix the coupling system does not depend on r, so the
// reduced factorization can be built once and shared across queries.
class StrictSolver {
public:
    explicit StrictSolver(const CodingMatrix& A);  // requires A.is_strict()
    Vec solve_unconstrained(const Vec& r, SolveInfo* info = nullptr) const;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

}  // namespace mcpart
