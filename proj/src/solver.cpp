#include "mcpart/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mcpart/errors.hpp"

namespace mcpart {

namespace {

void check_pair(const CodingMatrix& A, const Vec& v, const char* what) {
    if (v.size() != A.n_partitions())
        throw std::invalid_argument(std::string(what) +
                                    ": vector length does not match partition count");
}

// Model outputs are clamped to [-1, 1] upstream; the solvers themselves only
// need finite targets, and synthetic out-of-range values are legitimate
// inputs for exercising the constrained paths.
void check_decisions(const Vec& r) {
    for (double v : r)
        if (!std::isfinite(v)) throw std::invalid_argument("decision values must be finite");
}

Eigen::MatrixXd to_eigen(const QMatrix& q) {
    Eigen::MatrixXd m(q.rows, q.cols);
    for (std::size_t i = 0; i < q.rows; ++i)
        for (std::size_t j = 0; j < q.cols; ++j) m(i, j) = q.at(i, j);
    return m;
}

Eigen::VectorXd to_eigen(const Vec& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vec from_eigen(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

// Negative entries within roundoff are clipped to zero and the vector
// renormalized; anything worse is left alone for the caller's asserts.
void clip_roundoff(Vec& p) {
    double sum = 0.0;
    bool clipped = false;
    for (double& v : p) {
        if (v < 0.0 && v >= -1e-9) {
            v = 0.0;
            clipped = true;
        }
        sum += v;
    }
    if (clipped && sum > 0.0)
        for (double& v : p) v /= sum;
}

}  // namespace

Vec forward(const CodingMatrix& A, const Vec& p) {
    if (p.size() != A.n_classes())
        throw std::invalid_argument("forward: probability length does not match class count");
    Vec r(A.n_partitions());
    for (std::size_t i = 0; i < A.n_partitions(); ++i) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < A.n_classes(); ++j) {
            const int a = A.at(i, j);
            num += a * p[j];
            den += std::abs(a) * p[j];
        }
        if (den <= 0.0)
            throw NumericError("forward: partition " + std::to_string(i) +
                               " has no probability mass on either side");
        r[i] = num / den;
    }
    return r;
}

QMatrix build_q(const CodingMatrix& A, const Vec& r) {
    check_pair(A, r, "build_q");
    QMatrix q;
    q.rows = A.n_partitions();
    q.cols = A.n_classes();
    q.data.resize(q.rows * q.cols);
    for (std::size_t i = 0; i < q.rows; ++i)
        for (std::size_t j = 0; j < q.cols; ++j) {
            const int a = A.at(i, j);
            q.data[i * q.cols + j] = a + (1 - std::abs(a)) * r[i];
        }
    return q;
}

namespace {

// Reduced system for min |Q p - r|^2 with p_k eliminated through
// sum(p) = 1, restricted to the free columns.
struct ReducedSystem {
    Eigen::MatrixXd m;        // rows x (free - 1)
    Eigen::VectorXd t;
    std::vector<std::size_t> vars;  // column -> original index
    std::size_t pivot;              // the eliminated index
};

ReducedSystem reduce(const Eigen::MatrixXd& q, const Eigen::VectorXd& r,
                     const std::vector<std::size_t>& free_vars) {
    ReducedSystem sys;
    sys.pivot = free_vars.back();  // largest free index
    sys.vars.assign(free_vars.begin(), free_vars.end() - 1);
    sys.m.resize(q.rows(), static_cast<Eigen::Index>(sys.vars.size()));
    for (std::size_t c = 0; c < sys.vars.size(); ++c)
        sys.m.col(static_cast<Eigen::Index>(c)) =
            q.col(static_cast<Eigen::Index>(sys.vars[c])) -
            q.col(static_cast<Eigen::Index>(sys.pivot));
    sys.t = r - q.col(static_cast<Eigen::Index>(sys.pivot));
    return sys;
}

}  // namespace

Vec solve_unconstrained(const CodingMatrix& A, const Vec& r, SolveInfo* info) {
    check_pair(A, r, "solve_unconstrained");
    check_decisions(r);
    const QMatrix qm = build_q(A, r);
    const Eigen::MatrixXd q = to_eigen(qm);
    const Eigen::VectorXd rv = to_eigen(r);

    std::vector<std::size_t> all(A.n_classes());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const ReducedSystem sys = reduce(q, rv, all);

    Eigen::VectorXd z;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys.m);
    qr.setThreshold(1e-10);
    if (qr.rank() == sys.m.cols()) {
        z = qr.solve(sys.t);
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys.m);
        z = cod.solve(sys.t);
        if (info) info->min_norm_fallback = true;
    }

    Vec p(A.n_classes(), 0.0);
    double sum = 0.0;
    for (std::size_t c = 0; c < sys.vars.size(); ++c) {
        p[sys.vars[c]] = z(static_cast<Eigen::Index>(c));
        sum += z(static_cast<Eigen::Index>(c));
    }
    p[sys.pivot] = 1.0 - sum;
    return p;
}

namespace {

double objective(const Eigen::MatrixXd& q, const Eigen::VectorXd& r,
                 const Eigen::VectorXd& p) {
    return (q * p - r).squaredNorm();
}

// Equality-constrained subproblem over the free variables; pinned variables
// stay at exactly zero.
Eigen::VectorXd solve_on_face(const Eigen::MatrixXd& q, const Eigen::VectorXd& r,
                              const std::vector<std::size_t>& free_vars) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(q.cols());
    if (free_vars.size() == 1) {
        p(static_cast<Eigen::Index>(free_vars[0])) = 1.0;
        return p;
    }
    const ReducedSystem sys = reduce(q, r, free_vars);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys.m);
    qr.setThreshold(1e-10);
    Eigen::VectorXd z;
    if (qr.rank() == sys.m.cols()) {
        z = qr.solve(sys.t);
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys.m);
        z = cod.solve(sys.t);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < sys.vars.size(); ++c) {
        p(static_cast<Eigen::Index>(sys.vars[c])) = z(static_cast<Eigen::Index>(c));
        sum += z(static_cast<Eigen::Index>(c));
    }
    p(static_cast<Eigen::Index>(sys.pivot)) = 1.0 - sum;
    return p;
}

}  // namespace

Vec solve_constrained_system(const QMatrix& qm, const Vec& target, SolveInfo* info) {
    if (target.size() != qm.rows)
        throw std::invalid_argument("solve_constrained_system: target length mismatch");
    const std::size_t n = qm.cols;
    if (n < 1) throw std::invalid_argument("solve_constrained_system: empty system");
    const Eigen::MatrixXd q = to_eigen(qm);
    const Eigen::VectorXd r = to_eigen(target);

    constexpr double kKktTol = 1e-8;
    constexpr double kFeasTol = 1e-12;
    const int max_iterations = 3 * static_cast<int>(n);

    // Feasible start: the simplex barycenter with nothing pinned.
    Eigen::VectorXd x = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / n);
    std::vector<bool> pinned(n, false);

    Eigen::VectorXd best = x;
    double best_objective = objective(q, r, x);
    int iterations = 0;

    auto free_list = [&] {
        std::vector<std::size_t> f;
        for (std::size_t j = 0; j < n; ++j)
            if (!pinned[j]) f.push_back(j);
        return f;
    };

    while (iterations < max_iterations) {
        ++iterations;
        const auto free_vars = free_list();
        const Eigen::VectorXd candidate = solve_on_face(q, r, free_vars);

        double min_free = std::numeric_limits<double>::infinity();
        for (std::size_t j : free_vars)
            min_free = std::min(min_free, candidate(static_cast<Eigen::Index>(j)));

        if (min_free >= -kFeasTol) {
            x = candidate;
            for (std::size_t j : free_vars)
                if (x(static_cast<Eigen::Index>(j)) < 0.0) x(static_cast<Eigen::Index>(j)) = 0.0;
            const double obj = objective(q, r, x);
            if (obj < best_objective) {
                best_objective = obj;
                best = x;
            }
            // KKT check: gradient must be flat on the face and point inward
            // on the pinned variables.
            const Eigen::VectorXd g = 2.0 * q.transpose() * (q * x - r);
            double lambda = 0.0;
            for (std::size_t j : free_vars) lambda -= g(static_cast<Eigen::Index>(j));
            lambda /= static_cast<double>(free_vars.size());
            std::size_t worst = n;
            double worst_mu = -kKktTol;
            for (std::size_t j = 0; j < n; ++j) {
                if (!pinned[j]) continue;
                const double mu = g(static_cast<Eigen::Index>(j)) + lambda;
                if (mu < worst_mu) {
                    worst_mu = mu;
                    worst = j;
                }
            }
            if (worst == n) {
                if (info) info->iterations = iterations;
                Vec out = from_eigen(x);
                clip_roundoff(out);
                return out;
            }
            pinned[worst] = false;  // release the most violated constraint
            continue;
        }

        // Step toward the candidate until the first free variable hits zero;
        // lowest index wins ties, which also rules out cycling.
        double alpha = 1.0;
        std::size_t blocker = n;
        for (std::size_t j : free_vars) {
            const double xj = x(static_cast<Eigen::Index>(j));
            const double cj = candidate(static_cast<Eigen::Index>(j));
            if (cj < -kFeasTol && xj > cj) {
                const double a = xj / (xj - cj);
                if (a < alpha - 1e-15) {
                    alpha = a;
                    blocker = j;
                }
            }
        }
        if (blocker == n) {
            // Numerical corner: no blocking variable found; accept candidate.
            x = candidate.cwiseMax(0.0);
        } else {
            x += alpha * (candidate - x);
            x(static_cast<Eigen::Index>(blocker)) = 0.0;
            pinned[blocker] = true;
        }
        for (std::size_t j = 0; j < n; ++j)
            if (pinned[j]) x(static_cast<Eigen::Index>(j)) = 0.0;
        const double obj = objective(q, r, x);
        if (obj < best_objective && x.minCoeff() >= -kFeasTol) {
            best_objective = obj;
            best = x;
        }
    }

    if (info) {
        info->budget_exhausted = true;
        info->iterations = iterations;
    }
    Vec out = from_eigen(best);
    clip_roundoff(out);
    return out;
}

Vec solve_constrained(const CodingMatrix& A, const Vec& r, SolveInfo* info) {
    check_pair(A, r, "solve_constrained");
    check_decisions(r);
    return solve_constrained_system(build_q(A, r), r, info);
}

Vec solve_one_vs_one(const Vec& r, std::size_t n_classes, SolveInfo* info) {
    if (n_classes < 2) throw std::invalid_argument("solve_one_vs_one: need >= 2 classes");
    const std::size_t n_pairs = n_classes * (n_classes - 1) / 2;
    if (r.size() != n_pairs)
        throw std::invalid_argument("solve_one_vs_one: expected one decision per class pair");
    check_decisions(r);

    // Homogeneous form q_ij = a_ij - r_i |a_ij| over the pair rows.
    QMatrix qm;
    qm.rows = n_pairs;
    qm.cols = n_classes;
    qm.data.assign(n_pairs * n_classes, 0.0);
    std::size_t row = 0;
    for (std::size_t j = 0; j < n_classes; ++j)
        for (std::size_t k = j + 1; k < n_classes; ++k, ++row) {
            qm.data[row * n_classes + j] = -1.0 - r[row];
            qm.data[row * n_classes + k] = 1.0 - r[row];
        }

    const Eigen::MatrixXd q = to_eigen(qm);
    const Eigen::Index n = static_cast<Eigen::Index>(n_classes);
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + 1, n + 1);
    kkt.topLeftCorner(n, n) = 2.0 * q.transpose() * q;
    kkt.topRightCorner(n, 1).setOnes();
    kkt.bottomLeftCorner(1, n).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) {
        if (info) info->kkt_fallback = true;
        return solve_constrained_system(qm, Vec(n_pairs, 0.0), info);
    }
    const Eigen::VectorXd sol = lu.solve(rhs);
    Vec p(n_classes);
    for (std::size_t j = 0; j < n_classes; ++j) p[j] = sol(static_cast<Eigen::Index>(j));
    clip_roundoff(p);
    return p;
}

Vec solve_one_vs_rest(const Vec& r) {
    if (r.size() < 2) throw std::invalid_argument("solve_one_vs_rest: need >= 2 decisions");
    check_decisions(r);
    const std::size_t n = r.size();
    Vec p(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = (r[i] + 1.0) / 2.0;
        sum += p[i];
    }
    const double shift = (1.0 - sum) / static_cast<double>(n);
    double min_p = std::numeric_limits<double>::infinity();
    for (double& v : p) {
        v += shift;
        min_p = std::min(min_p, v);
    }
    if (min_p < 0.0) {
        // Outside the simplex: hand over to the constrained minimizer of the
        // same one-vs-rest system.
        return solve_constrained(one_vs_rest(n), r);
    }
    return p;
}

Vec least_squares_raw(const CodingMatrix& A, const Vec& r) {
    check_pair(A, r, "least_squares_raw");
    Eigen::MatrixXd m(A.n_partitions(), A.n_classes());
    for (std::size_t i = 0; i < A.n_partitions(); ++i)
        for (std::size_t j = 0; j < A.n_classes(); ++j) m(i, j) = A.at(i, j);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
    return from_eigen(cod.solve(to_eigen(r)));
}

std::size_t vote(const CodingMatrix& A, const Vec& r) {
    check_pair(A, r, "vote");
    std::size_t winner = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < A.n_classes(); ++j) {
        double tally = 0.0;
        for (std::size_t i = 0; i < A.n_partitions(); ++i) tally += A.at(i, j) * r[i];
        if (tally > best) {
            best = tally;
            winner = j;
        }
    }
    return winner;
}

std::size_t decode_distance(const CodingMatrix& A, const Vec& r, DistanceMetric metric) {
    check_pair(A, r, "decode_distance");
    std::size_t winner = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < A.n_classes(); ++j) {
        double d = 0.0;
        for (std::size_t i = 0; i < A.n_partitions(); ++i) {
            const int a = A.at(i, j);
            if (metric == DistanceMetric::hamming) {
                const int s = r[i] >= 0.0 ? 1 : -1;
                d += std::abs(a - s) / 2.0;  // 0 match, 1 mismatch, 1/2 for zeros
            } else {
                const double diff = a - r[i];
                d += diff * diff;
            }
        }
        if (d < best) {
            best = d;
            winner = j;
        }
    }
    return winner;
}

struct StrictSolver::Impl {
    std::size_t n_partitions = 0;
    std::size_t n_classes = 0;
    Eigen::MatrixXd q;  // equals A entrywise
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    bool full_rank = false;
};

StrictSolver::StrictSolver(const CodingMatrix& A) {
    if (!A.is_strict())
        throw std::invalid_argument("StrictSolver: matrix must have no zero entries");
    auto impl = std::make_shared<Impl>();
    impl->n_partitions = A.n_partitions();
    impl->n_classes = A.n_classes();
    impl->q.resize(A.n_partitions(), A.n_classes());
    for (std::size_t i = 0; i < A.n_partitions(); ++i)
        for (std::size_t j = 0; j < A.n_classes(); ++j) impl->q(i, j) = A.at(i, j);

    Eigen::MatrixXd m(impl->q.rows(), impl->q.cols() - 1);
    for (Eigen::Index c = 0; c + 1 < impl->q.cols(); ++c)
        m.col(c) = impl->q.col(c) - impl->q.col(impl->q.cols() - 1);
    impl->qr.compute(m);
    impl->qr.setThreshold(1e-10);
    impl->full_rank = impl->qr.rank() == m.cols();
    if (!impl->full_rank) impl->cod.compute(m);
    impl_ = std::move(impl);
}

Vec StrictSolver::solve_unconstrained(const Vec& r, SolveInfo* info) const {
    const Impl& impl = *impl_;
    if (r.size() != impl.n_partitions)
        throw std::invalid_argument("StrictSolver: decision length mismatch");
    check_decisions(r);
    const Eigen::VectorXd t =
        to_eigen(r) - impl.q.col(static_cast<Eigen::Index>(impl.n_classes) - 1);
    Eigen::VectorXd z;
    if (impl.full_rank) {
        z = impl.qr.solve(t);
    } else {
        z = impl.cod.solve(t);
        if (info) info->min_norm_fallback = true;
    }
    Vec p(impl.n_classes);
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < impl.n_classes; ++j) {
        p[j] = z(static_cast<Eigen::Index>(j));
        sum += p[j];
    }
    p[impl.n_classes - 1] = 1.0 - sum;
    return p;
}

double kkt_residual(const QMatrix& qm, const Vec& target, const Vec& p) {
    if (p.size() != qm.cols || target.size() != qm.rows)
        throw std::invalid_argument("kkt_residual: dimension mismatch");
    const Eigen::MatrixXd q = to_eigen(qm);
    const Eigen::VectorXd x = to_eigen(p);
    const Eigen::VectorXd g = 2.0 * q.transpose() * (q * x - to_eigen(target));

    constexpr double kActive = 1e-7;
    double residual = std::abs(x.sum() - 1.0);
    double lambda = 0.0;
    std::size_t n_free = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        residual = std::max(residual, -p[j]);
        if (p[j] > kActive) {
            lambda -= g(static_cast<Eigen::Index>(j));
            ++n_free;
        }
    }
    if (n_free == 0) return std::numeric_limits<double>::infinity();
    lambda /= static_cast<double>(n_free);
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double stat = g(static_cast<Eigen::Index>(j)) + lambda;
        if (p[j] > kActive)
            residual = std::max(residual, std::abs(stat));
        else
            residual = std::max(residual, -stat);
    }
    return residual;
}

}  // namespace mcpart
