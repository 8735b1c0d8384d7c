// Acceptance suite: one check per release criterion, each printed as a
// PASS/FAIL line with its runtime and measured values.  The process exit
// code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mcpart/control_lang.hpp"
#include "mcpart/empirical.hpp"
#include "mcpart/errors.hpp"
#include "mcpart/eval.hpp"
#include "mcpart/model.hpp"
#include "mcpart/solver.hpp"
#include "test_util.hpp"

using namespace mcpart;
using testutil::linf;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Check {
    Outcome outcome;
    std::ostringstream detail;

    void require(bool condition, const std::string& label) {
        if (!condition) {
            outcome.pass = false;
            detail << " [FAILED: " << label << "]";
        }
    }
};

// --- 1: generated matrices match the displayed references -------------------

Outcome matrix_fidelity() {
    Check c;
    c.require(one_vs_rest(4) == testutil::one_vs_rest_4_reference(), "one-vs-rest 4");
    c.require(one_vs_one(4) == testutil::one_vs_one_4_reference(), "one-vs-one 4");
    c.require(exhaustive(4) == testutil::exhaustive_4_reference(), "exhaustive 4");
    c.require(adjacent(7) == testutil::adjacent_7_reference(), "adjacent 7");
    c.require(flatten_tree(balanced_tree(8)) == testutil::hierarchical_8_reference(),
              "balanced 8-leaf flatten");
    c.outcome.detail = c.detail.str();
    return c.outcome;
}

// --- 2: parser round trip on the reference listings -------------------------

Outcome parser_round_trip() {
    Check c;
    int index = 0;
    for (const char* listing : testutil::reference_listings()) {
        ++index;
        const ControlSpec first = parse_control(listing);
        const std::string printed = print_control(first);
        const ControlSpec second = parse_control(printed);
        c.require(second == first, "round trip of listing " + std::to_string(index));
        c.require(print_control(second) == printed,
                  "canonical fixed point of listing " + std::to_string(index));
    }
    const FlattenResult nested = to_coding_matrix(parse_control(testutil::kShuttleEmpNested));
    const FlattenResult flat = to_coding_matrix(parse_control(testutil::kShuttleEmpFlat));
    c.require(nested.matrix == flat.matrix,
              "empirical shuttle forms: identical matrices after alignment");
    std::multiset<int> a(nested.labels.begin(), nested.labels.end());
    std::multiset<int> b(flat.labels.begin(), flat.labels.end());
    c.require(a == b, "empirical shuttle forms: same class set");
    c.outcome.detail = c.detail.str();
    return c.outcome;
}

// --- 3: forward-inverse recovery across generators ---------------------------

Outcome forward_inverse_recovery() {
    Check c;
    Rng rng(3003);
    double worst = 0.0;
    int pairs = 0;
    while (pairs < 200) {
        const std::size_t n_c = 2 + rng.below(7);  // [2, 8]
        std::vector<std::pair<std::string, CodingMatrix>> generators;
        generators.emplace_back("one-vs-rest", one_vs_rest(n_c));
        generators.emplace_back("one-vs-one", one_vs_one(n_c));
        generators.emplace_back("adjacent", adjacent(n_c));
        generators.emplace_back("exhaustive", exhaustive(n_c));
        generators.emplace_back("tree", flatten_tree(balanced_tree(n_c)));
        if (n_c >= 4) {  // small class counts admit too few distinct rows
            generators.emplace_back("random", random_code(n_c, n_c + 2, true, 9000 + pairs));
            // no orthogonal arrangement exists below four classes
            generators.emplace_back("orthogonal",
                                    orthogonal(n_c, std::bit_ceil(n_c), pairs));
        }

        // round-robin so every generator kind is exercised
        const auto& [name, A] = generators[static_cast<std::size_t>(pairs) %
                                           generators.size()];
        const Vec p = testutil::random_interior_probability(n_c, rng);
        const Vec r = forward(A, p);
        ++pairs;

        auto track = [&](const Vec& recovered, const char* solver) {
            const double err = linf(recovered, p);
            worst = std::max(worst, err);
            c.require(err <= 1e-6, std::string(solver) + " on " + name + " n_c=" +
                                       std::to_string(n_c));
        };
        track(solve_unconstrained(A, r), "unconstrained");
        track(solve_constrained(A, r), "constrained");
        if (A.is_strict()) track(StrictSolver(A).solve_unconstrained(r), "cached");
        if (name == "one-vs-one") track(solve_one_vs_one(r, n_c), "pair-coupling");
        if (name == "one-vs-rest") track(solve_one_vs_rest(r), "direct");
    }
    c.detail << " pairs=" << pairs << " worst_err=" << worst;
    c.outcome.detail = c.detail.str();
    return c.outcome;
}

// --- 4: constrained solver against the simplex grid oracle -------------------

Outcome constrained_oracle() {
    Check c;
    Rng rng(4004);
    double worst_gap = 0.0, worst_kkt = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n_c = 3 + trial % 2;
        // three classes only admit six distinct rows
        const auto A = n_c == 3 ? random_code(3, 5, false, 100 + trial)
                                : random_code(4, 7, true, 100 + trial);
        Vec r(A.n_partitions());
        for (double& v : r) v = rng.uniform(-1.0, 1.0);

        const Vec p = solve_constrained(A, r);
        const QMatrix q = build_q(A, r);
        const double kkt = kkt_residual(q, r, p);
        const Vec oracle = testutil::grid_search_simplex(q, r, 0.005);
        const double gap = linf(p, oracle);
        worst_gap = std::max(worst_gap, gap);
        worst_kkt = std::max(worst_kkt, kkt);
        c.require(gap <= 0.01, "grid gap at trial " + std::to_string(trial));
        c.require(kkt <= 1e-6, "KKT residual at trial " + std::to_string(trial));
    }
    c.detail << " worst_gap=" << worst_gap << " worst_kkt=" << worst_kkt;
    c.outcome.detail = c.detail.str();
    return c.outcome;
}

// --- 5: one-vs-one coupling never goes negative ------------------------------

Outcome pairwise_nonnegativity() {
    Check c;
    Rng rng(5005);
    double global_min = 1.0;
    for (std::size_t n_c : {3u, 4u, 5u}) {
        const std::size_t n_pairs = n_c * (n_c - 1) / 2;
        for (int draw = 0; draw < 10000; ++draw) {
            Vec r(n_pairs);
            for (double& v : r) v = rng.uniform(-1.0, 1.0);
            const Vec p = solve_one_vs_one(r, n_c);
            for (double v : p) global_min = std::min(global_min, v);
        }
    }
    c.require(global_min >= -1e-9, "minimum probability across draws");
    c.detail << " min_probability=" << global_min;
    c.outcome.detail = c.detail.str();
    return c.outcome;
}

// --- 6: voting matches unconstrained least squares on orthogonal codes -------

Outcome orthogonal_voting_equivalence() {
    Check c;
    const auto A = orthogonal(8, 8, 606);
    Rng rng(6006);
    int compared = 0, matched = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Vec r(8);
        for (double& v : r) v = rng.uniform(-1.0, 1.0);
        const Vec estimate = least_squares_raw(A, r);
        Vec sorted = estimate;
        std::sort(sorted.begin(), sorted.end());
        if (sorted[7] - sorted[6] < 1e-12) continue;  // tie, excluded
        ++compared;
        matched += vote(A, r) == testutil::argmax(estimate);
    }
    c.require(compared > 0 && matched == compared, "argmax agreement");
    c.detail << " matched=" << matched << "/" << compared;
    c.outcome.detail = c.detail.str();
    return c.outcome;
}

// --- 7: desk-scale end-to-end comparison of every configuration --------------

Outcome desk_experiment() {
    Check c;
    const Dataset all = testutil::make_blobs({{0, 0}, {3, 0}, {0, 3}}, 500, 1.0, 20260810);
    TrainConfig config;
    config.logistic.learning_rate = 1.0;
    config.logistic.epochs = 1500;
    config.logistic.l2 = 1e-4;

    const std::vector<std::string> configs{"1v1",      "1vr",           "exhaustive",
                                           "adjacent", "balanced-tree", "empirical-tree"};
    std::map<std::string, double> acc, unc, bri;
    double acc_recursive = 0.0;

    const int trials = 10;
    for (int t = 0; t < trials; ++t) {
        const auto [train_part, test_part] = stratified_split(all, 0.3, 7000 + t);
        for (const std::string& name : configs) {
            ControlSpec spec;
            if (name == "1v1")
                spec = spec_from_matrix(one_vs_one(3), {"a", "b", "c"}, {0, 1, 2});
            else if (name == "1vr")
                spec = spec_from_matrix(one_vs_rest(3), {"a", "b", "c"}, {0, 1, 2});
            else if (name == "exhaustive")
                spec = spec_from_matrix(exhaustive(3), {"a", "b", "c"}, {0, 1, 2});
            else if (name == "adjacent")
                spec = spec_from_matrix(adjacent(3), {"a", "b"}, {0, 1, 2});
            else if (name == "balanced-tree")
                spec = from_tree(balanced_tree(3), "t");
            else {
                const auto d = distance_matrix(train_part, ClassMetric::hausdorff, 300,
                                               5000 + t);
                spec = from_tree(
                    build_dendrogram(d, train_part, Linkage::pooled_hausdorff, 300, 5000 + t),
                    "emp");
            }
            const MulticlassModel model = train_multiclass(spec, train_part, config);
            const Predictor predictor(model);

            std::vector<int> predicted;
            std::vector<std::vector<double>> probs;
            std::vector<int> recursive_predicted;
            for (std::size_t i = 0; i < test_part.size(); ++i) {
                const auto pred = predictor.predict(test_part.row(i), Method::constrained);
                predicted.push_back(pred.label);
                probs.push_back(pred.probabilities);
                if (name == "balanced-tree")
                    recursive_predicted.push_back(
                        predictor.predict(test_part.row(i), Method::recursive).label);
            }
            const ConfusionMatrix cm = confusion(predicted, test_part.labels, 3);
            acc[name] += accuracy(cm) / trials;
            unc[name] += uncertainty_coefficient(cm) / trials;
            bri[name] += brier(probs, test_part.labels) / trials;
            if (name == "balanced-tree")
                acc_recursive +=
                    accuracy(confusion(recursive_predicted, test_part.labels, 3)) / trials;
        }
    }

    double best = 0.0;
    for (const auto& name : configs) best = std::max(best, acc[name]);
    for (const auto& name : configs) {
        c.detail << " " << name << ": acc=" << acc[name] << " U=" << unc[name]
                 << " brier=" << bri[name] << ";";
        c.require(acc[name] >= best - 0.03, name + " accuracy within 0.03 of best");
        c.require(unc[name] >= 0.75, name + " uncertainty coefficient >= 0.75");
        c.require(bri[name] <= 0.45, name + " Brier <= 0.45");
    }
    c.detail << " recursive(balanced-tree)=" << acc_recursive;
    c.require(std::abs(acc_recursive - acc["balanced-tree"]) <= 0.02,
              "recursive vs least-squares accuracy gap <= 0.02");
    c.outcome.detail = c.detail.str();
    return c.outcome;
}

// --- 8: ordered-class comparison, adjacent against one-vs-rest ---------------

Outcome ordered_class_comparison() {
    Check c;
    std::vector<std::vector<double>> means;
    for (int m = 0; m < 5; ++m) means.push_back({static_cast<double>(m)});
    const Dataset all = testutil::make_blobs(means, 300, 1.2, 808080);
    TrainConfig config;
    config.logistic.learning_rate = 1.0;
    config.logistic.epochs = 1500;
    config.logistic.l2 = 1e-4;

    int adjacent_wins = 0;
    for (int t = 0; t < 10; ++t) {
        const auto [train_part, test_part] = stratified_split(all, 0.3, 600 + t);
        auto run = [&](const CodingMatrix& matrix, std::size_t rows) {
            std::vector<std::string> names;
            for (std::size_t i = 0; i < rows; ++i) names.push_back("m" + std::to_string(i));
            const ControlSpec spec = spec_from_matrix(matrix, names, {0, 1, 2, 3, 4});
            const MulticlassModel model = train_multiclass(spec, train_part, config);
            const Predictor predictor(model);
            std::vector<std::vector<double>> probs;
            for (std::size_t i = 0; i < test_part.size(); ++i)
                probs.push_back(
                    predictor.predict(test_part.row(i), Method::constrained).probabilities);
            return brier(probs, test_part.labels);
        };
        const double adj = run(adjacent(5), 4);
        const double ovr = run(one_vs_rest(5), 5);
        adjacent_wins += adj <= ovr;
        c.detail << " t" << t << ": adj=" << adj << " 1vr=" << ovr << ";";
    }
    c.require(adjacent_wins >= 8, "adjacent Brier beats one-vs-rest in >= 8 of 10 trials");
    c.detail << " wins=" << adjacent_wins << "/10";
    c.outcome.detail = c.detail.str();
    return c.outcome;
}

// --- 9: metric spot checks ----------------------------------------------------

Outcome metric_units() {
    Check c;
    const double uniform_brier = brier({{0.5, 0.5}}, {0});
    c.require(std::abs(uniform_brier - std::sqrt(0.5)) <= 1e-12, "Brier of uniform binary");

    ConfusionMatrix diag;
    diag.n_classes = 4;
    diag.counts.assign(16, 0);
    for (std::size_t j = 0; j < 4; ++j) diag.counts[j * 4 + j] = 3 + j;
    c.require(std::abs(uncertainty_coefficient(diag) - 1.0) <= 1e-12,
              "U of a diagonal confusion matrix");

    std::vector<std::vector<double>> sa{{0.0}, {1.0}}, sb{{1.0}, {2.0}};
    std::vector<std::span<const double>> pa{sa[0], sa[1]}, pb{sb[0], sb[1]};
    c.require(hausdorff_distance(pa, pb) == 1.0, "Hausdorff of {0,1} and {1,2}");
    c.outcome.detail = c.detail.str();
    return c.outcome;
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all_criteria{
        {"1 matrix fidelity", 1.0, matrix_fidelity},
        {"2 parser round trip", 1.0, parser_round_trip},
        {"3 forward-inverse recovery", 30.0, forward_inverse_recovery},
        {"4 constrained solver vs grid oracle", 60.0, constrained_oracle},
        {"5 one-vs-one nonnegativity", 60.0, pairwise_nonnegativity},
        {"6 orthogonal voting equivalence", 5.0, orthogonal_voting_equivalence},
        {"7 desk-scale configuration comparison", 120.0, desk_experiment},
        {"8 ordered-class adjacent advantage", 60.0, ordered_class_comparison},
        {"9 metric unit values", 1.0, metric_units},
    };

    // optional arguments select criteria by their leading number
    std::vector<Criterion> criteria;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i)
            for (const auto& criterion : all_criteria)
                if (std::string(criterion.name).starts_with(argv[i]))
                    criteria.push_back(criterion);
        if (criteria.empty()) {
            std::fprintf(stderr, "no criterion matches the given arguments\n");
            return 1;
        }
    } else {
        criteria = all_criteria;
    }

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string(" [exception: ") + e.what() + "]";
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > criterion.budget_seconds) {
            outcome.pass = false;
            outcome.detail += " [over time budget]";
        }
        std::printf("%s criterion %s (%.2fs)%s\n", outcome.pass ? "PASS" : "FAIL",
                    criterion.name, seconds, outcome.detail.c_str());
        failures += !outcome.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
