// mcpart: multi-class classification from configurable binary partitions.
//
// Subcommands: gen-control, tree-build, train, predict, eval, trial.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <CLI11.hpp>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mcpart/control_lang.hpp"
#include "mcpart/empirical.hpp"
#include "mcpart/errors.hpp"
#include "mcpart/eval.hpp"
#include "mcpart/model.hpp"

namespace {

using namespace mcpart;

std::string row_name(const std::string& prefix, std::size_t row) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02zu", row);
    return prefix + buf;
}

ControlSpec generated_spec(const std::string& kind, std::size_t n_classes,
                           std::size_t n_partitions, std::uint64_t seed,
                           const std::string& prefix, bool strict) {
    if (kind == "tree-balanced") return from_tree(balanced_tree(n_classes), prefix);

    CodingMatrix matrix;
    if (kind == "1v1")
        matrix = one_vs_one(n_classes);
    else if (kind == "1vr")
        matrix = one_vs_rest(n_classes);
    else if (kind == "exhaustive")
        matrix = exhaustive(n_classes);
    else if (kind == "adjacent")
        matrix = adjacent(n_classes);
    else if (kind == "orthogonal")
        matrix = orthogonal(n_classes, n_partitions ? n_partitions : std::bit_ceil(n_classes),
                            seed);
    else if (kind == "random")
        matrix = random_code(n_classes, n_partitions ? n_partitions : 2 * n_classes, strict,
                             seed);
    else
        throw std::invalid_argument("unknown control kind '" + kind + "'");

    std::vector<std::string> names;
    for (std::size_t i = 0; i < matrix.n_partitions(); ++i)
        names.push_back(row_name(prefix, i));
    std::vector<int> labels(n_classes);
    for (std::size_t j = 0; j < n_classes; ++j) labels[j] = static_cast<int>(j);
    return spec_from_matrix(matrix, names, labels);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_predictions(std::ostream& out, const std::vector<Prediction>& predictions) {
    char buf[32];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    for (const auto& pred : predictions) {
        out << pred.label;
        if (!pred.probabilities.empty()) {
            for (double p : pred.probabilities) out << ' ' << num(p);
        } else if (pred.winner_probability) {
            out << ' ' << num(*pred.winner_probability);
        }
        out << '\n';
    }
}

struct PredictionFile {
    std::vector<int> labels;
    std::vector<std::vector<double>> probabilities;  // empty when not full-vector
    std::vector<double> winner;                      // empty when class-only
};

// Line shapes: "class" (voting), "class probability" (winner-only), or
// "class p_0 ... p_{k-1}" (full vectors).
PredictionFile read_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    PredictionFile file;
    std::string line;
    std::size_t line_no = 0;
    std::size_t n_fields = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::vector<double> fields;
        double v;
        while (ls >> v) fields.push_back(v);
        if (fields.empty()) continue;
        if (n_fields == 0)
            n_fields = fields.size();
        else if (fields.size() != n_fields)
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": inconsistent field count");
        const int label = static_cast<int>(fields[0]);
        if (label < 0 || label != fields[0])
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": malformed class label");
        file.labels.push_back(label);
        if (n_fields == 2) {
            file.winner.push_back(fields[1]);
        } else if (n_fields > 2) {
            std::vector<double> p(fields.begin() + 1, fields.end());
            const auto best = static_cast<std::size_t>(label);
            if (best >= p.size())
                throw DataError(path.string() + ":" + std::to_string(line_no) +
                                ": class label outside the probability vector");
            file.winner.push_back(p[best]);
            file.probabilities.push_back(std::move(p));
        }
    }
    if (file.labels.empty()) throw DataError(path.string() + ": no predictions");
    return file;
}

struct Metrics {
    double accuracy = 0.0;
    double uncertainty = 0.0;
    bool has_brier = false;
    double brier_full = 0.0;
    bool has_brier_winner = false;
    double brier_winner_value = 0.0;
};

Metrics score(const PredictionFile& pred, const Dataset& truth) {
    if (pred.labels.size() != truth.size())
        throw DataError("prediction count does not match dataset size");
    Metrics m;
    // the model may know classes the test file never mentions
    std::size_t n_classes = truth.n_classes;
    for (int label : pred.labels)
        n_classes = std::max(n_classes, static_cast<std::size_t>(label) + 1);
    const ConfusionMatrix cm = confusion(pred.labels, truth.labels, n_classes);
    m.accuracy = accuracy(cm);
    m.uncertainty = uncertainty_coefficient(cm);
    if (!pred.probabilities.empty()) {
        m.has_brier = true;
        m.brier_full = brier(pred.probabilities, truth.labels);
    }
    if (!pred.winner.empty()) {
        std::vector<bool> correct(truth.size());
        for (std::size_t i = 0; i < truth.size(); ++i)
            correct[i] = pred.labels[i] == truth.labels[i];
        m.has_brier_winner = true;
        m.brier_winner_value = brier_winner(pred.winner, correct);
    }
    return m;
}

void print_metrics(const Metrics& m, const std::string& key_prefix) {
    std::printf("  accuracy                 %8.4f\n", m.accuracy);
    std::printf("  uncertainty coefficient  %8.4f\n", m.uncertainty);
    if (m.has_brier) std::printf("  Brier score              %8.4f\n", m.brier_full);
    if (m.has_brier_winner)
        std::printf("  Brier score (winner)     %8.4f\n", m.brier_winner_value);
    std::printf("%saccuracy=%.6g\n", key_prefix.c_str(), m.accuracy);
    std::printf("%suncertainty_coefficient=%.6g\n", key_prefix.c_str(), m.uncertainty);
    if (m.has_brier) std::printf("%sbrier=%.6g\n", key_prefix.c_str(), m.brier_full);
    if (m.has_brier_winner)
        std::printf("%sbrier_winner=%.6g\n", key_prefix.c_str(), m.brier_winner_value);
}

std::vector<Prediction> predict_all(const Predictor& predictor, const Dataset& data,
                                    Method method) {
    std::vector<Prediction> out;
    out.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        out.push_back(predictor.predict(data.row(i), method));
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"multi-class classification from configurable binary partitions"};
    app.require_subcommand(1);

    // --- gen-control ---
    auto* gen = app.add_subcommand("gen-control", "generate a control file");
    std::string gen_kind, gen_prefix = "model", gen_out;
    std::size_t gen_classes = 0, gen_partitions = 0;
    std::uint64_t gen_seed = 0;
    bool gen_strict = true;
    gen->add_option("--kind", gen_kind,
                    "1v1 | 1vr | exhaustive | adjacent | orthogonal | random | tree-balanced")
        ->required();
    gen->add_option("--classes", gen_classes, "number of classes")->required();
    gen->add_option("--partitions", gen_partitions,
                    "partition count for orthogonal/random kinds");
    gen->add_option("--seed", gen_seed, "random seed");
    gen->add_flag("--strict,!--no-strict", gen_strict,
                  "random kind: forbid zero entries (default on)");
    gen->add_option("--prefix", gen_prefix, "binary name prefix");
    gen->add_option("-o,--output", gen_out, "output control file")->required();

    // --- tree-build ---
    auto* tb = app.add_subcommand("tree-build", "build an empirical tree control file");
    std::string tb_data, tb_metric = "hausdorff", tb_linkage = "pooled-hausdorff",
                tb_prefix = "emp", tb_out;
    std::size_t tb_cap = 500;
    std::uint64_t tb_seed = 0;
    tb->add_option("--data", tb_data, "training data (libsvm format)")->required();
    tb->add_option("--metric", tb_metric, "centroid | hausdorff");
    tb->add_option("--linkage", tb_linkage, "single | complete | pooled-hausdorff");
    tb->add_option("--cap", tb_cap, "max samples per class for Hausdorff");
    tb->add_option("--seed", tb_seed, "subsampling seed");
    tb->add_option("--prefix", tb_prefix, "binary name prefix");
    tb->add_option("-o,--output", tb_out, "output control file")->required();

    // --- shared training options ---
    TrainConfig train_config;
    auto add_train_options = [&train_config](CLI::App* cmd) {
        cmd->add_option("--learning-rate", train_config.logistic.learning_rate);
        cmd->add_option("--epochs", train_config.logistic.epochs);
        cmd->add_option("--l2", train_config.logistic.l2);
        cmd->add_option("--seed", train_config.logistic.seed, "training seed");
        cmd->add_flag("--calibrate", train_config.calibrate,
                      "refit decision calibration on a held-out slice");
        cmd->add_option("--calibration-fraction", train_config.calibration_fraction);
    };

    // --- train ---
    auto* tr = app.add_subcommand("train", "train binaries for a control file");
    std::string tr_control, tr_data, tr_dir;
    tr->add_option("--control", tr_control, "control file")->required();
    tr->add_option("--data", tr_data, "training data (libsvm format)")->required();
    tr->add_option("--model-dir", tr_dir, "output model directory")->required();
    add_train_options(tr);

    // --- predict ---
    auto* pr = app.add_subcommand("predict", "classify a dataset with a trained model");
    std::string pr_dir, pr_data, pr_method = "constrained", pr_out;
    pr->add_option("--model-dir", pr_dir, "model directory")->required();
    pr->add_option("--data", pr_data, "test data (libsvm format)")->required();
    pr->add_option("--method", pr_method,
                   "vote | unconstrained | constrained | 1v1-inverse | recursive");
    pr->add_option("-o,--output", pr_out, "predictions file")->required();

    // --- eval ---
    auto* ev = app.add_subcommand("eval", "score a predictions file against labels");
    std::string ev_pred, ev_data;
    ev->add_option("--pred", ev_pred, "predictions file")->required();
    ev->add_option("--data", ev_data, "labeled data (libsvm format)")->required();

    // --- trial ---
    auto* tl = app.add_subcommand(
        "trial", "repeated stratified holdout: train, predict and score per trial");
    std::string tl_control, tl_kind, tl_data, tl_method = "constrained";
    double tl_holdout = 0.3;
    std::size_t tl_trials = 10, tl_cap = 500, tl_partitions = 0;
    std::uint64_t tl_seed = 0;
    std::string tl_metric = "hausdorff", tl_linkage = "pooled-hausdorff";
    tl->add_option("--control", tl_control, "control file");
    tl->add_option("--kind", tl_kind,
                   "generate the spec per run: gen-control kinds or tree-empirical");
    tl->add_option("--data", tl_data, "full dataset (libsvm format)")->required();
    tl->add_option("--holdout", tl_holdout, "holdout fraction");
    tl->add_option("--trials", tl_trials, "number of trials");
    tl->add_option("--trial-seed", tl_seed, "split seed base");
    tl->add_option("--method", tl_method, "solution method");
    tl->add_option("--metric", tl_metric, "tree-empirical distance metric");
    tl->add_option("--linkage", tl_linkage, "tree-empirical linkage");
    tl->add_option("--cap", tl_cap, "tree-empirical subsample cap");
    tl->add_option("--partitions", tl_partitions, "partition count for orthogonal/random");
    add_train_options(tl);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }

    if (gen->parsed()) {
        const ControlSpec spec = generated_spec(gen_kind, gen_classes, gen_partitions,
                                                gen_seed, gen_prefix, gen_strict);
        write_text(gen_out, print_control(spec));
        std::printf("wrote %s\n", gen_out.c_str());
        return 0;
    }

    if (tb->parsed()) {
        const Dataset data = load_libsvm(tb_data);
        ClassMetric metric;
        if (tb_metric == "centroid")
            metric = ClassMetric::centroid;
        else if (tb_metric == "hausdorff")
            metric = ClassMetric::hausdorff;
        else
            throw std::invalid_argument("unknown metric '" + tb_metric + "'");
        Linkage linkage;
        if (tb_linkage == "single")
            linkage = Linkage::single;
        else if (tb_linkage == "complete")
            linkage = Linkage::complete;
        else if (tb_linkage == "pooled-hausdorff")
            linkage = Linkage::pooled_hausdorff;
        else
            throw std::invalid_argument("unknown linkage '" + tb_linkage + "'");
        const auto distances = distance_matrix(data, metric, tb_cap, tb_seed);
        const auto tree = build_dendrogram(distances, data, linkage, tb_cap, tb_seed);
        write_text(tb_out, print_control(from_tree(tree, tb_prefix)));
        std::printf("wrote %s\n", tb_out.c_str());
        return 0;
    }

    if (tr->parsed()) {
        const ControlSpec spec = parse_control(read_text(tr_control));
        const Dataset data = load_libsvm(tr_data);
        const MulticlassModel model = train_multiclass(spec, data, train_config);
        save_model(model, tr_dir);
        std::printf("trained %zu binaries into %s\n", model.binaries.size(), tr_dir.c_str());
        return 0;
    }

    if (pr->parsed()) {
        const MulticlassModel model = load_model(pr_dir);
        const Dataset data = load_libsvm(pr_data);
        const Predictor predictor(model);
        const auto predictions = predict_all(predictor, data, method_from_string(pr_method));
        std::ofstream out(pr_out);
        if (!out) throw DataError("cannot write " + pr_out);
        write_predictions(out, predictions);
        std::printf("wrote %zu predictions to %s\n", predictions.size(), pr_out.c_str());
        return 0;
    }

    if (ev->parsed()) {
        const Dataset data = load_libsvm(ev_data);
        const PredictionFile pred = read_predictions(ev_pred);
        print_metrics(score(pred, data), "");
        return 0;
    }

    if (tl->parsed()) {
        if (tl_control.empty() == tl_kind.empty())
            throw std::invalid_argument("trial: give exactly one of --control or --kind");
        const Dataset data = load_libsvm(tl_data);
        const Method method = method_from_string(tl_method);
        for (std::size_t t = 0; t < tl_trials; ++t) {
            const auto [train_part, test_part] =
                stratified_split(data, tl_holdout, tl_seed + t);
            ControlSpec spec;
            if (!tl_control.empty()) {
                spec = parse_control(read_text(tl_control));
            } else if (tl_kind == "tree-empirical") {
                ClassMetric metric = tl_metric == "centroid" ? ClassMetric::centroid
                                                             : ClassMetric::hausdorff;
                Linkage linkage = tl_linkage == "single"     ? Linkage::single
                                  : tl_linkage == "complete" ? Linkage::complete
                                                             : Linkage::pooled_hausdorff;
                const auto distances = distance_matrix(train_part, metric, tl_cap, tl_seed + t);
                spec = from_tree(build_dendrogram(distances, train_part, linkage, tl_cap,
                                                  tl_seed + t),
                                 "emp");
            } else {
                spec = generated_spec(tl_kind, data.n_classes, tl_partitions,
                                      tl_seed + t, "model", /*strict=*/true);
            }
            const MulticlassModel model = train_multiclass(spec, train_part, train_config);
            const Predictor predictor(model);
            const auto predictions = predict_all(predictor, test_part, method);

            PredictionFile file;
            for (const auto& p : predictions) {
                file.labels.push_back(p.label);
                if (!p.probabilities.empty()) file.probabilities.push_back(p.probabilities);
                if (p.winner_probability) file.winner.push_back(*p.winner_probability);
            }
            std::printf("trial %zu\n", t);
            print_metrics(score(file, test_part), "trial" + std::to_string(t) + ".");
        }
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const mcpart::NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const mcpart::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
