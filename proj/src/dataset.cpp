#include "mcpart/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mcpart/errors.hpp"
#include "mcpart/rng.hpp"

namespace mcpart {

namespace {
constexpr std::size_t kMaxFeatures = 1000000;
}

void Dataset::add(std::span<const double> x, int label) {
    if (n_features == 0 && features.empty()) n_features = x.size();
    if (x.size() != n_features)
        throw std::invalid_argument("sample dimension does not match dataset");
    if (label < 0) throw std::invalid_argument("labels must be nonnegative");
    features.insert(features.end(), x.begin(), x.end());
    labels.push_back(label);
    n_classes = std::max(n_classes, static_cast<std::size_t>(label) + 1);
}

std::size_t Dataset::class_count(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

Dataset load_libsvm(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    struct SparseRow {
        int label = -1;
        std::vector<std::pair<std::size_t, double>> items;
    };
    std::vector<SparseRow> rows;
    std::size_t max_index = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;  // blank line
        SparseRow row;
        std::size_t pos = 0;
        try {
            row.label = std::stoi(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size() || row.label < 0)
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": expected a nonnegative integer label, got '" + tok + "'");
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw DataError(path.string() + ":" + std::to_string(line_no) +
                                ": expected index:value, got '" + tok + "'");
            long index = 0;
            double value = 0;
            try {
                std::size_t used = 0;
                index = std::stol(tok.substr(0, colon), &used);
                if (used != colon) throw std::invalid_argument(tok);
                value = std::stod(tok.substr(colon + 1), &used);
                if (used != tok.size() - colon - 1) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw DataError(path.string() + ":" + std::to_string(line_no) +
                                ": malformed feature '" + tok + "'");
            }
            if (index < 1 || static_cast<std::size_t>(index) > kMaxFeatures)
                throw DataError(path.string() + ":" + std::to_string(line_no) +
                                ": feature index " + std::to_string(index) + " out of range");
            if (!std::isfinite(value))
                throw DataError(path.string() + ":" + std::to_string(line_no) +
                                ": non-finite feature value");
            row.items.emplace_back(static_cast<std::size_t>(index) - 1, value);
            max_index = std::max(max_index, static_cast<std::size_t>(index));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path.string() + ": no samples");

    Dataset data;
    data.n_features = max_index;
    data.features.assign(rows.size() * max_index, 0.0);
    data.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        data.labels.push_back(rows[i].label);
        data.n_classes =
            std::max(data.n_classes, static_cast<std::size_t>(rows[i].label) + 1);
        for (const auto& [idx, value] : rows[i].items)
            data.features[i * max_index + idx] = value;
    }
    return data;
}

void save_libsvm(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    char buf[64];
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << data.labels[i];
        const auto x = data.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] == 0.0) continue;
            std::snprintf(buf, sizeof buf, "%.17g", x[j]);
            out << ' ' << (j + 1) << ':' << buf;
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed for " + path.string());
}

BinaryDataset relabel(const Dataset& data, std::span<const int> row) {
    if (row.size() != data.n_classes)
        throw std::invalid_argument("coding row length does not match class count");
    for (int v : row)
        if (v < -1 || v > 1) throw std::invalid_argument("coding row entries must be ternary");

    BinaryDataset out;
    out.n_features = data.n_features;
    bool has_neg = false, has_pos = false;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int code = row[static_cast<std::size_t>(data.labels[i])];
        if (code == 0) continue;
        const auto x = data.row(i);
        out.features.insert(out.features.end(), x.begin(), x.end());
        out.labels.push_back(code);
        has_neg = has_neg || code < 0;
        has_pos = has_pos || code > 0;
    }
    if (!has_neg || !has_pos)
        throw DataError("degenerate partition: relabeled data has samples on one side only");
    return out;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& data,
                                             double holdout_fraction,
                                             std::uint64_t seed) {
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
        throw std::invalid_argument("holdout fraction must be in (0, 1)");
    std::vector<std::vector<std::size_t>> by_class(data.n_classes);
    for (std::size_t i = 0; i < data.size(); ++i)
        by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);

    Rng rng(seed);
    Dataset train, holdout;
    train.n_features = holdout.n_features = data.n_features;
    train.n_classes = holdout.n_classes = data.n_classes;
    for (auto& indices : by_class) {
        if (indices.empty()) continue;
        if (indices.size() < 2)
            throw DataError("stratified split needs at least 2 samples per class");
        rng.shuffle(indices);
        std::size_t n_hold = static_cast<std::size_t>(
            std::llround(holdout_fraction * static_cast<double>(indices.size())));
        n_hold = std::clamp<std::size_t>(n_hold, 1, indices.size() - 1);
        for (std::size_t k = 0; k < indices.size(); ++k) {
            Dataset& dst = k < n_hold ? holdout : train;
            dst.features.insert(dst.features.end(), data.row(indices[k]).begin(),
                                data.row(indices[k]).end());
            dst.labels.push_back(data.labels[indices[k]]);
        }
    }
    return {std::move(train), std::move(holdout)};
}

}  // namespace mcpart
