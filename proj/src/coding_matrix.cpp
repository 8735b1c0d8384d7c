#include "mcpart/coding_matrix.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mcpart/errors.hpp"
#include "mcpart/rng.hpp"

namespace mcpart {

CodingMatrix CodingMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
    if (rows.empty()) throw std::invalid_argument("coding matrix needs at least one row");
    const std::size_t n_c = rows.front().size();
    CodingMatrix m(rows.size(), n_c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != n_c)
            throw std::invalid_argument("coding matrix rows have inconsistent lengths");
        for (std::size_t j = 0; j < n_c; ++j) {
            const int v = rows[i][j];
            if (v < -1 || v > 1)
                throw std::invalid_argument("coding matrix entries must be -1, 0 or +1");
            m.set(i, j, v);
        }
    }
    return m;
}

bool CodingMatrix::is_strict() const {
    return std::none_of(entries_.begin(), entries_.end(),
                        [](std::int8_t v) { return v == 0; });
}

namespace {

bool rows_equal_up_to_sign(std::span<const std::int8_t> a,
                           std::span<const std::int8_t> b) {
    bool same = true, negated = true;
    for (std::size_t j = 0; j < a.size(); ++j) {
        same = same && a[j] == b[j];
        negated = negated && a[j] == -b[j];
        if (!same && !negated) return false;
    }
    return same || negated;
}

}  // namespace

void CodingMatrix::validate() const {
    if (n_classes_ < 2) throw std::invalid_argument("coding matrix needs at least 2 classes");
    if (n_partitions_ < 1) throw std::invalid_argument("coding matrix needs at least 1 row");
    for (std::size_t i = 0; i < n_partitions_; ++i) {
        bool has_neg = false, has_pos = false;
        for (std::size_t j = 0; j < n_classes_; ++j) {
            has_neg = has_neg || at(i, j) == -1;
            has_pos = has_pos || at(i, j) == +1;
        }
        if (!has_neg || !has_pos)
            throw std::invalid_argument("row " + std::to_string(i) +
                                        " does not have two nonempty sides");
    }
    for (std::size_t i = 0; i < n_partitions_; ++i)
        for (std::size_t k = i + 1; k < n_partitions_; ++k)
            if (rows_equal_up_to_sign(row(i), row(k)))
                throw std::invalid_argument("rows " + std::to_string(i) + " and " +
                                            std::to_string(k) +
                                            " are equal up to sign");
    for (std::size_t j = 0; j < n_classes_; ++j) {
        bool nonzero = false;
        for (std::size_t i = 0; i < n_partitions_; ++i) nonzero = nonzero || at(i, j) != 0;
        if (!nonzero)
            throw std::invalid_argument("column " + std::to_string(j) +
                                        " is never used by any partition");
        for (std::size_t k = j + 1; k < n_classes_; ++k) {
            bool same = true;
            for (std::size_t i = 0; i < n_partitions_ && same; ++i)
                same = at(i, j) == at(i, k);
            if (same)
                throw std::invalid_argument("columns " + std::to_string(j) + " and " +
                                            std::to_string(k) + " are identical");
        }
    }
}

bool CodingMatrix::is_valid() const {
    try {
        validate();
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

std::string CodingMatrix::describe() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < n_partitions_; ++i) {
        for (std::size_t j = 0; j < n_classes_; ++j) {
            if (j) out << ' ';
            out << static_cast<int>(at(i, j));
        }
        out << '\n';
    }
    return out.str();
}

std::vector<int> PartitionTree::leaves() const {
    std::vector<int> out;
    if (is_leaf()) {
        out.push_back(cls);
        return out;
    }
    for (const auto& kid : kids) {
        auto sub = kid.leaves();
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

std::size_t PartitionTree::n_leaves() const {
    if (is_leaf()) return 1;
    std::size_t n = 0;
    for (const auto& kid : kids) n += kid.n_leaves();
    return n;
}

namespace {

PartitionTree balanced_range(int lo, int hi) {  // labels in [lo, hi)
    if (hi - lo == 1) return PartitionTree::leaf(lo);
    const int mid = lo + (hi - lo) / 2;  // smaller half left
    return PartitionTree::internal(balanced_range(lo, mid), balanced_range(mid, hi));
}

}  // namespace

PartitionTree balanced_tree(std::size_t n_classes) {
    if (n_classes < 2) throw std::invalid_argument("balanced tree needs at least 2 classes");
    return balanced_range(0, static_cast<int>(n_classes));
}

CodingMatrix one_vs_rest(std::size_t n_classes) {
    if (n_classes < 2) throw std::invalid_argument("one_vs_rest: class count must be >= 2");
    CodingMatrix m(n_classes, n_classes);
    for (std::size_t i = 0; i < n_classes; ++i)
        for (std::size_t j = 0; j < n_classes; ++j) m.set(i, j, i == j ? 1 : -1);
    return m;
}

CodingMatrix one_vs_one(std::size_t n_classes) {
    if (n_classes < 2) throw std::invalid_argument("one_vs_one: class count must be >= 2");
    CodingMatrix m(n_classes * (n_classes - 1) / 2, n_classes);
    std::size_t i = 0;
    for (std::size_t j = 0; j < n_classes; ++j)
        for (std::size_t k = j + 1; k < n_classes; ++k, ++i) {
            m.set(i, j, -1);
            m.set(i, k, +1);
        }
    return m;
}

CodingMatrix exhaustive(std::size_t n_classes) {
    if (n_classes < 2 || n_classes > 16)
        throw std::invalid_argument("exhaustive: class count must be in [2, 16]");
    const std::size_t n_rows = (std::size_t{1} << (n_classes - 1)) - 1;
    CodingMatrix m(n_rows, n_classes);
    for (std::size_t word = 1; word <= n_rows; ++word) {
        for (std::size_t j = 0; j + 1 < n_classes; ++j)
            m.set(word - 1, j, (word >> j) & 1 ? -1 : +1);
        m.set(word - 1, n_classes - 1, +1);
    }
    return m;
}

CodingMatrix adjacent(std::size_t n_classes) {
    if (n_classes < 2) throw std::invalid_argument("adjacent: class count must be >= 2");
    CodingMatrix m(n_classes - 1, n_classes);
    for (std::size_t i = 0; i + 1 < n_classes; ++i)
        for (std::size_t j = 0; j < n_classes; ++j) m.set(i, j, j <= i ? -1 : +1);
    return m;
}

namespace {

// Sylvester doubling: H_1 = [1], H_2k = [[H, H], [H, -H]].
std::vector<std::int8_t> sylvester(std::size_t n) {
    std::vector<std::int8_t> h{1};
    std::size_t size = 1;
    while (size < n) {
        std::vector<std::int8_t> next(4 * size * size);
        for (std::size_t i = 0; i < size; ++i)
            for (std::size_t j = 0; j < size; ++j) {
                const std::int8_t v = h[i * size + j];
                next[i * 2 * size + j] = v;
                next[i * 2 * size + size + j] = v;
                next[(size + i) * 2 * size + j] = v;
                next[(size + i) * 2 * size + size + j] = static_cast<std::int8_t>(-v);
            }
        h = std::move(next);
        size *= 2;
    }
    return h;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

CodingMatrix orthogonal(std::size_t n_classes, std::size_t n_partitions,
                        std::uint64_t seed) {
    if (n_classes < 2) throw std::invalid_argument("orthogonal: class count must be >= 2");
    if (n_partitions < n_classes)
        throw std::invalid_argument("orthogonal: need at least as many partitions as classes");
    if (!is_power_of_two(n_partitions))
        throw NumericError("orthogonal: no construction for " +
                           std::to_string(n_partitions) +
                           " partitions (power of two required)");

    const auto base = sylvester(n_partitions);
    Rng rng(seed);
    const int budget = 2000;
    std::vector<std::size_t> cols(n_partitions);
    for (std::size_t j = 0; j < n_partitions; ++j) cols[j] = j;

    for (int attempt = 0; attempt < budget; ++attempt) {
        rng.shuffle(cols);
        std::vector<int> col_sign(n_partitions), row_sign(n_partitions);
        for (std::size_t i = 0; i < n_partitions; ++i) {
            col_sign[i] = rng.sign();
            row_sign[i] = rng.sign();
        }
        std::vector<std::size_t> row_order(n_partitions);
        for (std::size_t i = 0; i < n_partitions; ++i) row_order[i] = i;
        rng.shuffle(row_order);

        // Sign flips and permutations of a Hadamard base keep the columns
        // exactly orthogonal, as does taking a column subset.
        CodingMatrix m(n_partitions, n_classes);
        for (std::size_t i = 0; i < n_partitions; ++i)
            for (std::size_t j = 0; j < n_classes; ++j)
                m.set(i, j,
                      row_sign[i] * col_sign[cols[j]] *
                          base[row_order[i] * n_partitions + cols[j]]);
        if (m.is_valid()) return m;
    }
    throw NumericError("orthogonal: no valid arrangement found for " +
                       std::to_string(n_classes) + " classes x " +
                       std::to_string(n_partitions) + " partitions");
}

CodingMatrix random_code(std::size_t n_classes, std::size_t n_partitions,
                         bool strict, std::uint64_t seed) {
    if (n_classes < 2) throw std::invalid_argument("random_code: class count must be >= 2");
    if (n_partitions < 1) throw std::invalid_argument("random_code: need at least 1 partition");

    Rng rng(seed);
    const int matrix_budget = 200;
    for (int attempt = 0; attempt < matrix_budget; ++attempt) {
        CodingMatrix m(n_partitions, n_classes);
        bool rows_ok = true;
        for (std::size_t i = 0; i < n_partitions && rows_ok; ++i) {
            const int row_budget = 2000;
            bool placed = false;
            for (int t = 0; t < row_budget && !placed; ++t) {
                bool has_neg = false, has_pos = false;
                for (std::size_t j = 0; j < n_classes; ++j) {
                    const int v = strict ? rng.sign()
                                         : static_cast<int>(rng.below(3)) - 1;
                    m.set(i, j, v);
                    has_neg = has_neg || v == -1;
                    has_pos = has_pos || v == +1;
                }
                if (!has_neg || !has_pos) continue;
                bool duplicate = false;
                for (std::size_t k = 0; k < i && !duplicate; ++k)
                    duplicate = rows_equal_up_to_sign(m.row(k), m.row(i));
                placed = !duplicate;
            }
            rows_ok = placed;
        }
        if (rows_ok && m.is_valid()) return m;
    }
    throw NumericError("random_code: no invariant-satisfying matrix found for " +
                       std::to_string(n_classes) + " classes x " +
                       std::to_string(n_partitions) + " partitions");
}

namespace {

void flatten_node(const PartitionTree& node, CodingMatrix& m, std::size_t& next_row) {
    if (node.is_leaf()) return;
    const std::size_t row = next_row++;
    for (int cls : node.left().leaves()) m.set(row, static_cast<std::size_t>(cls), -1);
    for (int cls : node.right().leaves()) m.set(row, static_cast<std::size_t>(cls), +1);
    flatten_node(node.left(), m, next_row);
    flatten_node(node.right(), m, next_row);
}

}  // namespace

CodingMatrix flatten_tree(const PartitionTree& tree) {
    const auto leaves = tree.leaves();
    if (leaves.size() < 2) throw std::invalid_argument("flatten_tree: need at least 2 leaves");
    std::set<int> seen;
    for (int cls : leaves) {
        if (cls < 0 || static_cast<std::size_t>(cls) >= leaves.size())
            throw DataError("flatten_tree: leaf labels must form 0.." +
                            std::to_string(leaves.size() - 1));
        if (!seen.insert(cls).second)
            throw DataError("flatten_tree: duplicate leaf label " + std::to_string(cls));
    }
    CodingMatrix m(leaves.size() - 1, leaves.size());
    std::size_t next_row = 0;
    flatten_node(tree, m, next_row);
    return m;
}

}  // namespace mcpart
