#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mcpart {

// Ternary n_p x n_c matrix describing how classes are split into binary
// partitions.  Entry -1/+1 assigns a class to a side of the partition,
// 0 excludes it.
class CodingMatrix {
public:
    CodingMatrix() = default;
    CodingMatrix(std::size_t n_partitions, std::size_t n_classes)
        : n_partitions_(n_partitions),
          n_classes_(n_classes),
          entries_(n_partitions * n_classes, 0) {}

    static CodingMatrix from_rows(const std::vector<std::vector<int>>& rows);

    std::size_t n_partitions() const { return n_partitions_; }
    std::size_t n_classes() const { return n_classes_; }

    int at(std::size_t partition, std::size_t cls) const {
        return entries_[partition * n_classes_ + cls];
    }
    void set(std::size_t partition, std::size_t cls, int value) {
        entries_[partition * n_classes_ + cls] = static_cast<std::int8_t>(value);
    }
    std::span<const std::int8_t> row(std::size_t partition) const {
        return {entries_.data() + partition * n_classes_, n_classes_};
    }

    bool is_strict() const;  // no zero entries

    // Checks the structural invariants; throws std::invalid_argument with a
    // description of the first violation:
    //   - every row has a -1 and a +1,
    //   - no two rows equal up to a global sign flip,
    //   - no two columns identical,
    //   - every column has a nonzero entry.
    void validate() const;
    bool is_valid() const;

    // Plain "-1 0 1" grid, one partition per line.
    std::string describe() const;

    friend bool operator==(const CodingMatrix&, const CodingMatrix&) = default;

private:
    std::size_t n_partitions_ = 0;
    std::size_t n_classes_ = 0;
    std::vector<std::int8_t> entries_;
};

// Binary tree over class labels; leaves carry the labels, internal nodes are
// the partitions.  Internal nodes always have exactly two children.
struct PartitionTree {
    int cls = -1;                     // leaf label; meaningful only for leaves
    std::string id;                   // optional partition name
    std::vector<PartitionTree> kids;  // empty for a leaf, else exactly 2

    static PartitionTree leaf(int label) {
        PartitionTree t;
        t.cls = label;
        return t;
    }
    static PartitionTree internal(PartitionTree left, PartitionTree right,
                                  std::string name = "") {
        PartitionTree t;
        t.id = std::move(name);
        t.kids.push_back(std::move(left));
        t.kids.push_back(std::move(right));
        return t;
    }

    bool is_leaf() const { return kids.empty(); }
    const PartitionTree& left() const { return kids[0]; }
    const PartitionTree& right() const { return kids[1]; }

    // Leaf labels in left-to-right order.
    std::vector<int> leaves() const;
    std::size_t n_leaves() const;
};

// Balanced splitting tree over labels 0..n_classes-1; odd splits put the
// smaller half on the left.
PartitionTree balanced_tree(std::size_t n_classes);

// --- generators ---------------------------------------------------------

// Square matrix, +1 on the diagonal, -1 elsewhere.
CodingMatrix one_vs_rest(std::size_t n_classes);

// One row per class pair (j,k), j<k, enumerated (0,1),(0,2),...,(1,2),...;
// the row has -1 at j and +1 at k.
CodingMatrix one_vs_one(std::size_t n_classes);

// All 2^(n_classes-1)-1 distinct strict partitions: binary counting with the
// zero word omitted and only half the range used, last column pinned to +1.
// n_classes is capped at 16.
CodingMatrix exhaustive(std::size_t n_classes);

// Threshold splits for ordered classes: row i has -1 in columns 0..i and +1
// above.
CodingMatrix adjacent(std::size_t n_classes);

// Strict matrix with exactly orthogonal columns, A^T A = n_partitions * I.
// Built from a Sylvester +-1 base of size n_partitions (which must be a power
// of two >= n_classes) with seeded sign flips, permutations and column
// selection retried until the structural invariants hold.  Throws
// NumericError when no valid arrangement exists within the budget; callers
// may fall back to random_code.
CodingMatrix orthogonal(std::size_t n_classes, std::size_t n_partitions,
                        std::uint64_t seed);

// Uniform random rows over {-1,+1} (strict) or {-1,0,+1}; degenerate or
// duplicate rows are redrawn.  Deterministic for a fixed seed; throws
// NumericError if no valid matrix is found within the budget.
CodingMatrix random_code(std::size_t n_classes, std::size_t n_partitions,
                         bool strict, std::uint64_t seed);

// One row per internal node in pre-order: -1 for classes in the left
// subtree, +1 for the right subtree, 0 outside the node.  Columns are
// indexed by leaf label, which must form exactly {0..n_leaves-1}.
CodingMatrix flatten_tree(const PartitionTree& tree);

}  // namespace mcpart
