#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcpart/coding_matrix.hpp"
#include "mcpart/errors.hpp"

namespace mcpart {

// Half-open byte range with the line/column of its start, for diagnostics.
struct SourceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 1;
    int column = 1;
};

struct ParseError : DataError {
    ParseError(const std::string& message, SourceSpan where)
        : DataError(message + " (line " + std::to_string(where.line) + ", column " +
                    std::to_string(where.column) + ")"),
          span(where) {}
    SourceSpan span;
};

// One line of a partition list: "name left-classes / right-classes;".
// Class values are relative to the children of the enclosing node.
struct Partition {
    std::string name;
    std::vector<int> left;
    std::vector<int> right;
    SourceSpan span;
};

// AST node of a control specification.  Exactly one of three shapes:
//   leaf            cls >= 0, no children
//   named binary    name set, two children
//   partition list  partitions set, children are the partitioned groups
struct Branch {
    int cls = -1;
    std::string name;
    std::vector<Partition> partitions;
    std::vector<Branch> children;
    SourceSpan span;

    bool is_leaf() const { return children.empty(); }
    bool is_named_binary() const { return !is_leaf() && partitions.empty(); }
    bool is_partition_list() const { return !partitions.empty(); }
};

bool operator==(const Partition& a, const Partition& b);
bool operator==(const Branch& a, const Branch& b);  // structural, spans ignored

struct ControlSpec {
    Branch root;
    friend bool operator==(const ControlSpec& a, const ControlSpec& b) {
        return a.root == b.root;
    }
};

// Parses control-language text into a validated AST.  Whitespace between
// tokens is free-form, "#" comments run to end of line, and CRLF input is
// accepted.  Throws ParseError on syntax or validation problems.
ControlSpec parse_control(std::string_view text);

// Canonical text form: two-space indentation, one partition per line,
// all-leaf child lists printed inline.  parse_control(print_control(s))
// is structurally equal to s.
std::string print_control(const ControlSpec& spec);

struct FlattenResult {
    CodingMatrix matrix;             // columns follow leaf order
    std::vector<std::string> names;  // one binary name per row
    std::vector<int> labels;         // column -> absolute class label
};

// Flattens the hierarchy into a single coding matrix, rows in pre-order,
// relative partition classes mapped through the child subtrees.
FlattenResult to_coding_matrix(const ControlSpec& spec);

// Wraps a partition tree as a control spec of named binaries.  Node names are
// prefix plus ".00"/".01" path segments (left/right) from the root.
ControlSpec from_tree(const PartitionTree& tree, const std::string& prefix);

// Non-hierarchical spec for an explicit coding matrix: one partition per row
// plus a flat list of class leaves.
ControlSpec spec_from_matrix(const CodingMatrix& matrix,
                             const std::vector<std::string>& names,
                             const std::vector<int>& labels);

// True when every node is a named binary (no partition lists), i.e. the spec
// is a plain decision tree.
bool is_pure_tree(const ControlSpec& spec);

// Extracts the partition tree from a pure tree spec; throws
// std::invalid_argument otherwise.
PartitionTree tree_from_spec(const ControlSpec& spec);

}  // namespace mcpart
