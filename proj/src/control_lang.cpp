#include "mcpart/control_lang.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mcpart {

bool operator==(const Partition& a, const Partition& b) {
    return a.name == b.name && a.left == b.left && a.right == b.right;
}

bool operator==(const Branch& a, const Branch& b) {
    return a.cls == b.cls && a.name == b.name && a.partitions == b.partitions &&
           a.children == b.children;
}

namespace {

enum class TokKind { word, lbrace, rbrace, slash, semi, eof };

struct Token {
    TokKind kind = TokKind::eof;
    std::string text;
    SourceSpan span;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token next() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        skip_blank();
        current_.span = here();
        if (pos_ >= text_.size()) {
            current_.kind = TokKind::eof;
            current_.text.clear();
            return;
        }
        const char c = text_[pos_];
        if (c == '{' || c == '}' || c == '/' || c == ';') {
            current_.kind = c == '{'   ? TokKind::lbrace
                            : c == '}' ? TokKind::rbrace
                            : c == '/' ? TokKind::slash
                                       : TokKind::semi;
            current_.text = c;
            step();
            current_.span.end = pos_;
            return;
        }
        current_.kind = TokKind::word;
        current_.text.clear();
        while (pos_ < text_.size() && !is_delimiter(text_[pos_])) {
            current_.text += text_[pos_];
            step();
        }
        current_.span.end = pos_;
    }

    static bool is_delimiter(char c) {
        return c == '{' || c == '}' || c == '/' || c == ';' || c == '#' ||
               std::isspace(static_cast<unsigned char>(c));
    }

    void skip_blank() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') step();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                step();
            } else {
                break;
            }
        }
    }

    void step() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    SourceSpan here() const { return {pos_, pos_, line_, column_}; }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    Token current_;
};

bool is_integer_token(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

int to_class_value(const Token& tok) {
    try {
        return std::stoi(tok.text);
    } catch (const std::out_of_range&) {
        throw ParseError("class value out of range: " + tok.text, tok.span);
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) {}

    ControlSpec parse() {
        ControlSpec spec;
        spec.root = parse_branch();
        if (spec.root.is_leaf())
            throw ParseError("top-level branch must be a model with children", spec.root.span);
        expect(TokKind::eof, "end of input");
        validate(spec.root);
        return spec;
    }

private:
    Branch parse_branch() {
        const Token tok = expect(TokKind::word, "model name or class value");
        Branch b;
        b.span = tok.span;
        if (is_integer_token(tok.text)) {
            b.cls = to_class_value(tok);
            return b;
        }
        if (lex_.peek().kind == TokKind::lbrace) {
            b.name = tok.text;
        } else {
            b.partitions.push_back(parse_partition_body(tok));
            while (lex_.peek().kind != TokKind::lbrace) {
                const Token name = expect(TokKind::word, "partition name or '{'");
                b.partitions.push_back(parse_partition_body(name));
            }
        }
        expect(TokKind::lbrace, "'{'");
        while (lex_.peek().kind != TokKind::rbrace) {
            if (lex_.peek().kind == TokKind::eof)
                throw ParseError("unterminated branch list; expected '}'", lex_.peek().span);
            b.children.push_back(parse_branch());
        }
        expect(TokKind::rbrace, "'}'");
        if (b.children.empty())
            throw ParseError("branch list must contain at least one branch", b.span);
        b.span.end = lex_.peek().span.begin;
        return b;
    }

    Partition parse_partition_body(const Token& name) {
        Partition p;
        p.name = name.text;
        p.span = name.span;
        p.left = parse_class_list("class value");
        expect(TokKind::slash, "'/'");
        p.right = parse_class_list("class value after '/'");
        const Token semi = expect(TokKind::semi, "';'");
        p.span.end = semi.span.end;
        return p;
    }

    std::vector<int> parse_class_list(const char* what) {
        std::vector<int> out;
        while (lex_.peek().kind == TokKind::word && is_integer_token(lex_.peek().text))
            out.push_back(to_class_value(lex_.next()));
        if (out.empty())
            throw ParseError(std::string("expected at least one ") + what, lex_.peek().span);
        return out;
    }

    Token expect(TokKind kind, const char* what) {
        if (lex_.peek().kind != kind)
            throw ParseError(std::string("expected ") + what + ", got '" +
                                 (lex_.peek().kind == TokKind::eof ? "<eof>" : lex_.peek().text) +
                                 "'",
                             lex_.peek().span);
        return lex_.next();
    }

    // Whole-tree checks: named binaries have exactly two children, partition
    // classes are in range and the two sides disjoint, binary names and
    // absolute leaf labels are unique.
    void validate(const Branch& root) {
        std::set<int> leaf_labels;
        std::set<std::string> names;
        check_node(root, leaf_labels, names);
    }

    void check_node(const Branch& b, std::set<int>& leaf_labels,
                    std::set<std::string>& names) {
        if (b.is_leaf()) {
            if (!leaf_labels.insert(b.cls).second)
                throw ParseError("duplicate absolute class " + std::to_string(b.cls), b.span);
            return;
        }
        if (b.is_named_binary()) {
            if (b.children.size() != 2)
                throw ParseError("named binary '" + b.name + "' must have exactly 2 branches, has " +
                                     std::to_string(b.children.size()),
                                 b.span);
            if (!names.insert(b.name).second)
                throw ParseError("duplicate binary name '" + b.name + "'", b.span);
        } else {
            const int k = static_cast<int>(b.children.size());
            for (const Partition& p : b.partitions) {
                if (!names.insert(p.name).second)
                    throw ParseError("duplicate binary name '" + p.name + "'", p.span);
                std::set<int> seen;
                for (const auto* side : {&p.left, &p.right})
                    for (int cls : *side) {
                        if (cls < 0 || cls >= k)
                            throw ParseError("partition '" + p.name + "' uses class " +
                                                 std::to_string(cls) + " but the group has " +
                                                 std::to_string(k) + " branches",
                                             p.span);
                        if (!seen.insert(cls).second)
                            throw ParseError("partition '" + p.name +
                                                 "' lists class " + std::to_string(cls) +
                                                 " on both sides or twice",
                                             p.span);
                    }
            }
        }
        for (const Branch& child : b.children) check_node(child, leaf_labels, names);
    }

    Lexer lex_;
};

}  // namespace

ControlSpec parse_control(std::string_view text) { return Parser(text).parse(); }

namespace {

bool all_children_leaves(const Branch& b) {
    return std::all_of(b.children.begin(), b.children.end(),
                       [](const Branch& c) { return c.is_leaf(); });
}

void print_branch(const Branch& b, int depth, std::ostringstream& out) {
    const std::string ind(2 * static_cast<std::size_t>(depth), ' ');
    if (b.is_leaf()) {
        out << ind << b.cls << '\n';
        return;
    }
    std::string open = "{";
    if (b.is_named_binary())
        open = b.name + " {";
    else
        for (const Partition& p : b.partitions) {
            out << ind << p.name;
            for (int c : p.left) out << ' ' << c;
            out << " /";
            for (int c : p.right) out << ' ' << c;
            out << ";\n";
        }
    if (all_children_leaves(b)) {
        out << ind << open;
        for (std::size_t i = 0; i < b.children.size(); ++i)
            out << (i ? " " : "") << b.children[i].cls;
        out << "}\n";
        return;
    }
    out << ind << open << '\n';
    for (const Branch& child : b.children) print_branch(child, depth + 1, out);
    out << ind << "}\n";
}

}  // namespace

std::string print_control(const ControlSpec& spec) {
    if (spec.root.is_leaf())
        throw std::invalid_argument("cannot print a bare class as a control spec");
    std::ostringstream out;
    print_branch(spec.root, 0, out);
    return out.str();
}

namespace {

std::vector<int> collect_leaves(const Branch& b) {
    if (b.is_leaf()) return {b.cls};
    std::vector<int> out;
    for (const Branch& child : b.children) {
        auto sub = collect_leaves(child);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

// column range [first, last) of the flattened matrix covered by each branch
struct FlattenWalk {
    CodingMatrix* matrix;
    std::vector<std::string>* names;
    std::size_t next_row = 0;

    void emit(const Branch& b, std::size_t first_col) {
        if (b.is_leaf()) return;
        // column spans of the children, in order
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        std::size_t col = first_col;
        for (const Branch& child : b.children) {
            const std::size_t width = child.is_leaf() ? 1 : collect_leaves(child).size();
            spans.emplace_back(col, col + width);
            col += width;
        }
        if (b.is_named_binary()) {
            const std::size_t row = next_row++;
            names->at(row) = b.name;
            for (std::size_t j = spans[0].first; j < spans[0].second; ++j)
                matrix->set(row, j, -1);
            for (std::size_t j = spans[1].first; j < spans[1].second; ++j)
                matrix->set(row, j, +1);
        } else {
            for (const Partition& p : b.partitions) {
                const std::size_t row = next_row++;
                names->at(row) = p.name;
                // bounds-checked in case the spec was built by hand and
                // never went through parse-time validation
                for (int local : p.left)
                    for (std::size_t j = spans.at(static_cast<std::size_t>(local)).first;
                         j < spans.at(static_cast<std::size_t>(local)).second; ++j)
                        matrix->set(row, j, -1);
                for (int local : p.right)
                    for (std::size_t j = spans.at(static_cast<std::size_t>(local)).first;
                         j < spans.at(static_cast<std::size_t>(local)).second; ++j)
                        matrix->set(row, j, +1);
            }
        }
        for (std::size_t i = 0; i < b.children.size(); ++i)
            emit(b.children[i], spans[i].first);
    }
};

std::size_t count_rows(const Branch& b) {
    if (b.is_leaf()) return 0;
    std::size_t n = b.is_named_binary() ? 1 : b.partitions.size();
    for (const Branch& child : b.children) n += count_rows(child);
    return n;
}

}  // namespace

FlattenResult to_coding_matrix(const ControlSpec& spec) {
    FlattenResult result;
    result.labels = collect_leaves(spec.root);
    const std::size_t n_rows = count_rows(spec.root);
    result.matrix = CodingMatrix(n_rows, result.labels.size());
    result.names.resize(n_rows);
    FlattenWalk walk{&result.matrix, &result.names};
    walk.emit(spec.root, 0);
    return result;
}

namespace {

Branch branch_from_tree(const PartitionTree& node, const std::string& name) {
    Branch b;
    if (node.is_leaf()) {
        b.cls = node.cls;
        return b;
    }
    b.name = name;
    b.children.push_back(branch_from_tree(node.left(), name + ".00"));
    b.children.push_back(branch_from_tree(node.right(), name + ".01"));
    return b;
}

}  // namespace

ControlSpec from_tree(const PartitionTree& tree, const std::string& prefix) {
    if (tree.is_leaf()) throw std::invalid_argument("from_tree: tree must have a split");
    return ControlSpec{branch_from_tree(tree, prefix)};
}

ControlSpec spec_from_matrix(const CodingMatrix& matrix,
                             const std::vector<std::string>& names,
                             const std::vector<int>& labels) {
    if (names.size() != matrix.n_partitions())
        throw std::invalid_argument("spec_from_matrix: one name per row required");
    if (labels.size() != matrix.n_classes())
        throw std::invalid_argument("spec_from_matrix: one label per column required");
    ControlSpec spec;
    Branch& root = spec.root;
    for (std::size_t i = 0; i < matrix.n_partitions(); ++i) {
        Partition p;
        p.name = names[i];
        for (std::size_t j = 0; j < matrix.n_classes(); ++j) {
            if (matrix.at(i, j) == -1) p.left.push_back(static_cast<int>(j));
            if (matrix.at(i, j) == +1) p.right.push_back(static_cast<int>(j));
        }
        if (p.left.empty() || p.right.empty())
            throw std::invalid_argument("spec_from_matrix: row " + std::to_string(i) +
                                        " has an empty side");
        root.partitions.push_back(std::move(p));
    }
    for (int label : labels) {
        Branch leaf;
        leaf.cls = label;
        root.children.push_back(std::move(leaf));
    }
    return spec;
}

namespace {

bool branch_is_pure_tree(const Branch& b) {
    if (b.is_leaf()) return true;
    if (!b.is_named_binary()) return false;
    return std::all_of(b.children.begin(), b.children.end(), branch_is_pure_tree);
}

PartitionTree tree_from_branch(const Branch& b) {
    if (b.is_leaf()) return PartitionTree::leaf(b.cls);
    auto t = PartitionTree::internal(tree_from_branch(b.children[0]),
                                     tree_from_branch(b.children[1]), b.name);
    return t;
}

}  // namespace

bool is_pure_tree(const ControlSpec& spec) {
    return !spec.root.is_leaf() && branch_is_pure_tree(spec.root);
}

PartitionTree tree_from_spec(const ControlSpec& spec) {
    if (!is_pure_tree(spec))
        throw std::invalid_argument("control spec is not a pure decision tree");
    return tree_from_branch(spec.root);
}

}  // namespace mcpart
