#include "gmpforge/gmp_text.hpp"

#include <cctype>
#include <charconv>
#include <sstream>
#include <vector>

#include "gmpforge/error.hpp"

namespace gmpforge {

namespace {

// ---- writing ---------------------------------------------------------------

std::string quote_text(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_tree(const TreeNode& node, std::string& out) {
    switch (node.op) {
        case NodeOp::value:
            switch (node.kind) {
                case ValueKind::Numeric:
                    out += "(num " + std::to_string(node.payload.as_number()) + ")";
                    return;
                case ValueKind::Text:
                    out += "(txt " + quote_text(node.payload.as_text()) + ")";
                    return;
                case ValueKind::Boolean:
                    out += node.payload.as_boolean() ? "(bool true)" : "(bool false)";
                    return;
            }
            return;
        case NodeOp::random:
            out += std::string("(rand ") + kind_name(node.kind) + ")";
            return;
        case NodeOp::program_response:
            out += std::string("(response ") + kind_name(node.kind) + ")";
            return;
        case NodeOp::output_failure:
            out += "(outfail)";
            return;
        case NodeOp::last_output:
            out += "(lastout " + std::to_string(node.main_index) + " " +
                   kind_name(node.kind) + ")";
            return;
        case NodeOp::execution_count:
            out += "(execcount)";
            return;
        case NodeOp::adf_call:
            out += std::string("(adfcall ") + kind_name(node.kind) + ")";
            return;
        default:
            break;
    }
    out += "(";
    out += op_name(node.op);
    for (const auto& child : node.children) {
        out.push_back(' ');
        write_tree(*child, out);
    }
    out.push_back(')');
}

// ---- reading ---------------------------------------------------------------

struct Sexp {
    bool is_list = false;
    bool is_string = false;
    std::string atom;
    std::vector<Sexp> items;
};

class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    Sexp read() {
        Sexp e = read_expr();
        skip_space();
        if (pos_ != text_.size()) {
            throw ParseError("trailing characters after expression");
        }
        return e;
    }

private:
    void skip_space() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    Sexp read_expr() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Sexp list;
            list.is_list = true;
            while (true) {
                skip_space();
                if (pos_ >= text_.size()) throw ParseError("missing closing paren");
                if (text_[pos_] == ')') {
                    ++pos_;
                    return list;
                }
                list.items.push_back(read_expr());
            }
        }
        if (c == ')') throw ParseError("unexpected closing paren");
        if (c == '"') return read_string();
        Sexp atom;
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')') {
            ++pos_;
        }
        atom.atom = text_.substr(start, pos_ - start);
        return atom;
    }

    Sexp read_string() {
        Sexp s;
        s.is_string = true;
        ++pos_;
        while (true) {
            if (pos_ >= text_.size()) throw ParseError("unterminated string");
            char c = text_[pos_++];
            if (c == '"') return s;
            if (c == '\\') {
                if (pos_ >= text_.size()) throw ParseError("unterminated escape");
                c = text_[pos_++];
            }
            s.atom.push_back(c);
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

const std::string& expect_atom(const Sexp& e, const char* what) {
    if (e.is_list) throw ParseError(std::string("expected ") + what);
    return e.atom;
}

ValueKind expect_kind(const Sexp& e) {
    return kind_from_name(expect_atom(e, "a value kind"));
}

std::int64_t expect_int(const Sexp& e) {
    const std::string& s = expect_atom(e, "an integer");
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ParseError("expected an integer, found \"" + s + "\"");
    }
    return v;
}

void expect_arity(const Sexp& e, std::size_t args, const char* head) {
    if (e.items.size() != args + 1) {
        throw ParseError(std::string(head) + " expects " + std::to_string(args) +
                         " arguments");
    }
}

std::unique_ptr<TreeNode> build_tree(const Sexp& e) {
    if (!e.is_list || e.items.empty() || e.items[0].is_list) {
        throw ParseError("expected an operation list");
    }
    const std::string& head = e.items[0].atom;
    auto node = std::make_unique<TreeNode>();

    auto child_at = [&](std::size_t i) { return build_tree(e.items[i + 1]); };
    auto all_children = [&]() {
        for (std::size_t i = 1; i < e.items.size(); ++i) {
            node->children.push_back(build_tree(e.items[i]));
        }
    };

    if (head == "num") {
        expect_arity(e, 1, "num");
        node->op = NodeOp::value;
        node->kind = ValueKind::Numeric;
        node->payload = RuntimeValue::number(expect_int(e.items[1]));
        return node;
    }
    if (head == "txt") {
        expect_arity(e, 1, "txt");
        if (!e.items[1].is_string) throw ParseError("txt expects a quoted string");
        node->op = NodeOp::value;
        node->kind = ValueKind::Text;
        node->payload = RuntimeValue::text(e.items[1].atom);
        return node;
    }
    if (head == "bool") {
        expect_arity(e, 1, "bool");
        const std::string& v = expect_atom(e.items[1], "true or false");
        if (v != "true" && v != "false") throw ParseError("bool expects true or false");
        node->op = NodeOp::value;
        node->kind = ValueKind::Boolean;
        node->payload = RuntimeValue::boolean(v == "true");
        return node;
    }
    if (head == "rand") {
        expect_arity(e, 1, "rand");
        node->op = NodeOp::random;
        node->kind = expect_kind(e.items[1]);
        return node;
    }
    if (head == "response") {
        expect_arity(e, 1, "response");
        node->op = NodeOp::program_response;
        node->kind = expect_kind(e.items[1]);
        return node;
    }
    if (head == "outfail") {
        expect_arity(e, 0, "outfail");
        node->op = NodeOp::output_failure;
        node->kind = ValueKind::Boolean;
        return node;
    }
    if (head == "lastout") {
        expect_arity(e, 2, "lastout");
        node->op = NodeOp::last_output;
        std::int64_t index = expect_int(e.items[1]);
        if (index < 0) throw ParseError("lastout index must be non-negative");
        node->main_index = static_cast<int>(index);
        node->kind = expect_kind(e.items[2]);
        return node;
    }
    if (head == "execcount") {
        expect_arity(e, 0, "execcount");
        node->op = NodeOp::execution_count;
        node->kind = ValueKind::Numeric;
        return node;
    }
    if (head == "adfcall") {
        expect_arity(e, 1, "adfcall");
        node->op = NodeOp::adf_call;
        node->kind = expect_kind(e.items[1]);
        return node;
    }

    if (head == "add") {
        expect_arity(e, 2, "add");
        node->op = NodeOp::add;
        all_children();
        if (node->children[0]->kind != node->children[1]->kind) {
            throw ParseError("add operands must share a kind");
        }
        node->kind = node->children[0]->kind;
        node->child_kind = node->kind;
        return node;
    }
    if (head == "div" || head == "mul" || head == "sub") {
        expect_arity(e, 2, head.c_str());
        node->op = head == "div"   ? NodeOp::division
                   : head == "mul" ? NodeOp::multiplication
                                   : NodeOp::subtraction;
        all_children();
        for (const auto& c : node->children) {
            if (c->kind != ValueKind::Numeric) {
                throw ParseError(head + " operands must be numeric");
            }
        }
        node->kind = ValueKind::Numeric;
        node->child_kind = ValueKind::Numeric;
        return node;
    }
    if (head == "if") {
        expect_arity(e, 3, "if");
        node->op = NodeOp::if_statement;
        all_children();
        if (node->children[0]->kind != ValueKind::Boolean) {
            throw ParseError("if condition must be boolean");
        }
        if (node->children[1]->kind != node->children[2]->kind) {
            throw ParseError("if branches must share a kind");
        }
        node->kind = node->children[1]->kind;
        node->child_kind = node->kind;
        return node;
    }
    if (head == "loop") {
        expect_arity(e, 2, "loop");
        node->op = NodeOp::loop;
        all_children();
        if (node->children[0]->kind != ValueKind::Boolean) {
            throw ParseError("loop condition must be boolean");
        }
        node->kind = node->children[1]->kind;
        node->child_kind = node->kind;
        return node;
    }
    if (head == "len") {
        expect_arity(e, 1, "len");
        node->op = NodeOp::length_of;
        node->children.push_back(child_at(0));
        if (node->children[0]->kind == ValueKind::Boolean) {
            throw ParseError("len takes text or numeric");
        }
        node->kind = ValueKind::Numeric;
        node->child_kind = node->children[0]->kind;
        return node;
    }
    if (head == "eq" || head == "ne" || head == "gt" || head == "lt") {
        expect_arity(e, 2, head.c_str());
        node->op = head == "eq"   ? NodeOp::equals
                   : head == "ne" ? NodeOp::not_equal
                   : head == "gt" ? NodeOp::greater_than
                                  : NodeOp::less_than;
        all_children();
        if (node->children[0]->kind != node->children[1]->kind) {
            throw ParseError(head + " operands must share a kind");
        }
        node->child_kind = node->children[0]->kind;
        if ((head == "gt" || head == "lt") && node->child_kind == ValueKind::Text) {
            throw ParseError("ordering takes numeric or boolean operands");
        }
        node->kind = ValueKind::Boolean;
        return node;
    }
    if (head == "nonnull") {
        expect_arity(e, 1, "nonnull");
        node->op = NodeOp::not_null;
        node->children.push_back(child_at(0));
        if (node->children[0]->kind != ValueKind::Text) {
            throw ParseError("nonnull takes text");
        }
        node->kind = ValueKind::Boolean;
        node->child_kind = ValueKind::Text;
        return node;
    }
    throw ParseError("unknown operation \"" + head + "\"");
}

void write_pretty(const TreeNode& node, int indent, std::string& out) {
    if (node.children.empty()) {
        write_tree(node, out);
        return;
    }
    out.push_back('(');
    out += op_name(node.op);
    for (const auto& child : node.children) {
        out.push_back('\n');
        out.append(static_cast<std::size_t>(indent + 2), ' ');
        write_pretty(*child, indent + 2, out);
    }
    out.push_back(')');
}

const Sexp* find_clause(const Sexp& root, const std::string& head) {
    for (std::size_t i = 1; i < root.items.size(); ++i) {
        const Sexp& item = root.items[i];
        if (item.is_list && !item.items.empty() && !item.items[0].is_list &&
            item.items[0].atom == head) {
            return &item;
        }
    }
    return nullptr;
}

} // namespace

std::string serialize_tree(const TreeNode& node) {
    std::string out;
    write_tree(node, out);
    return out;
}

std::string serialize_gmp(const GmpIndividual& individual) {
    std::string out = "(gmp (returns ";
    out += kind_name(individual.signature.return_kind);
    out += ") (adf ";
    out += kind_name(individual.adf_kind);
    out.push_back(' ');
    write_tree(*individual.adf.root, out);
    out += ") (mains";
    for (std::size_t i = 0; i < individual.mains.size(); ++i) {
        out += " (main ";
        out += kind_name(individual.signature.param_kinds[i]);
        out.push_back(' ');
        write_tree(*individual.mains[i].root, out);
        out.push_back(')');
    }
    out += "))";
    return out;
}

std::unique_ptr<TreeNode> parse_tree(const std::string& text) {
    Reader reader(text);
    return build_tree(reader.read());
}

GmpIndividual parse_gmp(const std::string& text) {
    Reader reader(text);
    Sexp root = reader.read();
    if (!root.is_list || root.items.empty() || root.items[0].is_list ||
        root.items[0].atom != "gmp") {
        throw ParseError("expected a (gmp ...) form");
    }

    const Sexp* returns = find_clause(root, "returns");
    const Sexp* adf = find_clause(root, "adf");
    const Sexp* mains = find_clause(root, "mains");
    if (returns == nullptr || adf == nullptr || mains == nullptr) {
        throw ParseError("a gmp form needs returns, adf and mains clauses");
    }
    if (returns->items.size() != 2) throw ParseError("returns expects one kind");
    if (adf->items.size() != 3) throw ParseError("adf expects a kind and a tree");

    GmpIndividual individual;
    individual.signature.return_kind = expect_kind(returns->items[1]);
    individual.adf_kind = expect_kind(adf->items[1]);
    individual.adf = ProgramTree(build_tree(adf->items[2]));

    for (std::size_t i = 1; i < mains->items.size(); ++i) {
        const Sexp& main = mains->items[i];
        if (!main.is_list || main.items.size() != 3 || main.items[0].is_list ||
            main.items[0].atom != "main") {
            throw ParseError("each main expects a kind and a tree");
        }
        individual.signature.param_kinds.push_back(expect_kind(main.items[1]));
        individual.mains.emplace_back(build_tree(main.items[2]));
    }

    reset_state(individual);
    type_check(individual);
    return individual;
}

std::string pretty_print_tree(const TreeNode& node) {
    std::string out;
    write_pretty(node, 0, out);
    out.push_back('\n');
    return out;
}

std::string pretty_print_gmp(const GmpIndividual& individual) {
    std::string out = "(gmp\n  (returns ";
    out += kind_name(individual.signature.return_kind);
    out += ")\n  (adf ";
    out += kind_name(individual.adf_kind);
    out += "\n    ";
    write_pretty(*individual.adf.root, 4, out);
    out += ")\n  (mains";
    for (std::size_t i = 0; i < individual.mains.size(); ++i) {
        out += "\n    (main ";
        out += kind_name(individual.signature.param_kinds[i]);
        out += "\n      ";
        write_pretty(*individual.mains[i].root, 6, out);
        out.push_back(')');
    }
    out += "))\n";
    return out;
}

} // namespace gmpforge
