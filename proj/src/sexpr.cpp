#include "kbqa/sexpr.hpp"

#include <algorithm>

#include "kbqa/errors.hpp"
#include "kbqa/util.hpp"

namespace kbqa {

namespace {

// ---------------------------------------------------------------------------
// Tokenizer
// ---------------------------------------------------------------------------

struct Token {
    enum class Type { LParen, RParen, Atom, End };
    Type type = Type::End;
    std::string text;
    std::size_t offset = 0;
};

bool is_delimiter(char c) {
    return c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '(') {
            tokens.push_back({Token::Type::LParen, "(", i});
            ++i;
            continue;
        }
        if (c == ')') {
            tokens.push_back({Token::Type::RParen, ")", i});
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (c == '"') {
            // Quoted lexical form; the closing quote may be followed by a
            // ^^kind suffix which belongs to the same token.
            ++i;
            while (i < text.size()) {
                if (text[i] == '\\' && i + 1 < text.size()) {
                    i += 2;
                    continue;
                }
                if (text[i] == '"') {
                    ++i;
                    break;
                }
                ++i;
            }
        }
        while (i < text.size() && !is_delimiter(text[i])) ++i;
        tokens.push_back({Token::Type::Atom, std::string(text.substr(start, i - start)), start});
    }
    tokens.push_back({Token::Type::End, "", text.size()});
    return tokens;
}

// ---------------------------------------------------------------------------
// Entity annotation block: "EXPR |entity|id label|id2 label2".  The marker is
// located outside quoted regions; everything after it is annotation payload.
// ---------------------------------------------------------------------------

std::size_t find_annotation_marker(std::string_view text) {
    bool in_quote = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quote) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_quote = false;
            }
            continue;
        }
        if (c == '"') {
            in_quote = true;
            continue;
        }
        if (c == '|' && text.substr(i, 8) == "|entity|") return i;
    }
    return std::string_view::npos;
}

std::map<std::string, std::string> parse_annotations(std::string_view payload,
                                                     std::size_t base_offset) {
    std::map<std::string, std::string> labels;
    std::size_t start = 0;
    while (start <= payload.size()) {
        std::size_t bar = payload.find('|', start);
        std::string_view chunk =
            bar == std::string_view::npos ? payload.substr(start) : payload.substr(start, bar - start);
        std::string piece = trim(chunk);
        if (!piece.empty() && piece != "entity") {
            std::size_t space = piece.find_first_of(" \t");
            std::string id = space == std::string::npos ? piece : piece.substr(0, space);
            std::string label = space == std::string::npos ? "" : trim(piece.substr(space + 1));
            if (id.empty()) {
                throw ParseError("bad entity annotation", base_offset + start);
            }
            labels[id] = label;
        }
        if (bar == std::string_view::npos) break;
        start = bar + 1;
    }
    return labels;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser
// ---------------------------------------------------------------------------

const char* kSetOps[] = {"AND", "JOIN", "COUNT", "ARGMIN", "ARGMAX"};
const char* kCmpOps[] = {"lt", "le", "gt", "ge"};

bool is_known_operator(const std::string& name) {
    for (const char* op : kSetOps) {
        if (name == op) return true;
    }
    for (const char* op : kCmpOps) {
        if (name == op) return true;
    }
    return name == "R";
}

std::optional<CmpOp> cmp_op_from_name(std::string_view name) {
    if (name == "lt") return CmpOp::Lt;
    if (name == "le") return CmpOp::Le;
    if (name == "gt") return CmpOp::Gt;
    if (name == "ge") return CmpOp::Ge;
    return std::nullopt;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    SExpr parse_root() {
        SExpr expr = parse_expr();
        const Token& tail = peek();
        if (tail.type != Token::Type::End) {
            throw ParseError("unexpected trailing content '" + tail.text + "'", tail.offset);
        }
        return expr;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& advance() { return tokens_[pos_++]; }

    [[noreturn]] void fail_eof() const {
        throw ParseError("unexpected end of input", peek().offset);
    }

    SExpr parse_expr() {
        const Token& tok = peek();
        switch (tok.type) {
            case Token::Type::End:
                fail_eof();
            case Token::Type::RParen:
                throw ParseError("unexpected ')'", tok.offset);
            case Token::Type::Atom: {
                const Token atom = advance();
                return make_atom(atom);
            }
            case Token::Type::LParen:
                break;
        }
        advance();  // '('
        const Token& head = peek();
        if (head.type == Token::Type::End) fail_eof();
        if (head.type != Token::Type::Atom) {
            throw ParseError("expected operator after '('", head.offset);
        }
        const Token op = advance();

        if (op.text == "AND") return parse_and(op);
        if (op.text == "JOIN") return parse_join();
        if (op.text == "COUNT") return parse_unary(SExprKind::Count);
        if (op.text == "ARGMIN") return parse_superlative(SExprKind::ArgMin);
        if (op.text == "ARGMAX") return parse_superlative(SExprKind::ArgMax);
        if (auto cmp = cmp_op_from_name(op.text)) return parse_cmp(*cmp);
        if (op.text == "R") {
            throw ParseError("(R rel) is only valid as the relation of JOIN", op.offset);
        }
        throw ParseError("unknown operator '" + op.text + "'", op.offset);
    }

    SExpr parse_and(const Token& op) {
        std::vector<SExpr> operands;
        while (peek().type != Token::Type::RParen) {
            if (peek().type == Token::Type::End) fail_eof();
            operands.push_back(parse_expr());
        }
        advance();  // ')'
        if (operands.size() < 2) {
            throw ParseError("AND needs at least 2 operands", op.offset);
        }
        // n-ary surface forms right-associate into binary nodes.
        SExpr node = std::move(operands.back());
        for (std::size_t i = operands.size() - 1; i-- > 0;) {
            SExpr parent;
            parent.kind = SExprKind::And;
            parent.children.push_back(std::move(operands[i]));
            parent.children.push_back(std::move(node));
            node = std::move(parent);
        }
        return node;
    }

    SExpr parse_join() {
        auto [relation, inverse] = parse_relation("JOIN");
        SExpr node;
        node.kind = SExprKind::Join;
        node.name = std::move(relation);
        node.inverse = inverse;
        node.children.push_back(parse_expr());
        expect_rparen();
        return node;
    }

    SExpr parse_unary(SExprKind kind) {
        SExpr node;
        node.kind = kind;
        node.children.push_back(parse_expr());
        expect_rparen();
        return node;
    }

    SExpr parse_superlative(SExprKind kind) {
        SExpr node;
        node.kind = kind;
        node.children.push_back(parse_expr());
        node.name = expect_relation_name();
        expect_rparen();
        return node;
    }

    SExpr parse_cmp(CmpOp op) {
        SExpr node;
        node.kind = SExprKind::Cmp;
        node.op = op;
        node.name = expect_relation_name();
        const Token& tok = peek();
        if (tok.type == Token::Type::End) fail_eof();
        if (tok.type != Token::Type::Atom) {
            throw ParseError("expected comparator bound", tok.offset);
        }
        const Token bound = advance();
        SExpr atom = make_atom(bound);
        if (atom.kind == SExprKind::LiteralAtom) {
            node.literal = atom.literal;
        } else if (atom.kind == SExprKind::Placeholder && atom.placeholder_literal) {
            // Literal placeholder in comparator bound position (template form).
            node.children.push_back(std::move(atom));
        } else {
            throw ParseError("comparator bound must be a literal with a ^^kind suffix",
                             bound.offset);
        }
        expect_rparen();
        return node;
    }

    std::pair<std::string, bool> parse_relation(const char* context) {
        const Token& tok = peek();
        if (tok.type == Token::Type::End) fail_eof();
        if (tok.type == Token::Type::LParen) {
            advance();
            const Token& head = peek();
            if (head.type == Token::Type::End) fail_eof();
            if (head.type != Token::Type::Atom || head.text != "R") {
                throw ParseError(std::string("expected (R rel) as the relation of ") + context,
                                 head.offset);
            }
            advance();
            std::string relation = expect_relation_name();
            expect_rparen();
            return {std::move(relation), true};
        }
        return {expect_relation_name(), false};
    }

    std::string expect_relation_name() {
        const Token& tok = peek();
        if (tok.type == Token::Type::End) fail_eof();
        if (tok.type != Token::Type::Atom) {
            throw ParseError("expected relation name", tok.offset);
        }
        const Token name = advance();
        if (name.text.find("^^") != std::string::npos || name.text[0] == '"' ||
            name.text[0] == '?') {
            throw ParseError("expected relation name, found '" + name.text + "'", name.offset);
        }
        if (is_known_operator(name.text)) {
            throw ParseError("operator '" + name.text + "' cannot be a relation name",
                             name.offset);
        }
        return name.text;
    }

    void expect_rparen() {
        const Token& tok = peek();
        if (tok.type == Token::Type::End) fail_eof();
        if (tok.type != Token::Type::RParen) {
            throw ParseError("expected ')', found '" + tok.text + "'", tok.offset);
        }
        advance();
    }

    SExpr make_atom(const Token& tok) const {
        const std::string& text = tok.text;
        if (text[0] == '?') {
            return make_placeholder(tok);
        }
        if (is_known_operator(text)) {
            throw ParseError("operator '" + text + "' used as an atom", tok.offset);
        }
        std::optional<Literal> literal;
        try {
            literal = parse_literal_token(text);
        } catch (const DataError& err) {
            throw ParseError(std::string("bad literal: ") + err.what(), tok.offset);
        }
        SExpr node;
        if (literal) {
            node.kind = SExprKind::LiteralAtom;
            node.literal = *literal;
            return node;
        }
        // Freebase-style machine ids mark entities; other dotted names are
        // schema classes.  The split must be decidable without a store.
        if ((text.size() > 2 && (text.rfind("m.", 0) == 0 || text.rfind("g.", 0) == 0))) {
            node.kind = SExprKind::EntityAtom;
        } else {
            node.kind = SExprKind::ClassAtom;
        }
        node.name = text;
        return node;
    }

    SExpr make_placeholder(const Token& tok) const {
        std::string_view body = std::string_view(tok.text).substr(1);
        if (body.empty()) {
            throw ParseError("empty placeholder", tok.offset);
        }
        SExpr node;
        node.kind = SExprKind::Placeholder;
        std::size_t colon = body.find(':');
        std::string_view head = colon == std::string_view::npos ? body : body.substr(0, colon);
        std::string_view hint = colon == std::string_view::npos ? "" : body.substr(colon + 1);
        if (auto kind = literal_kind_from_name(head)) {
            // "?float" style literal slot.
            node.placeholder_literal = true;
            node.placeholder_hint = std::string(head);
            return node;
        }
        if (head == "literal") {
            if (!literal_kind_from_name(hint)) {
                throw ParseError("literal placeholder needs a kind, e.g. ?literal:float",
                                 tok.offset);
            }
            node.placeholder_literal = true;
            node.placeholder_hint = std::string(hint);
            return node;
        }
        if (head == "entity") {
            node.placeholder_literal = false;
            node.placeholder_hint = std::string(hint);
            return node;
        }
        throw ParseError("unknown placeholder '" + tok.text + "'", tok.offset);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

void serialize_into(const SExpr& expr, std::string& out) {
    switch (expr.kind) {
        case SExprKind::ClassAtom:
        case SExprKind::EntityAtom:
            out += expr.name;
            return;
        case SExprKind::LiteralAtom:
            out += expr.literal.encoded();
            return;
        case SExprKind::Placeholder:
            out += '?';
            if (expr.placeholder_literal) {
                out += expr.placeholder_hint;
            } else {
                out += "entity";
                if (!expr.placeholder_hint.empty()) {
                    out += ':';
                    out += expr.placeholder_hint;
                }
            }
            return;
        case SExprKind::And:
            out += "(AND ";
            serialize_into(expr.children[0], out);
            out += ' ';
            serialize_into(expr.children[1], out);
            out += ')';
            return;
        case SExprKind::Join:
            out += "(JOIN ";
            if (expr.inverse) {
                out += "(R ";
                out += expr.name;
                out += ')';
            } else {
                out += expr.name;
            }
            out += ' ';
            serialize_into(expr.children[0], out);
            out += ')';
            return;
        case SExprKind::Count:
            out += "(COUNT ";
            serialize_into(expr.children[0], out);
            out += ')';
            return;
        case SExprKind::ArgMin:
        case SExprKind::ArgMax:
            out += expr.kind == SExprKind::ArgMin ? "(ARGMIN " : "(ARGMAX ";
            serialize_into(expr.children[0], out);
            out += ' ';
            out += expr.name;
            out += ')';
            return;
        case SExprKind::Cmp:
            out += '(';
            out += cmp_op_name(expr.op);
            out += ' ';
            out += expr.name;
            out += ' ';
            if (!expr.children.empty()) {
                serialize_into(expr.children[0], out);  // placeholder bound
            } else {
                out += expr.literal.encoded();
            }
            out += ')';
            return;
    }
}

void push_unique(std::vector<std::string>& vec, const std::string& name) {
    if (std::find(vec.begin(), vec.end(), name) == vec.end()) vec.push_back(name);
}

void analyze_walk(const SExpr& expr, Analysis& out) {
    switch (expr.kind) {
        case SExprKind::ClassAtom:
            push_unique(out.classes, expr.name);
            break;
        case SExprKind::EntityAtom:
            push_unique(out.entities, expr.name);
            break;
        case SExprKind::LiteralAtom:
        case SExprKind::Placeholder:
            break;
        case SExprKind::Join:
        case SExprKind::ArgMin:
        case SExprKind::ArgMax:
        case SExprKind::Cmp:
            push_unique(out.relations, expr.name);
            break;
        case SExprKind::And:
        case SExprKind::Count:
            break;
    }
    for (const SExpr& child : expr.children) analyze_walk(child, out);
}

int join_depth(const SExpr& expr) {
    int deepest = 0;
    for (const SExpr& child : expr.children) {
        deepest = std::max(deepest, join_depth(child));
    }
    return deepest + (expr.kind == SExprKind::Join ? 1 : 0);
}

bool contains_cmp(const SExpr& expr) {
    if (expr.kind == SExprKind::Cmp) return true;
    for (const SExpr& child : expr.children) {
        if (contains_cmp(child)) return true;
    }
    return false;
}

void validate_walk(const SExpr& expr, const SchemaCatalog& schema, int depth,
                   std::vector<Diagnostic>& diags) {
    auto add = [&](Diagnostic::Severity severity, std::string message) {
        diags.push_back({severity, std::move(message), serialize_sexpr(expr)});
    };
    auto check_relation = [&](const std::string& rel) {
        if (!schema.relations.count(rel)) {
            add(Diagnostic::Severity::Name, "unknown relation '" + rel + "'");
            return false;
        }
        return true;
    };

    switch (expr.kind) {
        case SExprKind::ClassAtom:
            if (!schema.classes.count(expr.name)) {
                add(Diagnostic::Severity::Name, "unknown class '" + expr.name + "'");
            }
            break;
        case SExprKind::EntityAtom:
        case SExprKind::LiteralAtom:
            break;
        case SExprKind::Placeholder:
            add(Diagnostic::Severity::Structural, "ungrounded placeholder");
            break;
        case SExprKind::And:
            for (const SExpr& child : expr.children) {
                if (child.kind == SExprKind::Count) {
                    add(Diagnostic::Severity::Structural, "AND operand is not set-valued");
                }
            }
            break;
        case SExprKind::Join:
            check_relation(expr.name);
            if (expr.children[0].kind == SExprKind::LiteralAtom) {
                add(Diagnostic::Severity::Warning, "JOIN over a literal operand");
            }
            break;
        case SExprKind::Count:
            if (depth > 0) {
                add(Diagnostic::Severity::Structural, "COUNT below the root");
            }
            break;
        case SExprKind::ArgMin:
        case SExprKind::ArgMax:
            if (depth > 0) {
                add(Diagnostic::Severity::Structural, "superlative below the root");
            }
            if (check_relation(expr.name) && !schema.numeric_relations.count(expr.name)) {
                add(Diagnostic::Severity::Name,
                    "non-numeric relation in superlative: '" + expr.name + "'");
            }
            break;
        case SExprKind::Cmp:
            if (depth == 0) {
                add(Diagnostic::Severity::Warning,
                    "comparative at the root selects subjects by value alone");
            }
            if (!expr.children.empty()) {
                add(Diagnostic::Severity::Structural, "ungrounded comparator bound");
            } else if (!expr.literal.is_numeric()) {
                add(Diagnostic::Severity::Structural, "comparator bound must be numeric");
            }
            if (check_relation(expr.name) && !schema.numeric_relations.count(expr.name)) {
                add(Diagnostic::Severity::Name,
                    "non-numeric relation in comparator: '" + expr.name + "'");
            }
            break;
    }
    for (const SExpr& child : expr.children) {
        validate_walk(child, schema, depth + 1, diags);
    }
}

}  // namespace

std::string_view cmp_op_name(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "lt";
        case CmpOp::Le: return "le";
        case CmpOp::Gt: return "gt";
        case CmpOp::Ge: return "ge";
    }
    return "lt";
}

bool SExpr::operator==(const SExpr& other) const {
    return kind == other.kind && name == other.name && inverse == other.inverse &&
           op == other.op && literal == other.literal &&
           placeholder_literal == other.placeholder_literal &&
           placeholder_hint == other.placeholder_hint && children == other.children;
}

ParsedExpr parse_sexpr(std::string_view text) {
    ParsedExpr result;
    std::string_view body = text;
    const std::size_t marker = find_annotation_marker(text);
    if (marker != std::string_view::npos) {
        result.entity_labels = parse_annotations(text.substr(marker + 8), marker + 8);
        body = text.substr(0, marker);
    }
    Parser parser(tokenize(body));
    result.expr = parser.parse_root();
    return result;
}

std::string serialize_sexpr(const SExpr& expr) {
    std::string out;
    serialize_into(expr, out);
    return out;
}

std::string canonical_form(std::string_view text) {
    return serialize_sexpr(parse_sexpr(text).expr);
}

std::string_view function_tag_name(FunctionTag tag) {
    switch (tag) {
        case FunctionTag::None: return "none";
        case FunctionTag::Count: return "count";
        case FunctionTag::Comparative: return "comparative";
        case FunctionTag::Superlative: return "superlative";
    }
    return "none";
}

Analysis analyze(const SExpr& expr) {
    Analysis out;
    analyze_walk(expr, out);
    out.hops = join_depth(expr);
    // Exactly one tag: a comparator anywhere wins, then a root function.
    if (contains_cmp(expr)) {
        out.function = FunctionTag::Comparative;
    } else if (expr.kind == SExprKind::ArgMin || expr.kind == SExprKind::ArgMax) {
        out.function = FunctionTag::Superlative;
    } else if (expr.kind == SExprKind::Count) {
        out.function = FunctionTag::Count;
    } else {
        out.function = FunctionTag::None;
    }
    return out;
}

std::vector<Diagnostic> validate(const SExpr& expr, const SchemaCatalog& schema) {
    std::vector<Diagnostic> diags;
    validate_walk(expr, schema, 0, diags);
    return diags;
}

bool has_structural_diagnostics(const std::vector<Diagnostic>& diags) {
    for (const Diagnostic& d : diags) {
        if (d.severity == Diagnostic::Severity::Structural) return true;
    }
    return false;
}

}  // namespace kbqa
